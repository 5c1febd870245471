//! The acceptance suite: ten end-to-end checks over `Γ`, the finite builtin
//! amalgams and Bass–Serre balls, plus the seeded samplers they use.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amalgam::{Side, Syllable};
use crate::bass_serre::{act, build_ball, cylinder_fix_check, fixator_membership, TreeVertex};
use crate::finite::{builtin_spec, quotient_amalgam, FiniteAmalgam};
use crate::gamma::{
    defining_relations, factor_inv, factor_mul, gamma, gamma_prime_generators, in_half_tree_kernel,
    remark_identity_suite, theta_nf, theta_word, word_to_letters, CosetTag, GammaElement, GammaFactorElement,
    Gen, Mirror, ProductSubgroup, ThetaValue,
};
use crate::invariants::{
    c_chain_truncated, classify_finite_h, conjugate_out, free_pair_check, interior_generation_check,
    k0_truncated, k0k1_fixed_point, k0k1_relation_check, kernel_truncated, verify_conjugation, ConjugateOut,
    WitnessSearch, DEFAULT_SEARCH_BUDGET,
};
use crate::portrait::{BitWord, Portrait};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A portrait with each address of length `1..=max_depth` swapped with probability 1/2.
pub fn random_portrait(rng: &mut impl Rng, max_depth: usize) -> Portrait {
    Portrait::from_swaps(BitWord::up_to(max_depth).filter(|w| !w.is_empty() && rng.gen_bool(0.5)))
}

/// A portrait with a few swaps at addresses of length `1..=max_depth`.
pub fn sparse_portrait(rng: &mut impl Rng, max_depth: usize, swaps: usize) -> Portrait {
    let n = rng.gen_range(0..=swaps);
    Portrait::from_swaps((0..n).map(|_| random_address(rng, max_depth)))
}

pub fn random_address(rng: &mut impl Rng, max_depth: usize) -> BitWord {
    let len = rng.gen_range(1..=max_depth);
    BitWord::from_value(len, rng.gen())
}

pub fn random_factor_element(rng: &mut impl Rng, side: Side, max_depth: usize) -> GammaFactorElement {
    let tag = *CosetTag::ALL.choose(rng).expect("nonempty");
    GammaFactorElement::new(side, tag, sparse_portrait(rng, max_depth, 4))
}

/// A generator word of length at most `max_len` with `h`-addresses of length at most `max_depth`.
pub fn random_word(rng: &mut impl Rng, max_len: usize, max_depth: usize) -> Vec<Gen> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => Gen::G0,
            1 => Gen::G1,
            _ => Gen::H(random_address(rng, max_depth)),
        })
        .collect()
}

pub fn random_element(rng: &mut impl Rng, max_len: usize, max_depth: usize) -> GammaElement {
    gamma().normalize(&word_to_letters(&random_word(rng, max_len, max_depth)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{status} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

pub const CRITERIA: [&str; 10] = [
    "presentation soundness",
    "group laws",
    "coset lemma",
    "truncated C-chain",
    "truncated kernels",
    "theta",
    "finite-H classifier",
    "conjugate out",
    "Bass-Serre ball",
    "structural identities",
];

/// Runs criterion `id` (1-based).
pub fn run_criterion(id: usize, seed: u64) -> CriterionResult {
    let (passed, detail) = match id {
        1 => presentation_soundness(),
        2 => group_laws(seed),
        3 => coset_lemma(seed),
        4 => c_chain(),
        5 => truncated_kernels(),
        6 => theta_suite(seed),
        7 => finite_classifier(),
        8 => conjugate_out_check(),
        9 => ball_check(seed),
        10 => structural(),
        _ => (false, format!("no criterion {id}")),
    };
    CriterionResult {
        id,
        name: CRITERIA.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        detail,
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(|i| run_criterion(i, seed)).collect()
}

type Outcome = (bool, String);

fn presentation_soundness() -> Outcome {
    let g = gamma();
    let rels = defining_relations(5);
    let bad: Vec<String> = rels
        .iter()
        .filter(|r| !g.is_identity(&g.normalize(&word_to_letters(&r.word))))
        .map(ToString::to_string)
        .collect();
    (
        bad.is_empty(),
        format!("{} relators checked, {} failures{}", rels.len(), bad.len(), first(&bad)),
    )
}

fn first(bad: &[String]) -> String {
    bad.first().map(|b| format!(", e.g. {b}")).unwrap_or_default()
}

fn group_laws(seed: u64) -> Outcome {
    const N: usize = 10_000;
    let mut r = rng(seed);
    let mut bad = Vec::new();
    for _ in 0..N {
        let [x, y, z] = [(); 3].map(|_| random_portrait(&mut r, 6));
        let e = Portrait::identity();
        if x.compose(&y).compose(&z) != x.compose(&y.compose(&z))
            || x.compose(&e) != x
            || !x.compose(&x.invert()).is_identity()
        {
            bad.push(format!("H: {x} {y} {z}"));
        }
    }
    for side in Side::BOTH {
        let m = |a: &GammaFactorElement, b: &GammaFactorElement| factor_mul(a, b).expect("same factor");
        for _ in 0..N {
            let [x, y, z] = [(); 3].map(|_| random_factor_element(&mut r, side, 5));
            let e = GammaFactorElement::identity(side);
            if m(&m(&x, &y), &z) != m(&x, &m(&y, &z))
                || m(&x, &e) != x
                || m(&e, &x) != x
                || !m(&x, &factor_inv(&x)).is_identity()
            {
                bad.push(format!("G{side}: {x} {y} {z}"));
            }
        }
    }
    let g = gamma();
    for _ in 0..N {
        let [x, y, z] = [(); 3].map(|_| random_element(&mut r, 8, 4));
        if g.mul(&g.mul(&x, &y), &z) != g.mul(&x, &g.mul(&y, &z))
            || g.mul(&x, &g.identity()) != x
            || !g.is_identity(&g.mul(&x, &g.inv(&x)))
        {
            bad.push(format!("Γ: {x:?}"));
        }
    }
    (
        bad.is_empty(),
        format!("4 x {N} triples (H, G0, G1, Γ), {} failures{}", bad.len(), first(&bad)),
    )
}

fn coset_lemma(seed: u64) -> Outcome {
    const N: usize = 10_000;
    let mut r = rng(seed);
    let mut details = Vec::new();
    let mut ok = true;
    for side in Side::BOTH {
        let mut seen = BTreeSet::new();
        for _ in 0..N {
            let len = r.gen_range(0..=8);
            let mut x = GammaFactorElement::identity(side);
            for _ in 0..len {
                let letter = if r.gen_bool(0.4) {
                    GammaFactorElement::g(side)
                } else {
                    GammaFactorElement::from_h(side, Portrait::swap_at(random_address(&mut r, 5)))
                };
                x = factor_mul(&x, &letter).expect("same factor");
            }
            seen.insert(x.tag);
        }
        ok &= seen.len() == 3;
        details.push(format!("G{side}: tags {seen:?}"));
    }
    (ok, format!("{N} words per factor; {}", details.join("; ")))
}

fn c_chain() -> Outcome {
    let mut ok = true;
    let mut details = Vec::new();
    for side in Side::BOTH {
        let m = |s: ProductSubgroup| if side == Side::Zero { s } else { s.mirror() };
        for (k, expected, count) in [
            (1, m(ProductSubgroup::new(&[("0", 1), ("1", 2)])), 8192),
            (2, m(ProductSubgroup::new(&[("0", 1), ("1", 3)])), 2048),
        ] {
            let got = match c_chain_truncated(3, side, k) {
                Ok(v) => v,
                Err(e) => return (false, e.to_string()),
            };
            let matches = got.len() == count && got.iter().all(|h| expected.contains(h));
            ok &= matches;
            details.push(format!("C_{{{side},≤{k}}} = {expected}: {}", got.len()));
        }
    }
    let remark = remark_identity_suite(3);
    ok &= remark.passed();
    details.push(format!(
        "{} conjugation identities on B_3 {}",
        remark.checks.len(),
        if remark.passed() { "hold" } else { "FAIL" }
    ));
    (ok, details.join("; "))
}

fn truncated_kernels() -> Outcome {
    let k0 = match k0_truncated(3, 6, DEFAULT_SEARCH_BUDGET) {
        Ok(k) => k,
        Err(e) => return (false, e.to_string()),
    };
    let expected = k0.members.iter().all(|h| in_half_tree_kernel(Side::Zero, h));
    let ker = kernel_truncated(3, 6, DEFAULT_SEARCH_BUDGET).unwrap_or_default();
    let ok = expected && k0.members.len() == 128 && k0.undecided.is_empty() && ker == vec![Portrait::identity()];
    (
        ok,
        format!(
            "|K0 ∩ B_3| = {}, undecided {}, exclusion lengths {:?}, |ker ∩ B_3| = {}",
            k0.members.len(),
            k0.undecided.len(),
            k0.exclusion_lengths,
            ker.len()
        ),
    )
}

fn theta_suite(seed: u64) -> Outcome {
    let rels = defining_relations(4);
    let rel_ok = rels.iter().all(|r| theta_word(&r.word) == ThetaValue::ONE);
    let gens = gamma_prime_generators(2);
    let gen_ok = gens.iter().all(|w| theta_word(w) == ThetaValue::ONE);
    let g = gamma();
    let mut r = rng(seed);
    let mut values = BTreeSet::new();
    let mut nf_ok = true;
    for _ in 0..2000 {
        let w = random_word(&mut r, 8, 4);
        let t = theta_word(&w);
        nf_ok &= theta_nf(&g.normalize(&word_to_letters(&w))) == t;
        values.insert(t);
    }
    (
        rel_ok && gen_ok && nf_ok && values.len() == 4,
        format!(
            "{} relators invariant: {rel_ok}; {} Γ′ generators trivial: {gen_ok}; word/normal-form agree: {nf_ok}; {} values realized",
            rels.len(),
            gens.len(),
            values.len()
        ),
    )
}

fn builtin(id: &str) -> FiniteAmalgam {
    FiniteAmalgam::from_spec(&builtin_spec(id).expect("builtin"), 10_000).expect("builtin loads")
}

fn finite_classifier() -> Outcome {
    let run = || -> Result<(bool, String), Box<dyn std::error::Error>> {
        let s3 = classify_finite_h(&builtin("s3"), 6)?;
        let s3_ok = s3.ker_trivial
            && s3.ck_trivial_at.is_some()
            && matches!(s3.condition_vii, WitnessSearch::Found { .. })
            && s3.all_equivalent;
        let sl2 = classify_finite_h(&builtin("sl2"), 6)?;
        let sl2_ok = sl2.ker_order == 2
            && !sl2.ker_trivial
            && sl2.ck_trivial_at.is_none()
            && sl2.condition_vii == WitnessSearch::ProvenAbsent
            && sl2.all_equivalent;
        let direct = builtin("direct");
        let dk = k0k1_fixed_point(&direct)?;
        let direct_ok = dk.ker.len() == direct.h_order();
        let mut quotient_ok = true;
        for id in ["sl2", "direct"] {
            let fin = builtin(id);
            let ker: BTreeSet<usize> = k0k1_fixed_point(&fin)?.ker.into_iter().collect();
            let q = FiniteAmalgam::from_spec(&quotient_amalgam(&fin, &ker)?, 10_000)?;
            quotient_ok &= k0k1_fixed_point(&q)?.ker.len() == 1;
        }
        let free = classify_finite_h(&builtin("free"), 6)?;
        let fc_ok = [&s3, &sl2, &free].iter().all(|r| r.fc_equals_ker) && free.all_equivalent;
        Ok((
            s3_ok && sl2_ok && direct_ok && quotient_ok && fc_ok,
            format!(
                "s3 all true: {s3_ok}; sl2 ker=Z2, all false: {sl2_ok}; direct ker=H: {direct_ok}; \
                 quotients by ker have trivial kernel: {quotient_ok}; FC=ker: {fc_ok}"
            ),
        ))
    };
    run().unwrap_or_else(|e| (false, e.to_string()))
}

fn conjugate_out_check() -> Outcome {
    let fin = builtin("s3");
    let a = fin.clone().amalgam();
    let f: Vec<_> = fin.h_elements().skip(1).map(|h| a.from_h(h)).collect();
    let s3_ok = match conjugate_out(&a, &f, 8) {
        Ok(ConjugateOut::Success(w)) => verify_conjugation(&a, &f, &w.r),
        _ => false,
    };
    let g = gamma();
    let h0 = vec![g.from_h(Portrait::swap_at(BitWord::from_value(1, 0)))];
    let gamma_ok = match conjugate_out(&g, &h0, 6) {
        Ok(ConjugateOut::Failure(c)) => c.bound == 6 && c.words_tried > 0,
        _ => false,
    };
    (
        s3_ok && gamma_ok,
        format!("S3 F = H∖{{e}} witness verified: {s3_ok}; Γ F = {{h(0)}} fails with certificate: {gamma_ok}"),
    )
}

fn ball_check(seed: u64) -> Outcome {
    let g = gamma();
    let ball = match build_ball(&g, 4) {
        Ok(b) => b,
        Err(e) => return (false, e.to_string()),
    };
    let tree = ball.is_tree();
    let degrees = ball
        .vertices
        .iter()
        .zip(&ball.distance)
        .filter(|(_, d)| **d < ball.radius)
        .all(|(v, _)| ball.degree(v) == 3);
    let mut spheres = true;
    for side in Side::BOTH {
        let sizes = ball.sphere_sizes(&TreeVertex::base(side));
        spheres &= (1..=4).all(|r| sizes.get(r) == Some(&(3 << (r - 1))));
    }
    let mut r = rng(seed);
    let h0_b2: Vec<Portrait> = ProductSubgroup::new(&[("0", 1)])
        .elements(2)
        .into_iter()
        .filter(|p| !p.is_identity())
        .collect();
    let mut fix_ok = true;
    for _ in 0..20 {
        let p = h0_b2.choose(&mut r).expect("nonempty").clone();
        let x = g.from_h(p.clone());
        let reach = p.depth() + 2;
        let mut moved = false;
        for (v, d) in ball.vertices.iter().zip(&ball.distance) {
            let same = act(&g, &x, v) == *v;
            match v.rep.first().map(|s| s.side) {
                Some(Side::Zero) => fix_ok &= same,
                Some(Side::One) if *d <= reach => moved |= !same,
                _ => {}
            }
        }
        fix_ok &= moved;
    }
    let mut agree = 0;
    let mut disagree = Vec::new();
    for _ in 0..1000 {
        let x = if r.gen_bool(0.5) {
            g.from_h(sparse_portrait(&mut r, 2, 3))
        } else {
            random_element(&mut r, 3, 2)
        };
        let side = if r.gen_bool(0.5) { Side::Zero } else { Side::One };
        let prefix = vec![Syllable::new(side, r.gen_range(1..=2))];
        let (a, b) = (
            fixator_membership(&x, &prefix).unwrap_or(false),
            cylinder_fix_check(&g, &x, &prefix, &ball).unwrap_or(true),
        );
        if a == b {
            agree += 1;
        } else {
            disagree.push(format!("{x:?} / {prefix:?}"));
        }
    }
    let ok = tree && degrees && spheres && fix_ok && disagree.is_empty();
    (
        ok,
        format!(
            "|V| = {}, |E| = {}, tree: {tree}; interior degree 3: {degrees}; spheres 3·2^(r-1): {spheres}; \
             H(0) ∩ B_2 samples fix S0 side and move S1 side: {fix_ok}; fixator/cylinder agree {agree}/1000{}",
            ball.vertices.len(),
            ball.edges.len(),
            first(&disagree)
        ),
    )
}

fn structural() -> Outcome {
    let interior = (0..=3).all(interior_generation_check);
    let relation = k0k1_relation_check(2, 6, DEFAULT_SEARCH_BUDGET).unwrap_or(false);
    let g = gamma();
    let h = |b: u64| g.from_h(Portrait::swap_at(BitWord::from_value(1, b)));
    let gl = |s: Side| {
        let l = crate::gamma::g_letter(s);
        g.from_letter(l.side, &l.elem)
    };
    let x = g.mul(&gl(Side::Zero), &h(1));
    let y = g.mul(&gl(Side::One), &h(0));
    let free = free_pair_check(&g, &x, &y, 6);
    let mirrored = y == x.mirror();
    (
        interior && relation && free && mirrored,
        format!("⟨K0 ∪ K1⟩ = B_d for d ≤ 3: {interior}; K0/K1 relation at d = 2: {relation}; g0h(1), g1h(0) free at L = 6: {free}"),
    )
}
