//! Independent re-derivations checked against the library.

use std::collections::BTreeSet;

use amalgam::amalgam::Side;
use amalgam::finite::{
    builtin_spec, builtin_specs, normal_core, AmalgamSpec, FiniteAmalgam, GroupSpec, Perm,
};
use amalgam::gamma::{
    factor_mul, gamma, h1, portrait_word, CosetTag, GammaFactorElement, Gen, Mirror, ProductSubgroup,
};
use amalgam::invariants::{
    c_chain_truncated, c_jk_membership, c_jk_membership_by_words, k0k1_fixed_point,
};
use amalgam::portrait::{BitWord, Portrait};
use amalgam::suite::{random_address, random_element, rng, sparse_portrait};
use rand::Rng;

/// `g₀ h g₀` for `h` without a swap at `(1)`, from the relations
/// `g₀h(0x)g₀ = h(10x)`, `g₀h(10x)g₀ = h(0x)`, `g₀h(11x)g₀ = h(11x)` applied
/// swap by swap to a word for `h`.
fn sigma(h: &Portrait) -> Portrait {
    let one = BitWord::from_value(1, 1);
    assert!(!h.has_swap(&one));
    let image = |w: BitWord| {
        let zero = BitWord::from_value(1, 0);
        let ten = BitWord::from_value(2, 0b10);
        if let Some(x) = w.strip_prefix(&zero) {
            ten.concat(&x)
        } else if let Some(x) = w.strip_prefix(&ten) {
            zero.concat(&x)
        } else {
            w
        }
    };
    portrait_word(h)
        .into_iter()
        .map(|g| match g {
            Gen::H(w) => Portrait::swap_at(image(w)),
            _ => unreachable!("portrait words only contain h letters"),
        })
        .fold(Portrait::identity(), |acc, p| acc.compose(&p))
}

/// Splits `p` as `h(1)^ε · q` with `q` free of a swap at `(1)`.
fn split(p: &Portrait) -> (bool, Portrait) {
    let one = BitWord::from_value(1, 1);
    if p.has_swap(&one) {
        let q = h1().compose(p);
        assert!(!q.has_swap(&one));
        (true, q)
    } else {
        (false, p.clone())
    }
}

/// Multiplies `(tag, p)` by `g₀` using only the relations and `(g₀h(1))³ = e`.
fn times_g0(tag: CosetTag, p: &Portrait) -> (CosetTag, Portrait) {
    let (eps, q) = split(p);
    let s = sigma(&q);
    match (tag, eps) {
        // p g₀ = g₀ σ(p)
        (CosetTag::E, false) => (CosetTag::A, s),
        // h(1) q g₀ = h(1)g₀ σ(q)
        (CosetTag::E, true) => (CosetTag::B, s),
        // g₀ q g₀ = σ(q)
        (CosetTag::A, false) => (CosetTag::E, s),
        // g₀h(1)g₀ σ(q) = h(1)g₀ h(1) σ(q)
        (CosetTag::A, true) => (CosetTag::B, h1().compose(&s)),
        // h(1)g₀ q g₀ = h(1)σ(q)
        (CosetTag::B, false) => (CosetTag::E, h1().compose(&s)),
        // h(1) g₀h(1)g₀ σ(q) = g₀ h(1) σ(q)
        (CosetTag::B, true) => (CosetTag::A, h1().compose(&s)),
    }
}

#[test]
fn g0_arithmetic_matches_relation_rewriting() {
    let mut r = rng(11);
    let mut tags = BTreeSet::new();
    for _ in 0..2000 {
        let len = r.gen_range(0..12);
        let mut lib = GammaFactorElement::identity(Side::Zero);
        let mut oracle = (CosetTag::E, Portrait::identity());
        for _ in 0..len {
            if r.gen_bool(0.4) {
                lib = factor_mul(&lib, &GammaFactorElement::g(Side::Zero)).unwrap();
                oracle = times_g0(oracle.0, &oracle.1);
            } else {
                let h = Portrait::swap_at(random_address(&mut r, 5));
                lib = factor_mul(&lib, &GammaFactorElement::from_h(Side::Zero, h.clone())).unwrap();
                oracle.1 = oracle.1.compose(&h);
            }
        }
        assert_eq!((lib.tag, lib.h.clone()), oracle);
        tags.insert(lib.tag);
    }
    assert_eq!(tags.len(), 3);
}

#[test]
fn g1_arithmetic_is_the_mirror_of_g0() {
    let mut r = rng(12);
    for _ in 0..1000 {
        let x = GammaFactorElement::new(Side::Zero, CosetTag::B, sparse_portrait(&mut r, 4, 3));
        let y = GammaFactorElement::new(Side::Zero, CosetTag::A, sparse_portrait(&mut r, 4, 3));
        let lhs = factor_mul(&x.mirror(), &y.mirror()).unwrap();
        assert_eq!(lhs, factor_mul(&x, &y).unwrap().mirror());
    }
}

#[test]
fn c_jk_search_matches_word_enumeration_in_gamma() {
    let g = gamma();
    let mut r = rng(13);
    for _ in 0..200 {
        let h = sparse_portrait(&mut r, 3, 4);
        for j in Side::BOTH {
            for k in 0..=4 {
                assert_eq!(
                    c_jk_membership(&g, &h, j, k).unwrap(),
                    c_jk_membership_by_words(&g, &h, j, k).unwrap(),
                    "{h} {j} {k}"
                );
            }
        }
    }
}

#[test]
fn c_chain_counts_match_product_subgroups() {
    for d in 0..=3 {
        let all = ProductSubgroup::whole().count(d) as usize;
        assert_eq!(c_chain_truncated(d, Side::Zero, 0).unwrap().len(), all);
        for (k, tail) in [(1, 2), (2, 3)] {
            let expect = ProductSubgroup::new(&[("0", 1), ("1", tail)]);
            let got: BTreeSet<Portrait> = c_chain_truncated(d, Side::Zero, k).unwrap().into_iter().collect();
            assert_eq!(got, expect.elements(d).into_iter().collect::<BTreeSet<_>>());
        }
    }
}

fn s4_spec(name: &str, h: Vec<Vec<u32>>, twist: Option<Vec<u32>>) -> AmalgamSpec {
    let s4 = GroupSpec {
        perms: vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]],
    };
    let h1 = match &twist {
        None => h.clone(),
        Some(t) => {
            let t = Perm::from_images(t.clone()).unwrap();
            h.iter()
                .map(|p| {
                    let p = Perm::from_images(p.clone()).unwrap();
                    t.compose(&p).compose(&t.inverse()).images().to_vec()
                })
                .collect()
        }
    };
    AmalgamSpec {
        name: Some(name.to_string()),
        g0: s4.clone(),
        g1: s4,
        h_gens_in_g0: h,
        h_gens_in_g1: h1,
    }
}

/// `ker` as the largest subgroup of `H` normal in both factors: alternate
/// normal cores until nothing changes.
fn double_core(fin: &FiniteAmalgam) -> BTreeSet<usize> {
    let mut n: BTreeSet<usize> = fin.h_elements().collect();
    loop {
        let mut next = n.clone();
        for side in Side::BOTH {
            let core = normal_core(fin.group(side), &fin.h_set_in(side, &next)).unwrap();
            next = core.members().map(|g| fin.h_of(side, g).unwrap()).collect();
        }
        if next == n {
            return n;
        }
        n = next;
    }
}

#[test]
fn fixed_point_kernel_matches_double_core() {
    let mut specs: Vec<AmalgamSpec> = builtin_specs().into_iter().map(|(_, _, s)| s).collect();
    let v4 = vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]];
    specs.push(s4_spec("s4-v4", v4.clone(), None));
    specs.push(s4_spec("s4-d4", vec![vec![1, 2, 3, 0], vec![3, 2, 1, 0]], None));
    specs.push(s4_spec("s4-d4-twisted", vec![vec![1, 2, 3, 0], vec![3, 2, 1, 0]], Some(vec![1, 0, 2, 3])));
    specs.push(s4_spec("s4-z2", vec![vec![1, 0, 3, 2]], None));
    specs.push(s4_spec("s4-s3", vec![vec![1, 0, 2, 3], vec![1, 2, 0, 3]], Some(vec![0, 1, 3, 2])));
    for spec in specs {
        let fin = FiniteAmalgam::from_spec(&spec, 10_000).unwrap();
        let report = k0k1_fixed_point(&fin).unwrap();
        let ker: BTreeSet<usize> = report.ker.iter().copied().collect();
        assert_eq!(ker, double_core(&fin), "{}", spec.label());
        assert!(report.ker_normal_in_factors);
        if report.k0 == report.ker {
            assert_eq!(report.k0, report.k1, "{}", spec.label());
        }
    }
}

#[test]
fn c_jk_search_matches_word_enumeration_in_finite_amalgams() {
    for id in ["s3", "sl2", "direct"] {
        let fin = FiniteAmalgam::from_spec(&builtin_spec(id).unwrap(), 1000).unwrap();
        let a = fin.clone().amalgam();
        for h in fin.h_elements() {
            for j in Side::BOTH {
                for k in 0..=5 {
                    assert_eq!(
                        c_jk_membership(&a, &h, j, k).unwrap(),
                        c_jk_membership_by_words(&a, &h, j, k).unwrap()
                    );
                }
            }
        }
    }
}

#[test]
fn normal_forms_are_canonical_under_relators() {
    // Inserting a relator anywhere in a word leaves its normal form unchanged.
    let g = gamma();
    let rels = amalgam::gamma::defining_relations(3);
    let mut r = rng(14);
    for _ in 0..500 {
        let w = amalgam::suite::random_word(&mut r, 8, 3);
        let rel = &rels[r.gen_range(0..rels.len())].word;
        let at = r.gen_range(0..=w.len());
        let mut v = w.clone();
        v.splice(at..at, rel.iter().copied());
        let nf = |x: &[Gen]| g.normalize(&amalgam::gamma::word_to_letters(x));
        assert_eq!(nf(&w), nf(&v));
    }
    let x = random_element(&mut r, 6, 3);
    assert_eq!(g.mul(&x, &g.inv(&x)), g.identity());
}
