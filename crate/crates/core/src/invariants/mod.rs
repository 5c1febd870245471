//! The kernel hierarchy of an amalgam and the decision procedures built on it.
//!
//! `C_{j,k}` is the intersection of the conjugates `gHg⁻¹` over the words `g`
//! of length `k` starting in `G_j ∖ H`. Since `gh'Hh'⁻¹g⁻¹ = gHg⁻¹`, only the
//! transversal words of each length matter, and the membership `h ∈ gHg⁻¹`
//! (i.e. `g⁻¹hg ∈ H`) can be followed one syllable at a time: once a
//! conjugate leaves `H` it lies in `G_i ∖ H`, and conjugating further by
//! letters of the other factor only makes its normal form longer.

mod gamma_mode;
mod powers;

pub use gamma_mode::{
    c_chain_truncated, closure_in_truncation, generating_set_check, interior_generation_check,
    k0_truncated, k0k1_relation_check, kernel_side_truncated, kernel_truncated, ElementVerdict,
    TruncatedKernel, DEFAULT_SEARCH_BUDGET,
};
pub use powers::{
    ball_elements, free_pair_check, parse_predicate, powers_partition_ball_check,
    powers_witness_transform, NormalSubgroup, PartitionReport, Pred, PredicateError, Violation, ViolationKind,
};

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::amalgam::{Amalgam, AmalgamError, Element, FactorContract, NormalForm, Side, Syllable};
use crate::finite::{is_normal, FiniteAmalgam, FiniteError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantsError {
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error(transparent)]
    Finite(#[from] FiniteError),
    #[error("F contains the identity (entry {0})")]
    IdentityInF(usize),
    #[error("the amalgam is degenerate: ([G0:H]-1)([G1:H]-1) < 2")]
    Degenerate,
    #[error("expected at least one conjugator")]
    NoConjugators,
    #[error("s_{index} left the normal subgroup containing f")]
    LeftNormalSubgroup { index: usize },
    #[error("conjugating F[{element}] back into H broke the extraction invariant")]
    InvariantBroken { element: usize },
    #[error("D and E do not partition the ball: a ball element lies in {count} of them")]
    NotAPartition { count: usize },
    #[error("the identity has no interior witness")]
    IdentityWitness,
    #[error(transparent)]
    Predicate(#[from] PredicateError),
}

/// Outcome of following the conjugates `t⁻¹ h t` along transversal words `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Exclusion {
    /// `word` is the least (by length, then lexicographically) transversal word with `word⁻¹ h word ∉ H`.
    Excluded { length: usize, word: Vec<Syllable> },
    /// Every transversal word of length at most `length` keeps the conjugate in `H`.
    Survived { length: usize },
    /// The work budget ran out; all words up to `length` keep it in `H`.
    Undecided { length: usize },
}

impl Exclusion {
    pub fn is_excluded(&self) -> bool {
        matches!(self, Exclusion::Excluded { .. })
    }
}

/// Breadth-first search for the shortest word of type `(j, ·)` conjugating `h`
/// out of `H`, up to `max_len` syllables and `budget` factor conjugations.
/// Words reaching the same conjugate are merged, which keeps the frontier small
/// without changing the least excluding word.
pub fn exclusion_search<C: FactorContract>(
    a: &Amalgam<C>,
    h: &C::H,
    j: Side,
    max_len: usize,
    budget: usize,
) -> Result<Exclusion, AmalgamError> {
    let c = a.contract();
    let n = [a.finite_index(Side::Zero)?, a.finite_index(Side::One)?];
    let mut frontier: Vec<(C::H, Vec<Syllable>)> = vec![(h.clone(), Vec::new())];
    let mut side = j;
    let mut work = 0usize;
    for len in 1..=max_len {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (x, word) in &frontier {
            let xe = c.embed_h(side, x);
            for i in 1..n[side.index()] {
                work += 1;
                if work > budget {
                    return Ok(Exclusion::Undecided { length: len - 1 });
                }
                let s = c.transversal(side, i);
                let y = c.mul(side, &c.mul(side, &c.inv(side, &s), &xe), &s);
                let (idx, hp) = c.decompose(side, &y);
                let mut w = word.clone();
                w.push(Syllable::new(side, i));
                if idx != 0 {
                    return Ok(Exclusion::Excluded { length: len, word: w });
                }
                if seen.insert(hp.clone()) {
                    next.push((hp, w));
                }
            }
        }
        frontier = next;
        side = side.other();
    }
    Ok(Exclusion::Survived { length: max_len })
}

/// `h ∈ C_{j,k}`: every transversal word `t` of type `(j, k)` has `t⁻¹ h t ∈ H`.
/// Conjugates that leave `H` never return, so this also means `h ∈ C_{j,i}` for `i ≤ k`.
pub fn c_jk_membership<C: FactorContract>(
    a: &Amalgam<C>,
    h: &C::H,
    j: Side,
    k: usize,
) -> Result<bool, AmalgamError> {
    Ok(!exclusion_search(a, h, j, k, usize::MAX)?.is_excluded())
}

/// The same membership decided word by word with normal-form arithmetic.
pub fn c_jk_membership_by_words<C: FactorContract>(
    a: &Amalgam<C>,
    h: &C::H,
    j: Side,
    k: usize,
) -> Result<bool, AmalgamError> {
    let x = a.from_h(h.clone());
    Ok(a
        .transversal_words(j, k)?
        .iter()
        .all(|w| a.conjugate(&x, &a.from_syllables(w)).is_in_h()))
}

/// One step `(A_k, B_k)` of the fixed-point iteration, with `C_k = A_k ∩ B_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub k: usize,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub c: Vec<usize>,
}

/// Exact `K₀`, `K₁` and `ker` of a finite-`H` amalgam. Subsets of `H` are
/// lists of indices into `h_labels`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub spec: String,
    pub h_order: usize,
    pub h_labels: Vec<String>,
    pub chain: Vec<ChainStep>,
    /// First `k` with `(A_{k+1}, B_{k+1}) = (A_k, B_k)`.
    pub stabilized_at: usize,
    pub k0: Vec<usize>,
    pub k1: Vec<usize>,
    pub ker: Vec<usize>,
    pub ker_normal_in_factors: bool,
}

impl KernelReport {
    pub fn ker_labels(&self) -> Vec<String> {
        self.ker.iter().map(|&k| self.h_labels[k].clone()).collect()
    }
}

/// `{h ∈ H : s⁻¹hs ∈ target for every nontrivial transversal letter s of G_side}`,
/// i.e. `H ∩ ⋂_s s·target·s⁻¹`.
fn conjugate_back(fin: &FiniteAmalgam, side: Side, target: &BTreeSet<usize>) -> BTreeSet<usize> {
    let g = fin.group(side);
    let reps = &fin.transversal_of(side).reps()[1..];
    fin.h_elements()
        .filter(|&h| {
            let x = fin.h_in(side, h);
            reps.iter().all(|&s| {
                let y = g.mul(g.mul(g.inv(s), x), s);
                fin.h_of(side, y).is_some_and(|k| target.contains(&k))
            })
        })
        .collect()
}

/// Iterates `A_{k+1} = H ∩ ⋂_{s∈S₀} s B_k s⁻¹`, `B_{k+1} = H ∩ ⋂_{s∈S₁} s A_k s⁻¹`
/// from `A₀ = B₀ = H` until both stabilise.
pub fn k0k1_fixed_point(fin: &FiniteAmalgam) -> Result<KernelReport, InvariantsError> {
    let all: BTreeSet<usize> = fin.h_elements().collect();
    let (mut a, mut b) = (all.clone(), all);
    let mut chain = Vec::new();
    let mut k = 0;
    loop {
        chain.push(ChainStep {
            k,
            a: a.iter().copied().collect(),
            b: b.iter().copied().collect(),
            c: a.intersection(&b).copied().collect(),
        });
        let next_a = conjugate_back(fin, Side::Zero, &b);
        let next_b = conjugate_back(fin, Side::One, &a);
        debug_assert!(next_a.is_subset(&a) && next_b.is_subset(&b));
        if next_a == a && next_b == b {
            break;
        }
        a = next_a;
        b = next_b;
        k += 1;
    }
    let ker: BTreeSet<usize> = a.intersection(&b).copied().collect();
    let mut ker_normal = true;
    for side in Side::BOTH {
        ker_normal &= is_normal(fin.group(side), &fin.h_set_in(side, &ker))?;
    }
    Ok(KernelReport {
        spec: fin.name().to_string(),
        h_order: fin.h_order(),
        h_labels: fin.h_elements().map(|k| fin.h_label(k)).collect(),
        chain,
        stabilized_at: k,
        k0: a.into_iter().collect(),
        k1: b.into_iter().collect(),
        ker: ker.into_iter().collect(),
        ker_normal_in_factors: ker_normal,
    })
}

/// Result of the search for `g` with `H ∩ gHg⁻¹ = {e}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WitnessSearch {
    Found { word: Vec<Syllable>, rendered: String },
    /// `ker ≠ {e}` lies in every conjugate of `H`.
    ProvenAbsent,
    /// No witness among transversal words of length at most `bound`.
    BoundExhausted { bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassifierReport {
    pub spec: String,
    pub ker_order: usize,
    /// Condition (ii).
    pub ker_trivial: bool,
    /// Condition (iii): the first `k` with `C_k = {e}`.
    pub ck_trivial_at: Option<usize>,
    /// Condition (vii).
    pub condition_vii: WitnessSearch,
    /// For finite `H` the FC-centre of the amalgam equals `ker`.
    pub fc_equals_ker: bool,
    pub all_equivalent: bool,
    pub kernel: KernelReport,
}

/// Whether `H ∩ tHt⁻¹ = {e}`, i.e. no `h ≠ e` has `t⁻¹ h t ∈ H`.
fn separates(a: &Amalgam<FiniteAmalgam>, t: &[Syllable]) -> bool {
    let g = a.from_syllables(t);
    a.contract()
        .h_elements()
        .skip(1)
        .all(|h| !a.conjugate(&a.from_h(h), &g).is_in_h())
}

/// The finite-`H` criteria: `ker = {e}`, `C_k = {e}` for some `k`, and a
/// witness `g` with `H ∩ gHg⁻¹ = {e}` (searched over transversal words of
/// length at most `search_len`, which suffices because the conjugate only
/// depends on `gH`).
pub fn classify_finite_h(fin: &FiniteAmalgam, search_len: usize) -> Result<ClassifierReport, InvariantsError> {
    let a = Amalgam::new(fin.clone());
    if a.nondegeneracy_check() != Some(true) {
        return Err(InvariantsError::Degenerate);
    }
    let kernel = k0k1_fixed_point(fin)?;
    let ker_trivial = kernel.ker.len() == 1;
    let ck_trivial_at = kernel.chain.iter().find(|s| s.c.len() == 1).map(|s| s.k);
    let condition_vii = if !ker_trivial {
        WitnessSearch::ProvenAbsent
    } else {
        let mut found = None;
        'search: for len in 0..=search_len {
            for j in Side::BOTH {
                if len == 0 && j == Side::One {
                    continue;
                }
                for t in a.transversal_words(j, len)? {
                    if separates(&a, &t) {
                        found = Some(t);
                        break 'search;
                    }
                }
            }
        }
        match found {
            Some(word) => WitnessSearch::Found {
                rendered: fin.format_nf(&a.from_syllables(&word)),
                word,
            },
            None => WitnessSearch::BoundExhausted { bound: search_len },
        }
    };
    let vii = matches!(condition_vii, WitnessSearch::Found { .. });
    Ok(ClassifierReport {
        spec: fin.name().to_string(),
        ker_order: kernel.ker.len(),
        ker_trivial,
        ck_trivial_at,
        all_equivalent: ker_trivial == ck_trivial_at.is_some() && ker_trivial == vii,
        condition_vii,
        fc_equals_ker: true,
        kernel,
    })
}

/// One extraction step: `word` conjugates `F[element]` out of `H`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugationStep {
    pub element: usize,
    pub word: Vec<Syllable>,
}

/// `r` with `r⁻¹ f r ∉ H` for every `f ∈ F`; `r` is the product of the step words.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugationWitness<H> {
    pub r: NormalForm<H>,
    pub steps: Vec<ConjugationStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjugationFailure<H> {
    /// Index in `F` of the element that could not be moved out.
    pub stuck: usize,
    pub stuck_conjugate: NormalForm<H>,
    /// Every even-length `G₀`-initial transversal word up to this length was tried.
    pub bound: usize,
    pub words_tried: usize,
    pub partial: ConjugationWitness<H>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConjugateOut<H> {
    Success(ConjugationWitness<H>),
    Failure(ConjugationFailure<H>),
}

/// Moves the elements of `F` out of `H` one at a time by even-length words
/// starting in `G₀ ∖ H`, searched by increasing length and then
/// lexicographically. Elements already outside `H` stay outside under every
/// further step; this is re-checked after each step.
pub fn conjugate_out<C: FactorContract>(
    a: &Amalgam<C>,
    f: &[Element<C>],
    max_len: usize,
) -> Result<ConjugateOut<C::H>, InvariantsError> {
    if let Some(i) = f.iter().position(|x| a.is_identity(x)) {
        return Err(InvariantsError::IdentityInF(i));
    }
    let mut r = a.identity();
    let mut steps = Vec::new();
    let mut current: Vec<Element<C>> = f.to_vec();
    while let Some(i) = current.iter().position(|x| x.is_in_h()) {
        let mut tried = 0;
        let mut found = None;
        'search: for len in (2..=max_len).step_by(2) {
            for w in a.transversal_words(Side::Zero, len)? {
                tried += 1;
                let t = a.from_syllables(&w);
                if !a.conjugate(&current[i], &t).is_in_h() {
                    found = Some((w, t));
                    break 'search;
                }
            }
        }
        let Some((word, t)) = found else {
            return Ok(ConjugateOut::Failure(ConjugationFailure {
                stuck: i,
                stuck_conjugate: current[i].clone(),
                bound: max_len,
                words_tried: tried,
                partial: ConjugationWitness { r, steps },
            }));
        };
        let next: Vec<Element<C>> = current.iter().map(|x| a.conjugate(x, &t)).collect();
        if let Some(k) = (0..f.len()).find(|&k| !current[k].is_in_h() && next[k].is_in_h()) {
            return Err(InvariantsError::InvariantBroken { element: k });
        }
        current = next;
        r = a.mul(&r, &t);
        steps.push(ConjugationStep { element: i, word });
    }
    debug_assert!(f.iter().all(|x| !a.conjugate(x, &r).is_in_h()));
    Ok(ConjugateOut::Success(ConjugationWitness { r, steps }))
}

/// Re-verifies a witness directly: `r⁻¹ f r ∉ H` for every `f ∈ F`.
pub fn verify_conjugation<C: FactorContract>(a: &Amalgam<C>, f: &[Element<C>], r: &Element<C>) -> bool {
    f.iter().all(|x| !a.conjugate(x, r).is_in_h())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{builtin_spec, FiniteAmalgam};
    use crate::gamma::{gamma, h1};
    use crate::portrait::Portrait;

    fn fin(id: &str) -> FiniteAmalgam {
        FiniteAmalgam::from_spec(&builtin_spec(id).unwrap(), 1000).unwrap()
    }

    #[test]
    fn c_jk_examples_in_gamma() {
        let g = gamma();
        assert!(!c_jk_membership(&g, &h1(), Side::Zero, 1).unwrap());
        let h011: Portrait = "011".parse().unwrap();
        assert!(c_jk_membership(&g, &h011, Side::Zero, 1).unwrap());
        assert!(c_jk_membership(&g, &Portrait::identity(), Side::One, 5).unwrap());
    }

    #[test]
    fn fixed_point_examples() {
        let r = k0k1_fixed_point(&fin("sl2")).unwrap();
        assert_eq!((r.k0.len(), r.k1.len(), r.ker.len()), (2, 2, 2));
        let r = k0k1_fixed_point(&fin("s3")).unwrap();
        assert_eq!((r.k0.len(), r.k1.len(), r.ker.len()), (1, 1, 1));
        assert_eq!(r.stabilized_at, 1);
        let r = k0k1_fixed_point(&fin("direct")).unwrap();
        assert_eq!(r.ker.len(), 2);
        assert!(r.ker_normal_in_factors);
    }

    #[test]
    fn classifier_examples() {
        let r = classify_finite_h(&fin("s3"), 6).unwrap();
        assert!(r.ker_trivial && r.all_equivalent);
        assert_eq!(r.ck_trivial_at, Some(1));
        assert!(matches!(r.condition_vii, WitnessSearch::Found { .. }));
        let r = classify_finite_h(&fin("sl2"), 6).unwrap();
        assert!(!r.ker_trivial && r.all_equivalent);
        assert_eq!(r.condition_vii, WitnessSearch::ProvenAbsent);
        let r = classify_finite_h(&fin("free"), 6).unwrap();
        assert!(r.ker_trivial && r.all_equivalent);
        assert_eq!(r.ck_trivial_at, Some(0));
    }

    #[test]
    fn conjugate_out_examples() {
        let f = fin("s3");
        let a = f.clone().amalgam();
        let hs: Vec<_> = f.h_elements().skip(1).map(|h| a.from_h(h)).collect();
        match conjugate_out(&a, &hs, 6).unwrap() {
            ConjugateOut::Success(w) => assert!(verify_conjugation(&a, &hs, &w.r)),
            ConjugateOut::Failure(x) => panic!("{x:?}"),
        }
        let outside = vec![a.from_syllables(&[Syllable::new(Side::Zero, 1)])];
        let ConjugateOut::Success(w) = conjugate_out(&a, &outside, 4).unwrap() else { panic!() };
        assert!(a.is_identity(&w.r) && w.steps.is_empty());
        assert_eq!(
            conjugate_out(&a, &[a.identity()], 4),
            Err(InvariantsError::IdentityInF(0))
        );
        let g = gamma();
        let h0 = g.from_h("0".parse().unwrap());
        assert!(matches!(conjugate_out(&g, &[h0], 6).unwrap(), ConjugateOut::Failure(_)));
    }
}
