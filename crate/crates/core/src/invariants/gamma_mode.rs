//! Kernel computations for `Γ`, exact on each truncation `B_d`.
//!
//! Every `h ∈ H` of depth `d` that leaves some conjugate `gHg⁻¹` already does
//! so for a word of length at most `2d + 2`, so searching each element up to
//! `max(max_len, 2·depth(h) + 2)` syllables decides membership in `K_j`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{exclusion_search, Exclusion};
use crate::amalgam::{AmalgamError, FactorContract, Side};
use crate::gamma::{gamma, Gamma, Mirror};
use crate::portrait::{enumerate_truncation, truncation_positions, BitWord, Portrait};

/// Factor conjugations allowed per element before giving up.
pub const DEFAULT_SEARCH_BUDGET: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElementVerdict {
    pub element: Portrait,
    /// Search length used for this element.
    pub horizon: usize,
    pub verdict: Exclusion,
}

/// `K_side ∩ B_depth`, with a verdict for every element of `B_depth`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TruncatedKernel {
    pub side: Side,
    pub depth: usize,
    pub max_len: usize,
    pub members: Vec<Portrait>,
    pub excluded: usize,
    pub undecided: Vec<Portrait>,
    /// Elements whose shortest excluding word is longer than `max_len`.
    pub late_exclusions: Vec<Portrait>,
    /// Number of excluded elements by shortest excluding word length.
    pub exclusion_lengths: BTreeMap<usize, usize>,
    pub verdicts: Vec<ElementVerdict>,
}

fn horizon(h: &Portrait, max_len: usize) -> usize {
    max_len.max(2 * h.depth() + 2)
}

fn verdict(g: &Gamma, h: &Portrait, side: Side, max_len: usize, budget: usize) -> Result<ElementVerdict, AmalgamError> {
    let n = horizon(h, max_len);
    Ok(ElementVerdict {
        element: h.clone(),
        horizon: n,
        verdict: exclusion_search(g, h, side, n, budget)?,
    })
}

fn check_depth(depth: usize) {
    assert!(
        depth <= crate::portrait::MAX_ENUMERATION_DEPTH,
        "B_d is enumerated only for d <= {}",
        crate::portrait::MAX_ENUMERATION_DEPTH
    );
}

fn truncation(depth: usize) -> Vec<Portrait> {
    check_depth(depth);
    enumerate_truncation(depth)
        .expect("depth checked above")
        .collect()
}

/// Decides `h ∈ K_side` for every `h ∈ B_depth`, in parallel.
pub fn kernel_side_truncated(
    side: Side,
    depth: usize,
    max_len: usize,
    budget: usize,
) -> Result<TruncatedKernel, AmalgamError> {
    let g = gamma();
    let verdicts: Vec<ElementVerdict> = truncation(depth)
        .par_iter()
        .map(|h| verdict(&g, h, side, max_len, budget))
        .collect::<Result<_, _>>()?;
    let mut out = TruncatedKernel {
        side,
        depth,
        max_len,
        members: Vec::new(),
        excluded: 0,
        undecided: Vec::new(),
        late_exclusions: Vec::new(),
        exclusion_lengths: BTreeMap::new(),
        verdicts: Vec::new(),
    };
    for v in &verdicts {
        match &v.verdict {
            Exclusion::Survived { .. } => out.members.push(v.element.clone()),
            Exclusion::Undecided { .. } => out.undecided.push(v.element.clone()),
            Exclusion::Excluded { length, .. } => {
                out.excluded += 1;
                *out.exclusion_lengths.entry(*length).or_default() += 1;
                if *length > max_len {
                    out.late_exclusions.push(v.element.clone());
                }
            }
        }
    }
    out.verdicts = verdicts;
    Ok(out)
}

pub fn k0_truncated(depth: usize, max_len: usize, budget: usize) -> Result<TruncatedKernel, AmalgamError> {
    kernel_side_truncated(Side::Zero, depth, max_len, budget)
}

/// `ker ∩ B_depth` as the intersection of `K₀ ∩ B_depth` with its mirror
/// image (`B_depth` is mirror-closed and the mirror swaps `K₀` and `K₁`).
pub fn kernel_truncated(depth: usize, max_len: usize, budget: usize) -> Result<Vec<Portrait>, AmalgamError> {
    let k0 = k0_truncated(depth, max_len, budget)?;
    let mut k1: Vec<Portrait> = k0.members.iter().map(Mirror::mirror).collect();
    k1.sort();
    Ok(k0
        .members
        .into_iter()
        .filter(|h| k1.binary_search(h).is_ok())
        .collect())
}

/// `C_{j,k} ∩ B_depth`.
pub fn c_chain_truncated(depth: usize, j: Side, k: usize) -> Result<Vec<Portrait>, AmalgamError> {
    let g = gamma();
    let keep: Vec<bool> = truncation(depth)
        .par_iter()
        .map(|h| exclusion_search(&g, h, j, k, usize::MAX).map(|e| !e.is_excluded()))
        .collect::<Result<_, _>>()?;
    Ok(truncation(depth)
        .into_iter()
        .zip(keep)
        .filter_map(|(h, k)| k.then_some(h))
        .collect())
}

/// `h ∈ K₀ ⇔ s⁻¹hs ∈ H ∩ K₁` for both nontrivial letters `s` of `G₀`, for every
/// `h ∈ B_depth`, with `K₁`-membership decided through the mirror.
pub fn k0k1_relation_check(depth: usize, max_len: usize, budget: usize) -> Result<bool, AmalgamError> {
    let g = gamma();
    let side = Side::Zero;
    let results: Vec<bool> = truncation(depth)
        .par_iter()
        .map(|h| {
            let in_k0 = exclusion_search(&g, h, side, horizon(h, max_len), budget)?;
            let c = g.contract();
            let mut rhs = true;
            for i in 1..g.finite_index(side)? {
                let s = c.transversal(side, i);
                let y = c.mul(side, &c.mul(side, &c.inv(side, &s), &c.embed_h(side, h)), &s);
                let (idx, q) = c.decompose(side, &y);
                let in_k1 = idx == 0 && {
                    let m = q.mirror();
                    !exclusion_search(&g, &m, side, horizon(&m, max_len), budget)?.is_excluded()
                };
                rhs &= in_k1;
            }
            Ok(matches!(in_k0, Exclusion::Undecided { .. }) || in_k0.is_excluded() != rhs)
        })
        .collect::<Result<_, AmalgamError>>()?;
    Ok(results.into_iter().all(|b| b))
}

/// Size of the subgroup of `B_depth` generated by `gens` (all of depth `≤ depth`).
pub fn closure_in_truncation(depth: usize, gens: &[Portrait]) -> usize {
    check_depth(depth);
    let n = truncation_positions(depth);
    assert!(gens.iter().all(|p| p.depth() <= depth), "generators must lie in B_depth");
    let mut seen = vec![false; 1 << n];
    seen[0] = true;
    let mut stack = vec![Portrait::identity()];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = x.compose(g);
            let m = y.truncation_mask(depth).expect("closed in B_depth") as usize;
            if !seen[m] {
                seen[m] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count
}

/// `⟨(H(0) ∩ B_d) ∪ (H(1) ∩ B_d)⟩ = B_d`. Each `H(i) ∩ B_d` is generated by
/// its single swaps, so those serve as generators.
pub fn interior_generation_check(depth: usize) -> bool {
    let gens: Vec<Portrait> = BitWord::up_to(depth)
        .filter(|w| !w.is_empty())
        .map(Portrait::swap_at)
        .collect();
    closure_in_truncation(depth, &gens) == 1 << truncation_positions(depth)
}

/// The swaps `h(0ⁱ)` and `h(10ⁱ⁻¹)` for
/// `1 ≤ i ≤ depth` generate `B_depth`.
pub fn generating_set_check(depth: usize) -> bool {
    let mut gens = Vec::new();
    for i in 1..=depth {
        gens.push(Portrait::swap_at(BitWord::from_value(i, 0)));
        gens.push(Portrait::swap_at(BitWord::from_value(i, 1 << (i - 1))));
    }
    closure_in_truncation(depth, &gens) == 1 << truncation_positions(depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::in_half_tree_kernel;

    #[test]
    fn k0_matches_half_tree_support() {
        for d in 0..=2 {
            let k = k0_truncated(d, 2, DEFAULT_SEARCH_BUDGET).unwrap();
            assert!(k.undecided.is_empty());
            let expected: Vec<Portrait> = enumerate_truncation(d)
                .unwrap()
                .filter(|h| in_half_tree_kernel(Side::Zero, h))
                .collect();
            assert_eq!(k.members, expected, "depth {d}");
        }
    }

    #[test]
    fn kernel_is_trivial_on_small_truncations() {
        for d in 0..=2 {
            assert_eq!(kernel_truncated(d, 2, DEFAULT_SEARCH_BUDGET).unwrap(), vec![Portrait::identity()]);
        }
    }

    #[test]
    fn direct_k1_agrees_with_mirror() {
        let k0 = k0_truncated(2, 2, DEFAULT_SEARCH_BUDGET).unwrap();
        let k1 = kernel_side_truncated(Side::One, 2, 2, DEFAULT_SEARCH_BUDGET).unwrap();
        let mut mirrored: Vec<Portrait> = k0.members.iter().map(Mirror::mirror).collect();
        mirrored.sort();
        let mut direct = k1.members.clone();
        direct.sort();
        assert_eq!(mirrored, direct);
    }

    #[test]
    fn relation_and_generation() {
        for d in 0..=2 {
            assert!(k0k1_relation_check(d, 2, DEFAULT_SEARCH_BUDGET).unwrap());
            assert!(interior_generation_check(d));
            assert!(generating_set_check(d));
        }
    }

    #[test]
    fn c_chain_is_decreasing() {
        let sizes: Vec<usize> = (0..4)
            .map(|k| c_chain_truncated(2, Side::Zero, k).unwrap().len())
            .collect();
        assert_eq!(sizes[0], 64);
        assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
    }
}
