//! Exact arithmetic in the factors `G₀ = ⟨H, g₀⟩` and `G₁ = ⟨H, g₁⟩` of the
//! group `Γ = G₀ *_H G₁`, with `H` realised as the finitary portraits fixing
//! the first level of the binary tree.
//!
//! Every element of `G₀` is stored as `t · h` with `t` one of the three left
//! coset representatives `e`, `g₀`, `h(1)g₀` and `h ∈ H`. Moving an element
//! of `H` to the right of `g₀` is done by [`push`]: write
//! `h = d₀ · d₁₀ · d₁₁ · h(1)^ε` with `d_w` supported below `w`; conjugation
//! by `g₀` exchanges the subtrees below `(0)` and `(1,0)` and fixes the one
//! below `(1,1)`. `G₁` is the mirror image of `G₀` under `0 ↔ 1`.

mod remark;
mod theta;
mod word;

pub use remark::{remark_identity_suite, IdentityCheck, ProductSubgroup, RemarkReport};
pub use theta::{in_gamma_prime, theta_gen, theta_nf, theta_portrait, theta_word, ThetaValue};
pub use word::{
    defining_relations, format_nf, format_word, gamma_prime_generators, mirror_word, parse_word,
    portrait_word,
    word_to_letters, Gen, Relation, RelationKind,
};
pub use crate::amalgam::WordParseError;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amalgam::{Amalgam, Element, FactorContract, Letter, Side, Syllable};
use crate::portrait::{BitWord, Portrait};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GammaError {
    #[error("h() needs a nonempty address")]
    EmptyGenerator,
    #[error("portrait {0} is not in H (it swaps at the root)")]
    NotInH(Portrait),
    #[error("alpha is only defined on the eps = 0 part of H")]
    AlphaOnEps,
    #[error("cannot multiply an element of G{0} with an element of G{1}")]
    MixedFactors(Side, Side),
}

/// Left coset of `H` in a factor: `H`, `g·H` or `h(·)g·H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CosetTag {
    /// The coset `H` itself.
    E,
    /// `g₀H` (resp. `g₁H`).
    A,
    /// `h(1)g₀H` (resp. `h(0)g₁H`).
    B,
}

impl CosetTag {
    pub const ALL: [CosetTag; 3] = [CosetTag::E, CosetTag::A, CosetTag::B];

    pub fn index(self) -> usize {
        match self {
            CosetTag::E => 0,
            CosetTag::A => 1,
            CosetTag::B => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<CosetTag> {
        CosetTag::ALL.get(i).copied()
    }
}

/// `tag · h` in `G₀` or `G₁`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GammaFactorElement {
    pub side: Side,
    pub tag: CosetTag,
    pub h: Portrait,
}

impl GammaFactorElement {
    pub fn new(side: Side, tag: CosetTag, h: Portrait) -> Self {
        debug_assert!(h.in_h());
        GammaFactorElement { side, tag, h }
    }

    pub fn identity(side: Side) -> Self {
        Self::new(side, CosetTag::E, Portrait::identity())
    }

    pub fn from_h(side: Side, h: Portrait) -> Self {
        Self::new(side, CosetTag::E, h)
    }

    /// `g₀` or `g₁`.
    pub fn g(side: Side) -> Self {
        Self::new(side, CosetTag::A, Portrait::identity())
    }

    pub fn is_identity(&self) -> bool {
        self.tag == CosetTag::E && self.h.is_identity()
    }
}

impl fmt::Display for GammaFactorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.side {
            Side::Zero => "g0",
            Side::One => "g1",
        };
        let flip = match self.side {
            Side::Zero => "h:1",
            Side::One => "h:0",
        };
        match self.tag {
            CosetTag::E => write!(f, "[{}]", self.h),
            CosetTag::A => write!(f, "{g}·[{}]", self.h),
            CosetTag::B => write!(f, "{flip} {g}·[{}]", self.h),
        }
    }
}

/// Splitting of an element of `H` as `d₀ · d₁₀ · d₁₁ · h(1)^eps`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DTriple {
    pub d0: Portrait,
    pub d10: Portrait,
    pub d11: Portrait,
    pub eps: bool,
}

impl DTriple {
    pub fn recompose(&self) -> Portrait {
        let d = self.d0.compose(&self.d10).compose(&self.d11);
        if self.eps {
            d.compose(&h1())
        } else {
            d
        }
    }

    /// The `eps = 0` part `d₀ · d₁₀ · d₁₁`.
    pub fn body(&self) -> Portrait {
        self.d0.compose(&self.d10).compose(&self.d11)
    }
}

fn addr(bits: &[u8]) -> BitWord {
    BitWord::from_bits(bits).expect("short address")
}

/// `h(1)`.
pub fn h1() -> Portrait {
    Portrait::swap_at(addr(&[1]))
}

/// `h(0)`.
pub fn h0() -> Portrait {
    Portrait::swap_at(addr(&[0]))
}

pub fn h_generator(w: BitWord) -> Result<Portrait, GammaError> {
    if w.is_empty() {
        return Err(GammaError::EmptyGenerator);
    }
    Ok(Portrait::swap_at(w))
}

/// `h = d₀ · d₁₀ · d₁₁ · h(1)^eps`.
///
/// With output-indexed portraits the swap at `(1)` is exactly the `h(1)`
/// factor on the right, and the remaining swaps split by prefix.
pub fn decompose_d(h: &Portrait) -> Result<DTriple, GammaError> {
    if !h.in_h() {
        return Err(GammaError::NotInH(h.clone()));
    }
    let one = addr(&[1]);
    let p0 = addr(&[0]);
    let p10 = addr(&[1, 0]);
    let p11 = addr(&[1, 1]);
    Ok(DTriple {
        d0: h.filter(|a| a.has_prefix(&p0)),
        d10: h.filter(|a| a.has_prefix(&p10)),
        d11: h.filter(|a| a.has_prefix(&p11)),
        eps: h.has_swap(&one),
    })
}

/// Conjugation by `g₀` on the `eps = 0` part of `H`.
pub fn alpha(d: &DTriple) -> Result<Portrait, GammaError> {
    if d.eps {
        return Err(GammaError::AlphaOnEps);
    }
    let p0 = addr(&[0]);
    let p10 = addr(&[1, 0]);
    let moved_up = d.d10.shift_prefix(&p10, &p0).expect("support below (1,0)");
    let moved_down = d.d0.shift_prefix(&p0, &p10).expect("support below (0)");
    Ok(moved_up.compose(&moved_down).compose(&d.d11))
}

/// `alpha` applied to a portrait with no swap at `(1)`.
pub fn alpha_portrait(h: &Portrait) -> Result<Portrait, GammaError> {
    alpha(&decompose_d(h)?)
}

/// Rewrites `h · g₀` as `tag · h'`.
pub fn push(h: &Portrait) -> Result<(CosetTag, Portrait), GammaError> {
    let d = decompose_d(h)?;
    if !d.eps {
        Ok((CosetTag::A, alpha(&d)?))
    } else {
        // h·g₀ = h(1) · (h(1) d h(1)) · g₀ = h(1)g₀ · alpha(h(1) d h(1))
        let conj = h1().compose(&d.body()).compose(&h1());
        Ok((CosetTag::B, alpha_portrait(&conj)?))
    }
}

/// Products of coset representatives in `G₀`: `x · y = t · c`.
///
/// `g₀g₀ = e`; `g₀·h(1)g₀ = h(1)g₀·h(1)` because `g₀h(1)g₀ = h(1)g₀h(1)`;
/// `h(1)g₀·g₀ = h(1)`; `h(1)g₀·h(1)g₀ = g₀·h(1)`.
pub fn tag_product(x: CosetTag, y: CosetTag) -> (CosetTag, Portrait) {
    use CosetTag::*;
    match (x, y) {
        (E, t) | (t, E) => (t, Portrait::identity()),
        (A, A) => (E, Portrait::identity()),
        (A, B) => (B, h1()),
        (B, A) => (E, h1()),
        (B, B) => (A, h1()),
    }
}

fn mul_g0(x: &GammaFactorElement, y: &GammaFactorElement) -> GammaFactorElement {
    let (mid_tag, mid_h) = match y.tag {
        CosetTag::E => (CosetTag::E, x.h.clone()),
        CosetTag::A => push(&x.h).expect("tail in H"),
        CosetTag::B => push(&x.h.compose(&h1())).expect("tail in H"),
    };
    let (tag, c) = tag_product(x.tag, mid_tag);
    GammaFactorElement::new(Side::Zero, tag, c.compose(&mid_h).compose(&y.h))
}

/// Exact product in `G₀` or `G₁`.
pub fn factor_mul(
    x: &GammaFactorElement,
    y: &GammaFactorElement,
) -> Result<GammaFactorElement, GammaError> {
    if x.side != y.side {
        return Err(GammaError::MixedFactors(x.side, y.side));
    }
    Ok(match x.side {
        Side::Zero => mul_g0(x, y),
        Side::One => mul_g0(&x.mirror(), &y.mirror()).mirror(),
    })
}

pub fn factor_inv(x: &GammaFactorElement) -> GammaFactorElement {
    let side = x.side;
    // (t·h)⁻¹ = h⁻¹ · t⁻¹ with g⁻¹ = g and (h(1)g₀)⁻¹ = g₀·h(1)
    let t_inv = match x.tag {
        CosetTag::E => GammaFactorElement::identity(side),
        CosetTag::A => GammaFactorElement::g(side),
        CosetTag::B => {
            let flip = match side {
                Side::Zero => h1(),
                Side::One => h0(),
            };
            GammaFactorElement::new(side, CosetTag::A, flip)
        }
    };
    let h_inv = GammaFactorElement::from_h(side, x.h.invert());
    factor_mul(&h_inv, &t_inv).expect("same side")
}

/// The `0 ↔ 1` symmetry of the presentation, exchanging `g₀` and `g₁`.
pub trait Mirror {
    fn mirror(&self) -> Self;
}

impl Mirror for Portrait {
    fn mirror(&self) -> Self {
        Portrait::mirror(self)
    }
}

impl Mirror for GammaFactorElement {
    fn mirror(&self) -> Self {
        GammaFactorElement {
            side: self.side.other(),
            tag: self.tag,
            h: self.h.mirror(),
        }
    }
}

impl Mirror for Syllable {
    fn mirror(&self) -> Self {
        Syllable::new(self.side.other(), self.index)
    }
}

impl Mirror for Element<GammaFactors> {
    fn mirror(&self) -> Self {
        Element::<GammaFactors> {
            syllables: self.syllables.iter().map(Mirror::mirror).collect(),
            tail: self.tail.mirror(),
        }
    }
}

/// Factor contract of `Γ`, with transversals `S₀ = {g₀, h(1)g₀}` and `S₁ = {g₁, h(0)g₁}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GammaFactors;

impl FactorContract for GammaFactors {
    type Elem = GammaFactorElement;
    type H = Portrait;

    fn mul(&self, side: Side, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        debug_assert!(a.side == side && b.side == side);
        factor_mul(a, b).expect("letters of one factor")
    }

    fn inv(&self, _side: Side, a: &Self::Elem) -> Self::Elem {
        factor_inv(a)
    }

    fn embed_h(&self, side: Side, h: &Portrait) -> Self::Elem {
        GammaFactorElement::from_h(side, h.clone())
    }

    fn decompose(&self, _side: Side, g: &Self::Elem) -> (usize, Portrait) {
        (g.tag.index(), g.h.clone())
    }

    fn transversal(&self, side: Side, index: usize) -> Self::Elem {
        let tag = CosetTag::from_index(index).expect("transversal index below 3");
        GammaFactorElement::new(side, tag, Portrait::identity())
    }

    fn index_of_h(&self, _side: Side) -> Option<usize> {
        Some(3)
    }

    fn h_identity(&self) -> Portrait {
        Portrait::identity()
    }

    fn h_mul(&self, a: &Portrait, b: &Portrait) -> Portrait {
        a.compose(b)
    }

    fn h_inv(&self, a: &Portrait) -> Portrait {
        a.invert()
    }
}

/// The amalgam `Γ`.
pub type Gamma = Amalgam<GammaFactors>;

/// Normal-form element of `Γ`.
pub type GammaElement = Element<GammaFactors>;

pub fn gamma() -> Gamma {
    Amalgam::new(GammaFactors)
}

/// `g₀` or `g₁` as a factor letter.
pub fn g_letter(side: Side) -> Letter<GammaFactorElement> {
    Letter::new(side, GammaFactorElement::g(side))
}

/// An element of `H` as a letter of `G₀`.
pub fn h_letter(h: Portrait) -> Letter<GammaFactorElement> {
    Letter::new(Side::Zero, GammaFactorElement::from_h(Side::Zero, h))
}

/// `K₀ = H(0)` and `K₁ = H(1)`: membership by support.
pub fn in_half_tree_kernel(side: Side, h: &Portrait) -> bool {
    h.in_prefix_subgroup(&addr(&[side.index() as u8]), 1)
}
