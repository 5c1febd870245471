//! Normal forms in an amalgamated free product `G₀ *_H G₁`.
//!
//! The engine is generic over a [`FactorContract`], which supplies exact
//! arithmetic in both factors together with a fixed left transversal of `H`
//! in each. Elements are stored as [`NormalForm`]s `s₁ s₂ ⋯ sₙ h`: transversal
//! syllables strictly alternating between the factors, followed by an
//! `H`-tail. Two elements are equal iff their normal forms are identical.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Zero,
    One,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Zero, Side::One];

    pub fn other(self) -> Side {
        match self {
            Side::Zero => Side::One,
            Side::One => Side::Zero,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Zero => 0,
            Side::One => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Side> {
        match i {
            0 => Some(Side::Zero),
            1 => Some(Side::One),
            _ => None,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamError {
    #[error("letter lies in the amalgamated subgroup, expected an element of G{0} outside H")]
    LetterInH(Side),
    #[error("index of H in G{0} is infinite or unknown")]
    UnknownIndex(Side),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad token {token:?} (token {index}, column {column}): {message}")]
pub struct WordParseError {
    /// 0-based token index.
    pub index: usize,
    /// 0-based byte offset of the token in the input.
    pub column: usize,
    pub token: String,
    pub message: String,
}

/// One whitespace-separated token of a word literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    /// 0-based token index.
    pub index: usize,
    /// 0-based byte offset in the input.
    pub column: usize,
}

impl Token<'_> {
    pub fn error(&self, message: &str) -> WordParseError {
        WordParseError {
            index: self.index,
            column: self.column,
            token: self.text.to_string(),
            message: message.to_string(),
        }
    }
}

/// Splits a word literal into whitespace-separated tokens with their positions.
pub fn tokens(s: &str) -> impl Iterator<Item = Token<'_>> {
    s.split_whitespace().enumerate().map(move |(index, text)| Token {
        text,
        index,
        // split_whitespace yields subslices of `s`
        column: text.as_ptr() as usize - s.as_ptr() as usize,
    })
}

/// Exact arithmetic in the two factors of an amalgam.
///
/// Implementations must satisfy, for both sides:
/// `mul(transversal(i), embed_h(h)) == g` whenever `decompose(g) == (i, h)`,
/// `transversal(0)` is the identity, and distinct transversal indices lie in
/// distinct left cosets of `H`.
pub trait FactorContract {
    type Elem: Clone + PartialEq + Debug;
    type H: Clone + Eq + Ord + Hash + Debug;

    fn mul(&self, side: Side, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, side: Side, a: &Self::Elem) -> Self::Elem;
    fn embed_h(&self, side: Side, h: &Self::H) -> Self::Elem;
    /// `(i, h)` with `g = transversal(i) · h`; `i == 0` iff `g ∈ H`.
    fn decompose(&self, side: Side, g: &Self::Elem) -> (usize, Self::H);
    fn transversal(&self, side: Side, index: usize) -> Self::Elem;
    /// `[G_side : H]`, `None` when infinite or unknown.
    fn index_of_h(&self, side: Side) -> Option<usize>;
    fn h_identity(&self) -> Self::H;

    fn identity(&self, side: Side) -> Self::Elem {
        self.transversal(side, 0)
    }

    fn is_in_h(&self, side: Side, g: &Self::Elem) -> bool {
        self.decompose(side, g).0 == 0
    }

    fn h_mul(&self, a: &Self::H, b: &Self::H) -> Self::H {
        let side = Side::Zero;
        let p = self.mul(side, &self.embed_h(side, a), &self.embed_h(side, b));
        self.decompose(side, &p).1
    }

    fn h_inv(&self, a: &Self::H) -> Self::H {
        let side = Side::Zero;
        self.decompose(side, &self.inv(side, &self.embed_h(side, a))).1
    }
}

/// A factor element tagged with its factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Letter<E> {
    pub side: Side,
    pub elem: E,
}

impl<E> Letter<E> {
    pub fn new(side: Side, elem: E) -> Self {
        Letter { side, elem }
    }
}

/// A nontrivial left coset of `H` in one factor, named by its transversal index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syllable {
    pub side: Side,
    pub index: usize,
}

impl Syllable {
    pub fn new(side: Side, index: usize) -> Self {
        debug_assert!(index >= 1);
        Syllable { side, index }
    }
}

impl std::fmt::Display for Syllable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "g{}_{}", self.side.index(), self.index)
    }
}

/// Renders a syllable sequence as `g0_1.g1_2`; the empty sequence renders as the empty string.
pub fn syllables_to_string(s: &[Syllable]) -> String {
    s.iter().map(ToString::to_string).collect::<Vec<_>>().join(".")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm<H> {
    pub syllables: Vec<Syllable>,
    pub tail: H,
}

impl<H> NormalForm<H> {
    /// Number of syllables.
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn is_in_h(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn first_side(&self) -> Option<Side> {
        self.syllables.first().map(|s| s.side)
    }

    pub fn last_side(&self) -> Option<Side> {
        self.syllables.last().map(|s| s.side)
    }

    pub fn is_alternating(&self) -> bool {
        self.syllables.windows(2).all(|p| p[0].side != p[1].side)
    }
}

/// Element type of the amalgam over contract `C`.
pub type Element<C> = NormalForm<<C as FactorContract>::H>;

/// The amalgam `G₀ *_H G₁` over a factor contract.
#[derive(Debug, Clone)]
pub struct Amalgam<C> {
    contract: C,
}

impl<C: FactorContract> Amalgam<C> {
    pub fn new(contract: C) -> Self {
        Amalgam { contract }
    }

    pub fn contract(&self) -> &C {
        &self.contract
    }

    pub fn identity(&self) -> Element<C> {
        NormalForm {
            syllables: Vec::new(),
            tail: self.contract.h_identity(),
        }
    }

    pub fn is_identity(&self, x: &Element<C>) -> bool {
        x.syllables.is_empty() && x.tail == self.contract.h_identity()
    }

    pub fn from_h(&self, h: C::H) -> Element<C> {
        NormalForm {
            syllables: Vec::new(),
            tail: h,
        }
    }

    /// Normal form of a single factor letter.
    pub fn from_letter(&self, side: Side, g: &C::Elem) -> Element<C> {
        let (i, h) = self.contract.decompose(side, g);
        NormalForm {
            syllables: if i == 0 { Vec::new() } else { vec![Syllable::new(side, i)] },
            tail: h,
        }
    }

    /// The transversal word `s₁⋯sₙ` with trivial tail.
    pub fn from_syllables(&self, syllables: &[Syllable]) -> Element<C> {
        NormalForm {
            syllables: syllables.to_vec(),
            tail: self.contract.h_identity(),
        }
    }

    /// Right multiplication by one factor letter. The tail stays rightmost:
    /// `tail · g` is formed inside the letter's factor, merged with the last
    /// syllable when it lives in the same factor, and split again by the
    /// factor's transversal.
    pub fn push_letter(&self, x: &mut Element<C>, side: Side, g: &C::Elem) {
        let c = &self.contract;
        let mut acc = c.mul(side, &c.embed_h(side, &x.tail), g);
        if x.last_side() == Some(side) {
            let s = x.syllables.pop().expect("nonempty");
            acc = c.mul(side, &c.transversal(side, s.index), &acc);
        }
        let (i, h) = c.decompose(side, &acc);
        if i != 0 {
            x.syllables.push(Syllable::new(side, i));
        }
        x.tail = h;
    }

    /// Normal form of the product of `word`, read left to right.
    pub fn normalize(&self, word: &[Letter<C::Elem>]) -> Element<C> {
        let mut x = self.identity();
        for l in word {
            self.push_letter(&mut x, l.side, &l.elem);
        }
        x
    }

    pub fn mul(&self, x: &Element<C>, y: &Element<C>) -> Element<C> {
        let mut out = x.clone();
        for s in &y.syllables {
            self.push_letter(&mut out, s.side, &self.contract.transversal(s.side, s.index));
        }
        let side = Side::Zero;
        self.push_letter(&mut out, side, &self.contract.embed_h(side, &y.tail));
        out
    }

    pub fn mul_all<'a, I>(&self, items: I) -> Element<C>
    where
        I: IntoIterator<Item = &'a Element<C>>,
        C::H: 'a,
    {
        items
            .into_iter()
            .fold(self.identity(), |acc, x| self.mul(&acc, x))
    }

    pub fn inv(&self, x: &Element<C>) -> Element<C> {
        let c = &self.contract;
        let mut out = self.from_h(c.h_inv(&x.tail));
        for s in x.syllables.iter().rev() {
            let g = c.inv(s.side, &c.transversal(s.side, s.index));
            self.push_letter(&mut out, s.side, &g);
        }
        out
    }

    pub fn pow(&self, x: &Element<C>, n: usize) -> Element<C> {
        (0..n).fold(self.identity(), |acc, _| self.mul(&acc, x))
    }

    /// `g⁻¹ · x · g`.
    pub fn conjugate(&self, x: &Element<C>, g: &Element<C>) -> Element<C> {
        self.mul(&self.mul(&self.inv(g), x), g)
    }

    /// The factor letters `s₁, …, sₙ, h` whose product is `x`.
    pub fn to_letters(&self, x: &Element<C>) -> Vec<Letter<C::Elem>> {
        let c = &self.contract;
        let mut v: Vec<_> = x
            .syllables
            .iter()
            .map(|s| Letter::new(s.side, c.transversal(s.side, s.index)))
            .collect();
        v.push(Letter::new(Side::Zero, c.embed_h(Side::Zero, &x.tail)));
        v
    }

    /// Moves `h` across a letter: returns `g' = h⁻¹ g h`, so that `g h = h g'`
    /// with `g'` again outside `H`.
    pub fn cycle(&self, h: &C::H, side: Side, g: &C::Elem) -> Result<C::Elem, AmalgamError> {
        let c = &self.contract;
        if c.is_in_h(side, g) {
            return Err(AmalgamError::LetterInH(side));
        }
        let he = c.embed_h(side, h);
        Ok(c.mul(side, &c.mul(side, &c.inv(side, &he), g), &he))
    }

    /// `(j, k)`: the side of the first syllable (`None` inside `H`) and the syllable count.
    pub fn word_type(&self, x: &Element<C>) -> (Option<Side>, usize) {
        (x.first_side(), x.len())
    }

    /// All alternating transversal words of length `k` starting in factor `j`,
    /// in lexicographic order of transversal indices.
    pub fn transversal_words(&self, j: Side, k: usize) -> Result<Vec<Vec<Syllable>>, AmalgamError> {
        let n = [
            self.finite_index(Side::Zero)?,
            self.finite_index(Side::One)?,
        ];
        let mut words: Vec<Vec<Syllable>> = vec![Vec::new()];
        let mut side = j;
        for _ in 0..k {
            let mut next = Vec::with_capacity(words.len() * (n[side.index()] - 1));
            for w in &words {
                for i in 1..n[side.index()] {
                    let mut v = w.clone();
                    v.push(Syllable::new(side, i));
                    next.push(v);
                }
            }
            words = next;
            side = side.other();
        }
        Ok(words)
    }

    pub fn finite_index(&self, side: Side) -> Result<usize, AmalgamError> {
        self.contract
            .index_of_h(side)
            .ok_or(AmalgamError::UnknownIndex(side))
    }

    /// `([G₀:H] − 1)([G₁:H] − 1) ≥ 2`, or `None` when an index is unknown.
    pub fn nondegeneracy_check(&self) -> Option<bool> {
        let a = self.contract.index_of_h(Side::Zero)?;
        let b = self.contract.index_of_h(Side::One)?;
        Some(nondegenerate(a, b))
    }
}

pub fn nondegenerate(index0: usize, index1: usize) -> bool {
    (index0.saturating_sub(1)) * (index1.saturating_sub(1)) >= 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nondegeneracy_table() {
        assert!(nondegenerate(3, 3));
        assert!(!nondegenerate(2, 2));
        assert!(nondegenerate(2, 3));
        assert!(!nondegenerate(1, 5));
    }

    #[test]
    fn side_helpers() {
        assert_eq!(Side::Zero.other(), Side::One);
        assert_eq!(Side::from_index(1), Some(Side::One));
        assert_eq!(Side::from_index(2), None);
    }
}
