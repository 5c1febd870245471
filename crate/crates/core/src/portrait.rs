//! Finitary automorphisms of the rooted binary tree.
//!
//! A [`Portrait`] stores the set of vertices at which the two subtrees hanging
//! below the vertex are exchanged. The bit attached to a vertex `u` refers to
//! the *output* side of the map: when walking down the image path, the next
//! letter is flipped iff the image prefix built so far carries a swap. With
//! this convention the amalgamated subgroup `H` of the example group is the
//! set of portraits with no swap at the root, `swap_at(w)` is the generator
//! `h(w)`, and composition is `(p ∘ q)(x) = p(q(x))`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest supported address length.
pub const MAX_DEPTH: usize = 62;

/// Largest depth accepted by [`enumerate_truncation`].
pub const MAX_ENUMERATION_DEPTH: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PortraitError {
    #[error("portrait moves vertex {0}, section is undefined")]
    SectionMovesVertex(BitWord),
    #[error("address {address} does not start with prefix {prefix}")]
    PrefixViolation { address: BitWord, prefix: BitWord },
    #[error("factor address sets overlap: {0} and {1} are comparable prefixes")]
    OverlappingFactors(BitWord, BitWord),
    #[error("exhaustive enumeration is limited to depth {MAX_ENUMERATION_DEPTH}, got {0}")]
    DepthTooLarge(usize),
    #[error("address longer than {MAX_DEPTH} letters")]
    AddressTooLong,
    #[error("invalid portrait literal at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

/// A vertex address of the binary tree: a finite word over `{0, 1}`.
///
/// Stored as `len` letters packed into `value` with the first letter as the
/// most significant bit. The derived ordering is breadth-first: shorter words
/// first, then lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BitWord {
    len: u8,
    value: u64,
}

impl BitWord {
    pub const ROOT: BitWord = BitWord { len: 0, value: 0 };

    pub fn root() -> Self {
        Self::ROOT
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self, PortraitError> {
        if bits.len() > MAX_DEPTH {
            return Err(PortraitError::AddressTooLong);
        }
        let mut w = Self::ROOT;
        for &b in bits {
            if b > 1 {
                return Err(PortraitError::Parse {
                    position: 0,
                    message: format!("bit value {b} is not 0 or 1"),
                });
            }
            w = w.child(b);
        }
        Ok(w)
    }

    /// Packs `len` letters from the low bits of `value` (first letter most significant).
    pub fn from_value(len: usize, value: u64) -> Self {
        assert!(len <= MAX_DEPTH, "address longer than {MAX_DEPTH}");
        let mask = if len == 0 { 0 } else { u64::MAX >> (64 - len) };
        BitWord {
            len: len as u8,
            value: value & mask,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Letter at position `i` (0-based from the root).
    pub fn bit(&self, i: usize) -> u8 {
        debug_assert!(i < self.len());
        ((self.value >> (self.len() - 1 - i)) & 1) as u8
    }

    pub fn first(&self) -> Option<u8> {
        (!self.is_empty()).then(|| self.bit(0))
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.bit(i)).collect()
    }

    pub fn child(&self, b: u8) -> Self {
        assert!(self.len() < MAX_DEPTH, "address longer than {MAX_DEPTH}");
        BitWord {
            len: self.len + 1,
            value: (self.value << 1) | u64::from(b & 1),
        }
    }

    pub fn prefix(&self, k: usize) -> Self {
        debug_assert!(k <= self.len());
        BitWord {
            len: k as u8,
            value: if k == 0 { 0 } else { self.value >> (self.len() - k) },
        }
    }

    pub fn has_prefix(&self, p: &BitWord) -> bool {
        p.len <= self.len && self.prefix(p.len()) == *p
    }

    /// True when one word is a prefix of the other.
    pub fn is_comparable(&self, other: &BitWord) -> bool {
        self.has_prefix(other) || other.has_prefix(self)
    }

    pub fn strip_prefix(&self, p: &BitWord) -> Option<BitWord> {
        if !self.has_prefix(p) {
            return None;
        }
        let rest = self.len() - p.len();
        Some(BitWord::from_value(rest, self.value))
    }

    pub fn concat(&self, suffix: &BitWord) -> BitWord {
        assert!(self.len() + suffix.len() <= MAX_DEPTH, "address longer than {MAX_DEPTH}");
        BitWord {
            len: self.len + suffix.len,
            value: (self.value << suffix.len) | suffix.value,
        }
    }

    /// Flips the letter at position `i`.
    pub fn flip(&self, i: usize) -> BitWord {
        debug_assert!(i < self.len());
        BitWord {
            len: self.len,
            value: self.value ^ (1 << (self.len() - 1 - i)),
        }
    }

    /// Exchanges 0 and 1 in every position.
    pub fn mirror(&self) -> BitWord {
        BitWord::from_value(self.len(), !self.value)
    }

    /// All addresses of length exactly `len`, in lexicographic order.
    pub fn level(len: usize) -> impl Iterator<Item = BitWord> {
        (0..(1u64 << len)).map(move |v| BitWord::from_value(len, v))
    }

    /// All addresses with `1 <= length <= max_len`, breadth-first.
    pub fn up_to(max_len: usize) -> impl Iterator<Item = BitWord> {
        (1..=max_len).flat_map(BitWord::level)
    }
}

impl Ord for BitWord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len, self.value).cmp(&(other.len, other.value))
    }
}

impl PartialOrd for BitWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for BitWord {
    type Err = PortraitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.len() > MAX_DEPTH {
            return Err(PortraitError::AddressTooLong);
        }
        let mut w = BitWord::ROOT;
        for (i, c) in s.char_indices() {
            match c {
                '0' => w = w.child(0),
                '1' => w = w.child(1),
                _ => {
                    return Err(PortraitError::Parse {
                        position: i,
                        message: format!("unexpected character {c:?} in address"),
                    })
                }
            }
        }
        Ok(w)
    }
}

/// Finitary automorphism of the rooted binary tree in canonical sparse form.
///
/// `swaps` is strictly increasing in breadth-first order, so structural
/// equality coincides with equality of automorphisms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Portrait {
    swaps: Vec<BitWord>,
}

impl Portrait {
    pub fn identity() -> Self {
        Portrait { swaps: Vec::new() }
    }

    /// Single swap below `w`; the generator `h(w)` when `w` is nonempty.
    pub fn swap_at(w: BitWord) -> Self {
        Portrait { swaps: vec![w] }
    }

    /// Builds the portrait with the given swap set. Duplicates cancel.
    pub fn from_swaps<I: IntoIterator<Item = BitWord>>(swaps: I) -> Self {
        let mut v: Vec<BitWord> = swaps.into_iter().collect();
        v.sort_unstable();
        let mut out: Vec<BitWord> = Vec::with_capacity(v.len());
        for w in v {
            if out.last() == Some(&w) {
                out.pop();
            } else {
                out.push(w);
            }
        }
        Portrait { swaps: out }
    }

    pub fn swaps(&self) -> &[BitWord] {
        &self.swaps
    }

    pub fn support_len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_identity(&self) -> bool {
        self.swaps.is_empty()
    }

    pub fn has_swap(&self, w: &BitWord) -> bool {
        self.swaps.binary_search(w).is_ok()
    }

    /// Maximum stored address length, 0 for the identity.
    pub fn depth(&self) -> usize {
        self.swaps.last().map_or(0, |w| w.len())
    }

    /// Whether the portrait fixes the first level, i.e. lies in `H`.
    pub fn in_h(&self) -> bool {
        self.swaps.first().is_none_or(|w| !w.is_empty())
    }

    pub fn apply(&self, w: &BitWord) -> BitWord {
        if self.swaps.is_empty() {
            return *w;
        }
        let mut out = BitWord::ROOT;
        for i in 0..w.len() {
            let flip = u8::from(self.has_swap(&out));
            out = out.child(w.bit(i) ^ flip);
        }
        out
    }

    /// Preimage of `w`.
    pub fn apply_inverse(&self, w: &BitWord) -> BitWord {
        if self.swaps.is_empty() {
            return *w;
        }
        let mut out = BitWord::ROOT;
        for i in 0..w.len() {
            let flip = u8::from(self.has_swap(&w.prefix(i)));
            out = out.child(w.bit(i) ^ flip);
        }
        out
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Portrait) -> Portrait {
        if other.is_identity() {
            return self.clone();
        }
        if self.is_identity() {
            return other.clone();
        }
        let mut moved: Vec<BitWord> = other.swaps.iter().map(|z| self.apply(z)).collect();
        moved.sort_unstable();
        Portrait {
            swaps: symmetric_difference(&self.swaps, &moved),
        }
    }

    pub fn invert(&self) -> Portrait {
        let mut v: Vec<BitWord> = self.swaps.iter().map(|a| self.apply_inverse(a)).collect();
        v.sort_unstable();
        Portrait { swaps: v }
    }

    /// `c ∘ self ∘ c⁻¹`.
    pub fn conjugate_by(&self, c: &Portrait) -> Portrait {
        c.compose(self).compose(&c.invert())
    }

    /// Restriction to the subtree below `w`, re-rooted. Requires `self` to fix `w`.
    pub fn section(&self, w: &BitWord) -> Result<Portrait, PortraitError> {
        if self.apply(w) != *w {
            return Err(PortraitError::SectionMovesVertex(*w));
        }
        Ok(Portrait {
            swaps: self.swaps.iter().filter_map(|a| a.strip_prefix(w)).collect::<Vec<_>>(),
        }
        .resorted())
    }

    /// Moves the whole support from below `from` to below `to`.
    pub fn shift_prefix(&self, from: &BitWord, to: &BitWord) -> Result<Portrait, PortraitError> {
        let mut out = Vec::with_capacity(self.swaps.len());
        for a in &self.swaps {
            let rest = a.strip_prefix(from).ok_or(PortraitError::PrefixViolation {
                address: *a,
                prefix: *from,
            })?;
            out.push(to.concat(&rest));
        }
        Ok(Portrait { swaps: out }.resorted())
    }

    /// Membership in `H_k(w)`: every swap sits below `w` at depth `>= min_depth`.
    ///
    /// These subgroups consist of exactly the portraits supported on that
    /// address set, so the test is a support inspection.
    pub fn in_prefix_subgroup(&self, w: &BitWord, min_depth: usize) -> bool {
        let min_depth = min_depth.max(w.len());
        self.swaps
            .iter()
            .all(|a| a.has_prefix(w) && a.len() >= min_depth)
    }

    /// Membership in a product of support-disjoint prefix subgroups.
    pub fn in_product_subgroup(&self, factors: &[(BitWord, usize)]) -> Result<bool, PortraitError> {
        for (i, (u, _)) in factors.iter().enumerate() {
            for (w, _) in &factors[i + 1..] {
                // depth ranges are unbounded above, so only incomparable prefixes are disjoint
                if u.is_comparable(w) {
                    return Err(PortraitError::OverlappingFactors(*u, *w));
                }
            }
        }
        Ok(self.swaps.iter().all(|a| {
            factors
                .iter()
                .any(|(w, m)| a.has_prefix(w) && a.len() >= (*m).max(w.len()))
        }))
    }

    /// Exchanges 0 and 1 in every address.
    pub fn mirror(&self) -> Portrait {
        Portrait {
            swaps: self.swaps.iter().map(BitWord::mirror).collect::<Vec<_>>(),
        }
        .resorted()
    }

    /// Portrait restricted to swaps whose address satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&BitWord) -> bool) -> Portrait {
        Portrait {
            swaps: self.swaps.iter().copied().filter(|a| keep(a)).collect(),
        }
    }

    /// Bit mask of this portrait inside the truncation `B_depth`, if it belongs there.
    pub fn truncation_mask(&self, depth: usize) -> Option<u64> {
        if !self.in_h() || self.depth() > depth {
            return None;
        }
        Some(
            self.swaps
                .iter()
                .map(|a| 1u64 << address_position(a))
                .fold(0, |acc, b| acc | b),
        )
    }

    fn resorted(mut self) -> Self {
        self.swaps.sort_unstable();
        self
    }
}

impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.swaps.is_empty() {
            return write!(f, "e");
        }
        for (i, a) in self.swaps.iter().enumerate() {
            if i > 0 {
                write!(f, ";")?;
            }
            if a.is_empty() {
                write!(f, "-")?;
            } else {
                write!(f, "{a}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait[{self}]")
    }
}

/// Literal format: `e` (or the empty string) for the identity, otherwise a
/// `;`-separated list of addresses, the root written as `-`. Listing an
/// address twice is rejected so that parse and print are mutually inverse.
impl FromStr for Portrait {
    type Err = PortraitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || s == "e" {
            return Ok(Portrait::identity());
        }
        let mut swaps = Vec::new();
        let mut offset = 0;
        for part in s.split(';') {
            let w = if part == "-" {
                BitWord::ROOT
            } else if part.is_empty() {
                return Err(PortraitError::Parse {
                    position: offset,
                    message: "empty address (write the root as '-')".into(),
                });
            } else {
                part.parse::<BitWord>().map_err(|e| match e {
                    PortraitError::Parse { position, message } => PortraitError::Parse {
                        position: offset + position,
                        message,
                    },
                    other => other,
                })?
            };
            swaps.push(w);
            offset += part.len() + 1;
        }
        let n = swaps.len();
        let p = Portrait::from_swaps(swaps);
        if p.swaps.len() != n {
            return Err(PortraitError::Parse {
                position: 0,
                message: "address listed more than once".into(),
            });
        }
        Ok(p)
    }
}

/// Serialized as the literal string, like [`fmt::Display`].
impl Serialize for Portrait {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Portrait {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

impl Serialize for BitWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

/// Breadth-first position of a nonempty address among all nonempty addresses.
pub fn address_position(a: &BitWord) -> u32 {
    debug_assert!(!a.is_empty());
    ((1u64 << a.len()) - 2 + a.value()) as u32
}

/// Number of swap positions in the truncation `B_depth`.
pub fn truncation_positions(depth: usize) -> usize {
    (1usize << (depth + 1)) - 2
}

/// The portrait with mask `mask` in `B_depth`.
pub fn truncation_element(depth: usize, mask: u64) -> Portrait {
    let swaps = BitWord::up_to(depth)
        .enumerate()
        .filter(|(i, _)| (mask >> i) & 1 == 1)
        .map(|(_, a)| a)
        .collect();
    Portrait { swaps }
}

/// Every element of `H` of depth at most `depth`, each once.
///
/// Addresses are numbered breadth-first and element `m` has a swap at address
/// `i` iff bit `i` of `m` is set, so the stream runs in binary counting order.
pub fn enumerate_truncation(
    depth: usize,
) -> Result<impl ExactSizeIterator<Item = Portrait> + Clone, PortraitError> {
    if depth > MAX_ENUMERATION_DEPTH {
        return Err(PortraitError::DepthTooLarge(depth));
    }
    let n = truncation_positions(depth);
    Ok((0..(1u32 << n)).map(move |m| truncation_element(depth, u64::from(m))))
}

fn symmetric_difference(a: &[BitWord], b: &[BitWord]) -> Vec<BitWord> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BitWord {
        s.parse().unwrap()
    }

    fn h(s: &str) -> Portrait {
        Portrait::swap_at(w(s))
    }

    #[test]
    fn swap_is_an_involution() {
        assert_eq!(h("0").swaps(), &[w("0")]);
        assert!(h("0").compose(&h("0")).is_identity());
        assert_ne!(h("10"), h("01"));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Portrait::identity().apply(&w("011")), w("011"));
        assert_eq!(h("0").apply(&w("001")), w("011"));
        assert_eq!(h("0").apply(&w("10")), w("10"));
        assert_eq!(h("0").apply(&w("0")), w("0"));
    }

    #[test]
    fn conjugation_flips_the_next_letter() {
        assert_eq!(h("0").compose(&h("00").compose(&h("0"))), h("01"));
        assert_eq!(h("0").compose(&h("1")), h("1").compose(&h("0")));
    }

    #[test]
    fn apply_inverse_undoes_apply() {
        let p = Portrait::from_swaps([w("0"), w("01"), w("011"), w("1")]);
        for a in BitWord::up_to(4) {
            assert_eq!(p.apply_inverse(&p.apply(&a)), a);
        }
    }

    #[test]
    fn section_examples() {
        assert_eq!(h("01").section(&w("0")).unwrap(), h("1"));
        assert!(h("1").section(&w("0")).unwrap().is_identity());
        let p = Portrait::from_swaps([w("0"), w("10")]);
        assert_eq!(p.section(&BitWord::ROOT).unwrap(), p);
        assert_eq!(
            h("0").section(&w("00")),
            Err(PortraitError::SectionMovesVertex(w("00")))
        );
    }

    #[test]
    fn shift_prefix_examples() {
        assert_eq!(h("101").shift_prefix(&w("10"), &w("0")).unwrap(), h("01"));
        assert!(Portrait::identity()
            .shift_prefix(&w("1"), &w("0"))
            .unwrap()
            .is_identity());
        assert!(matches!(
            h("11").shift_prefix(&w("10"), &w("0")),
            Err(PortraitError::PrefixViolation { .. })
        ));
    }

    #[test]
    fn prefix_subgroup_membership() {
        assert!(h("01").in_prefix_subgroup(&w("0"), 1));
        assert!(!h("1").in_prefix_subgroup(&w("1"), 2));
        assert!(Portrait::identity().in_prefix_subgroup(&w("0110"), 7));
    }

    #[test]
    fn product_subgroup_membership() {
        let factors = [(w("0"), 1), (w("1"), 2)];
        let x = h("0").compose(&h("11"));
        assert_eq!(x.in_product_subgroup(&factors), Ok(true));
        assert_eq!(h("1").in_product_subgroup(&factors), Ok(false));
        assert_eq!(Portrait::identity().in_product_subgroup(&factors), Ok(true));
        assert!(matches!(
            h("0").in_product_subgroup(&[(w("0"), 1), (w("01"), 2)]),
            Err(PortraitError::OverlappingFactors(_, _))
        ));
    }

    #[test]
    fn truncation_counts() {
        assert_eq!(enumerate_truncation(0).unwrap().count(), 1);
        let b1: Vec<_> = enumerate_truncation(1).unwrap().collect();
        assert_eq!(
            b1,
            vec![
                Portrait::identity(),
                h("0"),
                h("1"),
                h("0").compose(&h("1"))
            ]
        );
        assert_eq!(enumerate_truncation(2).unwrap().count(), 64);
        assert_eq!(enumerate_truncation(3).unwrap().len(), 16384);
        assert_eq!(
            enumerate_truncation(4).err(),
            Some(PortraitError::DepthTooLarge(4))
        );
    }

    #[test]
    fn truncation_mask_round_trip() {
        for (m, p) in enumerate_truncation(2).unwrap().enumerate() {
            assert_eq!(p.truncation_mask(2), Some(m as u64));
        }
        assert_eq!(h("000").truncation_mask(2), None);
    }

    #[test]
    fn literal_format() {
        let p: Portrait = "0;101".parse().unwrap();
        assert_eq!(p, h("0").compose(&h("101")));
        assert_eq!(p.to_string(), "0;101");
        assert_eq!("e".parse::<Portrait>().unwrap(), Portrait::identity());
        assert_eq!(Portrait::identity().to_string(), "e");
        let root: Portrait = "-;1".parse().unwrap();
        assert!(!root.in_h());
        assert_eq!(root.to_string(), "-;1");
        assert!("0;;1".parse::<Portrait>().is_err());
        assert!("0;0".parse::<Portrait>().is_err());
        assert!(matches!(
            "01;0x".parse::<Portrait>(),
            Err(PortraitError::Parse { position: 4, .. })
        ));
    }

    #[test]
    fn bitword_ordering_is_breadth_first() {
        let mut v = vec![w("00"), w("1"), w(""), w("0"), w("11")];
        v.sort();
        assert_eq!(v, vec![w(""), w("0"), w("1"), w("00"), w("11")]);
    }
}
