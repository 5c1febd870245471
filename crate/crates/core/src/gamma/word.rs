//! Generator words for `Γ`: the text format, the defining relations and the
//! listed generators of `Γ′`.
//!
//! Grammar: whitespace-separated tokens `g0`, `g1`, `h:<bits>` (nonempty bit
//! string), and `e` for the empty word.

use std::fmt;

use super::{g_letter, h_letter, GammaElement, GammaFactorElement};
use crate::amalgam::{tokens, Letter, Side, WordParseError};
use crate::portrait::{BitWord, Portrait};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gen {
    G0,
    G1,
    H(BitWord),
}

impl Gen {
    pub fn g(side: Side) -> Gen {
        match side {
            Side::Zero => Gen::G0,
            Side::One => Gen::G1,
        }
    }

    pub fn mirror(&self) -> Gen {
        match self {
            Gen::G0 => Gen::G1,
            Gen::G1 => Gen::G0,
            Gen::H(w) => Gen::H(w.mirror()),
        }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::G0 => write!(f, "g0"),
            Gen::G1 => write!(f, "g1"),
            Gen::H(w) => write!(f, "h:{w}"),
        }
    }
}

pub fn parse_word(s: &str) -> Result<Vec<Gen>, WordParseError> {
    let mut out = Vec::new();
    for t in tokens(s) {
        match t.text {
            "g0" => out.push(Gen::G0),
            "g1" => out.push(Gen::G1),
            "e" => {}
            _ => {
                let bits = t
                    .text
                    .strip_prefix("h:")
                    .ok_or_else(|| t.error("expected g0, g1, e or h:<bits>"))?;
                if bits.is_empty() {
                    return Err(t.error("h: needs a nonempty address"));
                }
                let w: BitWord = bits
                    .parse()
                    .map_err(|_| t.error("address must be a 0/1 string"))?;
                out.push(Gen::H(w));
            }
        }
    }
    Ok(out)
}

pub fn format_word(word: &[Gen]) -> String {
    if word.is_empty() {
        return "e".to_string();
    }
    word.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn mirror_word(word: &[Gen]) -> Vec<Gen> {
    word.iter().map(Gen::mirror).collect()
}

pub fn word_to_letters(word: &[Gen]) -> Vec<Letter<GammaFactorElement>> {
    word.iter()
        .map(|g| match g {
            Gen::G0 => g_letter(Side::Zero),
            Gen::G1 => g_letter(Side::One),
            Gen::H(w) => h_letter(Portrait::swap_at(*w)),
        })
        .collect()
}

/// A word for `h`: its swaps from deepest to shallowest, which multiply out to `h`.
pub fn portrait_word(h: &Portrait) -> Vec<Gen> {
    h.swaps().iter().rev().map(|w| Gen::H(*w)).collect()
}

/// Renders a normal form in the generator grammar; the output parses back to the same element.
pub fn format_nf(x: &GammaElement) -> String {
    let mut word = Vec::new();
    for s in &x.syllables {
        match (s.side, s.index) {
            (side, 1) => word.push(Gen::g(side)),
            (side, _) => {
                let flip = BitWord::from_value(1, side.other().index() as u64);
                word.push(Gen::H(flip));
                word.push(Gen::g(side));
            }
        }
    }
    word.extend(portrait_word(&x.tail));
    format_word(&word)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    Involution,
    Conjugation,
    GSquare,
    Triangle,
    GConjugation,
}

/// A defining relator `r` of `Γ` (the relation reads `r = e`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub kind: RelationKind,
    pub word: Vec<Gen>,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, format_word(&self.word))
    }
}

/// Every defining relator whose `h`-parameters have length at most `max_len`.
///
/// The `g`-conjugation families are taken with `n ≥ 2`, so the suffix after
/// the fixed two-letter prefix may be empty.
pub fn defining_relations(max_len: usize) -> Vec<Relation> {
    let mut out = Vec::new();
    let words: Vec<BitWord> = BitWord::up_to(max_len).collect();
    for w in &words {
        out.push(Relation {
            kind: RelationKind::Involution,
            word: vec![Gen::H(*w), Gen::H(*w)],
        });
    }
    for i in &words {
        for j in words.iter().filter(|j| j.len() >= i.len()) {
            let image = if j.len() > i.len() && j.has_prefix(i) {
                j.flip(i.len())
            } else {
                *j
            };
            out.push(Relation {
                kind: RelationKind::Conjugation,
                word: vec![Gen::H(*i), Gen::H(*j), Gen::H(*i), Gen::H(image)],
            });
        }
    }
    let w = |s: &str| s.parse::<BitWord>().expect("literal");
    out.push(Relation {
        kind: RelationKind::GSquare,
        word: vec![Gen::G0, Gen::G0],
    });
    out.push(Relation {
        kind: RelationKind::GSquare,
        word: vec![Gen::G1, Gen::G1],
    });
    out.push(Relation {
        kind: RelationKind::Triangle,
        word: [Gen::G0, Gen::H(w("1"))].repeat(3),
    });
    out.push(Relation {
        kind: RelationKind::Triangle,
        word: [Gen::G1, Gen::H(w("0"))].repeat(3),
    });
    let suffixes = std::iter::once(BitWord::ROOT).chain(BitWord::up_to(max_len.saturating_sub(2)));
    for x in suffixes.filter(|_| max_len >= 2) {
        let cat = |p: &str| w(p).concat(&x);
        let fams = [
            (Gen::G0, cat("10"), cat("0")),
            (Gen::G0, cat("11"), cat("11")),
            (Gen::G1, cat("00"), cat("00")),
            (Gen::G1, cat("01"), cat("1")),
        ];
        for (g, from, to) in fams {
            out.push(Relation {
                kind: RelationKind::GConjugation,
                word: vec![g, Gen::H(from), g, Gen::H(to)],
            });
        }
    }
    out
}

/// The generators of `Γ′ = ker θ` listed with parameter `k ≤ max_k`.
pub fn gamma_prime_generators(max_k: usize) -> Vec<Vec<Gen>> {
    let w = |s: &str| s.parse::<BitWord>().expect("literal");
    let mut out = vec![
        vec![Gen::H(w("0")), Gen::G1],
        vec![Gen::H(w("1")), Gen::G0],
        vec![Gen::G1, Gen::H(w("0"))],
        vec![Gen::G0, Gen::H(w("1"))],
    ];
    for k in 1..=max_k {
        for (lead, start, tail_len) in [
            ("0", "0", 2 * k),
            ("0", "1", 2 * k - 1),
            ("1", "1", 2 * k),
            ("1", "0", 2 * k - 1),
        ] {
            for suffix in BitWord::level(tail_len) {
                out.push(vec![Gen::H(w(lead)), Gen::H(w(start).concat(&suffix))]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let v = parse_word("g0  h:10\tg1").unwrap();
        assert_eq!(
            v,
            vec![Gen::G0, Gen::H("10".parse().unwrap()), Gen::G1]
        );
        assert_eq!(format_word(&v), "g0 h:10 g1");
        assert_eq!(parse_word("e").unwrap(), vec![]);
        assert_eq!(parse_word("").unwrap(), vec![]);
        assert_eq!(format_word(&[]), "e");
    }

    #[test]
    fn parse_errors_carry_position() {
        let e = parse_word("g0 g2 h:1").unwrap_err();
        assert_eq!((e.index, e.column, e.token.as_str()), (1, 3, "g2"));
        let e = parse_word("g0 h:").unwrap_err();
        assert_eq!(e.index, 1);
        let e = parse_word("h:0 h:012").unwrap_err();
        assert_eq!((e.index, e.column), (1, 4));
    }

    #[test]
    fn relation_counts() {
        let r = defining_relations(2);
        let count = |k| r.iter().filter(|x| x.kind == k).count();
        assert_eq!(count(RelationKind::Involution), 6);
        // pairs (i, j) with |i| ≤ |j| ≤ 2
        assert_eq!(count(RelationKind::Conjugation), 2 * 6 + 4 * 4);
        assert_eq!(count(RelationKind::GConjugation), 4);
    }

    #[test]
    fn relation_set_is_mirror_closed() {
        let r = defining_relations(4);
        let set: std::collections::BTreeSet<_> = r.iter().map(|x| x.word.clone()).collect();
        for x in &r {
            assert!(set.contains(&mirror_word(&x.word)), "{x}");
        }
    }
}
