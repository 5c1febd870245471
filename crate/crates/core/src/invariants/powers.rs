//! Ball-restricted checks around Powers' property: the conjugator transform,
//! partitions `G = D ⊔ E` given by predicates, and free `Z₃ * Z₃` pairs.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::InvariantsError;
use crate::amalgam::{tokens, Amalgam, Element, FactorContract, NormalForm, Side};

/// Membership predicate of a normal subgroup.
pub type NormalSubgroup<'a, C> = &'a dyn Fn(&Element<C>) -> bool;

/// From `f` and conjugators `g₁,…,g_k`, the elements `s₁ = e` and
/// `s_i = g₁⁻¹ g_i f g_i⁻¹ g₁` for `i ≥ 2`. When `normal` holds for `f` (a
/// normal subgroup containing it), every `s_i` is checked to satisfy it too.
pub fn powers_witness_transform<C: FactorContract>(
    a: &Amalgam<C>,
    f: &Element<C>,
    gs: &[Element<C>],
    normal: Option<NormalSubgroup<'_, C>>,
) -> Result<Vec<Element<C>>, InvariantsError> {
    let Some(g1) = gs.first() else {
        return Err(InvariantsError::NoConjugators);
    };
    let g1_inv = a.inv(g1);
    let mut out = vec![a.identity()];
    for g in &gs[1..] {
        out.push(a.mul_all([&g1_inv, g, f, &a.inv(g), g1]));
    }
    if let Some(n) = normal {
        if n(f) {
            if let Some(i) = out.iter().position(|s| !n(s)) {
                return Err(InvariantsError::LeftNormalSubgroup { index: i + 1 });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("predicate error at column {column}: {message}")]
pub struct PredicateError {
    pub column: usize,
    pub message: String,
}

/// A predicate on normal forms.
///
/// Grammar: atoms `starts:0`, `starts:1` (first syllable in that factor),
/// `isH` (no syllables), `ise` (the identity), `true`, `false`; prefix `!`,
/// infix `&` binding tighter than `|`, and parentheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pred {
    Starts(Side),
    IsH,
    IsE,
    Const(bool),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

impl Pred {
    pub fn eval<H: PartialEq>(&self, x: &NormalForm<H>, h_identity: &H) -> bool {
        match self {
            Pred::Starts(s) => x.first_side() == Some(*s),
            Pred::IsH => x.is_in_h(),
            Pred::IsE => x.is_in_h() && x.tail == *h_identity,
            Pred::Const(b) => *b,
            Pred::Not(p) => !p.eval(x, h_identity),
            Pred::And(p, q) => p.eval(x, h_identity) && q.eval(x, h_identity),
            Pred::Or(p, q) => p.eval(x, h_identity) || q.eval(x, h_identity),
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Starts(s) => write!(f, "starts:{}", s.index()),
            Pred::IsH => write!(f, "isH"),
            Pred::IsE => write!(f, "ise"),
            Pred::Const(b) => write!(f, "{b}"),
            Pred::Not(p) => write!(f, "!{p}"),
            Pred::And(p, q) => write!(f, "({p} & {q})"),
            Pred::Or(p, q) => write!(f, "({p} | {q})"),
        }
    }
}

struct PredParser {
    toks: Vec<(usize, String)>,
    pos: usize,
    end: usize,
}

impl PredParser {
    fn err(&self, message: &str) -> PredicateError {
        PredicateError {
            column: self.toks.get(self.pos).map_or(self.end, |t| t.0),
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(|t| t.1.as_str())
    }

    fn or(&mut self) -> Result<Pred, PredicateError> {
        let mut p = self.and()?;
        while self.peek() == Some("|") {
            self.pos += 1;
            p = Pred::Or(Box::new(p), Box::new(self.and()?));
        }
        Ok(p)
    }

    fn and(&mut self) -> Result<Pred, PredicateError> {
        let mut p = self.unary()?;
        while self.peek() == Some("&") {
            self.pos += 1;
            p = Pred::And(Box::new(p), Box::new(self.unary()?));
        }
        Ok(p)
    }

    fn unary(&mut self) -> Result<Pred, PredicateError> {
        let p = match self.peek() {
            Some("!") => {
                self.pos += 1;
                return Ok(Pred::Not(Box::new(self.unary()?)));
            }
            Some("(") => {
                self.pos += 1;
                let p = self.or()?;
                if self.peek() != Some(")") {
                    return Err(self.err("expected ')'"));
                }
                p
            }
            Some("starts:0") => Pred::Starts(Side::Zero),
            Some("starts:1") => Pred::Starts(Side::One),
            Some("isH") => Pred::IsH,
            Some("ise") => Pred::IsE,
            Some("true") => Pred::Const(true),
            Some("false") => Pred::Const(false),
            Some(_) => return Err(self.err("unknown predicate atom")),
            None => return Err(self.err("unexpected end of predicate")),
        };
        self.pos += 1;
        Ok(p)
    }
}

pub fn parse_predicate(s: &str) -> Result<Pred, PredicateError> {
    let spaced = s.replace('(', " ( ").replace(')', " ) ").replace('!', " ! ");
    let spaced = spaced.replace('&', " & ").replace('|', " | ");
    // Map columns of the spaced string back to the input.
    let mut col_map = Vec::with_capacity(spaced.len());
    let mut orig = 0;
    for c in s.chars() {
        let pad = matches!(c, '(' | ')' | '!' | '&' | '|');
        let width = c.len_utf8() + if pad { 2 } else { 0 };
        col_map.extend(std::iter::repeat_n(orig, width));
        orig += c.len_utf8();
    }
    let toks = tokens(&spaced)
        .map(|t| (col_map.get(t.column).copied().unwrap_or(orig), t.text.to_string()))
        .collect();
    let mut p = PredParser { toks, pos: 0, end: s.len() };
    let pred = p.or()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(pred)
}

/// All normal forms whose syllables are an alternating transversal word of
/// length at most `radius`, followed by each of the given `H`-tails.
pub fn ball_elements<C: FactorContract>(
    a: &Amalgam<C>,
    radius: usize,
    tails: &[C::H],
) -> Result<Vec<Element<C>>, InvariantsError> {
    let mut out = Vec::new();
    for len in 0..=radius {
        for j in Side::BOTH {
            if len == 0 && j == Side::One {
                continue;
            }
            for w in a.transversal_words(j, len)? {
                for t in tails {
                    out.push(NormalForm {
                        syllables: w.clone(),
                        tail: t.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `x ∈ D` and `f x ∈ D`.
    FdMeetsD,
    /// `x, y ∈ E` with `g_i x = g_j y`.
    TranslatesOverlap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation<H> {
    pub kind: ViolationKind,
    /// The index of `f` in `F`, or the pair `(i, j)` of conjugators (1-based).
    pub indices: (usize, usize),
    pub x: NormalForm<H>,
    pub y: NormalForm<H>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionReport<H> {
    pub ball_size: usize,
    pub violations: Vec<Violation<H>>,
}

impl<H> PartitionReport<H> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// On the given ball: `D` and `E` partition it, `f D ∩ D = ∅` for `f ∈ F`, and
/// the translates `g_i E` are pairwise disjoint. Images under `f` or
/// `g_j⁻¹g_i` may leave the ball; predicates are evaluated on them directly.
pub fn powers_partition_ball_check<C: FactorContract>(
    a: &Amalgam<C>,
    d: &Pred,
    e: &Pred,
    f: &[Element<C>],
    gs: &[Element<C>],
    ball: &[Element<C>],
) -> Result<PartitionReport<C::H>, InvariantsError> {
    let id = a.contract().h_identity();
    if let Some(i) = f.iter().position(|x| a.is_identity(x)) {
        return Err(InvariantsError::IdentityInF(i));
    }
    for x in ball {
        let count = usize::from(d.eval(x, &id)) + usize::from(e.eval(x, &id));
        if count != 1 {
            return Err(InvariantsError::NotAPartition { count });
        }
    }
    let mut violations = Vec::new();
    for x in ball.iter().filter(|x| d.eval(x, &id)) {
        for (k, fk) in f.iter().enumerate() {
            let y = a.mul(fk, x);
            if d.eval(&y, &id) {
                violations.push(Violation {
                    kind: ViolationKind::FdMeetsD,
                    indices: (k, k),
                    x: x.clone(),
                    y,
                });
            }
        }
    }
    for i in 0..gs.len() {
        for j in i + 1..gs.len() {
            let t = a.mul(&a.inv(&gs[j]), &gs[i]);
            for x in ball.iter().filter(|x| e.eval(x, &id)) {
                let y = a.mul(&t, x);
                if e.eval(&y, &id) {
                    violations.push(Violation {
                        kind: ViolationKind::TranslatesOverlap,
                        indices: (i + 1, j + 1),
                        x: x.clone(),
                        y,
                    });
                }
            }
        }
    }
    Ok(PartitionReport {
        ball_size: ball.len(),
        violations,
    })
}

/// Whether `x` and `y` have order 3 and no alternating product of `max_len`
/// or fewer blocks from `{x, x²}` and `{y, y²}` is trivial.
pub fn free_pair_check<C: FactorContract>(a: &Amalgam<C>, x: &Element<C>, y: &Element<C>, max_len: usize) -> bool {
    let cube_trivial = |z: &Element<C>| a.is_identity(&a.pow(z, 3));
    if !cube_trivial(x) || !cube_trivial(y) {
        return false;
    }
    let blocks = [
        [x.clone(), a.mul(x, x)],
        [y.clone(), a.mul(y, y)],
    ];
    // Depth-first over products, tracking which block was used last.
    let mut stack: Vec<(Element<C>, usize, usize)> = Vec::new();
    for (b, pair) in blocks.iter().enumerate() {
        for p in pair {
            stack.push((p.clone(), b, 1));
        }
    }
    while let Some((z, last, len)) = stack.pop() {
        if a.is_identity(&z) {
            return false;
        }
        if len < max_len {
            for p in &blocks[1 - last] {
                stack.push((a.mul(&z, p), 1 - last, len + 1));
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite::{builtin_spec, FiniteAmalgam};

    #[test]
    fn predicate_parsing() {
        let p = parse_predicate("starts:0 | (isH & !ise)").unwrap();
        assert_eq!(p.to_string(), "(starts:0 | (isH & !ise))");
        assert_eq!(parse_predicate("!(true)").unwrap(), Pred::Not(Box::new(Pred::Const(true))));
        let e = parse_predicate("starts:0 & bogus").unwrap_err();
        assert_eq!(e.column, 11);
        assert!(parse_predicate("(isH").is_err());
        assert!(parse_predicate("isH isH").is_err());
        assert!(parse_predicate("").is_err());
    }

    fn free() -> (FiniteAmalgam, Amalgam<FiniteAmalgam>) {
        let f = FiniteAmalgam::from_spec(&builtin_spec("free").unwrap(), 100).unwrap();
        (f.clone(), f.amalgam())
    }

    #[test]
    fn trivial_partition_passes() {
        let (fin, a) = free();
        let ball = ball_elements(&a, 3, &[0]).unwrap();
        let f = vec![a.normalize(&fin.parse_word("0:1 1:1").unwrap())];
        let d = parse_predicate("ise").unwrap();
        let e = parse_predicate("!ise").unwrap();
        let r = powers_partition_ball_check(&a, &d, &e, &f, &[a.identity()], &ball).unwrap();
        assert!(r.passed());
        let r = powers_partition_ball_check(&a, &d, &e, &f, &[a.identity(), a.identity()], &ball).unwrap();
        assert!(!r.passed());
        assert_eq!(r.violations[0].kind, ViolationKind::TranslatesOverlap);
        let bad = parse_predicate("true").unwrap();
        assert!(matches!(
            powers_partition_ball_check(&a, &bad, &e, &f, &[a.identity()], &ball),
            Err(InvariantsError::NotAPartition { count: 2 })
        ));
    }

    #[test]
    fn transform_and_free_pairs() {
        let (fin, a) = free();
        let w = |s: &str| a.normalize(&fin.parse_word(s).unwrap());
        let f = w("0:1 1:1");
        let gs = vec![w("1:2"), w("0:1"), w("0:1 1:1 0:1")];
        let s = powers_witness_transform(&a, &f, &gs, None).unwrap();
        assert_eq!(s.len(), 3);
        assert!(a.is_identity(&s[0]));
        assert!(matches!(
            powers_witness_transform(&a, &f, &[], None),
            Err(InvariantsError::NoConjugators)
        ));
        let y = w("1:1");
        let x = a.conjugate(&y, &w("0:1"));
        assert!(free_pair_check(&a, &x, &y, 6));
        assert!(!free_pair_check(&a, &y, &y, 6));
        assert!(!free_pair_check(&a, &a.identity(), &y, 6));
    }
}
