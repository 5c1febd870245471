//! The conjugation identities among the subgroups `H_k(w)`, checked
//! exhaustively on the truncation `B_d`.

use std::fmt;

use serde::Serialize;

use super::{g_letter, gamma, h1, Gamma, GammaElement};
use crate::amalgam::Side;
use crate::portrait::{BitWord, Portrait};

/// A product `H_{k₁}(w₁) ⋯ H_{kₙ}(wₙ)` of support-disjoint prefix subgroups,
/// i.e. all portraits supported on the union of the factors' address sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSubgroup {
    factors: Vec<(BitWord, usize)>,
}

impl ProductSubgroup {
    /// Factors given as `(prefix, minimum address length)`; panics on overlapping factors.
    pub fn new(factors: &[(&str, usize)]) -> Self {
        let factors: Vec<_> = factors
            .iter()
            .map(|(w, k)| {
                let w: BitWord = w.parse().expect("address literal");
                (w, (*k).max(w.len()))
            })
            .collect();
        let s = ProductSubgroup { factors };
        s.contains(&Portrait::identity());
        s
    }

    /// `H` itself.
    pub fn whole() -> Self {
        Self::new(&[("0", 1), ("1", 1)])
    }

    pub fn contains(&self, p: &Portrait) -> bool {
        p.in_product_subgroup(&self.factors)
            .expect("factors are support-disjoint")
    }

    /// The addresses of depth at most `max_depth` a member may swap at.
    pub fn addresses(&self, max_depth: usize) -> Vec<BitWord> {
        BitWord::up_to(max_depth)
            .filter(|a| {
                self.factors
                    .iter()
                    .any(|(w, k)| a.has_prefix(w) && a.len() >= *k)
            })
            .collect()
    }

    /// All members of depth at most `max_depth`.
    pub fn elements(&self, max_depth: usize) -> Vec<Portrait> {
        let addrs = self.addresses(max_depth);
        assert!(addrs.len() <= 24, "too many addresses to enumerate");
        (0..1u64 << addrs.len())
            .map(|m| {
                Portrait::from_swaps(
                    addrs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| (m >> i) & 1 == 1)
                        .map(|(_, a)| *a),
                )
            })
            .collect()
    }

    pub fn count(&self, max_depth: usize) -> u64 {
        1u64 << self.addresses(max_depth).len()
    }

    pub fn mirror(&self) -> Self {
        ProductSubgroup {
            factors: self.factors.iter().map(|(w, k)| (w.mirror(), *k)).collect(),
        }
    }
}

impl fmt::Display for ProductSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (w, k) in &self.factors {
            let bits: Vec<String> = w.bits().iter().map(ToString::to_string).collect();
            if *k == w.len() {
                write!(f, "H({})", bits.join(","))?;
            } else {
                write!(f, "H_{}({})", k, bits.join(","))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub passed: bool,
    /// Number of elements examined.
    pub checked: usize,
    pub counterexample: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemarkReport {
    pub depth: usize,
    pub checks: Vec<IdentityCheck>,
}

impl RemarkReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// The conjugator `t` of an identity, `g` or `h(·)g` on one side.
#[derive(Clone)]
struct Conjugator {
    name: &'static str,
    t: GammaElement,
}

fn conjugators(g: &Gamma, side: Side) -> [Conjugator; 2] {
    let gl = g_letter(side);
    let gen = g.from_letter(gl.side, &gl.elem);
    let flip = g.from_h(if side == Side::Zero { h1() } else { h1().mirror() });
    let (a, b) = match side {
        Side::Zero => ("g0", "h(1)g0"),
        Side::One => ("g1", "h(0)g1"),
    };
    [
        Conjugator { name: a, t: gen.clone() },
        Conjugator { name: b, t: g.mul(&flip, &gen) },
    ]
}

/// `t⁻¹ p t` when it lies in `H`.
fn conj_in_h(g: &Gamma, p: &Portrait, t: &GammaElement) -> Option<Portrait> {
    let x = g.conjugate(&g.from_h(p.clone()), t);
    x.is_in_h().then_some(x.tail)
}

/// `t X t⁻¹ = Y`, checked in both directions on members of bounded depth.
fn image_identity(
    g: &Gamma,
    c: &Conjugator,
    x: &ProductSubgroup,
    y: &ProductSubgroup,
    depth: usize,
) -> IdentityCheck {
    let name = format!("{} {} {}^-1 = {}", c.name, x, c.name, y);
    let t_inv = g.inv(&c.t);
    let mut checked = 0;
    let forward = x.elements(depth).into_iter().find(|p| {
        checked += 1;
        !conj_in_h(g, p, &t_inv).is_some_and(|q| y.contains(&q))
    });
    let backward = || {
        y.elements(depth + 1).into_iter().find(|q| {
            checked += 1;
            !conj_in_h(g, q, &c.t).is_some_and(|p| x.contains(&p))
        })
    };
    let bad = forward.or_else(backward);
    IdentityCheck {
        name,
        passed: bad.is_none(),
        checked,
        counterexample: bad.map(|p| p.to_string()),
    }
}

/// `H ∩ t X t⁻¹ = Y` on all of `B_depth`.
fn intersection_identity(
    g: &Gamma,
    c: &Conjugator,
    x: &ProductSubgroup,
    y: &ProductSubgroup,
    depth: usize,
) -> IdentityCheck {
    let name = format!("H ∩ {} {} {}^-1 = {}", c.name, x, c.name, y);
    let domain = ProductSubgroup::whole().elements(depth);
    let bad = domain.iter().find(|p| {
        let lhs = conj_in_h(g, p, &c.t).is_some_and(|q| x.contains(&q));
        lhs != y.contains(p)
    });
    IdentityCheck {
        name,
        passed: bad.is_none(),
        checked: domain.len(),
        counterexample: bad.map(ToString::to_string),
    }
}

/// Every conjugation identity of the `G₀` side and its mirror image, restricted to `B_depth`.
pub fn remark_identity_suite(depth: usize) -> RemarkReport {
    assert!(depth <= 3, "remark suite enumerates B_d for d <= 3");
    let g = gamma();
    let ps = ProductSubgroup::new;
    let mut checks = Vec::new();
    for side in Side::BOTH {
        let m = |s: ProductSubgroup| if side == Side::Zero { s } else { s.mirror() };
        let [a, b] = conjugators(&g, side);
        for k in 1..=depth {
            checks.push(image_identity(&g, &a, &m(ps(&[("0", k)])), &m(ps(&[("10", k + 1)])), depth));
            checks.push(image_identity(&g, &b, &m(ps(&[("0", k)])), &m(ps(&[("11", k + 1)])), depth));
        }
        let h_1 = m(ps(&[("1", 1)]));
        checks.push(intersection_identity(&g, &a, &h_1, &m(ps(&[("0", 1), ("11", 2)])), depth));
        checks.push(intersection_identity(&g, &b, &h_1, &m(ps(&[("0", 1), ("10", 2)])), depth));
        let whole = ProductSubgroup::whole();
        let target = m(ps(&[("0", 1), ("1", 2)]));
        checks.push(intersection_identity(&g, &a, &whole, &target, depth));
        checks.push(intersection_identity(&g, &b, &whole, &target, depth));
        for k in 1..=depth {
            let x = m(ps(&[("0", k), ("1", 1)]));
            let ya = m(ps(&[("10", k + 1), ("0", 1), ("11", 2)]));
            let yb = m(ps(&[("11", k + 1), ("0", 1), ("10", 2)]));
            checks.push(intersection_identity(&g, &a, &x, &ya, depth));
            checks.push(intersection_identity(&g, &b, &x, &yb, depth));
        }
    }
    RemarkReport { depth, checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_through_depth_two() {
        for d in 0..=2 {
            let r = remark_identity_suite(d);
            assert!(r.passed(), "{:#?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        }
    }

    #[test]
    fn depth_zero_is_vacuous() {
        let r = remark_identity_suite(0);
        assert!(r.passed());
        assert!(r.checks.iter().all(|c| c.checked <= 1));
    }

    #[test]
    fn h1_is_not_in_the_g0_intersection() {
        let g = gamma();
        let [a, _] = conjugators(&g, Side::Zero);
        assert!(conj_in_h(&g, &h1(), &a.t).is_none());
    }

    #[test]
    fn product_subgroup_display_and_counts() {
        let s = ProductSubgroup::new(&[("0", 1), ("1", 2)]);
        assert_eq!(s.to_string(), "H(0)H_2(1)");
        assert_eq!(s.count(3), 1 << 13);
        assert_eq!(ProductSubgroup::new(&[("0", 1), ("1", 3)]).count(3), 1 << 11);
        assert_eq!(s.mirror().to_string(), "H(1)H_2(0)");
    }
}
