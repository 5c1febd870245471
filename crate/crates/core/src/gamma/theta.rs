//! The homomorphism `θ : Γ → Z₂ × Z₂` and its kernel `Γ′`.

use std::fmt;
use std::ops::Mul;

use serde::{Serialize, Serializer};

use super::{GammaElement, Gen};
use crate::portrait::{BitWord, Portrait};

/// A pair of signs, multiplied componentwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ThetaValue(pub i8, pub i8);

impl ThetaValue {
    pub const ONE: ThetaValue = ThetaValue(1, 1);
    pub const LEFT: ThetaValue = ThetaValue(-1, 1);
    pub const RIGHT: ThetaValue = ThetaValue(1, -1);
}

impl Mul for ThetaValue {
    type Output = ThetaValue;

    fn mul(self, other: ThetaValue) -> ThetaValue {
        ThetaValue(self.0 * other.0, self.1 * other.1)
    }
}

impl fmt::Display for ThetaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

impl Serialize for ThetaValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `θ(h(w)) = (−1,1)` when `|w| + w₁` is odd, `(1,−1)` otherwise.
fn theta_swap(w: &BitWord) -> ThetaValue {
    let first = w.first().unwrap_or(0) as usize;
    if (w.len() + first) % 2 == 1 {
        ThetaValue::LEFT
    } else {
        ThetaValue::RIGHT
    }
}

pub fn theta_gen(g: &Gen) -> ThetaValue {
    match g {
        Gen::G0 => ThetaValue::RIGHT,
        Gen::G1 => ThetaValue::LEFT,
        Gen::H(w) => theta_swap(w),
    }
}

pub fn theta_word(word: &[Gen]) -> ThetaValue {
    word.iter().map(theta_gen).fold(ThetaValue::ONE, Mul::mul)
}

/// A portrait is the product of its swaps, so `θ` multiplies over the support.
pub fn theta_portrait(h: &Portrait) -> ThetaValue {
    h.swaps().iter().map(theta_swap).fold(ThetaValue::ONE, Mul::mul)
}

pub fn theta_nf(x: &GammaElement) -> ThetaValue {
    let syllables = x.syllables.iter().map(|s| {
        let g = theta_gen(&Gen::g(s.side));
        if s.index == 1 {
            g
        } else {
            // h(1)g₀ or h(0)g₁
            let flip = BitWord::from_value(1, s.side.other().index() as u64);
            theta_swap(&flip) * g
        }
    });
    syllables
        .fold(ThetaValue::ONE, Mul::mul)
        * theta_portrait(&x.tail)
}

pub fn in_gamma_prime(x: &GammaElement) -> bool {
    theta_nf(x) == ThetaValue::ONE
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{gamma, parse_word, word_to_letters};

    fn th(s: &str) -> ThetaValue {
        theta_word(&parse_word(s).unwrap())
    }

    #[test]
    fn generator_values() {
        assert_eq!(th("h:0"), ThetaValue(-1, 1));
        assert_eq!(th("h:1"), ThetaValue(1, -1));
        assert_eq!(th("g0"), ThetaValue(1, -1));
        assert_eq!(th("g1"), ThetaValue(-1, 1));
        assert_eq!(th("h:00"), ThetaValue(1, -1));
        assert_eq!(th("h:01"), ThetaValue(1, -1));
        assert_eq!(th(""), ThetaValue::ONE);
        assert_eq!(ThetaValue(-1, 1).to_string(), "(-1,1)");
    }

    #[test]
    fn gamma_prime_membership() {
        let g = gamma();
        let nf = |s: &str| g.normalize(&word_to_letters(&parse_word(s).unwrap()));
        assert!(in_gamma_prime(&nf("h:0 g1")));
        assert!(!in_gamma_prime(&nf("h:0")));
        assert!(in_gamma_prime(&nf("e")));
    }
}
