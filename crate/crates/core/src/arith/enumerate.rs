//! Height-ordered enumeration of ℚ.

use std::ops::RangeInclusive;

use num_integer::Integer;

use super::{multiplicative::totient_sieve, Rational};

/// All `t ∈ ℚ` with `H(t) ≤ X`, ascending denominator then ascending numerator.
///
/// The stream is a pure function of `X`, so it can be split by denominator
/// ranges (see [`RationalEnumeration::denominators`]) and consumed in parallel.
#[derive(Clone, Debug)]
pub struct RationalEnumeration {
    bound: i64,
    dens: RangeInclusive<i64>,
    den: i64,
    num: i64,
}

impl RationalEnumeration {
    pub fn new(bound: u64) -> Self {
        assert!(bound >= 1, "height bound must be at least 1");
        let bound = i64::try_from(bound).expect("height bound exceeds i64");
        Self::denominators(bound as u64, 1..=bound as u64)
    }

    /// The sub-stream with denominators in `dens` (clamped to `1..=X`).
    pub fn denominators(bound: u64, dens: RangeInclusive<u64>) -> Self {
        let bound = i64::try_from(bound).expect("height bound exceeds i64");
        let lo = (*dens.start()).max(1) as i64;
        let hi = (*dens.end() as i64).min(bound);
        let mut dens = lo..=hi;
        let den = dens.next().unwrap_or(0);
        RationalEnumeration {
            bound,
            dens,
            den,
            num: -bound,
        }
    }

    pub fn bound(&self) -> u64 {
        self.bound as u64
    }
}

impl Iterator for RationalEnumeration {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        while self.den != 0 {
            while self.num <= self.bound {
                let a = self.num;
                self.num += 1;
                if a.gcd(&self.den) == 1 {
                    return Some(Rational::new_raw(a.into(), self.den.into()));
                }
            }
            self.den = self.dens.next().unwrap_or(0);
            self.num = -self.bound;
        }
        None
    }
}

pub fn enumerate_rationals(bound: u64) -> RationalEnumeration {
    RationalEnumeration::new(bound)
}

/// `N(ℚ, X) = 1 + 2·#{(a, b) : 1 ≤ a, b ≤ X, gcd(a, b) = 1} = 4·Σ_{n ≤ X} φ(n) − 1`.
pub fn count_rationals(bound: u64) -> u64 {
    assert!(bound >= 1, "height bound must be at least 1");
    let phi = totient_sieve(bound);
    let sum: u64 = phi[1..].iter().sum();
    4 * sum - 1
}

/// `N(P¹(ℚ), X)`: the affine count plus the point at infinity.
pub fn count_p1(bound: u64) -> u64 {
    count_rationals(bound) + 1
}
