//! Exact rational arithmetic over ℚ and the projective line ℚ ∪ {∞}.
//!
//! Everything downstream runs on [`Rational`], which is a canonical reduced
//! fraction with positive denominator (zero is `0/1`). Heights, p-adic
//! valuations and the square test live here; counting and factorization
//! helpers are in the submodules.

mod enumerate;
mod multiplicative;
pub(crate) use multiplicative::totient_sieve;
pub mod real;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use enumerate::{count_p1, count_rationals, enumerate_rationals, RationalEnumeration};
pub use multiplicative::{
    divisors, factor_bigint, factor_u64, is_squarefree, is_squarefull, multiplicative_suite,
    prime_sieve, squarefull_decompose, MultiplicativeSuite, SIEVE_LIMIT,
};

/// Arbitrary-precision reduced fraction.
pub type Rational = BigRational;

/// A point of P¹(ℚ): either a finite rational or ∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(Rational),
    Infinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn from_int(n: i64) -> Self {
        ExtRational::Finite(Rational::from_integer(n.into()))
    }

    /// Projective coordinates `(x, y)` with `gcd(x, y) = 1` and `y ≥ 0`;
    /// ∞ is `(1, 0)`.
    pub fn to_projective(&self) -> (BigInt, BigInt) {
        match self {
            ExtRational::Finite(q) => (q.numer().clone(), q.denom().clone()),
            ExtRational::Infinity => (BigInt::one(), BigInt::zero()),
        }
    }

    /// Builds a point from arbitrary integer coordinates, not both zero.
    pub fn from_projective(x: BigInt, y: BigInt) -> Self {
        debug_assert!(!(x.is_zero() && y.is_zero()));
        if y.is_zero() {
            ExtRational::Infinity
        } else {
            ExtRational::Finite(Rational::new(x, y))
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(q: Rational) -> Self {
        ExtRational::Finite(q)
    }
}

/// ∞ sorts first, then finite points by value.
impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Infinity, ExtRational::Infinity) => Ordering::Equal,
            (ExtRational::Infinity, _) => Ordering::Less,
            (_, ExtRational::Infinity) => Ordering::Greater,
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{}", format_rational(q)),
            ExtRational::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "inf" | "∞" | "infinity" => Ok(ExtRational::Infinity),
            _ => parse_rational(s).map(ExtRational::Finite),
        }
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `"a/b"` or an integer `"a"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("`{s}` is not a rational number (expected a or a/b)"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("`{s}` has zero denominator")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Always `"a/b"`, with `"a"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Multiplicative height `max(|a|, b)` of `a/b` in lowest terms; `H(∞) = 1`.
pub fn height(t: &ExtRational) -> BigInt {
    match t {
        ExtRational::Finite(q) => rational_height(q),
        ExtRational::Infinity => BigInt::one(),
    }
}

pub fn rational_height(q: &Rational) -> BigInt {
    let a = q.numer().abs();
    if &a >= q.denom() {
        a
    } else {
        q.denom().clone()
    }
}

/// Valuation of an element of ℚ at a prime, with `v(0) = +∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_nonnegative(self) -> bool {
        match self {
            Valuation::Finite(v) => v >= 0,
            Valuation::Infinite => true,
        }
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("+inf"),
        }
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(v);
        }
        n = q;
        v += 1;
    }
}

/// `v_p(num) − v_p(den)`; zero has infinite valuation.
pub fn padic_valuation(t: &Rational, p: u64) -> Valuation {
    assert!(p >= 2, "valuation at {p} is not a prime valuation");
    if t.is_zero() {
        return Valuation::Infinite;
    }
    let num = int_valuation(t.numer(), p).finite().unwrap_or(0);
    let den = int_valuation(t.denom(), p).finite().unwrap_or(0);
    Valuation::Finite(num - den)
}

/// Exact integer square root, if `n` is a perfect square.
pub fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// The non-negative `ρ ∈ ℚ` with `ρ² = t`, when it exists.
pub fn rational_square_root(t: &Rational) -> Option<Rational> {
    let n = exact_isqrt(t.numer())?;
    let d = exact_isqrt(t.denom())?;
    Some(Rational::new(n, d))
}

/// Perfect-square test for machine integers.
pub fn u64_isqrt_exact(n: u64) -> Option<u64> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
