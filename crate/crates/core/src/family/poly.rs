//! Dense integer polynomials in one variable and fraction-free determinants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{factor_bigint, Rational};
use crate::error::Result;

/// An element of ℤ[T], coefficients in ascending degree with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·T^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t + Rational::from_integer(c.clone());
        }
        acc
    }

    /// `Σ c_k a^k b^{n−k}`: the value at `a/b` scaled by `b^n`, `n ≥ deg`.
    pub fn eval_homogeneous(&self, a: &BigInt, b: &BigInt, n: usize) -> BigInt {
        debug_assert!(self.degree().map_or(true, |d| d <= n));
        let mut bpows = Vec::with_capacity(n + 1);
        bpows.push(BigInt::one());
        for k in 1..=n {
            let next = &bpows[k - 1] * b;
            bpows.push(next);
        }
        let mut acc = BigInt::zero();
        for k in (0..=n).rev() {
            acc *= a;
            if let Some(c) = self.coeffs.get(k) {
                acc += c * &bpows[n - k];
            }
        }
        acc
    }

    /// Exact quotient by a nonzero divisor, or `None` if the division leaves a remainder.
    pub fn exact_div(&self, divisor: &IntPoly) -> Option<IntPoly> {
        let dd = divisor.degree().expect("division by zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::default());
        }
        let lead = &divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        let n = self.degree()?;
        if n < dd {
            return None;
        }
        let mut quot = vec![BigInt::zero(); n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            let (q, r) = c.div_rem(lead);
            if !r.is_zero() {
                return None;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &q * dc;
            }
            quot[k] = q;
        }
        rem.iter().all(Zero::is_zero).then(|| IntPoly::new(quot))
    }

    /// Distinct rational roots, ascending. Fails only when the extreme
    /// coefficients cannot be factored.
    pub fn rational_roots(&self) -> Result<Vec<Rational>> {
        let mut roots = Vec::new();
        if self.is_zero() {
            return Ok(roots);
        }
        let low = self.coeffs.iter().position(|c| !c.is_zero()).unwrap();
        if low > 0 {
            roots.push(Rational::zero());
        }
        let reduced = IntPoly::new(self.coeffs[low..].to_vec());
        if reduced.degree() == Some(0) {
            return Ok(roots);
        }
        let c0 = reduced.coeffs[0].abs();
        let cn = reduced.coeffs.last().unwrap().abs();
        let nums = int_divisors(&c0)?;
        let dens = int_divisors(&cn)?;
        for p in &nums {
            for q in &dens {
                if p.gcd(q) != BigInt::one() {
                    continue;
                }
                for sign in [1, -1] {
                    let r = Rational::new(p * BigInt::from(sign), q.clone());
                    if reduced.eval(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots.dedup();
        Ok(roots)
    }
}

/// Positive divisors of a nonzero integer by trial division.
fn int_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let fac = factor_bigint(n)?;
    let mut ds = vec![BigInt::one()];
    for (p, e) in fac {
        let len = ds.len();
        let mut pk = BigInt::one();
        for _ in 0..e {
            pk *= &p;
            for i in 0..len {
                let d = &ds[i] * &pk;
                ds.push(d);
            }
        }
    }
    Ok(ds)
}

impl Zero for IntPoly {
    fn zero() -> Self {
        IntPoly::default()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl One for IntPoly {
    fn one() -> Self {
        IntPoly::constant(BigInt::one())
    }
}

impl Add for IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: IntPoly) -> IntPoly {
        &self + &rhs
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;

    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;

    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::default();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Mul for IntPoly {
    type Output = IntPoly;

    fn mul(self, rhs: IntPoly) -> IntPoly {
        &self * &rhs
    }
}

impl Neg for IntPoly {
    type Output = IntPoly;

    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            if !first {
                f.write_str(" ")?;
            }
            let mag = c.abs();
            let body = match (k, mag.is_one()) {
                (0, _) => mag.to_string(),
                (1, true) => "T".into(),
                (1, false) => format!("{mag}*T"),
                (_, true) => format!("T^{k}"),
                (_, false) => format!("{mag}*T^{k}"),
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, "{sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// A commutative ring where exact division is available when it is known to succeed.
pub trait ExactRing: Clone {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_is_zero(&self) -> bool;
    fn ring_mul(&self, rhs: &Self) -> Self;
    fn ring_sub(&self, rhs: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn div_exact(&self, rhs: &Self) -> Self;
}

impl ExactRing for BigInt {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn ring_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        let (q, r) = self.div_rem(rhs);
        debug_assert!(Zero::is_zero(&r), "inexact Bareiss step");
        q
    }
}

impl ExactRing for IntPoly {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn ring_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ring_mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn ring_sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn ring_neg(&self) -> Self {
        -self.clone()
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self.exact_div(rhs).expect("inexact Bareiss step")
    }
}

/// Determinant by Bareiss fraction-free elimination.
pub fn bareiss_det<R: ExactRing>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::ring_one();
    }
    let mut negate = false;
    let mut prev = R::ring_one();
    for k in 0..n - 1 {
        if m[k][k].ring_is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].ring_is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return R::ring_zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].ring_mul(&m[k][k]).ring_sub(&m[i][k].ring_mul(&m[k][j]));
                m[i][j] = v.div_exact(&prev);
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.ring_neg()
    } else {
        det
    }
}

/// Sylvester matrix of two binary forms of degree `d`, given by coefficient
/// lists `c[i]` of `X^i·Y^{d−i}`.
pub fn sylvester<R: ExactRing>(f: &[R], g: &[R]) -> Vec<Vec<R>> {
    assert_eq!(f.len(), g.len());
    let d = f.len() - 1;
    let mut rows = Vec::with_capacity(2 * d);
    for src in [f, g] {
        for shift in 0..d {
            let mut row = vec![R::ring_zero(); 2 * d];
            for (j, c) in src.iter().rev().enumerate() {
                row[shift + j] = c.clone();
            }
            rows.push(row);
        }
    }
    rows
}

/// `Res(F, G)` of two binary forms of equal degree.
pub fn resultant<R: ExactRing>(f: &[R], g: &[R]) -> R {
    bareiss_det(sylvester(f, g))
}
