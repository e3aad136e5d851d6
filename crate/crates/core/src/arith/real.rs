//! Certified real arithmetic with midpoint–radius balls.
//!
//! A [`Ball`] at precision `p` is the closed interval
//! `[(mid − rad)/2^p, (mid + rad)/2^p]`. Every operation rounds outward, so
//! the true value of any expression built from exact inputs always lies in
//! the resulting ball. Transcendental functions add an explicit series tail
//! bound to the radius.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ball {
    mid: BigInt,
    rad: BigInt,
    prec: u32,
}

fn shr_round(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (k - 1);
    (x + half) >> k as usize
}

fn shr_ceil(x: &BigInt, k: u32) -> BigInt {
    debug_assert!(!x.is_negative());
    let d = BigInt::one() << k as usize;
    x.div_ceil(&d)
}

fn ceil_sqrt(x: &BigInt) -> BigInt {
    let r = x.sqrt();
    if &r * &r == *x {
        r
    } else {
        r + 1
    }
}

impl Ball {
    pub fn exact_int(n: i64, prec: u32) -> Ball {
        Ball {
            mid: BigInt::from(n) << prec as usize,
            rad: BigInt::zero(),
            prec,
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Ball {
        let scaled = q.numer() << prec as usize;
        let (mid, rem) = scaled.div_mod_floor(q.denom());
        if rem.is_zero() {
            Ball { mid, rad: BigInt::zero(), prec }
        } else {
            Ball { mid, rad: BigInt::one(), prec }
        }
    }

    pub fn from_ratio(n: i64, d: i64, prec: u32) -> Ball {
        Ball::from_rational(&Rational::new(n.into(), d.into()), prec)
    }

    /// A ball centred at `mid` covering `[mid − r, mid + r]` for a rational `r ≥ 0`.
    fn with_extra_radius(mut self, r: &Rational) -> Ball {
        let scaled = r.numer() << self.prec as usize;
        self.rad += scaled.div_ceil(r.denom());
        self
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    fn scale(&self) -> BigInt {
        BigInt::one() << self.prec as usize
    }

    pub fn lower(&self) -> Rational {
        Rational::new(&self.mid - &self.rad, self.scale())
    }

    pub fn upper(&self) -> Rational {
        Rational::new(&self.mid + &self.rad, self.scale())
    }

    pub fn midpoint(&self) -> Rational {
        Rational::new(self.mid.clone(), self.scale())
    }

    /// Radius as a rational.
    pub fn radius(&self) -> Rational {
        Rational::new(self.rad.clone(), self.scale())
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lower() <= q && q <= &self.upper()
    }

    pub fn is_positive(&self) -> bool {
        self.mid > self.rad
    }

    pub fn is_negative(&self) -> bool {
        -&self.mid > self.rad
    }

    pub fn overlaps(&self, other: &Ball) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    pub fn neg(&self) -> Ball {
        Ball {
            mid: -&self.mid,
            rad: self.rad.clone(),
            prec: self.prec,
        }
    }

    pub fn add(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        Ball {
            mid: &self.mid + &o.mid,
            rad: &self.rad + &o.rad,
            prec: self.prec,
        }
    }

    pub fn sub(&self, o: &Ball) -> Ball {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        let p = self.prec;
        let mid = shr_round(&(&self.mid * &o.mid), p);
        let err = self.mid.abs() * &o.rad + o.mid.abs() * &self.rad + &self.rad * &o.rad;
        let rad = shr_ceil(&err, p) + 1;
        Ball { mid, rad, prec: p }
    }

    pub fn mul_int(&self, k: i64) -> Ball {
        Ball {
            mid: &self.mid * k,
            rad: &self.rad * k.unsigned_abs(),
            prec: self.prec,
        }
    }

    /// Exact division by a nonzero integer, rounded outward.
    pub fn div_int(&self, k: i64) -> Ball {
        assert!(k != 0, "division by zero");
        let k = BigInt::from(k);
        let (mid, rem) = self.mid.div_mod_floor(&k);
        let rad = self.rad.div_ceil(&k.abs()) + if rem.is_zero() { 0 } else { 1 };
        Ball { mid, rad, prec: self.prec }
    }

    pub fn div(&self, o: &Ball) -> Ball {
        debug_assert_eq!(self.prec, o.prec);
        let bm = o.mid.abs();
        assert!(bm > o.rad, "division by a ball containing zero");
        let s = self.scale();
        let mid = (&self.mid * &s).div_floor(&o.mid);
        let num = &s * (&self.rad * &bm + &o.rad * self.mid.abs());
        let den = &bm * (&bm - &o.rad);
        let rad = num.div_ceil(&den) + 1;
        Ball { mid, rad, prec: self.prec }
    }

    pub fn recip(&self) -> Ball {
        Ball::exact_int(1, self.prec).div(self)
    }

    pub fn sqrt(&self) -> Ball {
        let lo = &self.mid - &self.rad;
        assert!(lo.sign() != Sign::Minus, "square root of a ball reaching below zero");
        let hi = &self.mid + &self.rad;
        let s = self.scale();
        let lo = (&lo * &s).sqrt();
        let hi = ceil_sqrt(&(&hi * &s));
        let mid = (&lo + &hi) >> 1usize;
        let rad = &hi - &mid;
        Ball { mid, rad, prec: self.prec }
    }

    pub fn square(&self) -> Ball {
        self.mul(self)
    }

    /// Decimal expansion certified by the ball: the value lies in
    /// `[D, D + 10^-k)` for the returned `D` with `k` fractional digits.
    pub fn certified_decimal(&self, max_digits: usize) -> (String, usize) {
        let lo = self.lower();
        let hi = self.upper();
        let mut best = (floor_decimal(&lo, 0), 0);
        for k in 1..=max_digits {
            let a = floor_scaled(&lo, k);
            let b = floor_scaled(&hi, k);
            if a != b {
                break;
            }
            best = (floor_decimal(&lo, k), k);
        }
        best
    }
}

fn floor_scaled(q: &Rational, k: usize) -> BigInt {
    let t = BigInt::from(10).pow(k as u32);
    (q.numer() * t).div_floor(q.denom())
}

fn floor_decimal(q: &Rational, k: usize) -> String {
    let n = floor_scaled(q, k);
    let sign = if n.is_negative() { "-" } else { "" };
    let t = BigInt::from(10).pow(k as u32);
    let (ip, fp) = n.abs().div_rem(&t);
    if k == 0 {
        format!("{sign}{ip}")
    } else {
        format!("{sign}{ip}.{:0>width$}", fp.to_string(), width = k)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (s, _) = self.certified_decimal(60);
        write!(f, "{s}")
    }
}

/// `Σ_{k≥0} (−1)^k x^{2k+1}/(2k+1)` (or without signs for `atanh`) for `|x| ≤ 1/2`.
fn odd_series(x: &Ball, alternating: bool) -> Ball {
    let prec = x.prec;
    let bound = Rational::new(1.into(), 2.into());
    let xmax = x.mid.abs() + &x.rad;
    assert!(
        Rational::new(xmax, x.scale()) <= bound,
        "series argument out of range"
    );
    let x2 = x.square();
    let mut pow = x.clone();
    let mut sum = x.clone();
    let mut k: i64 = 1;
    // |x|^(2k+1) ≤ 2^-(2k+1), stop once that is far below one ulp
    while (2 * k + 1) as u32 <= prec + 8 {
        pow = pow.mul(&x2);
        let term = pow.div_int(2 * k + 1);
        sum = if alternating && k % 2 == 1 { sum.sub(&term) } else { sum.add(&term) };
        k += 1;
    }
    // tail ≤ Σ_{j≥k} 2^-(2j+1) < 2^-(2k) ≤ 2^-(prec+8)
    let tail = Rational::new(BigInt::one(), BigInt::one() << (2 * k) as usize);
    sum.with_extra_radius(&tail)
}

/// Arctangent of a ball.
pub fn atan(x: &Ball) -> Ball {
    let prec = x.prec;
    let one = Ball::exact_int(1, prec);
    let quarter = Rational::new(1.into(), 4.into());
    let mut y = x.clone();
    let mut doublings = 0u32;
    // atan(y) = 2·atan(y / (1 + sqrt(1 + y²)))
    while Rational::new(y.mid.abs() + &y.rad, y.scale()) > quarter {
        let s = one.add(&y.square()).sqrt();
        y = y.div(&one.add(&s));
        doublings += 1;
    }
    let r = odd_series(&y, true);
    r.mul_int(1i64 << doublings)
}

pub fn atanh_small(x: &Ball) -> Ball {
    odd_series(x, false)
}

/// π by Machin's formula `16·atan(1/5) − 4·atan(1/239)`.
pub fn pi(prec: u32) -> Ball {
    let a = odd_series(&Ball::from_ratio(1, 5, prec), true);
    let b = odd_series(&Ball::from_ratio(1, 239, prec), true);
    a.mul_int(16).sub(&b.mul_int(4))
}

/// `ln 2 = 2·atanh(1/3)`.
pub fn ln2(prec: u32) -> Ball {
    odd_series(&Ball::from_ratio(1, 3, prec), false).mul_int(2)
}

/// Natural logarithm of a strictly positive ball.
pub fn ln(x: &Ball) -> Ball {
    assert!(x.is_positive(), "logarithm of a non-positive ball");
    let prec = x.prec;
    // bring x into [1/2, 2) by a power of two
    let mut k: i64 = 0;
    let mut y = x.clone();
    let two = Rational::from_integer(2.into());
    let half = Rational::new(1.into(), 2.into());
    while y.midpoint() >= two {
        y = y.div_int(2);
        k += 1;
    }
    while y.midpoint() < half {
        y = y.mul_int(2);
        k -= 1;
    }
    let one = Ball::exact_int(1, prec);
    // ln y = 2·atanh((y − 1)/(y + 1)), |(y−1)/(y+1)| ≤ 1/3
    let z = y.sub(&one).div(&y.add(&one));
    let core = atanh_small(&z).mul_int(2);
    core.add(&ln2(prec).mul_int(k))
}

/// `arsinh(x) = ln(x + sqrt(x² + 1))`.
pub fn asinh(x: &Ball) -> Ball {
    let one = Ball::exact_int(1, x.prec);
    if x.is_negative() {
        return asinh(&x.neg()).neg();
    }
    ln(&x.add(&x.square().add(&one).sqrt()))
}

/// `arcsin(x) = 2·atan(x / (1 + sqrt(1 − x²)))` for balls strictly inside (−1, 1).
pub fn asin(x: &Ball) -> Ball {
    let one = Ball::exact_int(1, x.prec);
    let c = one.sub(&x.square());
    assert!(c.is_positive(), "arcsin argument must lie strictly inside (-1, 1)");
    atan(&x.div(&one.add(&c.sqrt()))).mul_int(2)
}

/// `k^(-s)` for `s = n` or `s = n/2`.
fn inv_power(k: i64, s: &Rational, prec: u32) -> Ball {
    let two_s = s * Rational::from_integer(2.into());
    assert!(two_s.is_integer(), "only integer and half-integer exponents are supported");
    let two_s: i64 = two_s.to_integer().try_into().expect("exponent too large");
    assert!(two_s > 0);
    let whole = BigInt::from(k).pow((two_s / 2) as u32);
    let mut b = Ball::from_rational(&Rational::new(BigInt::one(), whole), prec);
    if two_s % 2 == 1 {
        b = b.div(&Ball::exact_int(k, prec).sqrt());
    }
    b
}

/// Riemann ζ(s) for real `s > 1` with `2s ∈ ℤ`, by Borwein's alternating-series
/// acceleration with its explicit error bound `3 / ((3 + √8)^n · |1 − 2^(1−s)|)`.
pub fn zeta(s: &Rational, prec: u32) -> Ball {
    assert!(s > &Rational::one(), "zeta is only evaluated for s > 1");
    // (3 + √8)^n ≥ 5^n ≥ 2^(2n), so n = (prec + 16)/2 terms suffice
    let n: i64 = (prec as i64 + 16) / 2 + 4;
    // d_k = n · Σ_{i ≤ k} (n+i−1)! 4^i / ((n−i)! (2i)!)
    let mut d = Vec::with_capacity(n as usize + 1);
    let mut acc = Rational::zero();
    let fact = |m: i64| -> BigInt { (1..=m).fold(BigInt::one(), |a, j| a * j) };
    for i in 0..=n {
        let term = Rational::new(
            fact(n + i - 1) * BigInt::from(4).pow(i as u32),
            fact(n - i) * fact(2 * i),
        );
        acc += term;
        let dk = &acc * Rational::from_integer(n.into());
        debug_assert!(dk.is_integer());
        d.push(dk.to_integer());
    }
    let dn = d[n as usize].clone();
    let mut sum = Ball::exact_int(0, prec);
    for k in 0..n {
        let c = Rational::new(&d[k as usize] - &dn, BigInt::one());
        let term = Ball::from_rational(&c, prec).mul(&inv_power(k + 1, s, prec));
        sum = if k % 2 == 0 { sum.add(&term) } else { sum.sub(&term) };
    }
    // η(s) ≈ −sum / d_n
    let eta = sum.neg().div(&Ball::from_rational(&Rational::from_integer(dn), prec));
    // 1 − 2^(1−s) = 1 − 2·2^(−s)
    let one = Ball::exact_int(1, prec);
    let factor = one.sub(&inv_power(2, s, prec).mul_int(2));
    // |γ_n| ≤ 3/(5^n · |1 − 2^(1−s)|); bound |1 − 2^(1−s)| below by the ball
    let fl = factor.lower();
    assert!(fl > Rational::zero());
    let err = Rational::new(3.into(), BigInt::from(5).pow(n as u32)) / fl;
    eta.div(&factor).with_extra_radius(&err)
}
