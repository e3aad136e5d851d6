//! Height bounds that make the orbit search complete.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{factor_bigint, padic_valuation, Rational, Valuation};
use crate::error::{Error, Result};
use crate::family::SpecializedMap;

/// Primes above this are not scanned for common roots; their full resultant
/// valuation is used instead.
const LIFT_SCAN_LIMIT: u64 = 1 << 16;
const LIFT_SURVIVOR_LIMIT: usize = 1 << 16;

/// Region outside which a polynomial orbit provably escapes: preperiodic
/// points have `|z| < radius` and a denominator dividing `denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolynomialRegion {
    pub radius: Rational,
    pub denominator: BigInt,
}

impl PolynomialRegion {
    pub fn height_bound(&self) -> Rational {
        let r = if self.radius > Rational::one() { self.radius.clone() } else { Rational::one() };
        r * Rational::from_integer(self.denominator.clone())
    }
}

/// `ψ(s) = |a_d| − Σ_{i<d} |a_i| s^{i−d} − s^{1−d}`, increasing in `s > 0`.
fn psi(abs_coeffs: &[Rational], s: &Rational) -> Rational {
    let d = abs_coeffs.len() - 1;
    let inv = s.recip();
    let mut acc = abs_coeffs[d].clone();
    let mut pow = Rational::one();
    for i in (0..d).rev() {
        pow = &pow * &inv;
        acc -= &abs_coeffs[i] * &pow;
        if i == 1 {
            acc -= &pow;
        }
    }
    acc
}

/// Smallest dyadic `r` (to 1/64 relative) with `ψ(r) > 0`: every `|z| ≥ r`
/// satisfies `|f(z)| > |z|`.
pub fn escape_radius(coeffs: &[Rational]) -> Rational {
    let abs: Vec<Rational> = coeffs.iter().map(|a| a.abs()).collect();
    let d = abs.len() - 1;
    let lower_sum: Rational = abs[..d].iter().sum::<Rational>() + Rational::one();
    let mut hi = (lower_sum / &abs[d]).max(Rational::one()) + Rational::one();
    debug_assert!(psi(&abs, &hi) > Rational::zero());
    let mut lo = Rational::zero();
    let tol = &hi / Rational::from_integer(64.into());
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / Rational::from_integer(2.into());
        if mid.is_positive() && psi(&abs, &mid) > Rational::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Exponent bound at `p`: preperiodic `z` have `v_p(z) ≥ ⌈λ_p⌉` with
/// `λ_p = min(min_{i<d} (v(a_i) − v(a_d))/(d − i), −v(a_d)/(d − 1))`.
fn min_valuation(coeffs: &[Rational], p: u64) -> i64 {
    let d = coeffs.len() - 1;
    let vd = padic_valuation(&coeffs[d], p).finite().expect("leading coefficient is nonzero");
    let mut lambda = Rational::new((-vd).into(), ((d - 1) as i64).into());
    for (i, a) in coeffs[..d].iter().enumerate() {
        if let Valuation::Finite(vi) = padic_valuation(a, p) {
            lambda = lambda.min(Rational::new((vi - vd).into(), ((d - i) as i64).into()));
        }
    }
    lambda.ceil().to_integer().to_i64().expect("valuation bound fits i64")
}

pub fn polynomial_region(coeffs: &[Rational]) -> Result<PolynomialRegion> {
    let d = coeffs.len() - 1;
    let mut primes: Vec<BigInt> = Vec::new();
    for a in coeffs {
        primes.extend(factor_bigint(a.denom())?.into_iter().map(|(p, _)| p));
    }
    primes.extend(factor_bigint(coeffs[d].numer())?.into_iter().map(|(p, _)| p));
    primes.sort();
    primes.dedup();
    let mut denominator = BigInt::one();
    for p in primes {
        let p64 = p.to_u64().ok_or(Error::Overflow("prime"))?;
        let e = -min_valuation(coeffs, p64);
        if e > 0 {
            denominator *= num_traits::pow(p, e as usize);
        }
    }
    Ok(PolynomialRegion {
        radius: escape_radius(coeffs),
        denominator,
    })
}

/// `Σ c_i x^i y^{d−i}`.
pub fn eval_form(coeffs: &[BigInt], x: &BigInt, y: &BigInt) -> BigInt {
    let d = coeffs.len() - 1;
    let mut acc = BigInt::zero();
    let mut ypow = BigInt::one();
    let mut terms = Vec::with_capacity(d + 1);
    for i in (0..=d).rev() {
        terms.push(&coeffs[i] * &ypow);
        if i > 0 {
            ypow *= y;
        }
    }
    for term in terms {
        acc = acc * x + term;
    }
    acc
}

/// Largest `k` such that `p^k` divides both `F(x, y)` and `G(x, y)` for some
/// coprime `(x, y)`, capped by `cap = v_p(Res)`.
fn common_divisor_exponent(m: &SpecializedMap, p: u64, cap: u32) -> u32 {
    if p > LIFT_SCAN_LIMIT {
        return cap;
    }
    let pb = BigInt::from(p);
    let hits = |x: &BigInt, y: &BigInt, modulus: &BigInt| {
        eval_form(m.f(), x, y).is_multiple_of(modulus) && eval_form(m.g(), x, y).is_multiple_of(modulus)
    };
    // chart y = 1 (x free) and chart x = 1 with p | y
    let mut affine: Vec<BigInt> = (0..p).map(BigInt::from).collect();
    let mut polar: Vec<BigInt> = vec![BigInt::zero()];
    let one = BigInt::one();
    let mut modulus = pb.clone();
    let mut best = 0;
    for k in 1..=cap {
        affine.retain(|x| hits(x, &one, &modulus));
        polar.retain(|y| hits(&one, y, &modulus));
        if affine.is_empty() && polar.is_empty() {
            break;
        }
        best = k;
        if k == cap || affine.len() + polar.len() > LIFT_SURVIVOR_LIMIT {
            return cap;
        }
        let lift = |v: &[BigInt], modulus: &BigInt| -> Vec<BigInt> {
            v.iter()
                .flat_map(|r| (0..p).map(move |j| r + BigInt::from(j) * modulus))
                .collect()
        };
        affine = lift(&affine, &modulus);
        polar = lift(&polar, &modulus);
        modulus *= &pb;
    }
    best
}

/// `∏ p^{ε_p}` over bad primes: a multiple of `gcd(F(x, y), G(x, y))` for
/// every coprime pair `(x, y)`.
pub fn gcd_bound(m: &SpecializedMap) -> Result<BigInt> {
    let mut g = BigInt::one();
    for (p, v) in factor_bigint(m.resultant_ideal_norm())? {
        let p64 = p.to_u64().ok_or(Error::Overflow("prime"))?;
        let e = common_divisor_exponent(m, p64, v);
        g *= num_traits::pow(p, e as usize);
    }
    Ok(g)
}

/// Lower bound for `|Σ c_i s^i|` on `[lo, hi]`, by the mean-value form.
fn poly_range_lower_abs(c: &[BigInt], lo: &Rational, hi: &Rational) -> Rational {
    let mid = (lo + hi) / Rational::from_integer(2.into());
    let half = (hi - lo) / Rational::from_integer(2.into());
    let val = c
        .iter()
        .rev()
        .fold(Rational::zero(), |acc, ci| acc * &mid + Rational::from_integer(ci.clone()));
    // |p'(s)| ≤ Σ i |c_i| max(|lo|, |hi|)^{i−1}
    let m = lo.abs().max(hi.abs());
    let mut deriv = Rational::zero();
    let mut mp = Rational::one();
    for (i, ci) in c.iter().enumerate().skip(1) {
        deriv += Rational::from_integer(ci.abs() * BigInt::from(i)) * &mp;
        mp *= &m;
    }
    let slack = val.abs() - deriv * half;
    slack.max(Rational::zero())
}

/// Certified positive lower bound for `max(|F|, |G|)` on the boundary of the
/// square `max(|x|, |y|) = 1`.
pub fn boundary_minimum(m: &SpecializedMap) -> Result<Rational> {
    // edge y = 1: coefficients of x^i are f_i; edge x = 1: coefficients of y^{d−i}
    let edge_a = (m.f().to_vec(), m.g().to_vec());
    let rev = |c: &[BigInt]| c.iter().rev().cloned().collect::<Vec<_>>();
    let edge_b = (rev(m.f()), rev(m.g()));
    let mut overall: Option<Rational> = None;
    for (fc, gc) in [edge_a, edge_b] {
        let sample = |s: &Rational| {
            let ev = |c: &[BigInt]| {
                c.iter()
                    .rev()
                    .fold(Rational::zero(), |acc, ci| acc * s + Rational::from_integer(ci.clone()))
                    .abs()
            };
            ev(&fc).max(ev(&gc))
        };
        let min_width = Rational::new(BigInt::one(), BigInt::one() << 48);
        let mut stack = vec![(Rational::from_integer((-1).into()), Rational::one())];
        let mut steps = 0usize;
        while let Some((lo, hi)) = stack.pop() {
            steps += 1;
            if steps > 200_000 {
                return Err(Error::ResourceLimit {
                    t: Some(crate::arith::format_rational(m.t())),
                    detail: "boundary minimum subdivision did not converge".into(),
                });
            }
            let lb = poly_range_lower_abs(&fc, &lo, &hi).max(poly_range_lower_abs(&gc, &lo, &hi));
            let mid = (&lo + &hi) / Rational::from_integer(2.into());
            // accept once the bound is within a factor 2 of the midpoint value
            let target = sample(&mid) / Rational::from_integer(2.into());
            if lb >= target || (&hi - &lo) < min_width {
                overall = Some(overall.map_or(lb.clone(), |o: Rational| o.min(lb)));
                continue;
            }
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
        }
    }
    let c = overall.expect("both edges examined");
    if !c.is_positive() {
        return Err(Error::ResourceLimit {
            t: Some(crate::arith::format_rational(m.t())),
            detail: "could not certify a positive boundary minimum".into(),
        });
    }
    Ok(c)
}

/// Height bound for a general map: with `c` a lower bound of `max(|F|, |G|)`
/// on the unit square boundary and `g` a multiple of every coordinate gcd,
/// `H(f(P)) ≥ c·H(P)^d / g`, so preperiodic points satisfy
/// `H(P) ≤ (g / c)^{1/(d−1)}`.
pub fn rational_height_bound(m: &SpecializedMap) -> Result<BigInt> {
    let c = boundary_minimum(m)?;
    let g = gcd_bound(m)?;
    let ratio = Rational::from_integer(g) / c;
    let k = ratio.ceil().to_integer();
    let e = (m.degree() - 1) as u32;
    let mut b = k.nth_root(e);
    if num_traits::pow(b.clone(), e as usize) < k {
        b += 1;
    }
    Ok(b.max(BigInt::one()))
}
