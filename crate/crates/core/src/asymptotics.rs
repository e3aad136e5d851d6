//! Lattice counts for the images of `φ_c(t) = c/4 − t²` and `ψ(r) = r² − r`,
//! the constants governing their growth, and squarefull counting.

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::Zero;
use serde::Serialize;

use crate::arith::real::{asin, asinh, ln, pi, zeta, Ball, DEFAULT_PREC};
use crate::arith::{factor_u64, is_squarefree, rat, Rational};
use crate::census::{run_census_checkpoints, CensusConfig};
use crate::error::{Error, Result};
use crate::family::builtin_family;

/// Digits reported for every constant.
pub const REPORT_DIGITS: usize = 30;

/// The residue classes `(q, r)` of `b` with the matching gcd `d`.
pub const CLASSES: [(u64, u64, u64); 3] = [(2, 1, 1), (4, 2, 16), (4, 0, 4)];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionCount {
    pub c: i64,
    #[serde(rename = "X")]
    pub x: u64,
    /// Counts for `b` odd, `b ≡ 2 (4)` and `b ≡ 0 (4)`.
    pub classes: [u64; 3],
    pub total: u64,
}

fn check_c(c: i64) -> Result<()> {
    if c == 1 || c == -3 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("c must be 1 or -3, got {c}")))
    }
}

/// `#{1 ≤ a ≤ Y : gcd(a, b) = 1}` by inclusion–exclusion over the primes of `b`.
pub fn coprime_count(b: u64, y: u64) -> Result<u64> {
    let primes: Vec<u64> = factor_u64(b)?.into_iter().map(|(p, _)| p).collect();
    let mut total: i128 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let k: u64 = primes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p)
            .product();
        let term = (y / k) as i128;
        total += if mask.count_ones() % 2 == 0 { term } else { -term };
    }
    Ok(total as u64)
}

/// `N(φ_c(ℚ^×), X)` for `c ∈ {1, −3}`: coprime `a, b ≥ 1` with
/// `4b² ≤ dX` and `4a² ≤ dX + cb²`, split by the class of `b`.
pub fn count_image_phi(c: i64, x: u64) -> Result<RegionCount> {
    check_c(c)?;
    if x == 0 {
        return Err(Error::InvalidArgument("X must be positive".into()));
    }
    let mut classes = [0u64; 3];
    for (slot, &(q, r, d)) in CLASSES.iter().enumerate() {
        let dx = d as i128 * x as i128;
        let bmax = ((dx / 4) as u128).sqrt() as u64;
        let mut b = if r == 0 { q } else { r };
        while b <= bmax {
            let n = dx + c as i128 * (b as i128) * (b as i128);
            if n >= 4 {
                let amax = ((n / 4) as u128).sqrt() as u64;
                classes[slot] += coprime_count(b, amax)?;
            }
            b += q;
        }
    }
    Ok(RegionCount {
        c,
        x,
        classes,
        total: classes.iter().sum(),
    })
}

/// `N(ψ(ℚ), X)` for `ψ(r) = r² − r`. With `r = a/b` in lowest terms,
/// `H(ψ(r)) = max(|a(a − b)|, b²)`, so `b ≤ √X` and `|a| ≤ 1 + 2√X`; each
/// value is counted once through the representative of `{r, 1 − r}` with
/// `2a ≥ b`.
pub fn count_image_psi(x: u64) -> Result<u64> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be positive".into()));
    }
    let x = x as i128;
    let bmax = (x as u128).sqrt() as i128;
    let amax = 1 + 2 * (x as u128).sqrt() as i128 + 1;
    let mut count = 0;
    for b in 1..=bmax {
        let lo = (b + 1) / 2;
        for a in lo..=amax {
            if (a * (a - b)).abs() <= x && a.gcd(&b) == 1 {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn totients(n: u64) -> Vec<u64> {
    crate::arith::totient_sieve(n)
}

fn check_class(q: u64, r: u64) -> Result<()> {
    if CLASSES.iter().any(|&(cq, cr, _)| (cq, cr) == (q, r)) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("(q, r) = ({q}, {r}) is not one of (2,1), (4,2), (4,0)")))
    }
}

/// `H_{q,r}(Y) = Σ_{b ≤ Y, b ≡ r (q)} φ(b)/b`, exactly.
pub fn totient_sum(q: u64, r: u64, y: u64) -> Result<Rational> {
    check_class(q, r)?;
    let phi = totients(y);
    let mut sum = Rational::zero();
    for b in (1..=y).filter(|b| b % q == r) {
        sum += Rational::new(BigInt::from(phi[b as usize]), BigInt::from(b));
    }
    Ok(sum)
}

/// `G_{q,r}(Y) = Σ_{b ≤ Y, b ≡ r (q)} √(4Y² + cb²)·φ(b)/b` as a certified ball.
pub fn weighted_sum(q: u64, r: u64, y: u64, c: i64, prec: u32) -> Result<Ball> {
    check_class(q, r)?;
    check_c(c)?;
    let phi = totients(y);
    let mut sum = Ball::exact_int(0, prec);
    for b in (1..=y).filter(|b| b % q == r) {
        let inner = 4 * (y as i64) * (y as i64) + c * (b as i64) * (b as i64);
        let w = Ball::from_ratio(phi[b as usize] as i64, b as i64, prec);
        sum = sum.add(&Ball::exact_int(inner, prec).sqrt().mul(&w));
    }
    Ok(sum)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantReport {
    pub name: String,
    pub decimal: String,
    pub formula: String,
    #[serde(skip)]
    pub value: Ball,
}

impl ConstantReport {
    fn new(name: &str, formula: &str, value: Ball) -> Self {
        let (decimal, _) = value.certified_decimal(REPORT_DIGITS);
        ConstantReport {
            name: name.to_string(),
            decimal,
            formula: formula.to_string(),
            value,
        }
    }
}

fn cqr_ball(q: u64, r: u64, prec: u32) -> Result<Ball> {
    check_class(q, r)?;
    let p = pi(prec);
    let mut v = Ball::exact_int(6, prec).div(&p.square());
    let phi_q = totients(q)[q as usize];
    v = v.div_int(phi_q as i64);
    for (p, _) in factor_u64(q)? {
        let p = p as i64;
        let num = p - i64::from(r % p as u64 == 0);
        v = v.mul_int(num).div_int(p + 1);
    }
    Ok(v)
}

/// `C_{q,r} = (6/π²)·(1/φ(q))·∏_{p | q} (p − [p | r])/(p + 1)`.
pub fn constant_cqr(q: u64, r: u64) -> Result<ConstantReport> {
    let v = cqr_ball(q, r, DEFAULT_PREC)?;
    Ok(ConstantReport::new(
        &format!("C_{{{q},{r}}}"),
        "(6/pi^2) (1/phi(q)) prod_{p|q} (p - [p|r])/(p + 1)",
        v,
    ))
}

/// `(1/q) Σ_{k ≤ K} a_k/k²` with `a_k = μ(k)·g·[g | r]`, `g = gcd(k, q)`,
/// together with a bound `1/K` on the omitted tail.
pub fn cqr_series(q: u64, r: u64, terms: u64, prec: u32) -> Result<(Ball, Rational)> {
    check_class(q, r)?;
    let mut sum = Ball::exact_int(0, prec);
    for k in 1..=terms {
        let mu = crate::arith::multiplicative_suite(k)?.mu;
        let g = k.gcd(&q);
        if mu == 0 || r % g != 0 {
            continue;
        }
        let k2 = k.checked_mul(k).and_then(|v| i64::try_from(v).ok()).ok_or(Error::Overflow("series index"))?;
        sum = sum.add(&Ball::from_ratio(mu as i64 * g as i64, k2, prec));
    }
    Ok((sum.div_int(q as i64), rat(1, terms as i64)))
}

fn gamma_ball(c: i64, prec: u32) -> Result<Ball> {
    check_c(c)?;
    let one = Ball::exact_int(1, prec);
    let sqrt5 = Ball::exact_int(5, prec).sqrt();
    Ok(if c == 1 {
        let golden = one.add(&sqrt5).div_int(2);
        sqrt5.div_int(2).add(&ln(&golden).mul_int(2))
    } else {
        let sqrt3 = Ball::exact_int(3, prec).sqrt();
        Ball::from_ratio(1, 2, prec).add(&pi(prec).mul_int(2).div(&sqrt3.mul_int(3)))
    })
}

/// `γ(c) = √(4 + c)/2 + (2/√|c|)·A(√|c|/2)` with `A = arsinh` for `c > 0`
/// and `arcsin` for `c < 0`.
pub fn gamma_generic(c: i64, prec: u32) -> Result<Ball> {
    check_c(c)?;
    let root_abs = Ball::exact_int(c.abs(), prec).sqrt();
    let arg = root_abs.div_int(2);
    let a = if c > 0 { asinh(&arg) } else { asin(&arg) };
    Ok(Ball::exact_int(4 + c, prec)
        .sqrt()
        .div_int(2)
        .add(&a.mul_int(2).div(&root_abs)))
}

pub fn constant_gamma(c: i64) -> Result<ConstantReport> {
    let formula = if c == 1 {
        "sqrt(5)/2 + 2 ln((1 + sqrt(5))/2)"
    } else {
        "1/2 + 2 pi/(3 sqrt(3))"
    };
    Ok(ConstantReport::new(&format!("gamma({c})"), formula, gamma_ball(c, DEFAULT_PREC)?))
}

/// `C₂ = (12/π²)(2π/(3√3) + (1 + √5)/2 + 2 ln((1 + √5)/2))` and `C₁ = C₂/4`.
pub fn c2_ball(prec: u32) -> Ball {
    let one = Ball::exact_int(1, prec);
    let sqrt5 = Ball::exact_int(5, prec).sqrt();
    let sqrt3 = Ball::exact_int(3, prec).sqrt();
    let p = pi(prec);
    let golden = one.add(&sqrt5).div_int(2);
    let bracket = p.mul_int(2).div(&sqrt3.mul_int(3)).add(&golden).add(&ln(&golden).mul_int(2));
    Ball::exact_int(12, prec).div(&p.square()).mul(&bracket)
}

pub fn constant_c1c2() -> (ConstantReport, ConstantReport) {
    let c2 = c2_ball(DEFAULT_PREC);
    let c1 = c2.div_int(4);
    (
        ConstantReport::new("C1", "C2/4", c1),
        ConstantReport::new(
            "C2",
            "(12/pi^2) (2 pi/(3 sqrt(3)) + (1 + sqrt(5))/2 + 2 ln((1 + sqrt(5))/2))",
            c2,
        ),
    )
}

/// `ζ(3/2)/ζ(3)`, the squarefull density constant.
pub fn squarefull_constant(prec: u32) -> Ball {
    zeta(&rat(3, 2), prec).div(&zeta(&rat(3, 1), prec))
}

/// `(3/π²)·γ(c)`, the growth rate of `N(φ_c(ℚ^×), X)` (and of `N(ψ(ℚ), X)` for `c = 1`).
pub fn image_slope(c: i64, prec: u32) -> Result<Ball> {
    Ok(Ball::exact_int(3, prec).div(&pi(prec).square()).mul(&gamma_ball(c, prec)?))
}

/// Every constant the command line reports.
pub fn all_constants() -> Result<Vec<ConstantReport>> {
    let (c1, c2) = constant_c1c2();
    Ok(vec![
        constant_cqr(2, 1)?,
        constant_cqr(4, 2)?,
        constant_cqr(4, 0)?,
        constant_gamma(1)?,
        constant_gamma(-3)?,
        c1,
        c2,
        ConstantReport::new("zeta(3/2)/zeta(3)", "zeta(3/2)/zeta(3)", squarefull_constant(DEFAULT_PREC)),
        ConstantReport::new("CV slope", "(3/pi^2) gamma(1)", image_slope(1, DEFAULT_PREC)?),
    ])
}

#[derive(Clone, Debug, Serialize)]
pub struct SquarefullCount {
    #[serde(rename = "X")]
    pub x: u64,
    pub exact: u64,
    /// `ζ(3/2)/ζ(3)·√X`.
    pub predicted: f64,
}

/// Squarefull `n ≤ X`, counted through the unique form `n = b²m³` with `m`
/// squarefree.
pub fn squarefull_census(x: u64) -> Result<SquarefullCount> {
    if x == 0 {
        return Err(Error::InvalidArgument("X must be positive".into()));
    }
    let mut exact = 0;
    let mut m = 1u64;
    while m * m * m <= x {
        if is_squarefree(m)? {
            exact += (x / (m * m * m)).sqrt();
        }
        m += 1;
    }
    let predicted = squarefull_constant(64).to_f64() * (x as f64).sqrt();
    Ok(SquarefullCount { x, exact, predicted })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    NE,
    R,
    ImagePhi1,
    ImagePhiMinus3,
    ImagePsi,
}

impl std::str::FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "NE" | "ne" => Quantity::NE,
            "R" | "r" => Quantity::R,
            "image-phi1" => Quantity::ImagePhi1,
            "image-phi-3" => Quantity::ImagePhiMinus3,
            "image-psi" => Quantity::ImagePsi,
            _ => {
                return Err(Error::Parse(format!(
                    "unknown quantity `{s}` (expected NE, R, image-phi1, image-phi-3 or image-psi)"
                )))
            }
        })
    }
}

impl Quantity {
    /// The predicted linear growth rate.
    pub fn slope(self) -> Result<Ball> {
        let prec = DEFAULT_PREC;
        match self {
            Quantity::NE => Ok(c2_ball(prec).div_int(4)),
            Quantity::R => Ok(c2_ball(prec)),
            Quantity::ImagePhi1 | Quantity::ImagePsi => image_slope(1, prec),
            Quantity::ImagePhiMinus3 => image_slope(-3, prec),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "X")]
    pub x: u64,
    pub value: i64,
    pub ratio: f64,
    pub slope: f64,
    /// `(value − slope·X)/(√X·ln X)`.
    pub scaled_residual: f64,
}

/// `(X, value, value/X, slope, residual/(√X log X))` at each checkpoint.
/// Census quantities come from a single quadratic sweep.
pub fn convergence_report(quantity: Quantity, checkpoints: &[u64], workers: usize) -> Result<Vec<ConvergenceRow>> {
    let values: Vec<i64> = match quantity {
        Quantity::NE | Quantity::R => {
            let quadratic = builtin_family("quadratic")?;
            let cfg = CensusConfig {
                workers,
                ..CensusConfig::default()
            };
            run_census_checkpoints(&quadratic, checkpoints, &cfg, |_| Ok(()))?
                .iter()
                .map(|s| if quantity == Quantity::NE { s.ne as i64 } else { s.r })
                .collect()
        }
        Quantity::ImagePhi1 => checkpoints
            .iter()
            .map(|&x| count_image_phi(1, x).map(|r| r.total as i64))
            .collect::<Result<_>>()?,
        Quantity::ImagePhiMinus3 => checkpoints
            .iter()
            .map(|&x| count_image_phi(-3, x).map(|r| r.total as i64))
            .collect::<Result<_>>()?,
        Quantity::ImagePsi => checkpoints
            .iter()
            .map(|&x| count_image_psi(x).map(|v| v as i64))
            .collect::<Result<_>>()?,
    };
    let slope = quantity.slope()?.to_f64();
    Ok(checkpoints
        .iter()
        .zip(values)
        .map(|(&x, value)| {
            let xf = x as f64;
            let scale = xf.sqrt() * xf.ln().max(1.0);
            ConvergenceRow {
                x,
                value,
                ratio: value as f64 / xf,
                slope,
                scaled_residual: (value as f64 - slope * xf) / scale,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coprime_counts() {
        assert_eq!(coprime_count(6, 10).unwrap(), 3);
        assert_eq!(coprime_count(1, 7).unwrap(), 7);
        assert_eq!(coprime_count(30, 30).unwrap(), 8);
    }

    #[test]
    fn totient_sum_example() {
        assert_eq!(totient_sum(2, 1, 10).unwrap(), rat(419, 105));
        assert!(totient_sum(3, 1, 10).is_err());
    }

    #[test]
    fn captions() {
        let r = count_image_phi(-3, 100).unwrap();
        assert_eq!((r.classes, r.total), ([9, 35, 9], 53));
        let r = count_image_phi(1, 100).unwrap();
        assert_eq!((r.classes, r.total), ([13, 41, 10], 64));
        assert_eq!(count_image_psi(100).unwrap(), 65);
    }

    #[test]
    fn squarefull_small() {
        assert_eq!(squarefull_census(100).unwrap().exact, 14);
        assert_eq!(squarefull_census(1).unwrap().exact, 1);
    }
}
