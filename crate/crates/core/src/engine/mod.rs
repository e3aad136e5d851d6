//! Exact computation of `PrePer(f_t, ℚ)` and its portrait.
//!
//! A search is complete because every preperiodic point lies in an explicit
//! finite region (a height bound, sharpened by denominator constraints for
//! polynomials); an orbit that leaves the region can never return.

pub mod bounds;
mod portrait;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{count_rationals, enumerate_rationals, exact_isqrt, format_rational, rational_height, ExtRational, Rational};
use crate::error::{Error, Result};
use crate::family::{FamilyLift, FamilyShape, SpecializedMap};
use crate::tropical::{family_filter, Witness};
use bounds::{eval_form, polynomial_region, rational_height_bound};

pub use portrait::{node_types, Portrait, PortraitRecord};

pub const DEFAULT_CANDIDATE_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    TropicalFilter,
    ExhaustiveSearch,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::TropicalFilter => "tropical-filter",
            Method::ExhaustiveSearch => "exhaustive-search",
        })
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub use_filters: bool,
    /// Searches with more candidate points than this abort.
    pub candidate_cap: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            use_filters: true,
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PrePerResult {
    pub portrait: Portrait,
    pub method: Method,
    pub witness: Option<Witness>,
    /// Height bound of the searched region.
    pub search_bound: Option<Rational>,
    pub count: usize,
}

/// `f(P) = (F(x, y) : G(x, y))`.
pub fn evaluate(m: &SpecializedMap, p: &ExtRational) -> ExtRational {
    let (x, y) = p.to_projective();
    ExtRational::from_projective(eval_form(m.f(), &x, &y), eval_form(m.g(), &x, &y))
}

/// A bound `B` with `H(P) ≤ B` for every preperiodic `P`.
pub fn escape_bound(m: &SpecializedMap) -> Result<Rational> {
    match m.polynomial_coeffs() {
        Some(coeffs) => Ok(polynomial_region(&coeffs)?.height_bound()),
        None => Ok(Rational::from_integer(rational_height_bound(m)?)),
    }
}

/// `3p²` for the smallest prime `p` of good reduction.
pub fn cycle_length_bound(m: &SpecializedMap) -> u64 {
    let p = (2u64..)
        .filter(|&n| (2..n).take_while(|k| k * k <= n).all(|k| n % k != 0))
        .find(|&p| m.good_reduction(p))
        .expect("some prime is good");
    3 * p * p
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountBound {
    /// Number of bad places, including the archimedean one.
    pub s: usize,
    /// `5·2^{16sd³} + 3`, valid for every map.
    pub rational_bound: BigInt,
    /// `((d² − 2d + 2)/ln d + ε)·s·ln s` for polynomial maps; only
    /// asymptotically valid (for `s` beyond an ineffective threshold).
    pub polynomial_bound: Option<f64>,
}

pub fn preper_count_bound(m: &SpecializedMap, epsilon: f64) -> Result<CountBound> {
    let s = m.bad_place_count()?;
    let d = m.degree();
    let exp = 16 * s * d * d * d;
    let rational_bound = BigInt::from(5) * (BigInt::one() << exp) + 3;
    let polynomial_bound = m.is_polynomial().then(|| {
        let df = d as f64;
        let sf = s as f64;
        ((df * df - 2.0 * df + 2.0) / df.ln() + epsilon) * sf * sf.ln()
    });
    Ok(CountBound {
        s,
        rational_bound,
        polynomial_bound,
    })
}

/// `PrePer(f_t, ℚ)` with its portrait. With a family hint the registered
/// valuation filter is tried first; otherwise (or when it is silent) the
/// complete search runs.
pub fn compute_preper(m: &SpecializedMap, hint: Option<&FamilyLift>, cfg: &EngineConfig) -> Result<PrePerResult> {
    if let (Some(lift), true) = (hint, cfg.use_filters) {
        let verdict = family_filter(lift, m);
        if let (true, Some(set)) = (verdict.decided, verdict.preper_set) {
            if let Ok(points) = set.resolve(m) {
                let portrait = Portrait::from_points(points, |p| evaluate(m, p));
                return Ok(PrePerResult {
                    count: portrait.len(),
                    portrait,
                    method: Method::TropicalFilter,
                    witness: verdict.witness,
                    search_bound: None,
                });
            }
        }
    }
    let quadratic = hint.is_some_and(|l| matches!(l.shape(), FamilyShape::Quadratic));
    let (points, bound) = if quadratic {
        match quadratic_search(m.t(), cfg)? {
            Some(found) => found,
            None => polynomial_search(m, cfg)?,
        }
    } else if m.is_polynomial() {
        polynomial_search(m, cfg)?
    } else {
        rational_search(m, cfg)?
    };
    let portrait = Portrait::from_points(points, |p| evaluate(m, p));
    Ok(PrePerResult {
        count: portrait.len(),
        portrait,
        method: Method::ExhaustiveSearch,
        witness: None,
        search_bound: Some(bound),
    })
}

fn too_many(t: &Rational, n: impl fmt::Display, cap: u64) -> Error {
    Error::ResourceLimit {
        t: Some(format_rational(t)),
        detail: format!("{n} candidate points exceed the cap of {cap}"),
    }
}

/// Marks every point as preperiodic or not by following orbits through a
/// finite region; leaving the region means escaping.
struct OrbitSearch<K, F, R> {
    step: F,
    in_region: R,
    verdict: HashMap<K, bool>,
}

impl<K, F, R> OrbitSearch<K, F, R>
where
    K: Clone + Eq + std::hash::Hash,
    F: FnMut(&K) -> Option<K>,
    R: FnMut(&K) -> bool,
{
    fn new(step: F, in_region: R) -> Self {
        OrbitSearch {
            step,
            in_region,
            verdict: HashMap::new(),
        }
    }

    fn classify(&mut self, start: K) -> bool {
        if let Some(&v) = self.verdict.get(&start) {
            return v;
        }
        let mut path = vec![start.clone()];
        let mut on_path: HashMap<K, usize> = HashMap::new();
        on_path.insert(start, 0);
        let result = loop {
            let last = path.last().unwrap();
            let Some(next) = (self.step)(last) else {
                break false;
            };
            if let Some(&v) = self.verdict.get(&next) {
                break v;
            }
            if on_path.contains_key(&next) {
                break true;
            }
            if !(self.in_region)(&next) {
                break false;
            }
            on_path.insert(next.clone(), path.len());
            path.push(next);
        };
        for k in path {
            self.verdict.insert(k, result);
        }
        result
    }
}

/// `z² + a/c²`: points `u/c` with `u² − |u|c − |a| ≤ 0`, stepped by
/// `u ↦ (u² + a)/c`. `None` when the numbers do not fit machine integers.
fn quadratic_search(t: &Rational, cfg: &EngineConfig) -> Result<Option<(Vec<ExtRational>, Rational)>> {
    let Some(c) = exact_isqrt(t.denom()) else {
        return Ok(Some((vec![ExtRational::Infinity], Rational::one())));
    };
    let (Some(a), Some(c)) = (t.numer().to_i64(), c.to_i64()) else {
        return Ok(None);
    };
    let (a, c) = (a as i128, c as i128);
    if c > 1 << 30 || a.abs() > 1 << 60 {
        return Ok(None);
    }
    // largest u with u² − u·c − |a| ≤ 0
    let disc = (c * c + 4 * a.abs()) as u128;
    let mut umax = ((c as u128 + disc.isqrt()) / 2) as i128;
    while umax * umax - umax * c - a.abs() > 0 {
        umax -= 1;
    }
    while (umax + 1) * (umax + 1) - (umax + 1) * c - a.abs() <= 0 {
        umax += 1;
    }
    let n = (2 * umax + 1) as u64;
    if n > cfg.candidate_cap {
        return Err(too_many(t, n, cfg.candidate_cap));
    }
    let in_region = |u: &i128| u * u - u.abs() * c - a.abs() <= 0;
    let step = |u: &i128| {
        let v = u * u + a;
        (v % c == 0).then(|| v / c)
    };
    let mut search = OrbitSearch::new(step, in_region);
    let mut points = vec![ExtRational::Infinity];
    for u in -umax..=umax {
        if search.classify(u) {
            points.push(ExtRational::Finite(Rational::new(BigInt::from(u), BigInt::from(c))));
        }
    }
    let bound = Rational::from_integer(BigInt::from(umax.max(c)));
    Ok(Some((points, bound)))
}

fn polynomial_search(m: &SpecializedMap, cfg: &EngineConfig) -> Result<(Vec<ExtRational>, Rational)> {
    let coeffs = m.polynomial_coeffs().expect("polynomial map");
    let region = polynomial_region(&coeffs)?;
    let dens = crate::arith::divisors(
        region
            .denominator
            .to_u64()
            .ok_or(Error::Overflow("denominator bound"))?,
    )?;
    let mut total = BigInt::zero();
    let mut ranges = Vec::with_capacity(dens.len());
    for &w in &dens {
        let wb = BigInt::from(w);
        // |u| < r·w
        let lim: BigInt = (&region.radius * Rational::from_integer(wb.clone())).ceil().to_integer() - 1;
        total += &lim * 2 + 1;
        ranges.push((wb, lim));
    }
    if total > BigInt::from(cfg.candidate_cap) {
        return Err(too_many(m.t(), total, cfg.candidate_cap));
    }
    let radius = region.radius.clone();
    let denominator = region.denominator.clone();
    let in_region = |z: &Rational| z.abs() < radius && denominator.is_multiple_of(z.denom());
    let step = |z: &Rational| {
        let v = coeffs.iter().rev().fold(Rational::zero(), |acc, a| acc * z + a);
        Some(v)
    };
    let mut search = OrbitSearch::new(step, in_region);
    let mut points = vec![ExtRational::Infinity];
    for (w, lim) in ranges {
        let mut u = -lim.clone();
        while u <= lim {
            if u.gcd(&w).is_one() {
                let z = Rational::new(u.clone(), w.clone());
                if search.classify(z.clone()) {
                    points.push(ExtRational::Finite(z));
                }
            }
            u += 1;
        }
    }
    Ok((points, region.height_bound()))
}

fn rational_search(m: &SpecializedMap, cfg: &EngineConfig) -> Result<(Vec<ExtRational>, Rational)> {
    let b = rational_height_bound(m)?;
    let b64 = b.to_u64().filter(|&b| b < 1 << 31).ok_or_else(|| too_many(m.t(), format!("H ≤ {b}:"), cfg.candidate_cap))?;
    // count without enumerating
    let n = count_rationals(b64) + 1;
    if n > cfg.candidate_cap {
        return Err(too_many(m.t(), n, cfg.candidate_cap));
    }
    let in_region = |p: &ExtRational| match p {
        ExtRational::Infinity => true,
        ExtRational::Finite(q) => rational_height(q) <= b,
    };
    let step = |p: &ExtRational| Some(evaluate(m, p));
    let mut search = OrbitSearch::new(step, in_region);
    let mut points = Vec::new();
    let candidates = std::iter::once(ExtRational::Infinity).chain(enumerate_rationals(b64).map(ExtRational::Finite));
    for p in candidates {
        if search.classify(p.clone()) {
            points.push(p);
        }
    }
    Ok((points, Rational::from_integer(b)))
}
