//! Valuation filters: conditions at a single prime that pin down
//! `PrePer(f_t, ℚ)` without an orbit search.
//!
//! Every filter is three-valued in effect: it either decides the set exactly
//! or stays silent, in which case the caller falls back to the search engine.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{exact_isqrt, factor_bigint, int_valuation, padic_valuation, ExtRational, Rational, Valuation};
use crate::error::{Error, Result};
use crate::family::poly::IntPoly;
use crate::family::{FamilyLift, FamilyShape, SpecializedMap};

/// The rule that produced a decided verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// The denominator of `t` is not a square (quadratic family).
    SquareDenominator,
    /// `a_d z^d + … + c` with `v(c) < 0`, `d ∤ v(c)`.
    Additive { p: u64 },
    /// `c / (a_e z^e + … + a_d z^d)` with `d, d+1 ∤ v(c)`.
    Inverse { p: u64 },
    /// `c z^d / (a_0 + … + a_e z^e)` with `d, d−1 ∤ v(c)`.
    InverseMonomial { p: u64 },
    /// `(c z^e + 1)/(1 − z)^d` with `v(c) = −1`.
    ThreeCycle { p: u64 },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::SquareDenominator => f.write_str("non-square denominator"),
            Witness::Additive { p } => write!(f, "additive valuation filter at p = {p}"),
            Witness::Inverse { p } => write!(f, "inverse valuation filter at p = {p}"),
            Witness::InverseMonomial { p } => write!(f, "monomial-over-polynomial filter at p = {p}"),
            Witness::ThreeCycle { p } => write!(f, "three-cycle valuation filter at p = {p}"),
        }
    }
}

/// `f^{−depth}(base ∪ [f⁻¹(∞)])`, kept symbolic until a concrete map is known.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicSet {
    pub base: Vec<ExtRational>,
    /// Adjoin the poles `f⁻¹(∞)` to the base.
    pub with_poles: bool,
    /// Number of full preimage steps applied after that.
    pub depth: u32,
}

impl SymbolicSet {
    pub fn explicit(base: Vec<ExtRational>) -> Self {
        SymbolicSet {
            base,
            with_poles: false,
            depth: 0,
        }
    }

    /// The set of rational points it denotes for `m`, sorted.
    pub fn resolve(&self, m: &SpecializedMap) -> Result<Vec<ExtRational>> {
        let mut set = self.base.clone();
        if self.with_poles {
            set.extend(rational_preimages(m, &ExtRational::Infinity)?);
        }
        set.sort();
        set.dedup();
        for _ in 0..self.depth {
            let mut next = set.clone();
            for q in &set {
                next.extend(rational_preimages(m, q)?);
            }
            next.sort();
            next.dedup();
            set = next;
        }
        Ok(set)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilterVerdict {
    pub decided: bool,
    pub preper_set: Option<SymbolicSet>,
    pub witness: Option<Witness>,
}

impl FilterVerdict {
    pub fn undecided() -> Self {
        FilterVerdict {
            decided: false,
            preper_set: None,
            witness: None,
        }
    }

    fn decided(set: SymbolicSet, witness: Witness) -> Self {
        FilterVerdict {
            decided: true,
            preper_set: Some(set),
            witness: Some(witness),
        }
    }

    fn with_prime(mut self, p: u64) -> Self {
        self.witness = self.witness.map(|w| match w {
            Witness::Additive { .. } => Witness::Additive { p },
            Witness::Inverse { .. } => Witness::Inverse { p },
            Witness::InverseMonomial { .. } => Witness::InverseMonomial { p },
            Witness::ThreeCycle { .. } => Witness::ThreeCycle { p },
            w => w,
        });
        self
    }
}

fn zero() -> ExtRational {
    ExtRational::from_int(0)
}

fn negative_not_divisible(v_c: Valuation, divisors: &[i64]) -> Option<i64> {
    let v = v_c.finite()?;
    (v < 0 && divisors.iter().all(|&k| v % k != 0)).then_some(v)
}

/// `f = a_d z^d + … + a_1 z + c` with `coeff_valuations[i − 1] = v(a_i)`:
/// decides `{∞}` when every `v(a_i) ≥ 0`, `v(a_d) = 0`, `v(c) < 0` and `d ∤ v(c)`.
pub fn filter_additive(coeff_valuations: &[Valuation], v_c: Valuation, d: usize) -> FilterVerdict {
    assert!(d >= 2, "degree must be at least 2");
    assert_eq!(coeff_valuations.len(), d, "need v(a_1), …, v(a_d)");
    let ok = coeff_valuations.iter().all(|v| v.is_nonnegative())
        && coeff_valuations[d - 1] == Valuation::Finite(0)
        && negative_not_divisible(v_c, &[d as i64]).is_some();
    if ok {
        FilterVerdict::decided(
            SymbolicSet::explicit(vec![ExtRational::Infinity]),
            Witness::Additive { p: 0 },
        )
    } else {
        FilterVerdict::undecided()
    }
}

/// `f = c / (a_e z^e + … + a_d z^d)` with `coeff_valuations[i] = v(a_i)` for
/// `i = 0..=d` (entries below `e` are ignored): decides `{0, ∞} ∪ f⁻¹(∞)`.
pub fn filter_inverse(v_c: Valuation, d: usize, e: usize, coeff_valuations: &[Valuation]) -> FilterVerdict {
    assert!(d >= 2 && (1..=d).contains(&e), "need d ≥ 2 and 1 ≤ e ≤ d");
    assert_eq!(coeff_valuations.len(), d + 1, "need v(a_0), …, v(a_d)");
    let vals = &coeff_valuations[e..];
    let ok = vals.iter().all(|v| v.is_nonnegative())
        && coeff_valuations[d] == Valuation::Finite(0)
        && coeff_valuations[e] == Valuation::Finite(0)
        && negative_not_divisible(v_c, &[d as i64, d as i64 + 1]).is_some();
    if ok {
        FilterVerdict::decided(
            SymbolicSet {
                base: vec![ExtRational::Infinity, zero()],
                with_poles: true,
                depth: 0,
            },
            Witness::Inverse { p: 0 },
        )
    } else {
        FilterVerdict::undecided()
    }
}

/// `f = c z^d / (a_0 + … + a_e z^e)`, `d > e`, with `coeff_valuations[i] = v(a_i)`
/// for `i = 0..=e`: decides `{0, ∞} ∪ f⁻¹(∞)` when `v(a_i) ≥ 0`,
/// `v(a_0) = v(a_e) = 0` and `v(c) < 0` is divisible by neither `d` nor `d − 1`.
pub fn filter_inverse_monomial(v_c: Valuation, d: usize, e: usize, coeff_valuations: &[Valuation]) -> FilterVerdict {
    assert!(d >= 2 && e < d, "need d > e");
    assert_eq!(coeff_valuations.len(), e + 1, "need v(a_0), …, v(a_e)");
    let ok = coeff_valuations.iter().all(|v| v.is_nonnegative())
        && coeff_valuations[0] == Valuation::Finite(0)
        && coeff_valuations[e] == Valuation::Finite(0)
        && negative_not_divisible(v_c, &[d as i64, d as i64 - 1]).is_some();
    if ok {
        FilterVerdict::decided(
            SymbolicSet {
                base: vec![ExtRational::Infinity, zero()],
                with_poles: true,
                depth: 0,
            },
            Witness::InverseMonomial { p: 0 },
        )
    } else {
        FilterVerdict::undecided()
    }
}

/// `f = (c z^e + 1)/(1 − z)^d` with `v(c) = −1` and `v(d) = 0`. Decides
/// `{0, 1, ∞}` when `d ≥ e + 2 ≥ 5`, its full preimage when `e = 2, d ≥ 5`,
/// and the third iterated preimage when `e = 2, d = 4`.
pub fn filter_three_cycle(v_c: Valuation, d: usize, e: usize, v_d: Valuation) -> FilterVerdict {
    if v_c != Valuation::Finite(-1) || v_d != Valuation::Finite(0) {
        return FilterVerdict::undecided();
    }
    let depth = match (e, d) {
        (e, d) if e >= 3 && d >= e + 2 => 0,
        (2, d) if d >= 5 => 1,
        (2, 4) => 3,
        _ => return FilterVerdict::undecided(),
    };
    FilterVerdict::decided(
        SymbolicSet {
            base: vec![ExtRational::Infinity, zero(), ExtRational::from_int(1)],
            with_poles: false,
            depth,
        },
        Witness::ThreeCycle { p: 0 },
    )
}

/// Iterates the induced map on valuation pairs `(a, b) = (v(z), v(z − 1))`
/// for `(c z^e + 1)/(1 − z)^d` with `v(c) = v_c < 0` and `v(d) = 0`.
/// Returns the start followed by `steps` images. Steps whose image is not
/// determined by valuations alone (a cancellation could occur) are errors.
pub fn ab_orbit(a: i64, b: i64, d: i64, e: i64, v_c: i64, steps: usize) -> Result<Vec<(i64, i64)>> {
    let consistent = |a: i64, b: i64| {
        (a <= 0 || b == 0) && (b <= 0 || a == 0) && ((a >= 0 && b >= 0) || a == b)
    };
    if d < e + 2 || e < 1 || v_c >= 0 {
        return Err(Error::InvalidArgument("need d ≥ e + 2, e ≥ 1 and v(c) < 0".into()));
    }
    if !consistent(a, b) {
        return Err(Error::InvalidArgument(format!("({a}, {b}) is not a valuation pair of z and z − 1")));
    }
    let ambiguous = |a: i64, b: i64| Error::InvalidArgument(format!("the image of ({a}, {b}) is not determined"));
    let overflow = || Error::Overflow("valuation orbit");
    let mut out = vec![(a, b)];
    let (mut a, mut b) = (a, b);
    for _ in 0..steps {
        let (na, nb) = if a > 0 {
            // z close to 0: f(z) − 1 = c z^e + d z − Σ_{i>1} C(d,i)(−z)^i
            let lead = e.checked_mul(a).and_then(|x| x.checked_add(v_c)).ok_or(overflow())?;
            if lead < 0 {
                (lead, lead)
            } else if lead > 0 && lead != a {
                (0, lead.min(a))
            } else {
                return Err(ambiguous(a, b));
            }
        } else if b > 0 {
            let v = d.checked_mul(b).and_then(|x| v_c.checked_sub(x)).ok_or(overflow())?;
            (v, v)
        } else if a < 0 {
            let v = (d - e).checked_mul(a).and_then(|x| v_c.checked_sub(x)).ok_or(overflow())?;
            match v.signum() {
                1 => (v, 0),
                -1 => (v, v),
                _ => return Err(ambiguous(a, b)),
            }
        } else {
            (v_c, v_c)
        };
        a = na;
        b = nb;
        out.push((a, b));
    }
    Ok(out)
}

/// Rational solutions `P` of `f(P) = q`.
pub fn rational_preimages(m: &SpecializedMap, q: &ExtRational) -> Result<Vec<ExtRational>> {
    let (qx, qy) = q.to_projective();
    let h: Vec<BigInt> = m.f().iter().zip(m.g()).map(|(fi, gi)| &qy * fi - &qx * gi).collect();
    let mut out = Vec::new();
    if h.last().is_some_and(Zero::is_zero) {
        out.push(ExtRational::Infinity);
    }
    let poly = IntPoly::new(h);
    if poly.is_zero() {
        return Err(Error::InvalidArgument("map is constant".into()));
    }
    out.extend(poly.rational_roots()?.into_iter().map(ExtRational::Finite));
    Ok(out)
}

fn primes_of(n: &BigInt) -> Option<Vec<u64>> {
    let fac = factor_bigint(n).ok()?;
    fac.into_iter().map(|(p, _)| p.to_u64()).collect()
}

/// Runs the filter registered for the family's shape at every prime in the
/// denominator of the relevant constant term.
pub fn family_filter(lift: &FamilyLift, m: &SpecializedMap) -> FilterVerdict {
    let t = m.t();
    let d = lift.degree();
    match lift.shape() {
        FamilyShape::Quadratic => {
            if exact_isqrt(t.denom()).is_none() {
                FilterVerdict::decided(
                    SymbolicSet::explicit(vec![ExtRational::Infinity]),
                    Witness::SquareDenominator,
                )
            } else {
                FilterVerdict::undecided()
            }
        }
        FamilyShape::Additive { coeffs } => {
            let c = &coeffs[0] + t;
            first_decided(c.denom(), |p| {
                let vals: Vec<Valuation> = coeffs[1..].iter().map(|a| padic_valuation(a, p)).collect();
                filter_additive(&vals, padic_valuation(&c, p), d)
            })
        }
        FamilyShape::Inverse { e, coeffs } => first_decided(t.denom(), |p| {
            let vals: Vec<Valuation> = coeffs.iter().map(|a| padic_valuation(a, p)).collect();
            filter_inverse(padic_valuation(t, p), d, *e, &vals)
        }),
        FamilyShape::ThreeCycle { e } => first_decided(t.denom(), |p| {
            filter_three_cycle(padic_valuation(t, p), d, *e, int_valuation(&BigInt::from(d), p))
        }),
        FamilyShape::Custom => FilterVerdict::undecided(),
    }
}

fn first_decided(den: &BigInt, filter: impl Fn(u64) -> FilterVerdict) -> FilterVerdict {
    let Some(primes) = primes_of(den) else {
        return FilterVerdict::undecided();
    };
    primes
        .into_iter()
        .map(|p| filter(p).with_prime(p))
        .find(|v| v.decided)
        .unwrap_or_else(FilterVerdict::undecided)
}

/// Certifies that `f_t` has only the generic preperiodic points, using the
/// family's denominator lemma: for the quadratic family a non-square
/// denominator, otherwise a prime `p` outside the exceptional set with
/// `v_p(t) = −1`.
pub fn denominator_lemma(lift: &FamilyLift, t: &Rational) -> Result<bool> {
    if matches!(lift.shape(), FamilyShape::Quadratic) {
        return Ok(exact_isqrt(t.denom()).is_none());
    }
    if matches!(lift.shape(), FamilyShape::ThreeCycle { .. }) && lift.degree() < 5 {
        return Ok(false);
    }
    let exceptional = lift
        .exceptional_primes()
        .ok_or_else(|| Error::NoDenominatorLemma(lift.name().to_string()))?;
    let primes = primes_of(t.denom()).ok_or_else(|| Error::FactorizationLimit(t.denom().to_string()))?;
    Ok(primes
        .into_iter()
        .any(|p| !exceptional.contains(&p) && padic_valuation(t, p) == Valuation::Finite(-1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::family::builtin_family;

    const Z: Valuation = Valuation::Finite(0);
    const INF: Valuation = Valuation::Infinite;

    fn v(n: i64) -> Valuation {
        Valuation::Finite(n)
    }

    #[test]
    fn additive_cases() {
        let q = filter_additive(&[INF, Z], v(-1), 2);
        assert!(q.decided);
        assert_eq!(q.preper_set.unwrap().base, vec![ExtRational::Infinity]);
        assert!(!filter_additive(&[INF, Z], v(-2), 2).decided);
        assert!(filter_additive(&[INF, INF, Z], v(-2), 3).decided);
        // leading coefficient not a unit
        assert!(!filter_additive(&[INF, v(1)], v(-1), 2).decided);
        assert!(!filter_additive(&[v(-1), Z], v(-1), 2).decided);
        assert!(!filter_additive(&[INF, Z], v(1), 2).decided);
        assert!(!filter_additive(&[INF, Z], INF, 2).decided);
    }

    #[test]
    fn inverse_cases() {
        let vals = [INF, Z, Z];
        assert!(filter_inverse(v(-1), 2, 1, &vals).decided);
        assert!(!filter_inverse(v(-3), 2, 1, &vals).decided);
        assert!(filter_inverse(v(-5), 3, 1, &[INF, Z, INF, Z]).decided);
        assert!(!filter_inverse(v(-1), 2, 1, &[INF, v(1), Z]).decided);
    }

    #[test]
    fn three_cycle_cases() {
        let set = |e, d| filter_three_cycle(v(-1), d, e, Z).preper_set.map(|s| s.depth);
        assert_eq!(set(3, 5), Some(0));
        assert_eq!(set(2, 5), Some(1));
        assert_eq!(set(2, 4), Some(3));
        assert_eq!(set(3, 4), None);
        assert!(!filter_three_cycle(v(-2), 5, 3, Z).decided);
        assert!(!filter_three_cycle(v(-1), 5, 3, v(1)).decided);
    }

    #[test]
    fn ab_orbit_steps() {
        assert_eq!(ab_orbit(0, 0, 5, 3, -1, 1).unwrap()[1], (-1, -1));
        assert_eq!(ab_orbit(-1, -1, 5, 3, -1, 1).unwrap()[1], (1, 0));
        // (0,1) → (−6,−6) → (11,0) → (0,11)
        let orbit = ab_orbit(0, 1, 5, 3, -1, 3).unwrap();
        assert_eq!(orbit, vec![(0, 1), (-6, -6), (11, 0), (0, 11)]);
        assert!(ab_orbit(1, 1, 5, 3, -1, 1).is_err());
        assert!(ab_orbit(-1, 0, 5, 3, -1, 1).is_err());
    }

    #[test]
    fn ab_orbit_vertical_ray_escapes() {
        for (d, e) in [(5, 3), (6, 3), (7, 4), (9, 3)] {
            for b in 1..=50 {
                let orbit = ab_orbit(0, b, d, e, -1, 12).unwrap();
                let ray: Vec<i64> = orbit.iter().step_by(3).map(|&(a, b)| {
                    assert_eq!(a, 0);
                    b
                }).collect();
                assert!(ray.windows(2).all(|w| w[1] > w[0]), "d={d} e={e} b={b}: {ray:?}");
            }
        }
    }

    #[test]
    fn denominator_lemma_examples() {
        let q = builtin_family("quadratic").unwrap();
        assert!(denominator_lemma(&q, &rat(1, 2)).unwrap());
        assert!(!denominator_lemma(&q, &rat(-29, 16)).unwrap());
        let c = builtin_family("cubic").unwrap();
        assert!(denominator_lemma(&c, &rat(5, 7)).unwrap());
        assert!(!denominator_lemma(&c, &rat(5, 49)).unwrap());
        let crit = builtin_family("crit2").unwrap();
        assert!(denominator_lemma(&crit, &rat(3, 10)).unwrap());
        let custom = crate::family::FamilyLift::from_json_str(
            &serde_json::to_string(&crit.to_json_file()).unwrap(),
        )
        .unwrap();
        assert!(matches!(denominator_lemma(&custom, &rat(1, 3)), Err(Error::NoDenominatorLemma(_))));
    }

    #[test]
    fn family_filters_and_resolution() {
        let crit = builtin_family("crit2").unwrap();
        let m = crit.specialize(&rat(3, 7)).unwrap();
        let v = family_filter(&crit, &m);
        assert_eq!(v.witness, Some(Witness::Inverse { p: 7 }));
        let set = v.preper_set.unwrap().resolve(&m).unwrap();
        assert_eq!(set, vec![ExtRational::Infinity, ExtRational::from_int(0), ExtRational::from_int(1)]);
        let q = builtin_family("quadratic").unwrap();
        let m = q.specialize(&rat(1, 9)).unwrap();
        assert!(!family_filter(&q, &m).decided);
        let m = q.specialize(&rat(1, 8)).unwrap();
        assert_eq!(family_filter(&q, &m).witness, Some(Witness::SquareDenominator));
    }

    #[test]
    fn preimages() {
        let q = builtin_family("quadratic").unwrap();
        let m = q.specialize(&rat(-1, 1)).unwrap();
        // z² − 1 = 0 at ±1, z² − 1 = ∞ only at ∞
        assert_eq!(
            rational_preimages(&m, &ExtRational::from_int(0)).unwrap(),
            vec![ExtRational::from_int(-1), ExtRational::from_int(1)]
        );
        assert_eq!(rational_preimages(&m, &ExtRational::Infinity).unwrap(), vec![ExtRational::Infinity]);
    }
}
