//! Named families and the parametrized templates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::IntPoly;
use super::{FamilyLift, FamilyShape, GenericPortrait};
use crate::arith::{parse_rational, ExtRational, Rational};
use crate::error::{Error, Result};

pub const BUILTIN_NAMES: [&str; 3] = ["quadratic", "crit2", "cubic"];

/// The named families.
pub fn builtin_families() -> Vec<FamilyLift> {
    BUILTIN_NAMES
        .iter()
        .map(|n| builtin_family(n).expect("built-in family"))
        .collect()
}

/// Looks up a named family or instantiates a template:
///
/// * `quadratic` (`z² + T`), `crit2` (`T/(z² − z)`), `cubic` (`z³ + T`)
/// * `unicritical:<d>` for `z^d + T`
/// * `additive:<a0>,…,<ad>` for `a_d z^d + … + a_0 + T`
/// * `inverse:<e>:<a0>,…,<ad>` for `T/(a_e z^e + … + a_d z^d)`
/// * `three-cycle:<d>:<e>` for `(T z^e + 1)/(1 − z)^d`
pub fn builtin_family(spec: &str) -> Result<FamilyLift> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let int = |s: &str| -> Result<usize> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("`{s}` is not a non-negative integer")))
    };
    let rationals = |s: &str| -> Result<Vec<Rational>> { s.split(',').map(parse_rational).collect() };
    match parts.as_slice() {
        ["quadratic"] => {
            let coeffs = unicritical_coeffs(2);
            additive_lift("quadratic", &coeffs, FamilyShape::Quadratic)
        }
        ["crit2"] => {
            let coeffs = [0, -1, 1].map(|c| Rational::from_integer(c.into()));
            inverse("crit2", 1, &coeffs)
        }
        ["cubic"] => additive("cubic", &unicritical_coeffs(3)),
        ["unicritical", d] => additive(spec, &unicritical_coeffs(int(d)?)),
        ["additive", cs] => additive(spec, &rationals(cs)?),
        ["inverse", e, cs] => inverse(spec, int(e)?, &rationals(cs)?),
        ["three-cycle", d, e] => three_cycle(spec, int(d)?, int(e)?),
        _ => Err(Error::UnknownFamily(spec.to_string())),
    }
}

fn unicritical_coeffs(d: usize) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); d + 1];
    if d >= 1 {
        c[d] = Rational::one();
    }
    c
}

fn lcm_of_denominators(coeffs: &[Rational]) -> BigInt {
    coeffs.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()))
}

fn scaled(a: &Rational, l: &BigInt) -> BigInt {
    (a * Rational::from_integer(l.clone())).to_integer()
}

/// Divides every coefficient by the joint content.
fn primitive(f: Vec<IntPoly>, g: Vec<IntPoly>) -> (Vec<IntPoly>, Vec<IntPoly>) {
    let c = f.iter().chain(&g).fold(BigInt::zero(), |acc, p| acc.gcd(&p.content()));
    let div = |v: Vec<IntPoly>| {
        v.into_iter()
            .map(|p| IntPoly::new(p.coeffs().iter().map(|x| x / &c).collect()))
            .collect()
    };
    (div(f), div(g))
}

/// `a_d z^d + … + a_0 + T` with generic portrait `{∞}`.
pub fn additive(name: &str, coeffs: &[Rational]) -> Result<FamilyLift> {
    additive_lift(name, coeffs, FamilyShape::Additive { coeffs: coeffs.to_vec() })
}

fn additive_lift(name: &str, coeffs: &[Rational], shape: FamilyShape) -> Result<FamilyLift> {
    let d = coeffs.len().saturating_sub(1);
    if d < 2 {
        return Err(Error::InvalidFamily(format!("{name}: degree must be at least 2")));
    }
    if coeffs[d].is_zero() {
        return Err(Error::InvalidFamily(format!("{name}: leading coefficient a_d is zero")));
    }
    let l = lcm_of_denominators(coeffs);
    let mut f: Vec<IntPoly> = coeffs.iter().map(|a| IntPoly::constant(scaled(a, &l))).collect();
    f[0] = IntPoly::new(vec![scaled(&coeffs[0], &l), l.clone()]);
    let mut g = vec![IntPoly::zero(); d + 1];
    g[0] = IntPoly::constant(l);
    let (f, g) = primitive(f, g);
    let gamma = GenericPortrait {
        points: vec![ExtRational::Infinity],
        edges: vec![0],
    };
    FamilyLift::new(name, d, f, g, gamma, shape)
}

/// `T / (a_e z^e + … + a_d z^d)`; the generic portrait is `{0, ∞}` together
/// with the rational zeros of the denominator.
pub fn inverse(name: &str, e: usize, coeffs: &[Rational]) -> Result<FamilyLift> {
    let d = coeffs.len().saturating_sub(1);
    let invalid = |msg: &str| Err(Error::InvalidFamily(format!("{name}: {msg}")));
    if d < 2 {
        return invalid("degree must be at least 2");
    }
    if e < 1 || e > d {
        return invalid("need 1 ≤ e ≤ d");
    }
    if coeffs[d].is_zero() || coeffs[e].is_zero() {
        return invalid("a_d and a_e must be nonzero");
    }
    if coeffs[..e].iter().any(|a| !a.is_zero()) {
        return invalid("coefficients below z^e must vanish");
    }
    let l = lcm_of_denominators(coeffs);
    let mut f = vec![IntPoly::zero(); d + 1];
    f[0] = IntPoly::monomial(l.clone(), 1);
    let g: Vec<IntPoly> = coeffs.iter().map(|a| IntPoly::constant(scaled(a, &l))).collect();
    let (f, g) = primitive(f, g);
    let q = IntPoly::new(coeffs[e..].iter().map(|a| scaled(a, &l)).collect());
    let mut points = vec![ExtRational::Infinity, ExtRational::from_int(0)];
    let mut edges = vec![1, 0];
    for r in q.rational_roots()? {
        points.push(ExtRational::Finite(r));
        edges.push(0);
    }
    let shape = FamilyShape::Inverse {
        e,
        coeffs: coeffs.to_vec(),
    };
    FamilyLift::new(name, d, f, g, GenericPortrait { points, edges }, shape)
}

/// `(T z^e + 1) / (1 − z)^d` with `d ≥ e + 2 ≥ 5`; generic 3-cycle `0 → 1 → ∞ → 0`.
pub fn three_cycle(name: &str, d: usize, e: usize) -> Result<FamilyLift> {
    if e < 3 || d < e + 2 {
        return Err(Error::InvalidFamily(format!("{name}: need d ≥ e + 2 ≥ 5")));
    }
    let mut f = vec![IntPoly::zero(); d + 1];
    f[0] = IntPoly::from_i64s(&[1]);
    f[e] = IntPoly::from_i64s(&[0, 1]);
    let mut g = Vec::with_capacity(d + 1);
    let mut binom = BigInt::one();
    for i in 0..=d {
        let signed = if i % 2 == 0 { binom.clone() } else { -binom.clone() };
        g.push(IntPoly::constant(signed));
        binom = binom * BigInt::from(d - i) / BigInt::from(i + 1);
    }
    let gamma = GenericPortrait {
        points: vec![ExtRational::Infinity, ExtRational::from_int(0), ExtRational::from_int(1)],
        edges: vec![1, 2, 0],
    };
    FamilyLift::new(name, d, f, g, gamma, FamilyShape::ThreeCycle { e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn named_portraits() {
        let q = builtin_family("quadratic").unwrap();
        assert_eq!((q.degree(), q.codegree()), (2, 1));
        assert_eq!(q.gamma().points, vec![ExtRational::Infinity]);
        let c = builtin_family("crit2").unwrap();
        assert_eq!(
            c.gamma().points,
            vec![ExtRational::Infinity, ExtRational::from_int(0), ExtRational::from_int(1)]
        );
        // 0 and ∞ swap, 1 → ∞
        assert_eq!(c.gamma().edges, vec![1, 0, 0]);
        let u = builtin_family("cubic").unwrap();
        assert_eq!((u.degree(), u.gamma().len()), (3, 1));
        assert_eq!(builtin_families().len(), 3);
    }

    #[test]
    fn templates() {
        let t = builtin_family("three-cycle:5:3").unwrap();
        assert_eq!(t.gamma().edges, vec![1, 2, 0]);
        assert!(t.exceptional_primes().unwrap() == vec![5]);
        let a = builtin_family("additive:1/2,0,3/5").unwrap();
        assert_eq!(a.exceptional_primes().unwrap(), vec![2, 3, 5]);
        let i = builtin_family("inverse:1:0,-2,1").unwrap();
        // z² − 2z vanishes at 0 and 2
        assert_eq!(i.gamma().points[2], ExtRational::Finite(rat(2, 1)));
        assert_eq!(i.exceptional_primes().unwrap(), vec![2]);
        assert_eq!(builtin_family("quadratic").unwrap().exceptional_primes().unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn template_hypotheses_enforced() {
        assert!(builtin_family("additive:1,2,0").is_err());
        assert!(builtin_family("inverse:0:1,1,1").is_err());
        assert!(builtin_family("inverse:1:1,1,1").is_err());
        assert!(builtin_family("three-cycle:4:2").is_err());
        assert!(builtin_family("three-cycle:5:2").is_err());
        assert!(matches!(builtin_family("cusp"), Err(Error::UnknownFamily(_))));
    }
}
