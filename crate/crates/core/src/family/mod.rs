//! One-parameter families of rational maps given by integral lifts
//! `F, G ∈ ℤ[T][X, Y]`, their resultant polynomials and specializations.

mod builtin;
pub mod poly;

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor_bigint, format_rational, ExtRational, Rational};
use crate::error::{Error, Result};
use poly::{resultant, IntPoly};

pub use builtin::{builtin_families, builtin_family, BUILTIN_NAMES};

/// Structural shape of a family, used to pick valuation filters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyShape {
    /// `z² + T`, with the square-denominator test.
    Quadratic,
    /// `a_d z^d + … + a_0 + T`; `coeffs[i] = a_i`.
    Additive { coeffs: Vec<Rational> },
    /// `T / (a_e z^e + … + a_d z^d)`; `coeffs[i] = a_i`, zero below `e`.
    Inverse { e: usize, coeffs: Vec<Rational> },
    /// `(T z^e + 1) / (1 − z)^d`.
    ThreeCycle { e: usize },
    /// A user-supplied lift with no registered filters.
    Custom,
}

/// The preperiodic points of the generic member, all constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericPortrait {
    pub points: Vec<ExtRational>,
    /// `edges[i]` is the index of the image of `points[i]`.
    pub edges: Vec<usize>,
}

impl GenericPortrait {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResultantPoly {
    pub poly: IntPoly,
    /// Rational roots: the finite parameters outside the domain of definition.
    pub roots: Vec<Rational>,
}

impl ResultantPoly {
    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }
}

/// An integral lift `(F, G)` with `F = Σ f_i(T) X^i Y^{d−i}` and likewise `G`.
#[derive(Clone, Debug)]
pub struct FamilyLift {
    name: String,
    degree: usize,
    f: Vec<IntPoly>,
    g: Vec<IntPoly>,
    gamma: GenericPortrait,
    shape: FamilyShape,
    resultant: ResultantPoly,
}

impl FamilyLift {
    /// Validates and builds a lift. Rejects non-coprime coefficients, a
    /// vanishing resultant, and declared generic points that do not map
    /// where their edges say.
    pub fn new(
        name: impl Into<String>,
        degree: usize,
        f: Vec<IntPoly>,
        g: Vec<IntPoly>,
        gamma: GenericPortrait,
        shape: FamilyShape,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |msg: String| Error::InvalidFamily(format!("{name}: {msg}"));
        if degree < 2 {
            return Err(invalid(format!("degree {degree} < 2")));
        }
        if f.len() != degree + 1 || g.len() != degree + 1 {
            return Err(invalid(format!("expected {} coefficients per form", degree + 1)));
        }
        let content = f
            .iter()
            .chain(&g)
            .fold(BigInt::zero(), |acc, p| acc.gcd(&p.content()));
        if !content.is_one() {
            return Err(invalid(format!("coefficients share the factor {content}")));
        }
        let r = resultant(&f, &g);
        if r.is_zero() {
            return Err(Error::DegenerateFamily(name));
        }
        let codeg = f.iter().chain(&g).filter_map(IntPoly::degree).max().unwrap_or(0);
        let rdeg = r.degree().unwrap_or(0);
        assert!(
            rdeg <= 2 * degree * codeg,
            "deg R_f = {rdeg} exceeds 2dd' = {}",
            2 * degree * codeg
        );
        let roots = r.rational_roots()?;
        let lift = FamilyLift {
            name,
            degree,
            f,
            g,
            gamma,
            shape,
            resultant: ResultantPoly { poly: r, roots },
        };
        lift.check_gamma()?;
        Ok(lift)
    }

    fn check_gamma(&self) -> Result<()> {
        let invalid = |msg: String| Error::InvalidFamily(format!("{}: {msg}", self.name));
        let pts = &self.gamma.points;
        if pts.len() != self.gamma.edges.len() {
            return Err(invalid("generic portrait needs one edge per point".into()));
        }
        for (i, p) in pts.iter().enumerate() {
            if pts[..i].contains(p) {
                return Err(invalid(format!("generic point {p} listed twice")));
            }
            let j = self.gamma.edges[i];
            let Some(q) = pts.get(j) else {
                return Err(invalid(format!("edge from {p} points outside the portrait")));
            };
            let (fx, gx) = self.eval_symbolic(p);
            if fx.is_zero() && gx.is_zero() {
                return Err(invalid(format!("both forms vanish identically at {p}")));
            }
            let (qx, qy) = q.to_projective();
            let cross = &(&fx * &IntPoly::constant(qy)) - &(&gx * &IntPoly::constant(qx));
            if !cross.is_zero() {
                return Err(invalid(format!("{p} does not map to {q} for generic T")));
            }
        }
        Ok(())
    }

    /// `(F(x, y), G(x, y)) ∈ ℤ[T]²` at a constant point.
    fn eval_symbolic(&self, p: &ExtRational) -> (IntPoly, IntPoly) {
        let (x, y) = p.to_projective();
        let d = self.degree;
        let mono: Vec<IntPoly> = (0..=d)
            .map(|i| IntPoly::constant(num_traits::pow(x.clone(), i) * num_traits::pow(y.clone(), d - i)))
            .collect();
        let sum = |forms: &[IntPoly]| {
            forms
                .iter()
                .zip(&mono)
                .fold(IntPoly::zero(), |acc, (c, m)| &acc + &(c * m))
        };
        (sum(&self.f), sum(&self.g))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn f(&self) -> &[IntPoly] {
        &self.f
    }

    pub fn g(&self) -> &[IntPoly] {
        &self.g
    }

    pub fn gamma(&self) -> &GenericPortrait {
        &self.gamma
    }

    pub fn shape(&self) -> &FamilyShape {
        &self.shape
    }

    pub fn resultant_poly(&self) -> &ResultantPoly {
        &self.resultant
    }

    /// `d′`: the largest `T`-degree among all coefficients.
    pub fn codegree(&self) -> usize {
        self.f
            .iter()
            .chain(&self.g)
            .filter_map(IntPoly::degree)
            .max()
            .unwrap_or(0)
    }

    pub fn is_degenerate(&self, t: &Rational) -> bool {
        self.resultant.poly.eval(t).is_zero()
    }

    /// The specialization `f_t`, content-normalized.
    pub fn specialize(&self, t: &Rational) -> Result<SpecializedMap> {
        if self.is_degenerate(t) {
            return Err(Error::DegenerateParameter { t: format_rational(t) });
        }
        let n = self.codegree();
        let (a, b) = (t.numer(), t.denom());
        let f: Vec<BigInt> = self.f.iter().map(|p| p.eval_homogeneous(a, b, n)).collect();
        let g: Vec<BigInt> = self.g.iter().map(|p| p.eval_homogeneous(a, b, n)).collect();
        SpecializedMap::normalize(f, g, t.clone())
    }

    /// Parses a family definition file.
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: FamilyFile = serde_json::from_str(text)?;
        let parse = |rows: &[Vec<String>]| -> Result<Vec<IntPoly>> {
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|c| {
                            c.trim()
                                .parse::<BigInt>()
                                .map_err(|_| Error::Parse(format!("`{c}` is not an integer coefficient")))
                        })
                        .collect::<Result<Vec<_>>>()
                        .map(IntPoly::new)
                })
                .collect()
        };
        let f = parse(&file.f)?;
        let g = parse(&file.g)?;
        FamilyLift::new(file.name, file.degree, f, g, file.gamma, FamilyShape::Custom)
    }

    pub fn to_json_file(&self) -> FamilyFile {
        let render = |forms: &[IntPoly]| {
            forms
                .iter()
                .map(|p| p.coeffs().iter().map(BigInt::to_string).collect())
                .collect()
        };
        FamilyFile {
            name: self.name.clone(),
            degree: self.degree,
            f: render(&self.f),
            g: render(&self.g),
            gamma: self.gamma.clone(),
        }
    }

    /// Primes outside of which a parameter with `v_p(t) = −1` forces the
    /// generic portrait; `None` when no such lemma is registered.
    pub fn exceptional_primes(&self) -> Option<Vec<u64>> {
        let mut ps: Vec<u64> = Vec::new();
        let mut add = |n: &BigInt| {
            if !n.is_zero() {
                for (p, _) in factor_bigint(n).expect("template constants too large to factor") {
                    ps.push(p.to_u64().expect("prime exceeds u64"));
                }
            }
        };
        match &self.shape {
            FamilyShape::Quadratic => {}
            FamilyShape::Additive { coeffs } => {
                for a in coeffs {
                    add(a.denom());
                }
                add(coeffs.last()?.numer());
            }
            FamilyShape::Inverse { e, coeffs } => {
                for a in coeffs {
                    add(a.denom());
                }
                add(coeffs.last()?.numer());
                add(coeffs[*e].numer());
            }
            FamilyShape::ThreeCycle { .. } => add(&BigInt::from(self.degree)),
            FamilyShape::Custom => return None,
        }
        ps.sort_unstable();
        ps.dedup();
        Some(ps)
    }
}

/// On-disk family definition; coefficients are decimal integer strings,
/// ascending in `T`, with `F[i]` the coefficient of `X^i Y^{d−i}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    pub name: String,
    pub degree: usize,
    #[serde(rename = "F")]
    pub f: Vec<Vec<String>>,
    #[serde(rename = "G")]
    pub g: Vec<Vec<String>>,
    pub gamma: GenericPortrait,
}

/// A member `f_t = (F_t : G_t)` with coprime integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializedMap {
    degree: usize,
    f: Vec<BigInt>,
    g: Vec<BigInt>,
    t: Rational,
    content: BigInt,
    res_norm: BigInt,
}

impl SpecializedMap {
    /// Builds a map from raw integer forms; `c[i]` is the coefficient of `X^i Y^{d−i}`.
    pub fn from_forms(f: Vec<BigInt>, g: Vec<BigInt>, t: Rational) -> Result<Self> {
        if f.len() != g.len() || f.len() < 3 {
            return Err(Error::InvalidArgument("forms must share a degree of at least 2".into()));
        }
        Self::normalize(f, g, t)
    }

    fn normalize(mut f: Vec<BigInt>, mut g: Vec<BigInt>, t: Rational) -> Result<Self> {
        let content = f.iter().chain(&g).fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if content.is_zero() {
            return Err(Error::DegenerateParameter { t: format_rational(&t) });
        }
        if !content.is_one() {
            for c in f.iter_mut().chain(g.iter_mut()) {
                *c /= &content;
            }
        }
        let res = resultant(&f, &g);
        if res.is_zero() {
            return Err(Error::DegenerateParameter { t: format_rational(&t) });
        }
        Ok(SpecializedMap {
            degree: f.len() - 1,
            f,
            g,
            t,
            content,
            res_norm: res.abs(),
        })
    }

    /// `z ↦ Σ a_i z^i` over ℚ, as a map with an integral lift.
    pub fn polynomial(coeffs: &[Rational], t: Rational) -> Result<Self> {
        let l = coeffs.iter().fold(BigInt::one(), |acc, a| acc.lcm(a.denom()));
        let f = coeffs.iter().map(|a| (a * Rational::from_integer(l.clone())).to_integer()).collect();
        let mut g = vec![BigInt::zero(); coeffs.len()];
        g[0] = l;
        Self::from_forms(f, g, t)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn f(&self) -> &[BigInt] {
        &self.f
    }

    pub fn g(&self) -> &[BigInt] {
        &self.g
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    /// The content divided out of the raw specialized coefficients.
    pub fn content_correction(&self) -> &BigInt {
        &self.content
    }

    /// `|Res(F_t, G_t)|` of the normalized forms.
    pub fn resultant_ideal_norm(&self) -> &BigInt {
        &self.res_norm
    }

    /// Primes of bad reduction, ascending.
    pub fn bad_primes(&self) -> Result<Vec<u64>> {
        factor_bigint(&self.res_norm)?
            .into_iter()
            .map(|(p, _)| p.to_u64().ok_or(Error::Overflow("bad prime")))
            .collect()
    }

    /// Number of bad places, counting the archimedean one.
    pub fn bad_place_count(&self) -> Result<usize> {
        Ok(1 + self.bad_primes()?.len())
    }

    pub fn good_reduction(&self, p: u64) -> bool {
        !(&self.res_norm % BigInt::from(p)).is_zero()
    }

    /// Largest absolute value among the normalized coefficients.
    pub fn map_height(&self) -> BigInt {
        self.f
            .iter()
            .chain(&self.g)
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// `G = g₀·Y^d`, i.e. the map is a polynomial in `z`.
    pub fn is_polynomial(&self) -> bool {
        self.g[1..].iter().all(Zero::is_zero)
    }

    /// The polynomial coefficients `a_i = f_i / g₀`, for polynomial maps.
    pub fn polynomial_coeffs(&self) -> Option<Vec<Rational>> {
        if !self.is_polynomial() {
            return None;
        }
        let g0 = &self.g[0];
        Some(self.f.iter().map(|c| Rational::new(c.clone(), g0.clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn quadratic() -> FamilyLift {
        builtin_family("quadratic").unwrap()
    }

    fn crit2() -> FamilyLift {
        builtin_family("crit2").unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn resultant_polynomials() {
        assert_eq!(quadratic().resultant_poly().poly, IntPoly::from_i64s(&[1]));
        let c = crit2();
        let r = &c.resultant_poly().poly;
        assert_eq!(r.degree(), Some(2));
        assert_eq!(r.coeff(2).abs(), BigInt::from(1));
        assert!(r.coeff(0).is_zero() && r.coeff(1).is_zero());
        assert_eq!(crit2().resultant_poly().roots, vec![rat(0, 1)]);
    }

    #[test]
    fn codegrees() {
        assert_eq!(quadratic().codegree(), 1);
        assert_eq!(crit2().codegree(), 1);
        assert_eq!(builtin_family("additive:0,0,1").unwrap().codegree(), 1);
    }

    #[test]
    fn specializations() {
        let m = quadratic().specialize(&rat(1, 4)).unwrap();
        assert_eq!(m.f(), ints(&[1, 0, 4]).as_slice());
        assert_eq!(m.g(), ints(&[4, 0, 0]).as_slice());
        let m = quadratic().specialize(&rat(0, 1)).unwrap();
        assert_eq!(m.f(), ints(&[0, 0, 1]).as_slice());
        assert_eq!(m.g(), ints(&[1, 0, 0]).as_slice());
        assert!(matches!(crit2().specialize(&rat(0, 1)), Err(Error::DegenerateParameter { .. })));
    }

    #[test]
    fn resultant_norms_and_bad_primes() {
        let q = quadratic();
        assert_eq!(q.specialize(&rat(1, 4)).unwrap().resultant_ideal_norm(), &BigInt::from(256));
        assert_eq!(q.specialize(&rat(3, 1)).unwrap().resultant_ideal_norm(), &BigInt::from(1));
        let m = q.specialize(&rat(1, 12)).unwrap();
        assert_eq!(m.bad_primes().unwrap(), vec![2, 3]);
        assert_eq!(m.bad_place_count().unwrap(), 3);
        assert_eq!(q.specialize(&rat(5, 1)).unwrap().bad_place_count().unwrap(), 1);
        let m = q.specialize(&rat(1, 4)).unwrap();
        assert!(!m.good_reduction(2) && m.good_reduction(3));
        assert!((2..50).all(|p| q.specialize(&rat(7, 1)).unwrap().good_reduction(p)));
    }

    #[test]
    fn map_heights() {
        assert_eq!(quadratic().specialize(&rat(2, 3)).unwrap().map_height(), BigInt::from(3));
        assert_eq!(quadratic().specialize(&rat(0, 1)).unwrap().map_height(), BigInt::from(1));
        let m = crit2().specialize(&rat(5, 1)).unwrap();
        assert_eq!(m.map_height(), BigInt::from(5));
        assert_eq!(m.f(), ints(&[5, 0, 0]).as_slice());
        assert_eq!(m.g(), ints(&[0, -1, 1]).as_slice());
    }

    #[test]
    fn non_unit_resultant_path() {
        // X² + T·Y² over T·Y²: the forms share the root X = 0 at T = 0
        let f = vec![IntPoly::from_i64s(&[0, 1]), IntPoly::zero(), IntPoly::from_i64s(&[1])];
        let g = vec![IntPoly::from_i64s(&[0, 1]), IntPoly::zero(), IntPoly::zero()];
        let gamma = GenericPortrait {
            points: vec![],
            edges: vec![],
        };
        let lift = FamilyLift::new("x2-over-t", 2, f, g, gamma, FamilyShape::Custom).unwrap();
        // Sylvester rows (1,0,T,0),(0,1,0,T),(0,0,T,0),(0,0,0,T) give T²
        assert_eq!(lift.resultant_poly().poly, IntPoly::from_i64s(&[0, 0, 1]));
        assert!(lift.specialize(&rat(0, 1)).is_err());
        let m = lift.specialize(&rat(2, 3)).unwrap();
        // F = 3X² + 2Y², G = 2Y²
        assert_eq!(m.resultant_ideal_norm(), &BigInt::from(36));
    }

    #[test]
    fn rejects_bad_lifts() {
        let f = vec![IntPoly::from_i64s(&[0, 2]), IntPoly::zero(), IntPoly::from_i64s(&[2])];
        let g = vec![IntPoly::from_i64s(&[2]), IntPoly::zero(), IntPoly::zero()];
        let gamma = GenericPortrait {
            points: vec![ExtRational::Infinity],
            edges: vec![0],
        };
        assert!(FamilyLift::new("even", 2, f, g, gamma.clone(), FamilyShape::Custom).is_err());
        // F = X·(X + T·Y), G = X·Y share X
        let f = vec![IntPoly::zero(), IntPoly::from_i64s(&[0, 1]), IntPoly::from_i64s(&[1])];
        let g = vec![IntPoly::zero(), IntPoly::from_i64s(&[1]), IntPoly::zero()];
        let none = GenericPortrait {
            points: vec![],
            edges: vec![],
        };
        assert!(matches!(
            FamilyLift::new("shared", 2, f, g, none, FamilyShape::Custom),
            Err(Error::DegenerateFamily(_))
        ));
        // 0 is not generically fixed under z² + T
        let q = quadratic();
        let wrong = GenericPortrait {
            points: vec![ExtRational::from_int(0)],
            edges: vec![0],
        };
        assert!(FamilyLift::new("q", 2, q.f().to_vec(), q.g().to_vec(), wrong, FamilyShape::Custom).is_err());
    }

    #[test]
    fn json_round_trip() {
        let c = crit2();
        let text = serde_json::to_string(&c.to_json_file()).unwrap();
        let back = FamilyLift::from_json_str(&text).unwrap();
        assert_eq!(back.f(), c.f());
        assert_eq!(back.g(), c.g());
        assert_eq!(back.gamma(), c.gamma());
        assert_eq!(back.shape(), &FamilyShape::Custom);
        assert!(FamilyLift::from_json_str(r#"{"name":"x","degree":2,"F":[["a"]],"G":[],"gamma":{"points":[],"edges":[]}}"#).is_err());
    }

    #[test]
    fn polynomial_maps() {
        let m = SpecializedMap::polynomial(&[rat(-29, 16), rat(0, 1), rat(1, 1)], rat(-29, 16)).unwrap();
        assert!(m.is_polynomial());
        assert_eq!(m.polynomial_coeffs().unwrap()[0], rat(-29, 16));
        assert_eq!(m.resultant_ideal_norm(), &BigInt::from(16u32.pow(4)));
        assert!(!crit2().specialize(&rat(3, 1)).unwrap().is_polynomial());
    }
}
