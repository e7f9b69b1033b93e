use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use super::norm::DISJOINT_TOL;
use crate::curve::{lattice_coordinates, lattice_distance, log_theta1, CurveModel, CurvePoint, TORUS_POINT_TOL};
use crate::divisor::{ComplexDivisor, MarkedCurve, PointRef};
use crate::{Error, GaussianRational, Result};

/// A reciprocity check passes below this residual.
pub const RECIPROCITY_TOL: f64 = 1e-9;

/// A single valued meromorphic function given by zeros, poles and a constant.
///
/// Sphere: `f(z) = c * prod (z - a)^m`; infinity carries `-sum m`.
/// Torus: `f(z) = c * exp(-2 pi i k z) * prod theta1(z - a)^m`, where
/// `sum m = 0` and `sum m a = j + k tau` is a lattice point.
#[derive(Debug, Clone)]
pub struct RationalFunctionData {
    curve: CurveModel,
    /// Factors as given (a point may repeat), zero exponents dropped.
    factors: Vec<(Complex64, i64)>,
    constant: Complex64,
    /// The `k` above; zero on the sphere.
    twist: i64,
}

impl RationalFunctionData {
    pub fn new<I>(curve: CurveModel, factors: I, constant: Complex64) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, i64)>,
    {
        if constant.is_zero() || !constant.is_finite() {
            return Err(Error::ZeroConstant);
        }
        let factors: Vec<_> = factors.into_iter().filter(|(_, m)| *m != 0).collect();
        let twist = match curve {
            CurveModel::Sphere => 0,
            CurveModel::Torus(t) => {
                let tau = t.value();
                let total: i64 = factors.iter().map(|(_, m)| m).sum();
                if total != 0 {
                    return Err(Error::NotElliptic(format!("multiplicities sum to {total}, not 0")));
                }
                let s: Complex64 = factors.iter().map(|(a, m)| a * *m as f64).sum();
                if lattice_distance(s, tau) >= TORUS_POINT_TOL {
                    return Err(Error::NotElliptic(format!("zeros minus poles sum to {s}, not a lattice point")));
                }
                lattice_coordinates(s, tau).1.round() as i64
            }
        };
        Ok(Self { curve, factors, constant, twist })
    }

    /// Convenience constructor from zero and pole lists (repeat a point for multiplicity).
    pub fn from_zeros_poles(curve: CurveModel, zeros: &[Complex64], poles: &[Complex64], constant: Complex64) -> Result<Self> {
        Self::new(
            curve,
            zeros.iter().map(|&z| (z, 1)).chain(poles.iter().map(|&p| (p, -1))),
            constant,
        )
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    /// Zeros and poles merged by curve-point equality.
    pub fn zeros_poles(&self) -> Vec<(CurvePoint, i64)> {
        let mut merged: Vec<(CurvePoint, i64)> = Vec::new();
        for &(a, m) in &self.factors {
            let p = CurvePoint::Affine(a);
            match merged.iter_mut().find(|(q, _)| self.curve.same_point(p, *q)) {
                Some((_, k)) => *k += m,
                None => merged.push((p, m)),
            }
        }
        merged.retain(|(_, m)| *m != 0);
        let at_infinity: i64 = -merged.iter().map(|(_, m)| m).sum::<i64>();
        if self.curve == CurveModel::Sphere && at_infinity != 0 {
            merged.push((CurvePoint::Infinity, at_infinity));
        }
        merged
    }

    /// `div f` on the unmarked curve.
    pub fn divisor(&self) -> Result<ComplexDivisor> {
        let mc = MarkedCurve::unmarked(self.curve);
        ComplexDivisor::from_terms(
            &mc,
            self.zeros_poles().into_iter().map(|(p, m)| (GaussianRational::from_integer(m), PointRef::Point(p))),
        )
    }

    /// Product of functions, `(f h)(z) = f(z) h(z)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.curve != other.curve {
            return Err(Error::MismatchedContext);
        }
        Ok(Self {
            curve: self.curve,
            factors: self.factors.iter().chain(&other.factors).copied().collect(),
            constant: self.constant * other.constant,
            twist: self.twist + other.twist,
        })
    }

    fn check_away_from_divisor(&self, p: CurvePoint) -> Result<()> {
        for (q, _) in self.zeros_poles() {
            if self.curve.distance(p, q) <= DISJOINT_TOL {
                return Err(Error::NotDisjoint);
            }
        }
        Ok(())
    }

    /// A logarithm of `f(p)`; `p` must avoid the zeros and poles.
    pub fn log_value(&self, p: CurvePoint) -> Result<Complex64> {
        self.curve.check_point(p)?;
        self.check_away_from_divisor(p)?;
        let z = match p {
            // ord_inf f = 0 here, so f(inf) = c.
            CurvePoint::Infinity => return Ok(self.constant.ln()),
            CurvePoint::Affine(z) => z,
        };
        let mut acc = self.constant.ln();
        match self.curve {
            CurveModel::Sphere => {
                for &(a, m) in &self.factors {
                    acc += (z - a).ln() * m as f64;
                }
            }
            CurveModel::Torus(t) => {
                let tau = t.value();
                acc -= Complex64::new(0.0, 2.0 * PI * self.twist as f64) * z;
                for &(a, m) in &self.factors {
                    acc += log_theta1(z - a, tau)? * m as f64;
                }
            }
        }
        Ok(acc)
    }

    /// `f(p)`. On the sphere the rational expression is evaluated directly.
    pub fn evaluate(&self, p: CurvePoint) -> Result<Complex64> {
        match (self.curve, p) {
            (CurveModel::Sphere, CurvePoint::Affine(z)) => {
                self.check_away_from_divisor(p)?;
                let mut value = self.constant;
                for &(a, m) in &self.factors {
                    value *= powi(z - a, m)?;
                }
                Ok(value)
            }
            (CurveModel::Sphere, CurvePoint::Infinity) => {
                self.check_away_from_divisor(p)?;
                Ok(self.constant)
            }
            (CurveModel::Torus(_), _) => Ok(self.log_value(p)?.exp()),
        }
    }
}

fn powi(z: Complex64, n: i64) -> Result<Complex64> {
    let n = i32::try_from(n).map_err(|_| Error::Overflow)?;
    Ok(z.powi(n))
}

/// `f(D) = prod_P f(P)^(n_P)` for an integral divisor `D` disjoint from `div f`.
pub fn weil_symbol(f: &RationalFunctionData, d: &ComplexDivisor) -> Result<Complex64> {
    if f.curve() != d.curve() {
        return Err(Error::MismatchedContext);
    }
    if !d.is_integral() {
        return Err(Error::NonIntegralDivisor);
    }
    let value = match f.curve() {
        CurveModel::Sphere => {
            let mut value = Complex64::new(1.0, 0.0);
            for term in d.terms() {
                let n = term.coefficient.to_i64().ok_or(Error::Overflow)?;
                value *= powi(f.evaluate(term.point)?, n)?;
            }
            value
        }
        CurveModel::Torus(_) => {
            let mut acc = Complex64::zero();
            for term in d.terms() {
                let n = term.coefficient.to_i64().ok_or(Error::Overflow)?;
                acc += f.log_value(term.point)? * n as f64;
            }
            acc.exp()
        }
    };
    if value.is_zero() || !value.is_finite() {
        return Err(Error::NotDisjoint);
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocityCheck {
    /// `f(div g)`.
    pub f_of_div_g: Complex64,
    /// `g(div f)`.
    pub g_of_div_f: Complex64,
    /// `|f(div g) / g(div f) - 1|`.
    pub residual: f64,
}

impl ReciprocityCheck {
    pub fn passed(&self) -> bool {
        self.residual < RECIPROCITY_TOL
    }
}

pub fn check_weil_reciprocity(f: &RationalFunctionData, g: &RationalFunctionData) -> Result<ReciprocityCheck> {
    let f_of_div_g = weil_symbol(f, &g.divisor()?)?;
    let g_of_div_f = weil_symbol(g, &f.divisor()?)?;
    Ok(ReciprocityCheck { f_of_div_g, g_of_div_f, residual: (f_of_div_g / g_of_div_f - 1.0).norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn sphere_fn(zeros: &[f64], poles: &[f64]) -> RationalFunctionData {
        let z: Vec<_> = zeros.iter().map(|&x| r(x)).collect();
        let p: Vec<_> = poles.iter().map(|&x| r(x)).collect();
        RationalFunctionData::from_zeros_poles(CurveModel::Sphere, &z, &p, r(1.0)).unwrap()
    }

    #[test]
    fn weil_symbol_examples() {
        let mc = MarkedCurve::unmarked(CurveModel::Sphere);
        let f = sphere_fn(&[0.0], &[2.0]);
        let d = ComplexDivisor::parse(&mc, "1@1,-1@3").unwrap();
        assert!((weil_symbol(&f, &d).unwrap() - r(-1.0 / 3.0)).norm() < 1e-15);

        let g = sphere_fn(&[1.0], &[3.0]);
        let d = ComplexDivisor::parse(&mc, "1@0,-1@2").unwrap();
        assert!((weil_symbol(&g, &d).unwrap() - r(-1.0 / 3.0)).norm() < 1e-15);

        let constant = RationalFunctionData::new(CurveModel::Sphere, [], c(2.5, -1.0)).unwrap();
        let d = ComplexDivisor::parse(&mc, "2@1,-1@3,-1@inf").unwrap();
        assert!((weil_symbol(&constant, &d).unwrap() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn weil_symbol_errors() {
        let mc = MarkedCurve::new(CurveModel::Sphere, alloc::vec![CurvePoint::real(5.0), CurvePoint::real(6.0)]).unwrap();
        let f = sphere_fn(&[0.0], &[2.0]);
        let d = ComplexDivisor::parse(&mc, "1@0,-1@3").unwrap();
        assert_eq!(weil_symbol(&f, &d), Err(Error::NotDisjoint));
        // f has a pole of order... none at infinity (degree 0), so infinity is fine.
        let d = ComplexDivisor::parse(&mc, "1@inf,-1@3").unwrap();
        assert!(weil_symbol(&f, &d).is_ok());
        let h = sphere_fn(&[0.0], &[]);
        assert_eq!(weil_symbol(&h, &d), Err(Error::NotDisjoint));
        let d = ComplexDivisor::parse(&mc, "i@Q1,-i@Q2").unwrap();
        assert_eq!(weil_symbol(&f, &d), Err(Error::NonIntegralDivisor));
    }

    #[test]
    fn reciprocity_examples() {
        let f = sphere_fn(&[0.0], &[2.0]);
        let g = sphere_fn(&[1.0], &[3.0]);
        let chk = check_weil_reciprocity(&f, &g).unwrap();
        assert!(chk.residual < 1e-15);
        assert!((chk.f_of_div_g - r(-1.0 / 3.0)).norm() < 1e-15);

        let k = RationalFunctionData::new(CurveModel::Sphere, [], c(0.3, 4.0)).unwrap();
        let chk = check_weil_reciprocity(&k, &g).unwrap();
        assert!(chk.residual < 1e-15);
        assert!((chk.f_of_div_g - 1.0).norm() < 1e-15);
    }

    #[test]
    fn reciprocity_with_infinity_in_both_divisors() {
        let f = sphere_fn(&[0.5, 1.5], &[]);
        let g = sphere_fn(&[-1.0], &[2.0, 3.0]);
        let chk = check_weil_reciprocity(&f, &g);
        // Both divisors contain infinity: not disjoint.
        assert_eq!(chk, Err(Error::NotDisjoint));
        let g = sphere_fn(&[-1.0, 4.0], &[2.0]);
        assert!(check_weil_reciprocity(&f, &g).is_err());
        let f = sphere_fn(&[0.5, 1.5], &[2.5, 3.5]);
        let chk = check_weil_reciprocity(&f, &sphere_fn(&[-1.0], &[2.0, 3.0])).unwrap();
        assert!(chk.residual < 1e-13, "{chk:?}");
    }

    #[test]
    fn torus_reciprocity_with_twisted_configuration() {
        let tau = c(0.3, 1.1);
        let t = CurveModel::torus(tau).unwrap();
        // Zeros sum minus poles sum = 1 + tau: a nonzero lattice point, needs the twist.
        let f = RationalFunctionData::from_zeros_poles(t, &[c(0.2, 0.1), c(1.5, 1.5)], &[c(0.35, 0.7), c(0.05, -0.2)], r(1.0)).unwrap();
        assert_eq!(f.twist, 1);
        let g = RationalFunctionData::from_zeros_poles(t, &[c(0.6, 0.3), c(0.1, 0.8)], &[c(0.45, 0.15), c(0.25, 0.95)], c(2.0, 1.0)).unwrap();
        // Double periodicity of f.
        let z = c(0.41, 0.33);
        let v = f.evaluate(z.into()).unwrap();
        for shift in [r(1.0), tau, tau * 2.0 - 3.0] {
            let w = f.evaluate((z + shift).into()).unwrap();
            assert!((w - v).norm() < 1e-10 * v.norm());
        }
        let chk = check_weil_reciprocity(&f, &g).unwrap();
        assert!(chk.passed(), "{chk:?}");
    }

    #[test]
    fn torus_rejects_non_elliptic_data() {
        let t = CurveModel::torus(c(0.0, 1.0)).unwrap();
        assert!(matches!(
            RationalFunctionData::from_zeros_poles(t, &[r(0.1)], &[], r(1.0)),
            Err(Error::NotElliptic(_))
        ));
        assert!(matches!(
            RationalFunctionData::from_zeros_poles(t, &[r(0.1)], &[r(0.3)], r(1.0)),
            Err(Error::NotElliptic(_))
        ));
    }

    #[test]
    fn rescaling_relation_is_multiplicative() {
        // (f h)(D) = f(D) h(D): the relation <f l1, l2> = f(div l2) <l1, l2> composes.
        let mc = MarkedCurve::unmarked(CurveModel::Sphere);
        let f = sphere_fn(&[0.0], &[2.0]);
        let h = sphere_fn(&[-1.0, 0.5], &[4.0]);
        let d = ComplexDivisor::parse(&mc, "2@1+i,-1@3,-1@-2i").unwrap();
        let fh = f.mul(&h).unwrap();
        let lhs = weil_symbol(&fh, &d).unwrap();
        let rhs = weil_symbol(&f, &d).unwrap() * weil_symbol(&h, &d).unwrap();
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }
}
