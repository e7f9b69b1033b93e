//! Multiple valued meromorphic functions through their local and global data.
//!
//! A global function is never materialized on the universal cover. It is
//! represented by its divisor together with one multiplicator per mark; the
//! local models of [`expansion`] describe it near a point.

pub mod expansion;
pub mod glue;
pub mod monodromy;
pub mod witness;


use crate::curve::{abel_jacobi_sum, lattice_distance, AbelJacobi, CurveModel};
use crate::divisor::{ComplexDivisor, MarkedCurve};
use crate::{Error, Result};

pub use expansion::{expansion_multiply, normalize_expansion, LocalExpansion, Order, DEFAULT_SERIES_LENGTH};
pub use glue::{glueing_data, multiplicator, GlueingData};
pub use monodromy::{monodromy_certificate, MonodromyCertificate};
pub use witness::SphereWitness;

/// Abel-Jacobi sums within this distance of the lattice count as lattice points.
pub const ABEL_JACOBI_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Principality {
    pub principal: bool,
    pub degree: i64,
    /// Torus only.
    pub abel_jacobi: Option<AbelJacobi>,
    /// Torus only, when `deg D = 0` and the marks fit in one period parallelogram.
    pub certificate: Option<MonodromyCertificate>,
}

/// Whether `d` is the divisor of a global multiple valued function.
///
/// Sphere: `deg d = 0`. Torus: `deg d = 0` and the Abel-Jacobi sum (with the
/// marks' given coordinates as lift) lies in the lattice. On a torus the
/// contour-integration certificate is attached for independent confirmation.
pub fn is_principal(mc: &MarkedCurve, d: &ComplexDivisor) -> Result<Principality> {
    if mc != d.context() {
        return Err(Error::MismatchedContext);
    }
    match mc.curve() {
        CurveModel::Sphere => Ok(Principality {
            principal: d.degree() == 0,
            degree: d.degree(),
            abel_jacobi: None,
            certificate: None,
        }),
        curve @ CurveModel::Torus(t) => {
            let aj = abel_jacobi_sum(curve, d)?;
            let in_lattice = lattice_distance(aj.sum, t.value()) < ABEL_JACOBI_TOL;
            let certificate = if d.degree() == 0 { monodromy_certificate(d).ok() } else { None };
            Ok(Principality {
                principal: d.degree() == 0 && in_lattice,
                degree: d.degree(),
                abel_jacobi: Some(aj),
                certificate,
            })
        }
    }
}

/// Convenience: the Abel-Jacobi distance to the lattice, `None` on the sphere.
pub fn abel_jacobi_defect(d: &ComplexDivisor) -> Option<f64> {
    let tau = d.curve().tau()?;
    abel_jacobi_sum(d.curve(), d).ok().map(|aj| lattice_distance(aj.sum, tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CurvePoint;
    use alloc::vec;
    use num_complex::Complex64;

    fn torus_i() -> CurveModel {
        CurveModel::torus(Complex64::i()).unwrap()
    }

    #[test]
    fn sphere_principality_is_degree_zero() {
        let mc = MarkedCurve::new(CurveModel::Sphere, vec![CurvePoint::real(0.0), CurvePoint::real(2.0)]).unwrap();
        let d = ComplexDivisor::parse(&mc, "i@Q1,-i@Q2").unwrap();
        let p = is_principal(&mc, &d).unwrap();
        assert!(p.principal && p.certificate.is_none());
        let d = ComplexDivisor::parse(&mc, "1/2+i@Q1,1/2-i@Q2").unwrap();
        assert!(!is_principal(&mc, &d).unwrap().principal);
    }

    #[test]
    fn torus_non_principal_example() {
        let mc = MarkedCurve::unmarked(torus_i());
        let d = ComplexDivisor::parse(&mc, "1@0.3,-1@0.3+0.5i").unwrap();
        let p = is_principal(&mc, &d).unwrap();
        assert!(!p.principal);
        let cert = p.certificate.unwrap();
        assert!(!cert.is_trivial());
        // The obstruction is the Abel-Jacobi class, up to sign, modulo the lattice.
        let tau = Complex64::i();
        let w = cert.obstruction(tau);
        let aj = p.abel_jacobi.unwrap().sum;
        assert!(lattice_distance(w - aj, tau) < 1e-8 || lattice_distance(w + aj, tau) < 1e-8, "{w} vs {aj}");
    }

    #[test]
    fn torus_lattice_equivalent_points_cancel() {
        let mc = MarkedCurve::unmarked(torus_i());
        let d = ComplexDivisor::parse(&mc, "1@0.2,-1@1.2+i").unwrap();
        assert!(d.is_zero());
        let p = is_principal(&mc, &d).unwrap();
        assert!(p.principal);
        assert!(p.certificate.unwrap().is_trivial());
    }

    #[test]
    fn complex_principal_divisor_on_torus() {
        // i@Q1 - i@Q2 + 1@R' - 1@R with R' - R = -i (Q1 - Q2): Abel-Jacobi sum is 0.
        let tau = Complex64::new(0.3, 1.1);
        let (q1, q2) = (Complex64::new(0.2, 0.3), Complex64::new(0.55, 0.6));
        let mc = MarkedCurve::new(CurveModel::torus(tau).unwrap(), vec![q1.into(), q2.into()]).unwrap();
        let r = Complex64::new(0.1, 0.9);
        let r2 = r - Complex64::i() * (q1 - q2);
        let text = alloc::format!(
            "i@Q1,-i@Q2,1@{},-1@{}",
            crate::literal::format_complex(r2),
            crate::literal::format_complex(r)
        );
        let d = ComplexDivisor::parse(&mc, &text).unwrap();
        let p = is_principal(&mc, &d).unwrap();
        assert!(p.principal);
        let cert = p.certificate.unwrap();
        assert!(cert.is_trivial(), "{cert:?}");
    }

    #[test]
    fn nonzero_degree_is_never_principal() {
        let mc = MarkedCurve::unmarked(torus_i());
        let d = ComplexDivisor::parse(&mc, "1@0.3").unwrap();
        let p = is_principal(&mc, &d).unwrap();
        assert!(!p.principal && p.certificate.is_none());
    }
}
