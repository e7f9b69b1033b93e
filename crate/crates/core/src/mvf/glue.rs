//! Multiplicators and the two-set glueing data of a complex divisor.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::ToPrimitive;

use crate::divisor::{ComplexDivisor, MarkedCurve, PointRef};
use crate::gaussian::ratio_to_f64;
use crate::{Error, GaussianRational, Result};

/// `exp(2 pi i n)` for exact `n`. Quarter-integer real parts give exact unit factors.
pub fn exp_two_pi_i(n: &GaussianRational) -> Complex64 {
    let re = n.re();
    let frac = re - re.floor();
    let quarter = &frac * BigRational::from_integer(4.into());
    let unit = if quarter.is_integer() {
        match quarter.to_integer().to_i64().unwrap_or(0) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        let angle = 2.0 * PI * ratio_to_f64(&frac);
        Complex64::new(angle.cos(), angle.sin())
    };
    let im = ratio_to_f64(n.im());
    if im == 0.0 {
        unit
    } else {
        unit * (-2.0 * PI * im).exp()
    }
}

/// Multiplicator of the divisor's glueing function along the loop around `Q_(index+1)`:
/// `exp(2 pi i n_Q)`.
pub fn multiplicator(mc: &MarkedCurve, d: &ComplexDivisor, index: usize) -> Result<Complex64> {
    if mc != d.context() {
        return Err(Error::MismatchedContext);
    }
    Ok(exp_two_pi_i(&d.coefficient_at_mark(index)?))
}

/// Data of the two-set cover `U1` (neighbourhood of the disk) and `U2` (complement of the disk).
#[derive(Debug, Clone)]
pub struct GlueingData {
    /// `f_(gamma_i)` for every mark, in mark order.
    pub multiplicators: Vec<Complex64>,
    /// Part of the divisor carried by `f_1` on `U1`: the marked coefficients.
    pub inner: ComplexDivisor,
    /// Part carried by `f_2` on `U2`: the integral coefficients.
    pub outer: ComplexDivisor,
    /// Product of all multiplicators (loop around the whole disk).
    pub multiplicator_product: Complex64,
    /// `exp(2 pi i * sum_i n_(Q_i))`, evaluated exactly in the exponent.
    pub boundary_multiplicator: Complex64,
}

impl GlueingData {
    /// Relative mismatch between the product of multiplicators and the boundary multiplicator.
    pub fn audit_residual(&self) -> f64 {
        (self.multiplicator_product - self.boundary_multiplicator).norm() / self.boundary_multiplicator.norm()
    }
}

pub fn glueing_data(mc: &MarkedCurve, d: &ComplexDivisor) -> Result<GlueingData> {
    if mc != d.context() {
        return Err(Error::MismatchedContext);
    }
    let multiplicators = (0..mc.mark_count())
        .map(|i| multiplicator(mc, d, i))
        .collect::<Result<Vec<_>>>()?;
    let mut inner = Vec::new();
    let mut outer = Vec::new();
    for term in d.terms() {
        match term.mark {
            Some(i) => inner.push((term.coefficient, PointRef::Mark(i))),
            None => outer.push((term.coefficient, PointRef::Point(term.point))),
        }
    }
    // deg D and the integral part are integers, so the marked part is constructible too.
    let inner = ComplexDivisor::from_terms(mc, inner)?;
    let outer = ComplexDivisor::from_terms(mc, outer)?;
    let multiplicator_product = multiplicators.iter().product();
    Ok(GlueingData {
        multiplicators,
        inner,
        outer,
        multiplicator_product,
        boundary_multiplicator: exp_two_pi_i(&d.marked_degree()),
    })
}
