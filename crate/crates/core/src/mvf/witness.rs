//! Explicit global multiple valued functions on the sphere,
//! `phi(z) = c * prod_j (z - P_j)^(n_j)`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Zero;

use super::expansion::LocalExpansion;
use crate::curve::{CurveModel, CurvePoint};
use crate::divisor::{ComplexDivisor, MarkedCurve, PointRef};
use crate::{Error, GaussianRational, Result};

#[derive(Debug, Clone)]
pub struct SphereWitness {
    constant: Complex64,
    /// Distinct affine points with nonzero exponents.
    factors: Vec<(Complex64, GaussianRational)>,
}

impl SphereWitness {
    pub fn new<I>(constant: Complex64, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, GaussianRational)>,
    {
        if constant.is_zero() {
            return Err(Error::ZeroConstant);
        }
        let sphere = CurveModel::Sphere;
        let mut merged: Vec<(Complex64, GaussianRational)> = Vec::new();
        for (p, n) in factors {
            match merged.iter_mut().find(|(q, _)| sphere.same_point(p.into(), (*q).into())) {
                Some((_, m)) => *m += &n,
                None => merged.push((p, n)),
            }
        }
        merged.retain(|(_, n)| !n.is_zero());
        Ok(Self { constant, factors: merged })
    }

    pub fn factors(&self) -> &[(Complex64, GaussianRational)] {
        &self.factors
    }

    /// `ord_P phi` at every point of the support, infinity last (when nonzero).
    pub fn orders(&self) -> Vec<(CurvePoint, GaussianRational)> {
        let mut out: Vec<_> = self.factors.iter().map(|(p, n)| (CurvePoint::Affine(*p), n.clone())).collect();
        let at_infinity = -self.factors.iter().map(|(_, n)| n).sum::<GaussianRational>();
        if !at_infinity.is_zero() {
            out.push((CurvePoint::Infinity, at_infinity));
        }
        out
    }

    /// `sum_P ord_P phi`, infinity included; exactly zero.
    pub fn order_sum(&self) -> GaussianRational {
        self.orders().iter().map(|(_, n)| n).sum()
    }

    /// `div phi` as a divisor on `mc` (non-integral exponents must sit at marks).
    pub fn divisor(&self, mc: &MarkedCurve) -> Result<ComplexDivisor> {
        ComplexDivisor::from_terms(mc, self.orders().into_iter().map(|(p, n)| (n, PointRef::Point(p))))
    }

    /// Principal-branch value.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.factors
            .iter()
            .fold(self.constant, |acc, (p, n)| acc * (n.to_complex() * (z - p).ln()).exp())
    }

    /// Local model at `point` in the coordinate `t = z - P` (or `w = 1/z` at infinity),
    /// with `len` series terms.
    pub fn local_expansion_at(&self, point: CurvePoint, len: usize) -> LocalExpansion {
        let len = len.max(1);
        let mut series = vec![Complex64::zero(); len];
        series[0] = Complex64::new(1.0, 0.0);
        let mut leading = self.constant;
        let exponent;
        match point {
            CurvePoint::Affine(at) => {
                let mut own = Complex64::zero();
                for (p, n) in &self.factors {
                    let n = n.to_complex();
                    if CurveModel::Sphere.same_point((*p).into(), at.into()) {
                        own = n;
                        continue;
                    }
                    // (t + a)^n = a^n (1 + t/a)^n
                    let a = at - p;
                    leading *= (n * a.ln()).exp();
                    series = mul_series(&series, &binomial_series(n, a.inv(), len));
                }
                exponent = own;
            }
            CurvePoint::Infinity => {
                // z = 1/w: prod (1/w - p)^n = w^(-N) prod (1 - p w)^n
                let mut total = Complex64::zero();
                for (p, n) in &self.factors {
                    let n = n.to_complex();
                    total += n;
                    series = mul_series(&series, &binomial_series(n, -p, len));
                }
                exponent = -total;
            }
        }
        for c in &mut series {
            *c *= leading;
        }
        LocalExpansion::new(exponent, 0, series).expect("leading coefficient is nonzero")
    }
}

/// Coefficients of `(1 + x t)^n` up to `t^(len-1)`.
fn binomial_series(n: Complex64, x: Complex64, len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(len);
    let mut term = Complex64::new(1.0, 0.0);
    for m in 0..len {
        out.push(term);
        term = term * (n - m as f64) / (m as f64 + 1.0) * x;
    }
    out
}

fn mul_series(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let len = a.len().min(b.len());
    let mut out = vec![Complex64::zero(); len];
    for (i, x) in a.iter().take(len).enumerate() {
        for (j, y) in b.iter().take(len - i).enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn witness() -> SphereWitness {
        SphereWitness::new(
            c(2.0, -1.0),
            [
                (c(0.0, 0.0), GaussianRational::from_parts(1, 2, 1, 1)),
                (c(1.0, 1.0), GaussianRational::from_parts(-1, 3, 0, 1)),
                (c(3.0, 0.5), GaussianRational::from_integer(2)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn orders_sum_to_zero() {
        let w = witness();
        assert!(w.order_sum().is_zero());
        let orders = w.orders();
        assert!(orders.last().unwrap().0.is_infinity());
        assert_eq!(orders.last().unwrap().1, GaussianRational::from_parts(-13, 6, -1, 1));
    }

    #[test]
    fn imaginary_power_witness_is_degree_zero() {
        let mc = MarkedCurve::new(CurveModel::Sphere, vec![CurvePoint::real(1.0), CurvePoint::real(-1.0)]).unwrap();
        let i = GaussianRational::i();
        let w = SphereWitness::new(c(1.0, 0.0), [(c(1.0, 0.0), i.clone()), (c(-1.0, 0.0), -i)]).unwrap();
        let d = w.divisor(&mc).unwrap();
        assert_eq!(d.degree(), 0);
        assert!(d.is_supported_on_marks());
    }

    #[test]
    fn local_expansion_order_matches_exponent() {
        let w = witness();
        for (p, n) in w.orders() {
            let e = w.local_expansion_at(p, 8);
            assert!((e.ord().to_complex() - n.to_complex()).norm() < 1e-15);
        }
        let e = w.local_expansion_at(CurvePoint::real(-2.0), 8);
        assert_eq!(e.ord().to_complex(), c(0.0, 0.0));
    }

    #[test]
    fn local_expansion_approximates_function() {
        let w = witness();
        // Near 3+0.5i the exponent is integral, so there is no branch ambiguity.
        let at = c(3.0, 0.5);
        let e = w.local_expansion_at(at.into(), 12);
        let t = c(1e-2, 5e-3);
        let direct = w.evaluate(at + t);
        assert!((e.evaluate(t) - direct).norm() < 1e-12 * direct.norm());
        // At infinity the total exponent -13/6 - i is fractional; compare moduli
        // along a ray where all principal branches agree.
        let e = w.local_expansion_at(CurvePoint::Infinity, 16);
        let wv = c(1e-2, 0.0);
        let ratio = e.evaluate(wv) / w.evaluate(wv.inv());
        assert!((ratio.norm() - 1.0).abs() < 1e-9, "{ratio}");
    }

    #[test]
    fn zero_constant_rejected() {
        assert_eq!(SphereWitness::new(c(0.0, 0.0), []).unwrap_err(), Error::ZeroConstant);
    }
}
