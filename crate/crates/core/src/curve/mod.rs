//! Explicit curve geometries and their symmetric real Green kernels.
//!
//! | curve  | kernel `g(P, Q)`                                        |
//! |--------|---------------------------------------------------------|
//! | sphere | `ln |P - Q|` in the affine chart                        |
//! | torus  | `ln |theta1(P - Q | tau)| - pi (Im(P - Q))^2 / Im(tau)` |
//!
//! Both kernels are fixed only up to an additive constant; every quantity
//! built on them is a coefficient-weighted sum over a degree-0 divisor, so
//! the constant drops out.
//!
//! On the sphere the kernel between the point at infinity and an affine
//! point is taken to be `0`. This is the value that makes
//! `sum_j n_j g(z, P_j)` equal `ln |prod_j (z - P_j)^(n_j)|` for a degree-0
//! divisor containing infinity, i.e. the infinity terms are dropped.

mod theta;

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::divisor::ComplexDivisor;
use crate::{Error, Result};

pub use theta::{log_abs_theta1, log_theta1, theta1, theta1_log_derivative, PRODUCT_CUTOFF};

/// Torus points closer than this (modulo the lattice) are the same point.
pub const TORUS_POINT_TOL: f64 = 1e-9;
/// Affine sphere points closer than this are the same point.
pub const SPHERE_POINT_TOL: f64 = 1e-12;

/// Period ratio of a torus; always in the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tau(Complex64);

impl Tau {
    pub fn new(tau: Complex64) -> Result<Self> {
        if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
            Ok(Self(tau))
        } else {
            Err(Error::InvalidTau(tau.im))
        }
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveModel {
    /// The Riemann sphere, genus 0.
    Sphere,
    /// `C / (Z + tau Z)`, genus 1.
    Torus(Tau),
}

/// A point of a curve. On the torus the coordinate is any representative in `C`.
#[derive(Debug, Clone, Copy)]
pub enum CurvePoint {
    Affine(Complex64),
    /// Sphere only.
    Infinity,
}

impl CurvePoint {
    pub fn affine(z: Complex64) -> Self {
        Self::Affine(z)
    }

    pub fn real(x: f64) -> Self {
        Self::Affine(Complex64::new(x, 0.0))
    }

    pub fn coordinate(&self) -> Option<Complex64> {
        match self {
            Self::Affine(z) => Some(*z),
            Self::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Self::Infinity)
    }
}

impl From<Complex64> for CurvePoint {
    fn from(z: Complex64) -> Self {
        Self::Affine(z)
    }
}

/// Lattice coordinates `(a, b)` with `z = a + b tau`.
pub fn lattice_coordinates(z: Complex64, tau: Complex64) -> (f64, f64) {
    let b = z.im / tau.im;
    (z.re - b * tau.re, b)
}

/// Distance from `z` to the nearest point of `Z + tau Z`.
pub fn lattice_distance(z: Complex64, tau: Complex64) -> f64 {
    let (a, b) = lattice_coordinates(z, tau);
    let (a0, b0) = (a.round(), b.round());
    let mut best = f64::INFINITY;
    for dm in -1..=1 {
        for dn in -1..=1 {
            let lattice = tau * (b0 + dn as f64) + (a0 + dm as f64);
            best = best.min((z - lattice).norm());
        }
    }
    best
}

/// Representative of `z` with lattice coordinates in `[0, 1) x [0, 1)`.
pub fn reduce_to_fundamental_domain(z: Complex64, tau: Complex64) -> Complex64 {
    let (a, b) = lattice_coordinates(z, tau);
    let fa = a - a.floor();
    let fb = b - b.floor();
    let (fa, fb) = (if fa >= 1.0 { 0.0 } else { fa }, if fb >= 1.0 { 0.0 } else { fb });
    tau * fb + fa
}

impl CurveModel {
    pub fn sphere() -> Self {
        Self::Sphere
    }

    pub fn torus(tau: Complex64) -> Result<Self> {
        Ok(Self::Torus(Tau::new(tau)?))
    }

    pub fn genus(&self) -> u32 {
        match self {
            Self::Sphere => 0,
            Self::Torus(_) => 1,
        }
    }

    pub fn tau(&self) -> Option<Complex64> {
        match self {
            Self::Sphere => None,
            Self::Torus(t) => Some(t.value()),
        }
    }

    /// Rejects points that do not live on this curve (infinity on a torus).
    pub fn check_point(&self, p: CurvePoint) -> Result<()> {
        match (self, p) {
            (Self::Torus(_), CurvePoint::Infinity) => Err(Error::InfinityOffSphere),
            _ => Ok(()),
        }
    }

    /// Distance on the curve's covering plane: modulo the lattice on a torus,
    /// `0` between two infinities and `inf` between infinity and an affine point.
    pub fn distance(&self, p: CurvePoint, q: CurvePoint) -> f64 {
        match (p, q) {
            (CurvePoint::Infinity, CurvePoint::Infinity) => 0.0,
            (CurvePoint::Infinity, _) | (_, CurvePoint::Infinity) => f64::INFINITY,
            (CurvePoint::Affine(a), CurvePoint::Affine(b)) => match self {
                Self::Sphere => (a - b).norm(),
                Self::Torus(t) => lattice_distance(a - b, t.value()),
            },
        }
    }

    pub fn point_tolerance(&self) -> f64 {
        match self {
            Self::Sphere => SPHERE_POINT_TOL,
            Self::Torus(_) => TORUS_POINT_TOL,
        }
    }

    /// Curve-point equality (lattice equivalence on the torus).
    pub fn same_point(&self, p: CurvePoint, q: CurvePoint) -> bool {
        self.distance(p, q) < self.point_tolerance()
    }

    /// Sort key of a point: the fundamental-domain representative on a torus.
    pub(crate) fn canonical_key(&self, p: CurvePoint) -> (u8, f64, f64) {
        match (self, p) {
            (_, CurvePoint::Infinity) => (1, 0.0, 0.0),
            (Self::Sphere, CurvePoint::Affine(z)) => (0, z.re, z.im),
            (Self::Torus(t), CurvePoint::Affine(z)) => {
                let r = reduce_to_fundamental_domain(z, t.value());
                (0, r.re, r.im)
            }
        }
    }

    /// The Green kernel `g(p, q)`.
    pub fn green_kernel(&self, p: CurvePoint, q: CurvePoint) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        if self.same_point(p, q) {
            return Err(Error::DiagonalSingularity);
        }
        match (p, q) {
            (CurvePoint::Affine(a), CurvePoint::Affine(b)) => match self {
                Self::Sphere => Ok((a - b).norm().ln()),
                Self::Torus(t) => {
                    let tau = t.value();
                    let d = a - b;
                    Ok(log_abs_theta1(d, tau)? - PI * d.im * d.im / tau.im)
                }
            },
            // Chart w = 1/z at infinity; see the module docs.
            _ => Ok(0.0),
        }
    }
}

/// A symmetric real kernel with a logarithmic singularity on the diagonal.
///
/// Pairing and Green-function code is generic over this so that the
/// additive-constant ambiguity of the kernel can be exercised directly.
pub trait GreenKernel {
    fn curve(&self) -> &CurveModel;
    fn kernel(&self, p: CurvePoint, q: CurvePoint) -> Result<f64>;
}

impl GreenKernel for CurveModel {
    fn curve(&self) -> &CurveModel {
        self
    }

    fn kernel(&self, p: CurvePoint, q: CurvePoint) -> Result<f64> {
        self.green_kernel(p, q)
    }
}

/// The curve's kernel plus a constant.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedKernel<'a> {
    pub curve: &'a CurveModel,
    pub shift: f64,
}

impl<'a> ShiftedKernel<'a> {
    pub fn new(curve: &'a CurveModel, shift: f64) -> Self {
        Self { curve, shift }
    }
}

impl GreenKernel for ShiftedKernel<'_> {
    fn curve(&self) -> &CurveModel {
        self.curve
    }

    fn kernel(&self, p: CurvePoint, q: CurvePoint) -> Result<f64> {
        Ok(self.curve.green_kernel(p, q)? + self.shift)
    }
}

/// Green function of a degree-0 divisor, `g_D(z) = sum_j n_j g(z, P_j)`.
///
/// Complex when the coefficients are.
pub fn green_divisor(curve: &CurveModel, d: &ComplexDivisor, z: CurvePoint) -> Result<Complex64> {
    green_divisor_with(curve, d, z)
}

pub fn green_divisor_with<K: GreenKernel + ?Sized>(
    kernel: &K,
    d: &ComplexDivisor,
    z: CurvePoint,
) -> Result<Complex64> {
    if d.curve() != kernel.curve() {
        return Err(Error::MismatchedContext);
    }
    if d.degree() != 0 {
        return Err(Error::NonzeroDegree);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for term in d.terms() {
        acc += term.coefficient.to_complex() * kernel.kernel(z, term.point)?;
    }
    Ok(acc)
}

/// `sum_P n_P * P` on a torus, with its fundamental-domain reduction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelJacobi {
    pub sum: Complex64,
    pub reduced: Complex64,
}

pub fn abel_jacobi_sum(curve: &CurveModel, d: &ComplexDivisor) -> Result<AbelJacobi> {
    let tau = curve.tau().ok_or(Error::TrivialJacobian)?;
    if d.curve() != curve {
        return Err(Error::MismatchedContext);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for term in d.terms() {
        // Torus divisors never contain infinity.
        let z = term.point.coordinate().ok_or(Error::InfinityOffSphere)?;
        sum += term.coefficient.to_complex() * z;
    }
    Ok(AbelJacobi { sum, reduced: reduce_to_fundamental_domain(sum, tau) })
}
