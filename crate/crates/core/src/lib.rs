//! Complex divisors on marked algebraic curves.
//!
//! This crate is `no_std` (it needs `alloc`). It provides:
//! - [`curve`]: the Riemann sphere and complex tori `C/(Z + tau Z)`, the
//!   first Jacobi theta function and the symmetric real Green kernels.
//! - [`divisor`]: exact arithmetic in the group of complex divisors with
//!   Gaussian-rational coefficients at marked points.
//! - [`mvf`]: local models of multiple valued meromorphic functions, orders,
//!   multiplicators, glueing data and the principality test.
//! - [`pairing`]: the Weil symbol and reciprocity, and the Arakelov-Deligne
//!   pairing norm with its Hermitian form.
//! - [`strings`]: on-shell momentum configurations and the momentum divisors.
//!
//! Coefficients are exact; geometry (points, kernel values) is `f64`.

#![no_std]

extern crate alloc;

pub mod curve;
pub mod divisor;
mod error;
pub mod gaussian;
pub mod literal;
pub mod mvf;
pub mod pairing;
pub mod strings;

pub use curve::{CurveModel, CurvePoint, GreenKernel, ShiftedKernel};
pub use divisor::{ClassDescriptor, ComplexDivisor, MarkedCurve};
pub use error::{Error, Result};
pub use gaussian::GaussianRational;
pub use num_complex::Complex64;
