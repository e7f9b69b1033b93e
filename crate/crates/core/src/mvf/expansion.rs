//! Local models `z^A * sum_{j >= n0} alpha_j z^j` at a marked point.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Add;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result};

/// Series length used when none is specified.
pub const DEFAULT_SERIES_LENGTH: usize = 32;

/// An order `A + n0` kept as its fractional exponent and integer shift,
/// normalized so that `0 <= Re A < 1`.
///
/// Addition renormalizes, so `ord(ab) == ord(a) + ord(b)` holds with `==`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order {
    pub exponent: Complex64,
    pub shift: i64,
}

impl Order {
    pub fn new(exponent: Complex64, shift: i64) -> Self {
        let (exponent, carry) = split_exponent(exponent);
        Self { exponent, shift: shift + carry }
    }

    pub fn to_complex(self) -> Complex64 {
        self.exponent + self.shift as f64
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        Order::new(self.exponent + rhs.exponent, self.shift + rhs.shift)
    }
}

/// `A = frac + carry` with `0 <= Re frac < 1`.
fn split_exponent(a: Complex64) -> (Complex64, i64) {
    let k = a.re.floor();
    let mut frac = a.re - k;
    let mut carry = k as i64;
    if frac >= 1.0 {
        // -tiny + 1 rounds to 1.
        frac = 0.0;
        carry += 1;
    }
    (Complex64::new(frac, a.im), carry)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalExpansion {
    exponent: Complex64,
    leading_index: i64,
    /// `coeffs[k]` multiplies `z^(A + n0 + k)`; `coeffs[0] != 0`.
    coeffs: Vec<Complex64>,
}

impl LocalExpansion {
    /// Builds and normalizes; leading zero coefficients are absorbed into `n0`.
    pub fn new(exponent: Complex64, leading_index: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        let first = coeffs.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroExpansion)?;
        let (exponent, carry) = split_exponent(exponent);
        Ok(Self {
            exponent,
            leading_index: leading_index + first as i64 + carry,
            coeffs: coeffs[first..].to_vec(),
        })
    }

    /// `z^A` times a power series starting at `z^0` with unit leading term.
    pub fn monomial(exponent: Complex64) -> Self {
        Self::new(exponent, 0, vec![Complex64::new(1.0, 0.0)]).expect("nonzero")
    }

    pub fn exponent(&self) -> Complex64 {
        self.exponent
    }

    pub fn leading_index(&self) -> i64 {
        self.leading_index
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Keeps the first `len` coefficients (at least one).
    pub fn truncated(mut self, len: usize) -> Self {
        self.coeffs.truncate(len.max(1));
        self
    }

    /// `ord = A + n0`.
    pub fn ord(&self) -> Order {
        Order { exponent: self.exponent, shift: self.leading_index }
    }

    /// The holomorphic-function form: `(A', n0')` with `0 < Re A' <= 1` or
    /// `A' = 0`, and `n0' >= 0`. `None` if the function is not holomorphic.
    pub fn holomorphic_form(&self) -> Option<(Complex64, i64)> {
        let (a, n0) = if self.exponent.re == 0.0 && self.exponent.im != 0.0 {
            (self.exponent + 1.0, self.leading_index - 1)
        } else {
            (self.exponent, self.leading_index)
        };
        (n0 >= 0).then_some((a, n0))
    }

    pub fn is_holomorphic(&self) -> bool {
        self.holomorphic_form().is_some()
    }

    /// Principal-branch value at `z != 0` of the truncated series.
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        let mut series = Complex64::zero();
        for c in self.coeffs.iter().rev() {
            series = series * z + c;
        }
        let power = if self.exponent.is_zero() { Complex64::new(1.0, 0.0) } else { (self.exponent * z.ln()).exp() };
        power * z.powi(self.leading_index as i32) * series
    }

    /// Product of local models: exponents add (with carry), series multiply.
    /// The result keeps `min(len a, len b)` terms.
    pub fn multiply(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![Complex64::zero(); len];
        for (i, a) in self.coeffs.iter().take(len).enumerate() {
            for (j, b) in other.coeffs.iter().take(len - i).enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        let ord = self.ord() + other.ord();
        // Leading product is nonzero (product of two nonzero numbers) unless it underflows.
        Self { exponent: ord.exponent, leading_index: ord.shift, coeffs }
    }
}

/// Normalizes raw `(A, n0, coeffs)` data so that `0 <= Re A < 1`.
pub fn normalize_expansion(exponent: Complex64, leading_index: i64, coeffs: Vec<Complex64>) -> Result<LocalExpansion> {
    LocalExpansion::new(exponent, leading_index, coeffs)
}

pub fn expansion_multiply(a: &LocalExpansion, b: &LocalExpansion) -> LocalExpansion {
    a.multiply(b)
}
