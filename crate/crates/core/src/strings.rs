//! On-shell momentum configurations and the pairing factor of their momentum divisors.
//!
//! Each of the `n` marks carries a momentum `p_i` in `C^13` with
//! `sum_i p_i = 0` and `(p_i, p_i) = 1`. The `nu`-th momentum divisor is
//! `D^nu = sum_i p_i^nu Q_i`. The factor
//!
//! ```text
//! exp( sum_{i != j} Re <p_i, p_j> g(Q_i, Q_j) ),   <p, q> = sum_nu p^nu conj(q^nu)
//! ```
//!
//! is the product over `nu` of the self-pairing norms of `D^nu` with the
//! divergent diagonal terms `g(Q_i, Q_i)` omitted.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::curve::GreenKernel;
use crate::divisor::{ComplexDivisor, MarkedCurve};
use crate::{Error, GaussianRational, Result};

/// Space-time dimension.
pub const DIM: usize = 13;
/// Tolerance of the floating conservation and mass-shell checks.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Tolerance after rationalizing the components.
pub const RATIONAL_TOL: f64 = 1e-9;
/// Largest denominator used when rationalizing components.
pub const MAX_DENOMINATOR: u64 = 1_000_000_000;

pub type Momentum = [Complex64; DIM];

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumConfig {
    momenta: Vec<Momentum>,
}

/// `<p, q> = sum_nu p^nu conj(q^nu)`.
pub fn hermitian_product(p: &Momentum, q: &Momentum) -> Complex64 {
    p.iter().zip(q).map(|(a, b)| a * b.conj()).sum()
}

fn conservation_residual<'a, I: Iterator<Item = &'a Momentum>>(momenta: I) -> f64 {
    let mut total = [Complex64::new(0.0, 0.0); DIM];
    for p in momenta {
        for (t, c) in total.iter_mut().zip(p) {
            *t += c;
        }
    }
    total.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

impl MomentumConfig {
    pub fn new(momenta: Vec<Momentum>) -> Result<Self> {
        let residual = conservation_residual(momenta.iter());
        if residual.is_nan() || residual > CONSTRAINT_TOL {
            return Err(Error::ConservationViolated(residual));
        }
        for (index, p) in momenta.iter().enumerate() {
            let residual = (hermitian_product(p, p).re - 1.0).abs();
            if residual.is_nan() || residual > CONSTRAINT_TOL {
                return Err(Error::MassShellViolated { index, residual });
            }
        }
        Ok(Self { momenta })
    }

    pub fn momenta(&self) -> &[Momentum] {
        &self.momenta
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    /// Components as Gaussian rationals (denominators at most 10^9), with the
    /// last momentum replaced by minus the sum of the others so that
    /// conservation holds exactly.
    pub fn rationalized(&self) -> Result<Vec<[GaussianRational; DIM]>> {
        let n = self.momenta.len();
        let mut out: Vec<[GaussianRational; DIM]> = Vec::with_capacity(n);
        for p in self.momenta.iter().take(n.saturating_sub(1)) {
            let mut row: [GaussianRational; DIM] = Default::default();
            for (slot, c) in row.iter_mut().zip(p) {
                *slot = GaussianRational::approximate(*c, MAX_DENOMINATOR)
                    .ok_or(Error::ConservationViolated(f64::NAN))?;
            }
            out.push(row);
        }
        if n > 0 {
            let mut last: [GaussianRational; DIM] = Default::default();
            for (nu, slot) in last.iter_mut().enumerate() {
                *slot = -out.iter().map(|row| &row[nu]).sum::<GaussianRational>();
            }
            let drift = last
                .iter()
                .zip(&self.momenta[n - 1])
                .map(|(r, c)| (r.to_complex() - c).norm())
                .fold(0.0, f64::max);
            if drift > RATIONAL_TOL {
                return Err(Error::ConservationViolated(drift));
            }
            out.push(last);
        }
        for (index, row) in out.iter().enumerate() {
            let mass: f64 = row.iter().map(|c| c.to_complex().norm_sqr()).sum();
            let residual = (mass - 1.0).abs();
            if residual > RATIONAL_TOL {
                return Err(Error::MassShellViolated { index, residual });
            }
        }
        Ok(out)
    }
}

fn check_counts(mc: &MarkedCurve, cfg: &MomentumConfig) -> Result<()> {
    if mc.mark_count() != cfg.len() {
        return Err(Error::MomentumCount { momenta: cfg.len(), marks: mc.mark_count() });
    }
    Ok(())
}

/// `D^nu = sum_i p_i^nu Q_i` for `nu` in `1..=13`.
pub fn momentum_divisor(mc: &MarkedCurve, cfg: &MomentumConfig, nu: usize) -> Result<ComplexDivisor> {
    check_counts(mc, cfg)?;
    if !(1..=DIM).contains(&nu) {
        return Err(Error::ComponentOutOfRange(nu));
    }
    let rows = cfg.rationalized()?;
    let coefficients: Vec<GaussianRational> = rows.iter().map(|row| row[nu - 1].clone()).collect();
    ComplexDivisor::on_marks(mc, &coefficients)
}

/// All thirteen momentum divisors.
pub fn momentum_divisors(mc: &MarkedCurve, cfg: &MomentumConfig) -> Result<Vec<ComplexDivisor>> {
    check_counts(mc, cfg)?;
    let rows = cfg.rationalized()?;
    (0..DIM)
        .map(|nu| {
            let coefficients: Vec<GaussianRational> = rows.iter().map(|row| row[nu].clone()).collect();
            ComplexDivisor::on_marks(mc, &coefficients)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringFactor {
    pub factor: f64,
    pub exponent: f64,
    /// Factor contributed by each component `nu = 1..=13`.
    pub per_component: [f64; DIM],
    /// The `g(Q_i, Q_i)` terms are always omitted; kept here so reports say so.
    pub diagonal_omitted: bool,
}

pub fn string_pairing_factor(mc: &MarkedCurve, cfg: &MomentumConfig) -> Result<StringFactor> {
    string_pairing_factor_with(mc.curve(), mc, cfg)
}

pub fn string_pairing_factor_with<K: GreenKernel + ?Sized>(
    kernel: &K,
    mc: &MarkedCurve,
    cfg: &MomentumConfig,
) -> Result<StringFactor> {
    check_counts(mc, cfg)?;
    if kernel.curve() != mc.curve() {
        return Err(Error::MismatchedContext);
    }
    let marks = mc.marks();
    let p = cfg.momenta();
    let mut per_exponent = [0.0; DIM];
    let mut exponent = 0.0;
    for i in 0..marks.len() {
        for j in 0..marks.len() {
            if i == j {
                continue;
            }
            let g = kernel.kernel(marks[i], marks[j])?;
            exponent += hermitian_product(&p[i], &p[j]).re * g;
            for nu in 0..DIM {
                per_exponent[nu] += (p[i][nu] * p[j][nu].conj()).re * g;
            }
        }
    }
    Ok(StringFactor {
        factor: exponent.exp(),
        exponent,
        per_component: per_exponent.map(f64::exp),
        diagonal_omitted: true,
    })
}
