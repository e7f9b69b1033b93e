//! Contour-integration oracle for principality on a torus.
//!
//! For a degree-0 divisor `D` the differential
//! `omega_D = sum_P n_P (theta1'/theta1)(z - P) dz` is doubly periodic with
//! simple poles of residue `n_P`. A multiple valued function with divisor
//! `D` exists iff, after adding a holomorphic correction `c dz`, both cycle
//! periods of `omega_D + c dz` lie in `2 pi i Z`. The cycles are the bottom
//! and left edges of a period parallelogram that contains every mark in its
//! interior (the disk around the marks never meets the cycles).
//!
//! The periods are computed by adaptive Gauss-Kronrod quadrature, without
//! using the Abel-Jacobi sum.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::curve::{lattice_coordinates, lattice_distance, theta1_log_derivative, CurveModel};
use crate::divisor::ComplexDivisor;
use crate::{Error, Result};

/// Absolute tolerance requested from the quadrature on each edge.
pub const QUADRATURE_TOL: f64 = 1e-11;
/// Periods must lie within this distance of `2 pi i Z`.
pub const PERIOD_TOL: f64 = 1e-6;

const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyCertificate {
    /// Corner `z0` of the period parallelogram.
    pub base_point: Complex64,
    /// Smallest distance from a support point to the parallelogram edges.
    pub clearance: f64,
    /// `int_{z0}^{z0+1} omega_D` before correction.
    pub raw_a_period: Complex64,
    /// `int_{z0}^{z0+tau} omega_D` before correction.
    pub raw_b_period: Complex64,
    /// Coefficient `c` of the holomorphic correction `c dz`.
    pub correction: Complex64,
    pub a_period: Complex64,
    pub b_period: Complex64,
    /// Distance of `a_period` to `2 pi i Z`.
    pub a_defect: f64,
    /// Distance of `b_period` to `2 pi i Z`.
    pub b_defect: f64,
}

impl MonodromyCertificate {
    /// Both monodromies of `exp(int omega)` are trivial within [`PERIOD_TOL`].
    pub fn is_trivial(&self) -> bool {
        self.a_defect < PERIOD_TOL && self.b_defect < PERIOD_TOL
    }

    /// `(B - A tau) / (2 pi i)`: the obstruction, defined modulo the lattice.
    pub fn obstruction(&self, tau: Complex64) -> Complex64 {
        (self.raw_b_period - self.raw_a_period * tau) / TWO_PI_I
    }
}

fn distance_to_two_pi_i_z(p: Complex64) -> f64 {
    let k = (p.im / (2.0 * PI)).round();
    (p - TWO_PI_I * k).norm()
}

/// Periods of `omega_D` on a torus. Requires `deg D = 0`.
pub fn monodromy_certificate(d: &ComplexDivisor) -> Result<MonodromyCertificate> {
    let curve = *d.curve();
    let tau = match curve {
        CurveModel::Torus(t) => t.value(),
        CurveModel::Sphere => return Err(Error::TrivialJacobian),
    };
    if d.degree() != 0 {
        return Err(Error::NonzeroDegree);
    }
    let terms = d.terms();
    let mut marks = Vec::new();
    let mut others = Vec::new();
    for t in &terms {
        let z = t.point.coordinate().ok_or(Error::InfinityOffSphere)?;
        let entry = (z, t.coefficient.to_complex());
        if t.mark.is_some() {
            marks.push(entry);
        } else {
            others.push(entry);
        }
    }
    let (base, clearance) = choose_base_point(tau, &marks, &others)?;
    // Ordinary points are moved into the parallelogram; with integer
    // coefficients this changes the periods by 2 pi i Z and 2 pi i Z tau only.
    let (a0, b0) = lattice_coordinates(base, tau);
    let support: Vec<(Complex64, Complex64)> = marks
        .iter()
        .copied()
        .chain(others.iter().map(|&(z, n)| {
            let (a, b) = lattice_coordinates(z, tau);
            let (da, db) = ((a - a0).floor(), (b - b0).floor());
            (z - da - tau * db, n)
        }))
        .collect();

    let integrand = |z: Complex64| -> Complex64 {
        support
            .iter()
            .map(|&(p, n)| n * theta1_log_derivative(z - p, tau).unwrap_or_default())
            .sum()
    };
    let raw_a = integrate_segment(&integrand, base, Complex64::new(1.0, 0.0));
    let raw_b = integrate_segment(&integrand, base, tau);

    // Put the a-period at 0 mod 2 pi i, then pick the 2 pi i Z shift of the
    // correction that brings the b-period closest to 2 pi i Z.
    let w = (raw_b - raw_a * tau) / TWO_PI_I;
    let (_, wb) = lattice_coordinates(w, tau);
    let k = -wb.round();
    let correction = -raw_a + TWO_PI_I * k;
    let a_period = raw_a + correction;
    let b_period = raw_b + correction * tau;
    Ok(MonodromyCertificate {
        base_point: base,
        clearance,
        raw_a_period: raw_a,
        raw_b_period: raw_b,
        correction,
        a_period,
        b_period,
        a_defect: distance_to_two_pi_i_z(a_period),
        b_defect: distance_to_two_pi_i_z(b_period),
    })
}

/// Chooses the parallelogram corner: all marks strictly inside, and the
/// support as far from the edges as a grid search can find.
fn choose_base_point(
    tau: Complex64,
    marks: &[(Complex64, Complex64)],
    others: &[(Complex64, Complex64)],
) -> Result<(Complex64, f64)> {
    const GRID: usize = 48;
    let coords: Vec<(f64, f64)> = marks.iter().map(|(z, _)| lattice_coordinates(*z, tau)).collect();
    let range = |sel: fn(&(f64, f64)) -> f64| -> Result<(f64, f64)> {
        if coords.is_empty() {
            return Ok((-1.0, 0.0));
        }
        let lo = coords.iter().map(sel).fold(f64::INFINITY, f64::min);
        let hi = coords.iter().map(sel).fold(f64::NEG_INFINITY, f64::max);
        if hi - lo >= 1.0 {
            return Err(Error::MarksSpanPeriod);
        }
        // Corner coordinate must lie in (hi - 1, lo).
        Ok((hi - 1.0, lo))
    };
    let (a_lo, a_hi) = range(|c| c.0)?;
    let (b_lo, b_hi) = range(|c| c.1)?;
    let height = tau.im;
    let width = tau.im / tau.norm();
    let all: Vec<(f64, f64)> = marks
        .iter()
        .chain(others)
        .map(|(z, _)| lattice_coordinates(*z, tau))
        .collect();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 1..GRID {
        let a0 = a_lo + (a_hi - a_lo) * i as f64 / GRID as f64;
        for j in 1..GRID {
            let b0 = b_lo + (b_hi - b_lo) * j as f64 / GRID as f64;
            let clearance = all
                .iter()
                .map(|&(a, b)| {
                    let u = (a - a0) - (a - a0).floor();
                    let v = (b - b0) - (b - b0).floor();
                    (u.min(1.0 - u) * width).min(v.min(1.0 - v) * height)
                })
                .fold(f64::INFINITY, f64::min);
            if clearance > best.0 {
                best = (clearance, a0, b0);
            }
        }
    }
    let (clearance, a0, b0) = best;
    let clearance = if clearance.is_finite() { clearance } else { height.min(width) / 2.0 };
    Ok((tau * b0 + a0, clearance))
}

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod estimate and error estimate on `[lo, hi]` of the parameter.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> (Complex64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for k in 0..7 {
        let dx = half * XGK[k];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += pair * WGK[k];
        if k % 2 == 1 {
            gauss += pair * WG[k / 2];
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).norm())
}

fn adaptive<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64, tol: f64, depth: u32) -> Complex64 {
    let (value, err) = gk15(f, lo, hi);
    if err <= tol || depth == 0 {
        return value;
    }
    let mid = 0.5 * (lo + hi);
    adaptive(f, lo, mid, tol / 2.0, depth - 1) + adaptive(f, mid, hi, tol / 2.0, depth - 1)
}

/// `int_{start}^{start + direction} f(z) dz` along the straight segment.
pub(crate) fn integrate_segment<F: Fn(Complex64) -> Complex64>(
    f: &F,
    start: Complex64,
    direction: Complex64,
) -> Complex64 {
    let g = |s: f64| f(start + direction * s) * direction;
    // Eight initial panels keep the error estimate honest near poles.
    (0..8)
        .map(|k| adaptive(&g, k as f64 / 8.0, (k + 1) as f64 / 8.0, QUADRATURE_TOL / 8.0, 30))
        .sum()
}

/// Lattice defect of the obstruction; `0` iff the divisor is principal.
pub fn obstruction_defect(cert: &MonodromyCertificate, tau: Complex64) -> f64 {
    lattice_distance(cert.obstruction(tau), tau)
}
