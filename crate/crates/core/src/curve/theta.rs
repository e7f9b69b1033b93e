//! The first Jacobi theta function.
//!
//! ```text
//! theta1(z|tau) = 2 q^(1/8) sin(pi z) prod_{n>=1} (1 - q^n)(1 - q^n w)(1 - q^n / w)
//! q = exp(2 pi i tau),  w = exp(2 pi i z)
//! ```
//!
//! The argument is first moved into `|Re z| <= 1/2`, `|Im z| <= Im(tau)/2`
//! with the quasi-periodicity
//! `theta1(z0 + m + n tau) = (-1)^(m+n) exp(-pi i n^2 tau - 2 pi i n z0) theta1(z0)`.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Product truncation threshold: a factor is dropped once `|q^n w^(+-1)|` is below this.
pub const PRODUCT_CUTOFF: f64 = 1e-17;
const MAX_FACTORS: usize = 1 << 20;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.re.is_finite() && tau.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTau(tau.im))
    }
}

/// `z = z0 + m + n tau` with `z0` in the centred period parallelogram.
pub(crate) fn reduce_centered(z: Complex64, tau: Complex64) -> (Complex64, i64, i64) {
    let n = (z.im / tau.im).round();
    let shifted = z - tau * n;
    let m = shifted.re.round();
    (shifted - m, m as i64, n as i64)
}

/// Product form on the reduced argument.
fn theta1_centered(z0: Complex64, tau: Complex64) -> Complex64 {
    let q = (2.0 * PI * I * tau).exp();
    let w = (2.0 * PI * I * z0).exp();
    let w_inv = w.inv();
    let w_scale = w.norm().max(w_inv.norm());
    let mut acc = 2.0 * (PI * I * tau / 4.0).exp() * (PI * z0).sin();
    let mut qn = q;
    for _ in 0..MAX_FACTORS {
        if qn.norm() * w_scale < PRODUCT_CUTOFF {
            break;
        }
        acc *= (1.0 - qn) * (1.0 - qn * w) * (1.0 - qn * w_inv);
        qn *= q;
    }
    acc
}

/// `theta1(z|tau)`. Rejects `Im(tau) <= 0`.
pub fn theta1(z: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    let (z0, m, n) = reduce_centered(z, tau);
    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let nf = n as f64;
    let factor = (-PI * I * nf * nf * tau - 2.0 * PI * I * nf * z0).exp();
    Ok(theta1_centered(z0, tau) * factor * sign)
}

/// `ln |theta1(z|tau)|`, computed without forming the (possibly huge) value.
pub fn log_abs_theta1(z: Complex64, tau: Complex64) -> Result<f64> {
    check_tau(tau)?;
    let (z0, _, n) = reduce_centered(z, tau);
    let nf = n as f64;
    Ok(theta1_centered(z0, tau).norm().ln() + PI * nf * nf * tau.im + 2.0 * PI * nf * z0.im)
}

/// A logarithm of `theta1(z|tau)` (branch unspecified), without overflow.
pub fn log_theta1(z: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    let (z0, m, n) = reduce_centered(z, tau);
    let nf = n as f64;
    let sign = if (m + n).rem_euclid(2) == 0 { 0.0 } else { PI };
    Ok(theta1_centered(z0, tau).ln() - PI * I * nf * nf * tau - 2.0 * PI * I * nf * z0 + I * sign)
}

/// Logarithmic derivative `theta1'(z)/theta1(z)`.
pub fn theta1_log_derivative(z: Complex64, tau: Complex64) -> Result<Complex64> {
    check_tau(tau)?;
    let (z0, _, n) = reduce_centered(z, tau);
    let q = (2.0 * PI * I * tau).exp();
    let w = (2.0 * PI * I * z0).exp();
    let w_inv = w.inv();
    let w_scale = w.norm().max(w_inv.norm());
    let mut acc = PI / (PI * z0).tan();
    let mut qn = q;
    for _ in 0..MAX_FACTORS {
        if qn.norm() * w_scale < PRODUCT_CUTOFF {
            break;
        }
        let a = qn * w_inv;
        let b = qn * w;
        acc += 2.0 * PI * I * (a / (1.0 - a) - b / (1.0 - b));
        qn *= q;
    }
    Ok(acc - 2.0 * PI * I * n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vanishes_at_origin_and_is_odd() {
        assert_eq!(theta1(c(0.0, 0.0), I).unwrap(), c(0.0, 0.0));
        for (z, tau) in [(c(0.3, 0.1), I), (c(-0.7, 0.4), c(0.2, 0.9)), (c(1.3, -2.1), c(-0.4, 1.7))] {
            let a = theta1(z, tau).unwrap();
            let b = theta1(-z, tau).unwrap();
            assert!((a + b).norm() <= 1e-13 * a.norm(), "{z} {tau}");
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert_eq!(theta1(c(0.1, 0.0), c(0.0, -1.0)), Err(Error::InvalidTau(-1.0)));
        assert!(theta1(c(0.1, 0.0), c(0.5, 0.0)).is_err());
        assert!(log_abs_theta1(c(0.1, 0.0), c(0.5, 0.0)).is_err());
    }

    #[test]
    fn quasi_periodicity() {
        for (z, tau) in [(c(0.31, 0.12), I), (c(-0.2, 0.45), c(0.3, 1.1)), (c(0.05, -0.6), c(-0.5, 0.8))] {
            let t = theta1(z, tau).unwrap();
            let t1 = theta1(z + 1.0, tau).unwrap();
            assert!((t1 + t).norm() <= 1e-10 * t.norm());
            let tt = theta1(z + tau, tau).unwrap();
            let expect = -(-PI * I * tau - 2.0 * PI * I * z).exp() * t;
            assert!((tt - expect).norm() <= 1e-10 * expect.norm());
        }
    }

    #[test]
    fn log_abs_matches_value() {
        for (z, tau) in [(c(0.31, 0.12), I), (c(2.7, 3.9), c(0.3, 1.1)), (c(-4.05, -6.6), c(-0.5, 0.8))] {
            let direct = theta1(z, tau).unwrap().norm().ln();
            let logged = log_abs_theta1(z, tau).unwrap();
            assert!((direct - logged).abs() < 1e-11, "{direct} vs {logged}");
        }
    }

    #[test]
    fn log_theta_exponentiates_to_value() {
        for (z, tau) in [(c(0.31, 0.12), I), (c(2.7, 1.9), c(0.3, 1.1)), (c(-1.05, -1.6), c(-0.5, 0.8))] {
            let v = theta1(z, tau).unwrap();
            let l = log_theta1(z, tau).unwrap().exp();
            assert!((v - l).norm() < 1e-12 * v.norm());
        }
    }

    #[test]
    fn log_derivative_matches_central_difference() {
        let h = 1e-5;
        for (z, tau) in [(c(0.31, 0.12), I), (c(0.7, 1.9), c(0.3, 1.1)), (c(-0.45, -0.35), c(-0.5, 0.8))] {
            let fd = (theta1(z + h, tau).unwrap() - theta1(z - h, tau).unwrap())
                / (2.0 * h)
                / theta1(z, tau).unwrap();
            let ld = theta1_log_derivative(z, tau).unwrap();
            assert!((fd - ld).norm() < 1e-7 * (1.0 + ld.norm()), "{fd} vs {ld}");
        }
    }
}
