//! Exact Gaussian rationals `a + b i` with `a, b` in Q.

use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A Gaussian rational. Both parts are kept in lowest terms, so derived
/// equality is exact equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: BigRational,
    im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    /// `num/den + 0i`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::new(BigRational::new(num.into(), den.into()), BigRational::zero())
    }

    /// `(re_num/re_den) + (im_num/im_den) i`. Panics on a zero denominator.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Self::new(
            BigRational::new(re_num.into(), re_den.into()),
            BigRational::new(im_num.into(), im_den.into()),
        )
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True for elements of Z (not Z[i]).
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.re.to_integer())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }

    /// Exact inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(Self::new(&self.re / &n, -(&self.im / &n)))
    }

    /// Best rational approximations (continued fractions) of both parts of
    /// `z`, with denominators at most `max_denominator`.
    pub fn approximate(z: Complex64, max_denominator: u64) -> Option<Self> {
        Some(Self::new(
            rational_approximation(z.re, max_denominator)?,
            rational_approximation(z.im, max_denominator)?,
        ))
    }
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Only reached for magnitudes beyond f64 range.
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Best approximation of `x` by a fraction with denominator `<= max_denominator`,
/// from the continued fraction of the exact binary value of `x`.
pub fn rational_approximation(x: f64, max_denominator: u64) -> Option<BigRational> {
    let exact = BigRational::from_float(x)?;
    let max_den = BigInt::from(max_denominator.max(1));
    let (mut num, mut den) = (exact.numer().clone(), exact.denom().clone());
    // Convergents h/k.
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    let mut first = true;
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        if k_next > max_den {
            break;
        }
        h_prev = core::mem::replace(&mut h, h_next);
        k_prev = core::mem::replace(&mut k, k_next);
        first = false;
        num = den;
        den = r;
    }
    if first {
        // max_den < 1 cannot happen; the first convergent always has k = 1.
        return None;
    }
    Some(BigRational::new(h, k))
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(re: BigRational) -> Self {
        Self::new(re, BigRational::zero())
    }
}

impl Add<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Add for GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: GaussianRational) -> GaussianRational {
        &self + &rhs
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Sub for GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: GaussianRational) -> GaussianRational {
        &self - &rhs
    }
}

impl Mul<&GaussianRational> for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Mul for GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: GaussianRational) -> GaussianRational {
        &self * &rhs
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl core::iter::Sum for GaussianRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, x| acc + x)
    }
}

impl<'a> core::iter::Sum<&'a GaussianRational> for GaussianRational {
    fn sum<I: Iterator<Item = &'a Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

/// Same grammar as the literal parser accepts: `3`, `-3/2`, `1/2+2i`, `-i`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_abs = self.im.abs();
        let im_text = |f: &mut fmt::Formatter<'_>| {
            if im_abs.is_one() {
                f.write_str("i")
            } else {
                write!(f, "{im_abs}i")
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => {
                if self.im.is_negative() {
                    f.write_str("-")?;
                }
                im_text(f)
            }
            (false, false) => {
                write!(f, "{}", self.re)?;
                f.write_str(if self.im.is_negative() { "-" } else { "+" })?;
                im_text(f)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn display_forms() {
        assert_eq!(GaussianRational::from_parts(1, 2, 2, 1).to_string(), "1/2+2i");
        assert_eq!((-GaussianRational::i()).to_string(), "-i");
        assert_eq!(GaussianRational::ratio(-3, 2).to_string(), "-3/2");
        assert_eq!(GaussianRational::zero().to_string(), "0");
        assert_eq!(GaussianRational::from_parts(0, 1, -3, 4).to_string(), "-3/4i");
    }

    #[test]
    fn inverse_is_exact() {
        let z = GaussianRational::from_parts(2, 3, -5, 7);
        assert_eq!(&z * &z.inv().unwrap(), GaussianRational::one());
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn integrality() {
        assert!(GaussianRational::from_integer(-4).is_integer());
        assert!(!GaussianRational::ratio(1, 2).is_integer());
        assert!(!GaussianRational::i().is_integer());
        assert_eq!(GaussianRational::ratio(6, 3).to_i64(), Some(2));
    }

    #[test]
    fn continued_fraction_approximation() {
        let r = rational_approximation(core::f64::consts::PI, 1000).unwrap();
        assert_eq!(r, BigRational::new(355.into(), 113.into()));
        let r = rational_approximation(0.5, 1_000_000_000).unwrap();
        assert_eq!(r, BigRational::new(1.into(), 2.into()));
        let x = 0.866_025_403_784_438_6_f64;
        let r = rational_approximation(x, 1_000_000_000).unwrap();
        assert!(r.denom() <= &BigInt::from(1_000_000_000u64));
        assert!((ratio_to_f64(&r) - x).abs() < 1e-15);
        let r = rational_approximation(-2.25, 10).unwrap();
        assert_eq!(r, BigRational::new((-9).into(), 4.into()));
    }
}
