//! Text grammar for complex numbers, points and divisors.
//!
//! ```text
//! complex  := real | imag | real ("+"|"-") imag
//! real     := ["+"|"-"] number
//! imag     := ["+"|"-"] [number] "i"
//! number   := decimal (e.g. "2", "0.25", "1e-3") | integer "/" integer
//! point    := complex | "inf" | "Q" index        (index is 1-based)
//! divisor  := "" | term ("," term)*
//! term     := complex "@" point                  (coefficient must be exact)
//! ```
//!
//! Whitespace is insignificant everywhere.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::gaussian::{ratio_to_f64, GaussianRational};
use crate::{Error, Result};

/// A point as written, before it is resolved against a curve.
#[derive(Debug, Clone, PartialEq)]
pub enum PointLiteral {
    Affine(Complex64),
    Infinity,
    /// Zero-based mark index (`Q1` parses to `Mark(0)`).
    Mark(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermLiteral {
    pub coefficient: GaussianRational,
    pub point: PointLiteral,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Splits `"1/2-3i"` into `[(false, "1/2"), (true, "3i")]`.
fn split_signed_terms(s: &str) -> Result<Vec<(bool, &str)>> {
    if s.is_empty() {
        return Err(parse_err("empty number"));
    }
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    while start < bytes.len() {
        let mut negative = false;
        let mut body_start = start;
        if bytes[start] == b'+' || bytes[start] == b'-' {
            negative = bytes[start] == b'-';
            body_start += 1;
        }
        let mut end = body_start;
        while end < bytes.len() {
            let c = bytes[end];
            let after_exp = end > body_start && matches!(bytes[end - 1], b'e' | b'E');
            if (c == b'+' || c == b'-') && !after_exp {
                break;
            }
            end += 1;
        }
        let body = &s[body_start..end];
        if body.is_empty() {
            return Err(parse_err(format!("dangling sign in {s:?}")));
        }
        terms.push((negative, body));
        start = end;
    }
    Ok(terms)
}

/// Exact value of a decimal or `p/q` literal.
pub fn parse_exact_number(text: &str) -> Result<BigRational> {
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.parse().map_err(|_| parse_err(format!("bad numerator {p:?}")))?;
        let q: BigInt = q.parse().map_err(|_| parse_err(format!("bad denominator {q:?}")))?;
        if q.is_zero() {
            return Err(parse_err("zero denominator"));
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = text[pos + 1..]
                .parse()
                .map_err(|_| parse_err(format!("bad exponent in {text:?}")))?;
            (&text[..pos], e)
        }
        None => (text, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(parse_err(format!("bad number {text:?}")));
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(parse_err(format!("bad number {text:?}")));
    }
    if exponent.unsigned_abs() > 4096 {
        return Err(parse_err(format!("exponent out of range in {text:?}")));
    }
    let digits: String = [int_part, frac_part].concat();
    let digits: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().unwrap() };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        BigRational::from_integer(digits * pow)
    } else {
        BigRational::new(digits, pow)
    })
}

fn parse_float_number(text: &str) -> Result<f64> {
    if text.contains('/') {
        return Ok(ratio_to_f64(&parse_exact_number(text)?));
    }
    // Validate with the exact grammar so "nan", "inf" etc. are rejected.
    parse_exact_number(text)?;
    text.parse::<f64>().map_err(|_| parse_err(format!("bad number {text:?}")))
}

fn parse_complex_with<T: Clone>(
    s: &str,
    number: impl Fn(&str) -> Result<T>,
    one: T,
    neg: impl Fn(T) -> T,
) -> Result<(Option<T>, Option<T>)> {
    let mut re = None;
    let mut im = None;
    for (negative, body) in split_signed_terms(s)? {
        let (slot, text) = match body.strip_suffix('i') {
            Some(t) => (&mut im, t),
            None => (&mut re, body),
        };
        if slot.is_some() {
            return Err(parse_err(format!("repeated component in {s:?}")));
        }
        let value = if text.is_empty() { one.clone() } else { number(text)? };
        *slot = Some(if negative { neg(value) } else { value });
    }
    Ok((re, im))
}

/// Exact complex literal, used for divisor coefficients.
pub fn parse_gaussian(s: &str) -> Result<GaussianRational> {
    let s = strip_ws(s);
    let (re, im) = parse_complex_with(&s, parse_exact_number, BigRational::one(), |x| -x)?;
    Ok(GaussianRational::new(re.unwrap_or_default(), im.unwrap_or_default()))
}

/// Floating complex literal, used for coordinates and `tau`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = strip_ws(s);
    let (re, im) = parse_complex_with(&s, parse_float_number, 1.0, |x: f64| -x)?;
    Ok(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)))
}

pub fn parse_point(s: &str) -> Result<PointLiteral> {
    let s = strip_ws(s);
    if s == "inf" {
        return Ok(PointLiteral::Infinity);
    }
    if let Some(idx) = s.strip_prefix('Q') {
        let k: usize = idx.parse().map_err(|_| parse_err(format!("bad mark reference {s:?}")))?;
        if k == 0 {
            return Err(parse_err("mark references are 1-based"));
        }
        return Ok(PointLiteral::Mark(k - 1));
    }
    Ok(PointLiteral::Affine(parse_complex(&s)?))
}

/// Comma separated list of points, e.g. `"0, 1.5, 2+i"`. Empty input is an empty list.
pub fn parse_point_list(s: &str) -> Result<Vec<PointLiteral>> {
    let s = strip_ws(s);
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_point).collect()
}

pub fn parse_divisor_terms(s: &str) -> Result<Vec<TermLiteral>> {
    let s = strip_ws(s);
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|term| {
            let (coeff, point) = term
                .split_once('@')
                .ok_or_else(|| parse_err(format!("term {term:?} lacks '@'")))?;
            Ok(TermLiteral { coefficient: parse_gaussian(coeff)?, point: parse_point(point)? })
        })
        .collect()
}

pub fn format_point(p: &PointLiteral) -> String {
    match p {
        PointLiteral::Infinity => "inf".to_string(),
        PointLiteral::Mark(k) => format!("Q{}", k + 1),
        PointLiteral::Affine(z) => format_complex(*z),
    }
}

/// Round-trippable complex literal (shortest float representation).
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:?}", z.re)
    } else if z.re == 0.0 {
        format!("{:?}i", z.im)
    } else if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}
