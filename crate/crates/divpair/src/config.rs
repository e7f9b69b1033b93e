//! Momentum configuration files.
//!
//! A configuration is a TOML document:
//!
//! ```toml
//! curve = "torus"            # "sphere" or "torus"
//! tau = "0.1+1.2i"           # torus only, complex literal
//! marks = ["0.1+0.2i", "0.6+0.3i"]
//! momenta = [
//!   ["1", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0"],
//!   ["-1", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0", "0"],
//! ]
//! ```
//!
//! Every complex entry is a string in the literal grammar of
//! [`divpair_core::literal`] or a plain TOML number. `momenta` has one row of
//! exactly 13 entries per mark. Unknown keys are rejected.

use divpair_core::curve::{CurveModel, CurvePoint};
use divpair_core::literal::parse_complex;
use divpair_core::strings::{Momentum, MomentumConfig, DIM};
use divpair_core::{Complex64, MarkedCurve};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Literal {
    Text(String),
    Integer(i64),
    Float(f64),
}

impl Literal {
    fn value(&self) -> Result<Complex64, CliError> {
        match self {
            Literal::Text(s) => Ok(parse_complex(s)?),
            Literal::Integer(n) => Ok(Complex64::new(*n as f64, 0.0)),
            Literal::Float(x) => Ok(Complex64::new(*x, 0.0)),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    curve: String,
    tau: Option<Literal>,
    marks: Vec<Literal>,
    momenta: Vec<Vec<Literal>>,
}

#[derive(Debug, Clone)]
pub struct MomentumFile {
    pub marked_curve: MarkedCurve,
    pub config: MomentumConfig,
}

pub fn curve_from(name: &str, tau: Option<Complex64>) -> Result<CurveModel, CliError> {
    match (name, tau) {
        ("sphere", None) => Ok(CurveModel::Sphere),
        ("sphere", Some(_)) => Err(CliError::Parse("tau only applies to the torus".into())),
        ("torus", Some(t)) => Ok(CurveModel::torus(t)?),
        ("torus", None) => Err(CliError::Parse("the torus needs tau".into())),
        (other, _) => Err(CliError::Parse(format!("unknown curve {other:?} (expected sphere or torus)"))),
    }
}

impl MomentumFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Parse(format!("config: {}", e.message())))?;
        let tau = raw.tau.as_ref().map(Literal::value).transpose()?;
        let curve = curve_from(raw.curve.trim(), tau)?;
        let marks = raw.marks.iter().map(|m| m.value().map(CurvePoint::Affine)).collect::<Result<Vec<_>, _>>()?;
        let mut momenta: Vec<Momentum> = Vec::with_capacity(raw.momenta.len());
        for (i, row) in raw.momenta.iter().enumerate() {
            if row.len() != DIM {
                return Err(CliError::Parse(format!("config: momentum {} has {} components, expected {DIM}", i + 1, row.len())));
            }
            let mut p = [Complex64::new(0.0, 0.0); DIM];
            for (slot, entry) in p.iter_mut().zip(row) {
                *slot = entry.value()?;
            }
            momenta.push(p);
        }
        let marked_curve = MarkedCurve::new(curve, marks)?;
        let config = MomentumConfig::new(momenta)?;
        Ok(Self { marked_curve, config })
    }
}
