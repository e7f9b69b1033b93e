//! Pass thresholds, with optional overrides from `DIVPAIR_TOL`.
//!
//! `DIVPAIR_TOL` accepts either a single positive number, which replaces every
//! floating threshold, or a comma-separated list of `name=value` pairs naming
//! individual thresholds (see [`Tolerances::NAMES`]). Checks that are exact by
//! construction are never loosened.

use std::collections::BTreeMap;

use crate::CliError;

pub const ENV_VAR: &str = "DIVPAIR_TOL";

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    values: BTreeMap<&'static str, f64>,
    overridden: bool,
}

const DEFAULTS: &[(&str, f64)] = &[
    ("kernel_symmetry", 1e-12),
    ("torus_periodicity", 1e-10),
    ("harmonicity", 1e-4),
    ("mobius_invariance", 1e-10),
    ("green_linearity", 1e-12),
    ("theta_quasi_periodicity", 1e-10),
    ("theta_series", 1e-12),
    ("class_additivity", 1e-9),
    ("multiplicator_homomorphism", 1e-12),
    ("monodromy_period", 1e-6),
    ("formula_equivalence", 1e-12),
    ("kernel_shift", 1e-10),
    ("reciprocity", 1e-9),
    ("symmetry", 1e-12),
    ("bimultiplicativity", 1e-10),
    ("scaling", 1e-10),
    ("hermitian_consistency", 1e-12),
    ("sesquilinearity", 1e-12),
    ("integral_product", 1e-12),
    ("anchor", 1e-14),
    ("unitary_invariance", 1e-10),
    ("factorization", 1e-10),
    ("string_anchor", 1e-12),
];

impl Default for Tolerances {
    fn default() -> Self {
        Self { values: DEFAULTS.iter().copied().collect(), overridden: false }
    }
}

impl Tolerances {
    pub const NAMES: &'static [(&'static str, f64)] = DEFAULTS;

    pub fn get(&self, name: &str) -> f64 {
        *self.values.get(name).unwrap_or_else(|| panic!("unknown tolerance {name:?}"))
    }

    pub fn is_overridden(&self) -> bool {
        self.overridden
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut tol = Self::default();
        let text = text.trim();
        if text.is_empty() {
            return Ok(tol);
        }
        if let Ok(all) = text.parse::<f64>() {
            check_positive(ENV_VAR, all)?;
            tol.values.values_mut().for_each(|v| *v = all);
            tol.overridden = true;
            return Ok(tol);
        }
        for item in text.split(',') {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("{ENV_VAR}: expected name=value, got {item:?}")))?;
            let name = name.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Parse(format!("{ENV_VAR}: bad number for {name:?}")))?;
            check_positive(name, value)?;
            match tol.values.get_mut(name) {
                Some(slot) => *slot = value,
                None => return Err(CliError::Parse(format!("{ENV_VAR}: unknown threshold {name:?}"))),
            }
        }
        tol.overridden = true;
        Ok(tol)
    }

    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var(ENV_VAR) {
            Ok(text) => Self::parse(&text),
            Err(_) => Ok(Self::default()),
        }
    }
}

fn check_positive(name: &str, value: f64) -> Result<(), CliError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CliError::Parse(format!("{ENV_VAR}: threshold {name:?} must be positive")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        assert_eq!(Tolerances::parse("").unwrap(), Tolerances::default());
        let all = Tolerances::parse("1e-6").unwrap();
        assert!(all.iter().all(|(_, v)| v == 1e-6));
        let one = Tolerances::parse("anchor = 1e-10, symmetry=1e-9").unwrap();
        assert_eq!(one.get("anchor"), 1e-10);
        assert_eq!(one.get("symmetry"), 1e-9);
        assert_eq!(one.get("reciprocity"), 1e-9);
        assert!(Tolerances::parse("nope=1").is_err());
        assert!(Tolerances::parse("anchor=-1").is_err());
        assert!(Tolerances::parse("0").is_err());
    }
}
