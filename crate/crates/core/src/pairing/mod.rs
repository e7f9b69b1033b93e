//! The Weil symbol with reciprocity, and the Arakelov-Deligne pairing norm.
//!
//! The pairing line itself is never given a basis; only its norm and the
//! rescaling relations (through [`weil_symbol`]) are computed.

mod norm;
mod weil;

pub use norm::{
    check_bimultiplicativity, check_scaling_laws, check_symmetry, hermitian_form, hermitian_form_with,
    offdiagonal_self_pairing, pairing_exponents, pairing_norm, pairing_norm_with, Formula, FormulaExponents,
    PairingResult, ScalingResiduals, DISJOINT_TOL,
};
pub use weil::{check_weil_reciprocity, weil_symbol, RationalFunctionData, ReciprocityCheck, RECIPROCITY_TOL};
