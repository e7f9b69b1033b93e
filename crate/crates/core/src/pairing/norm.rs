//! The Arakelov-Deligne norm of the Weil-Deligne pairing.
//!
//! For degree-0 divisors `D1 = sum n_i P_i`, `D2 = sum n'_j P'_j` with disjoint
//! supports, and the real kernel `g`, the three equivalent evaluations are
//!
//! ```text
//! ad     : 1/2 sum_i [ conj(n_i) g_D2(P_i) + n_i g_conj(D2)(P_i) ]
//! adsym  : 1/2 [ sum_i conj(n_i) g_D2(P_i) + sum_j conj(n'_j) g_D1(P'_j) ]
//! ad3    : sum_{i,j} Re(n_i conj(n'_j)) g(P_i, P'_j)
//! ```
//!
//! and the norm is `exp` of the exponent. Complex powers `G^n` are never
//! formed; every factor is `exp(n g)` with real `g`.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::curve::GreenKernel;
use crate::divisor::{ComplexDivisor, MarkedCurve};
use crate::{Error, GaussianRational, Result};

/// Supports closer than this are treated as intersecting.
pub const DISJOINT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formula {
    Ad,
    AdSym,
    Ad3,
}

impl Formula {
    pub const ALL: [Formula; 3] = [Formula::Ad, Formula::AdSym, Formula::Ad3];

    pub fn name(self) -> &'static str {
        match self {
            Formula::Ad => "ad",
            Formula::AdSym => "adsym",
            Formula::Ad3 => "ad3",
        }
    }
}

impl core::str::FromStr for Formula {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ad" => Ok(Formula::Ad),
            "adsym" => Ok(Formula::AdSym),
            "ad3" => Ok(Formula::Ad3),
            other => Err(Error::Parse(alloc::format!("unknown formula {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingResult {
    pub norm: f64,
    /// `ln norm`.
    pub exponent: f64,
    /// `sum_{i,j} n_i conj(n'_j) g(P_i, P'_j)`; its real part is `exponent`.
    pub hermitian_value: Complex64,
    pub formula: Formula,
}

/// All three exponents and the Hermitian value for one pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormulaExponents {
    pub ad: f64,
    pub adsym: f64,
    pub ad3: f64,
    pub hermitian: Complex64,
}

impl FormulaExponents {
    pub fn get(&self, formula: Formula) -> f64 {
        match formula {
            Formula::Ad => self.ad,
            Formula::AdSym => self.adsym,
            Formula::Ad3 => self.ad3,
        }
    }

    /// Largest pairwise disagreement between the three exponents.
    pub fn max_discrepancy(&self) -> f64 {
        (self.ad - self.adsym).abs().max((self.ad - self.ad3).abs()).max((self.adsym - self.ad3).abs())
    }
}

struct Prepared {
    n1: Vec<Complex64>,
    n2: Vec<Complex64>,
    /// `g(P_i, P'_j)`.
    forward: Vec<Vec<f64>>,
    /// `g(P'_j, P_i)`.
    backward: Vec<Vec<f64>>,
}

fn check_context(mc: &MarkedCurve, d: &ComplexDivisor) -> Result<()> {
    if d.context() == mc {
        Ok(())
    } else {
        Err(Error::MismatchedContext)
    }
}

fn prepare<K: GreenKernel + ?Sized>(kernel: &K, d1: &ComplexDivisor, d2: &ComplexDivisor) -> Result<Prepared> {
    if d1.curve() != kernel.curve() || d2.curve() != kernel.curve() || d1.context() != d2.context() {
        return Err(Error::MismatchedContext);
    }
    if d1.degree() != 0 || d2.degree() != 0 {
        return Err(Error::NonzeroDegree);
    }
    let curve = kernel.curve();
    let (t1, t2) = (d1.terms(), d2.terms());
    for a in &t1 {
        for b in &t2 {
            if curve.distance(a.point, b.point) <= DISJOINT_TOL {
                return Err(Error::NotDisjoint);
            }
        }
    }
    let mut forward = Vec::with_capacity(t1.len());
    let mut backward = Vec::with_capacity(t1.len());
    for a in &t1 {
        let mut f = Vec::with_capacity(t2.len());
        let mut b_row = Vec::with_capacity(t2.len());
        for b in &t2 {
            f.push(kernel.kernel(a.point, b.point)?);
            b_row.push(kernel.kernel(b.point, a.point)?);
        }
        forward.push(f);
        backward.push(b_row);
    }
    Ok(Prepared {
        n1: t1.iter().map(|t| t.coefficient.to_complex()).collect(),
        n2: t2.iter().map(|t| t.coefficient.to_complex()).collect(),
        forward,
        backward,
    })
}

fn exponents(p: &Prepared) -> FormulaExponents {
    // ad: per point of D1, the Green functions of D2 and of conj(D2).
    let mut ad = Complex64::new(0.0, 0.0);
    for (i, ni) in p.n1.iter().enumerate() {
        let g_d2: Complex64 = p.n2.iter().zip(&p.forward[i]).map(|(nj, g)| nj * g).sum();
        let g_d2_bar: Complex64 = p.n2.iter().zip(&p.forward[i]).map(|(nj, g)| nj.conj() * g).sum();
        ad += ni.conj() * g_d2 + ni * g_d2_bar;
    }
    // adsym: Green function of D2 at D1, plus Green function of D1 at D2.
    let mut first = Complex64::new(0.0, 0.0);
    for (i, ni) in p.n1.iter().enumerate() {
        let g_d2: Complex64 = p.n2.iter().zip(&p.forward[i]).map(|(nj, g)| nj * g).sum();
        first += ni.conj() * g_d2;
    }
    let mut second = Complex64::new(0.0, 0.0);
    for (j, nj) in p.n2.iter().enumerate() {
        let g_d1: Complex64 = p.n1.iter().enumerate().map(|(i, ni)| ni * p.backward[i][j]).sum();
        second += nj.conj() * g_d1;
    }
    let mut ad3 = 0.0;
    let mut hermitian = Complex64::new(0.0, 0.0);
    for (i, ni) in p.n1.iter().enumerate() {
        for (j, nj) in p.n2.iter().enumerate() {
            let h = ni * nj.conj();
            ad3 += h.re * p.forward[i][j];
            hermitian += h * p.forward[i][j];
        }
    }
    FormulaExponents { ad: 0.5 * ad.re, adsym: 0.5 * (first + second).re, ad3, hermitian }
}

pub fn pairing_exponents<K: GreenKernel + ?Sized>(
    kernel: &K,
    d1: &ComplexDivisor,
    d2: &ComplexDivisor,
) -> Result<FormulaExponents> {
    Ok(exponents(&prepare(kernel, d1, d2)?))
}

/// `||<1_D1, 1_D2>||` through the requested formula.
pub fn pairing_norm(mc: &MarkedCurve, d1: &ComplexDivisor, d2: &ComplexDivisor, formula: Formula) -> Result<PairingResult> {
    check_context(mc, d1)?;
    check_context(mc, d2)?;
    pairing_norm_with(mc.curve(), d1, d2, formula)
}

pub fn pairing_norm_with<K: GreenKernel + ?Sized>(
    kernel: &K,
    d1: &ComplexDivisor,
    d2: &ComplexDivisor,
    formula: Formula,
) -> Result<PairingResult> {
    let e = pairing_exponents(kernel, d1, d2)?;
    let exponent = e.get(formula);
    Ok(PairingResult { norm: exponent.exp(), exponent, hermitian_value: e.hermitian, formula })
}

/// `sum_{i,j} n_i conj(n'_j) g(Q_i, Q_j)` for degree-0 divisors supported on the marks.
pub fn hermitian_form(mc: &MarkedCurve, d1: &ComplexDivisor, d2: &ComplexDivisor) -> Result<Complex64> {
    check_context(mc, d1)?;
    check_context(mc, d2)?;
    hermitian_form_with(mc.curve(), d1, d2)
}

pub fn hermitian_form_with<K: GreenKernel + ?Sized>(
    kernel: &K,
    d1: &ComplexDivisor,
    d2: &ComplexDivisor,
) -> Result<Complex64> {
    if !d1.is_supported_on_marks() || !d2.is_supported_on_marks() {
        return Err(Error::SupportOffMarks);
    }
    Ok(pairing_exponents(kernel, d1, d2)?.hermitian)
}

/// `|a - b| / max(1, |b|)`: absolute near 1 and below, relative for large norms.
fn mixed_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingResiduals {
    /// `||<aD1, D2>|| vs ||<D1, D2>||^a`, only for real `a`.
    pub real_power: Option<f64>,
    /// `||<aD1, D2>|| vs ||<D1, conj(a) D2>||`.
    pub conjugate_transfer: f64,
}

impl ScalingResiduals {
    pub fn max(&self) -> f64 {
        self.real_power.unwrap_or(0.0).max(self.conjugate_transfer)
    }
}

pub fn check_scaling_laws(
    mc: &MarkedCurve,
    d1: &ComplexDivisor,
    d2: &ComplexDivisor,
    alpha: &GaussianRational,
) -> Result<ScalingResiduals> {
    check_context(mc, d1)?;
    check_context(mc, d2)?;
    let kernel = mc.curve();
    let scaled = pairing_norm_with(kernel, &d1.scale(alpha)?, d2, Formula::Ad3)?.norm;
    let transferred = pairing_norm_with(kernel, d1, &d2.scale(&alpha.conj())?, Formula::Ad3)?.norm;
    let real_power = if alpha.is_real() {
        let base = pairing_norm_with(kernel, d1, d2, Formula::Ad3)?.norm;
        let a = alpha.to_complex().re;
        Some(mixed_residual(scaled, base.powf(a)))
    } else {
        None
    };
    Ok(ScalingResiduals { real_power, conjugate_transfer: mixed_residual(scaled, transferred) })
}

/// `|N(D1 + D2, K) - N(D1, K) N(D2, K)| / N(D1 + D2, K)`.
pub fn check_bimultiplicativity(
    mc: &MarkedCurve,
    d1: &ComplexDivisor,
    d2: &ComplexDivisor,
    k: &ComplexDivisor,
) -> Result<f64> {
    check_context(mc, d1)?;
    check_context(mc, d2)?;
    check_context(mc, k)?;
    let kernel = mc.curve();
    let sum = pairing_norm_with(kernel, &d1.add(d2)?, k, Formula::Ad3)?.norm;
    let a = pairing_norm_with(kernel, d1, k, Formula::Ad3)?.norm;
    let b = pairing_norm_with(kernel, d2, k, Formula::Ad3)?.norm;
    Ok((sum - a * b).abs() / sum)
}

/// `|N(D1, D2) - N(D2, D1)| / N(D1, D2)`.
pub fn check_symmetry(mc: &MarkedCurve, d1: &ComplexDivisor, d2: &ComplexDivisor) -> Result<f64> {
    check_context(mc, d1)?;
    check_context(mc, d2)?;
    let a = pairing_norm_with(mc.curve(), d1, d2, Formula::Ad3)?.norm;
    let b = pairing_norm_with(mc.curve(), d2, d1, Formula::Ad3)?.norm;
    Ok((a - b).abs() / a)
}

/// Exponent of `<D, D>` with the divergent diagonal terms `i = j` omitted:
/// `sum_{i != j} Re(n_i conj(n_j)) g(P_i, P_j)`.
pub fn offdiagonal_self_pairing<K: GreenKernel + ?Sized>(kernel: &K, d: &ComplexDivisor) -> Result<f64> {
    if d.curve() != kernel.curve() {
        return Err(Error::MismatchedContext);
    }
    if d.degree() != 0 {
        return Err(Error::NonzeroDegree);
    }
    let terms = d.terms();
    let mut acc = 0.0;
    for (i, a) in terms.iter().enumerate() {
        for (j, b) in terms.iter().enumerate() {
            if i != j {
                let w = (a.coefficient.to_complex() * b.coefficient.to_complex().conj()).re;
                acc += w * kernel.kernel(a.point, b.point)?;
            }
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveModel, CurvePoint, ShiftedKernel};
    use alloc::vec;

    fn sphere_marked() -> MarkedCurve {
        let marks = [1.0, -1.0, 2.0, -2.0].map(CurvePoint::real).to_vec();
        MarkedCurve::new(CurveModel::Sphere, marks).unwrap()
    }

    fn div(mc: &MarkedCurve, s: &str) -> ComplexDivisor {
        ComplexDivisor::parse(mc, s).unwrap()
    }

    #[test]
    fn closed_form_anchor() {
        let mc = sphere_marked();
        let (d1, d2) = (div(&mc, "1@Q1,-1@Q2"), div(&mc, "1@Q3,-1@Q4"));
        for f in Formula::ALL {
            let r = pairing_norm(&mc, &d1, &d2, f).unwrap();
            assert!((r.norm - 1.0 / 9.0).abs() < 1e-15, "{f:?}: {}", r.norm);
            assert!((r.exponent + 2.0 * 3f64.ln()).abs() < 1e-15);
        }
        let d1x2 = div(&mc, "2@Q1,-2@Q2");
        let r = pairing_norm(&mc, &d1x2, &d2, Formula::Ad).unwrap();
        assert!((r.norm - 1.0 / 81.0).abs() < 1e-16);
    }

    #[test]
    fn imaginary_against_real_has_unit_norm() {
        let mc = sphere_marked();
        let d1 = div(&mc, "i@Q1,-i@Q2");
        let d2 = div(&mc, "1@Q3,-1@Q4");
        for f in Formula::ALL {
            assert!((pairing_norm(&mc, &d1, &d2, f).unwrap().norm - 1.0).abs() < 1e-15);
        }
        let h = hermitian_form(&mc, &d1, &d2).unwrap();
        assert!(h.re.abs() < 1e-15 && (h.im + 2.0 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn hermitian_form_is_sesquilinear() {
        let mc = sphere_marked();
        let d1 = div(&mc, "1/2+i@Q1,-1/2-i@Q2");
        let d2 = div(&mc, "2-i@Q3,-2+i@Q4");
        let i = GaussianRational::i();
        let h = hermitian_form(&mc, &d1, &d2).unwrap();
        let h_i1 = hermitian_form(&mc, &d1.scale(&i).unwrap(), &d2).unwrap();
        let h_i2 = hermitian_form(&mc, &d1, &d2.scale(&i).unwrap()).unwrap();
        let ic = Complex64::i();
        assert!((h_i1 - ic * h).norm() < 1e-14);
        assert!((h_i2 + ic * h).norm() < 1e-14);
        let h21 = hermitian_form(&mc, &d2, &d1).unwrap();
        assert!((h21 - h.conj()).norm() < 1e-14);
    }

    #[test]
    fn errors() {
        let mc = sphere_marked();
        let d1 = div(&mc, "1@Q1,-1@Q2");
        assert_eq!(pairing_norm(&mc, &d1, &div(&mc, "1@Q2,-1@Q3"), Formula::Ad), Err(Error::NotDisjoint));
        assert_eq!(pairing_norm(&mc, &d1, &div(&mc, "1@Q3"), Formula::Ad), Err(Error::NonzeroDegree));
        assert_eq!(pairing_norm(&mc, &div(&mc, "1@Q3"), &d1, Formula::Ad), Err(Error::NonzeroDegree));
        assert_eq!(
            hermitian_form(&mc, &d1, &div(&mc, "1@5,-1@6")),
            Err(Error::SupportOffMarks)
        );
        let near = div(&mc, "1@1.00000001,-1@7");
        assert_eq!(pairing_norm(&mc, &d1, &near, Formula::Ad), Err(Error::NotDisjoint));
        let other = MarkedCurve::unmarked(CurveModel::Sphere);
        assert_eq!(pairing_norm(&other, &d1, &d1, Formula::Ad), Err(Error::MismatchedContext));
    }

    #[test]
    fn infinity_terms_are_consistent() {
        // <z, (z-1)/(z-2)>: D1 = 0 - inf, D2 = 1 - 2.  G_D2(0)/G_D2(inf) = 1/2.
        let mc = MarkedCurve::unmarked(CurveModel::Sphere);
        let d1 = div(&mc, "1@0,-1@inf");
        let d2 = div(&mc, "1@1,-1@2");
        let r = pairing_norm(&mc, &d1, &d2, Formula::Ad3).unwrap();
        assert!((r.norm - 0.5).abs() < 1e-15);
        let e = pairing_exponents(&CurveModel::Sphere, &d1, &d2).unwrap();
        assert!(e.max_discrepancy() < 1e-15);
    }

    #[test]
    fn kernel_shift_does_not_matter() {
        let t = CurveModel::torus(Complex64::new(0.3, 1.1)).unwrap();
        let mc = MarkedCurve::new(
            t,
            vec![
                Complex64::new(0.1, 0.1).into(),
                Complex64::new(0.5, 0.2).into(),
                Complex64::new(0.2, 0.7).into(),
                Complex64::new(0.8, 0.9).into(),
            ],
        )
        .unwrap();
        let d1 = div(&mc, "1/2+i@Q1,-1/2-i@Q2");
        let d2 = div(&mc, "3@Q3,-1@Q4,-2@0.6+0.5i");
        let base = pairing_norm(&mc, &d1, &d2, Formula::Ad).unwrap().norm;
        for c in [-5.0, -1.0, 0.7, 5.0] {
            let shifted = pairing_norm_with(&ShiftedKernel::new(&t, c), &d1, &d2, Formula::Ad).unwrap().norm;
            assert!((shifted - base).abs() < 1e-10 * base);
        }
    }

    #[test]
    fn scaling_examples() {
        let mc = sphere_marked();
        let (d1, d2) = (div(&mc, "1@Q1,-1@Q2"), div(&mc, "1@Q3,-1@Q4"));
        let r = check_scaling_laws(&mc, &d1, &d2, &GaussianRational::one()).unwrap();
        assert_eq!(r.real_power, Some(0.0));
        assert_eq!(r.conjugate_transfer, 0.0);
        let r = check_scaling_laws(&mc, &d1, &d2, &GaussianRational::from_integer(2)).unwrap();
        assert!(r.real_power.unwrap() < 1e-14);
        let r = check_scaling_laws(&mc, &d1, &d2, &GaussianRational::from_parts(1, 1, 1, 1)).unwrap();
        assert!(r.real_power.is_none() && r.conjugate_transfer < 1e-10);
    }

    #[test]
    fn bimultiplicativity_and_symmetry() {
        let mc = sphere_marked();
        let (d1, k) = (div(&mc, "1@Q1,-1@Q2"), div(&mc, "1@Q3,-1@Q4"));
        let empty = ComplexDivisor::zero(&mc);
        assert_eq!(check_bimultiplicativity(&mc, &d1, &empty, &k).unwrap(), 0.0);
        let d2 = div(&mc, "2+i@Q1,-2-i@Q2");
        assert!(check_bimultiplicativity(&mc, &d1, &d2, &k).unwrap() < 1e-14);
        assert!(check_symmetry(&mc, &d2, &k).unwrap() < 1e-14);
    }
}
