//! The property suite run by `divpair selftest`.
//!
//! Every property draws its instances from its own seeded stream, so results do
//! not depend on which other properties run. A property passes when no case
//! errors and the largest residual is within its threshold; exact properties
//! have threshold 0.

use std::f64::consts::PI;

use divpair_core::curve::{self, lattice_distance, theta1, CurveModel, CurvePoint, ShiftedKernel};
use divpair_core::divisor::class_invariant;
use divpair_core::mvf::{self, glueing_data, multiplicator, normalize_expansion};
use divpair_core::pairing::{
    check_bimultiplicativity, check_scaling_laws, check_symmetry, check_weil_reciprocity, hermitian_form,
    offdiagonal_self_pairing, pairing_exponents, pairing_norm, pairing_norm_with, Formula,
};
use divpair_core::strings::{momentum_divisors, string_pairing_factor, MomentumConfig};
use divpair_core::{Complex64, ComplexDivisor, GaussianRational, MarkedCurve};
use rand::Rng as _;

use crate::gen::{self, CurveKind, Rng};
use crate::tolerance::Tolerances;

/// Fraction of `--cases` a property runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Share {
    Full,
    Fifth,
    Tenth,
    Once,
}

impl Share {
    pub fn cases(self, cases: usize) -> usize {
        match self {
            Share::Full => cases,
            Share::Fifth => (cases / 5).max(1),
            Share::Tenth => (cases / 10).max(1),
            Share::Once => 1,
        }
    }
}

type Check = fn(&mut Rng, usize) -> Result<f64, String>;

pub struct Property {
    pub module: &'static str,
    pub name: &'static str,
    /// Threshold name in [`Tolerances`]; `None` for exact properties.
    pub tolerance: Option<&'static str>,
    pub share: Share,
    check: Check,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub module: &'static str,
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub errors: usize,
    pub first_error: Option<String>,
    pub passed: bool,
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn exact(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A point of the curve, occasionally infinity on the sphere.
fn random_point(rng: &mut Rng, curve: &CurveModel) -> CurvePoint {
    if curve.genus() == 0 && rng.gen_bool(0.1) {
        return CurvePoint::Infinity;
    }
    let mut taken = Vec::new();
    gen::fresh_point(rng, curve, &mut taken).into()
}

// ---- curve ----

fn kernel_symmetry(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let curve = gen::curve(rng, CurveKind::alternate(case));
    let p = random_point(rng, &curve);
    let mut q = random_point(rng, &curve);
    while curve.distance(p, q) < gen::MIN_SEPARATION {
        q = random_point(rng, &curve);
    }
    Ok((curve.green_kernel(p, q).map_err(err)? - curve.green_kernel(q, p).map_err(err)?).abs())
}

fn torus_periodicity(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let curve = gen::curve(rng, CurveKind::Torus);
    let tau = curve.tau().expect("torus");
    let mut taken = Vec::new();
    let p = gen::fresh_point(rng, &curve, &mut taken);
    let q = gen::fresh_point(rng, &curve, &mut taken);
    let base = curve.green_kernel(p.into(), q.into()).map_err(err)?;
    let mut worst: f64 = 0.0;
    for m in -2..=2 {
        for n in -2..=2 {
            let shifted = p + tau * n as f64 + m as f64;
            worst = worst.max((curve.green_kernel(shifted.into(), q.into()).map_err(err)? - base).abs());
        }
    }
    Ok(worst)
}

fn harmonicity(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let h = 1e-3;
    let (inst, z) = loop {
        let inst = gen::instance(rng, CurveKind::alternate(case), 1, true, true);
        let d = &inst.divisors[0];
        let terms = d.terms();
        let mut taken: Vec<CurvePoint> = terms.iter().map(|t| t.point).collect();
        let z = gen::fresh_point(rng, inst.mc.curve(), &mut taken);
        // The five-point stencil errs by about sum |n| h^2 / r^4; sample where that
        // is well below the threshold.
        let stencil_error: f64 = terms
            .iter()
            .filter(|t| !t.point.is_infinity())
            .map(|t| t.coefficient.to_complex().norm() * h * h / inst.mc.curve().distance(z.into(), t.point).powi(4))
            .sum();
        if stencil_error <= 1e-5 {
            break (inst, z);
        }
    };
    let d = &inst.divisors[0];
    let f = |w: Complex64| curve::green_divisor(inst.mc.curve(), d, w.into()).map(|v| v.re);
    let lap = (f(z + h).map_err(err)? + f(z - h).map_err(err)? + f(z + c(0.0, h)).map_err(err)?
        + f(z - c(0.0, h)).map_err(err)?
        - 4.0 * f(z).map_err(err)?)
        / (h * h);
    Ok(lap.abs())
}

fn mobius_invariance(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let n = rng.gen_range(2..=6);
    let mc = gen::marked_curve(rng, CurveModel::Sphere, n);
    let all: Vec<usize> = (0..n).collect();
    let d = gen::degree_zero_on_marks(rng, &mc, &all, false);
    let coefficients: Vec<GaussianRational> = (0..n).map(|i| d.coefficient_at_mark(i).expect("in range")).collect();
    let mut taken = mc.marks().to_vec();
    let z = gen::fresh_point(rng, mc.curve(), &mut taken);
    let base = curve::green_divisor(mc.curve(), &d, z.into()).map_err(err)?;
    let shift = c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
    let scale = Complex64::from_polar(rng.gen_range(0.2..5.0), rng.gen_range(0.0..2.0 * PI));
    let mut worst: f64 = 0.0;
    for map in [|w: Complex64, s: Complex64, _: Complex64| w + s, |w: Complex64, _: Complex64, k: Complex64| w * k] {
        let moved: Vec<CurvePoint> =
            mc.marks().iter().map(|p| map(p.coordinate().expect("affine"), shift, scale).into()).collect();
        let mc2 = MarkedCurve::new(CurveModel::Sphere, moved).map_err(err)?;
        let d2 = ComplexDivisor::on_marks(&mc2, &coefficients).map_err(err)?;
        let value = curve::green_divisor(mc2.curve(), &d2, map(z, shift, scale).into()).map_err(err)?;
        worst = worst.max((value - base).norm());
    }
    Ok(worst)
}

fn green_linearity(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let inst = gen::instance(rng, CurveKind::alternate(case), 2, false, true);
    let (d1, d2) = (&inst.divisors[0], &inst.divisors[1]);
    let mut taken: Vec<CurvePoint> = d1.terms().iter().chain(d2.terms().iter()).map(|t| t.point).collect();
    let z: CurvePoint = gen::fresh_point(rng, inst.mc.curve(), &mut taken).into();
    let k = inst.mc.curve();
    let sum = curve::green_divisor(k, &d1.add(d2).map_err(err)?, z).map_err(err)?;
    let parts = curve::green_divisor(k, d1, z).map_err(err)? + curve::green_divisor(k, d2, z).map_err(err)?;
    Ok((sum - parts).norm())
}

fn theta_quasi_periodicity(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let tau = gen::tau(rng);
    let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let t = theta1(z, tau).map_err(err)?;
    let r1 = (theta1(z + 1.0, tau).map_err(err)? + t).norm() / t.norm();
    let factor = (c(0.0, -PI) * tau - c(0.0, 2.0 * PI) * z).exp();
    let expected = -factor * t;
    let r2 = (theta1(z + tau, tau).map_err(err)? - expected).norm() / expected.norm();
    Ok(r1.max(r2))
}

/// `2 sum_{n>=0} (-1)^n exp(i pi tau (n + 1/2)^2) sin((2n + 1) pi z)`, 200 terms.
/// The sine is expanded so every term is a single exponential that underflows
/// cleanly instead of producing `inf * 0`.
pub fn theta1_direct_series(z: Complex64, tau: Complex64) -> Complex64 {
    let i_pi = c(0.0, PI);
    let mut sum = c(0.0, 0.0);
    for n in 0..200 {
        let k = n as f64 + 0.5;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let base = i_pi * tau * (k * k);
        let plus = (base + i_pi * z * (2.0 * k)).exp();
        let minus = (base - i_pi * z * (2.0 * k)).exp();
        sum += sign * (plus - minus);
    }
    // 2 * sum / (2i)
    sum / c(0.0, 1.0)
}

fn theta_series(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0));
    let z = loop {
        let z = tau * rng.gen_range(-0.5..0.5) + rng.gen_range(-0.5..0.5);
        if lattice_distance(z, tau) > 0.05 {
            break z;
        }
    };
    let oracle = theta1_direct_series(z, tau);
    Ok((theta1(z, tau).map_err(err)? - oracle).norm() / oracle.norm())
}

// ---- divisor ----

fn random_context(rng: &mut Rng, case: usize) -> (MarkedCurve, Vec<CurvePoint>) {
    let curve = gen::curve(rng, CurveKind::alternate(case));
    let n = rng.gen_range(1..=6);
    let mc = gen::marked_curve(rng, curve, n);
    let taken = mc.marks().to_vec();
    (mc, taken)
}

fn group_laws(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, mut taken) = random_context(rng, case);
    let a = gen::any_divisor(rng, &mc, &mut taken);
    let b = gen::any_divisor(rng, &mc, &mut taken);
    let d = gen::any_divisor(rng, &mc, &mut taken);
    let zero = ComplexDivisor::zero(&mc);
    let assoc = a.add(&b).and_then(|ab| ab.add(&d)).map_err(err)? == b.add(&d).and_then(|bd| a.add(&bd)).map_err(err)?;
    let comm = a.add(&b).map_err(err)? == b.add(&a).map_err(err)?;
    let ident = a.add(&zero).map_err(err)? == a;
    let inv = a.add(&a.neg()).map_err(err)?.is_zero() && a.sub(&a).map_err(err)?.is_zero();
    Ok(exact(assoc && comm && ident && inv))
}

fn scale_multiplicative(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, mut taken) = random_context(rng, case);
    let d = gen::any_divisor(rng, &mc, &mut taken);
    let (alpha, beta) = if d.is_supported_on_marks() {
        (gen::gaussian(rng), gen::gaussian(rng))
    } else {
        (GaussianRational::from_integer(rng.gen_range(-4..=4)), GaussianRational::from_integer(rng.gen_range(-4..=4)))
    };
    let lhs = d.scale(&(&alpha * &beta));
    let rhs = d.scale(&beta).and_then(|b| b.scale(&alpha));
    match (lhs, rhs) {
        (Ok(l), Ok(r)) => Ok(exact(l == r)),
        // Intermediate not constructible (degree leaves Z): nothing to compare.
        (Err(_), _) | (_, Err(_)) => Ok(0.0),
    }
}

fn degree_homomorphism(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, mut taken) = random_context(rng, case);
    let a = gen::any_divisor(rng, &mc, &mut taken);
    let b = gen::any_divisor(rng, &mc, &mut taken);
    Ok(exact(a.add(&b).map_err(err)?.degree() == a.degree() + b.degree()))
}

fn class_additivity(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, mut taken) = random_context(rng, case);
    let a = gen::any_divisor(rng, &mc, &mut taken);
    let b = gen::any_divisor(rng, &mc, &mut taken);
    let sum = class_invariant(&mc, &a.add(&b).map_err(err)?).map_err(err)?;
    let combined = class_invariant(&mc, &a).map_err(err)?.combine(&class_invariant(&mc, &b).map_err(err)?);
    if sum.degree != combined.degree {
        return Ok(f64::INFINITY);
    }
    Ok(match (sum.jacobian, combined.jacobian, sum.tau) {
        (Some(x), Some(y), Some(tau)) => lattice_distance(x - y, tau),
        (None, None, _) => 0.0,
        _ => f64::INFINITY,
    })
}

// ---- mvf ----

fn ord_additivity(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let a = gen::local_expansion(rng);
    let b = gen::local_expansion(rng);
    Ok(exact(a.multiply(&b).ord() == a.ord() + b.ord()))
}

fn normalization_idempotence(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let e = gen::local_expansion(rng);
    let again = normalize_expansion(e.exponent(), e.leading_index(), e.coeffs().to_vec()).map_err(err)?;
    let k = rng.gen_range(-3..=3);
    let shifted = normalize_expansion(e.exponent() + k as f64, e.leading_index() - k, e.coeffs().to_vec()).map_err(err)?;
    Ok(exact(again == e && shifted == e))
}

fn residue_theorem(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let w = gen::sphere_witness(rng);
    let mut ok = w.order_sum().is_zero();
    // Infinity cannot be marked, so the divisor exists only when its order there is an integer.
    let at_infinity = w.orders().into_iter().find(|(p, _)| p.is_infinity());
    if at_infinity.is_none_or(|(_, n)| n.is_integer()) {
        let mc = MarkedCurve::new(CurveModel::Sphere, w.factors().iter().map(|(p, _)| (*p).into()).collect())
            .map_err(err)?;
        ok &= w.divisor(&mc).map_err(err)?.degree() == 0;
    }
    Ok(exact(ok))
}

fn principal_subgroup(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, mut taken) = match CurveKind::alternate(case) {
        CurveKind::Sphere => random_context(rng, case),
        CurveKind::Torus => {
            let curve = gen::curve(rng, CurveKind::Torus);
            let n = rng.gen_range(2..=4);
            let mc = gen::marked_curve(rng, curve, n);
            let taken = mc.marks().to_vec();
            (mc, taken)
        }
    };
    let (d1, d2) = match mc.curve() {
        CurveModel::Sphere => {
            let all: Vec<usize> = (0..mc.mark_count()).collect();
            (gen::degree_zero_on_marks(rng, &mc, &all, false), gen::degree_zero_on_marks(rng, &mc, &all, false))
        }
        CurveModel::Torus(_) => (
            gen::principal_torus_divisor(rng, &mc, &mut taken),
            gen::principal_torus_divisor(rng, &mc, &mut taken),
        ),
    };
    let p1 = mvf::is_principal(&mc, &d1).map_err(err)?.principal;
    let p2 = mvf::is_principal(&mc, &d2).map_err(err)?.principal;
    let p12 = mvf::is_principal(&mc, &d1.add(&d2).map_err(err)?).map_err(err)?.principal;
    // Generated divisors are principal by construction, so all three must hold.
    Ok(exact(p1 && p2 && p12))
}

fn multiplicator_homomorphism(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, mut taken) = random_context(rng, case);
    let a = gen::any_divisor(rng, &mc, &mut taken);
    let b = gen::any_divisor(rng, &mc, &mut taken);
    let ab = a.add(&b).map_err(err)?;
    let mut worst: f64 = 0.0;
    for i in 0..mc.mark_count() {
        let lhs = multiplicator(&mc, &ab, i).map_err(err)?;
        let rhs = multiplicator(&mc, &a, i).map_err(err)? * multiplicator(&mc, &b, i).map_err(err)?;
        worst = worst.max((lhs - rhs).norm() / lhs.norm());
    }
    Ok(worst)
}

fn integral_multiplicators(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, mut taken) = random_context(rng, case);
    let coefficients: Vec<GaussianRational> =
        (0..mc.mark_count()).map(|_| GaussianRational::from_integer(rng.gen_range(-4..=4))).collect();
    let mut d = ComplexDivisor::on_marks(&mc, &coefficients).map_err(err)?;
    d = d.add(&gen::integral_dipole(rng, &mc, &mut taken)).map_err(err)?;
    let data = glueing_data(&mc, &d).map_err(err)?;
    let one = c(1.0, 0.0);
    Ok(exact(data.multiplicators.iter().all(|&m| m == one) && data.boundary_multiplicator == one))
}

/// Class equality against principality, and both against the contour oracle.
pub fn class_principal_case(rng: &mut Rng, case: usize) -> Result<ClassCase, String> {
    let same = case.is_multiple_of(2);
    let (mc, d1, d2) = gen::class_pair(rng, same);
    let same_class = class_invariant(&mc, &d1).map_err(err)?.same_class(&class_invariant(&mc, &d2).map_err(err)?);
    let diff = d1.sub(&d2).map_err(err)?;
    let principality = mvf::is_principal(&mc, &diff).map_err(err)?;
    let cert = principality.certificate.ok_or("no monodromy certificate")?;
    Ok(ClassCase {
        constructed_same: same,
        same_class,
        principal: principality.principal,
        oracle_trivial: cert.is_trivial(),
        oracle_defect: cert.a_defect.max(cert.b_defect),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCase {
    pub constructed_same: bool,
    pub same_class: bool,
    pub principal: bool,
    pub oracle_trivial: bool,
    /// Distance of the corrected periods to `2 pi i Z`.
    pub oracle_defect: f64,
}

impl ClassCase {
    pub fn consistent(&self) -> bool {
        self.same_class == self.principal && self.principal == self.oracle_trivial && self.same_class == self.constructed_same
    }
}

fn class_principal(rng: &mut Rng, case: usize) -> Result<f64, String> {
    Ok(exact(class_principal_case(rng, case)?.consistent()))
}

fn oracle_periods(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let r = class_principal_case(rng, 2 * case)?;
    Ok(r.oracle_defect)
}

// ---- pairing ----

fn formula_equivalence(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, d1, d2) = gen::pair(rng, CurveKind::alternate(case), true);
    Ok(pairing_exponents(mc.curve(), &d1, &d2).map_err(err)?.max_discrepancy())
}

fn kernel_shift(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, d1, d2) = gen::pair(rng, CurveKind::alternate(case), true);
    let base = pairing_norm(&mc, &d1, &d2, Formula::Ad).map_err(err)?.norm;
    let mut worst: f64 = 0.0;
    for shift in [-5.0, -1.0, 0.7, 5.0] {
        let kernel = ShiftedKernel::new(mc.curve(), shift);
        for f in Formula::ALL {
            worst = worst.max(rel(pairing_norm_with(&kernel, &d1, &d2, f).map_err(err)?.norm, base));
        }
    }
    Ok(worst)
}

fn reciprocity_sphere(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let (f, g) = gen::sphere_function_pair(rng);
    Ok(check_weil_reciprocity(&f, &g).map_err(err)?.residual)
}

fn reciprocity_torus(rng: &mut Rng, _: usize) -> Result<f64, String> {
    let (f, g) = gen::torus_function_pair(rng);
    Ok(check_weil_reciprocity(&f, &g).map_err(err)?.residual)
}

fn symmetry(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, d1, d2) = gen::pair(rng, CurveKind::alternate(case), true);
    check_symmetry(&mc, &d1, &d2).map_err(err)
}

fn bimultiplicativity(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let inst = gen::instance(rng, CurveKind::alternate(case), 3, false, true);
    let d = &inst.divisors;
    check_bimultiplicativity(&inst.mc, &d[0], &d[1], &d[2]).map_err(err)
}

fn scaling_real(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, d1, d2) = gen::pair(rng, CurveKind::alternate(case), false);
    let alpha = [GaussianRational::from_integer(-3), GaussianRational::ratio(1, 2), GaussianRational::from_integer(2)]
        [case % 3]
        .clone();
    let r = check_scaling_laws(&mc, &d1, &d2, &alpha).map_err(err)?;
    Ok(r.max())
}

fn scaling_complex(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, d1, d2) = gen::pair(rng, CurveKind::alternate(case), false);
    let alpha = [GaussianRational::i(), GaussianRational::from_parts(1, 1, 1, 1), GaussianRational::from_parts(2, 1, -3, 1)]
        [case % 3]
        .clone();
    Ok(check_scaling_laws(&mc, &d1, &d2, &alpha).map_err(err)?.conjugate_transfer)
}

fn norm_positive(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, d1, d2) = gen::pair(rng, CurveKind::alternate(case), true);
    let ok = Formula::ALL.iter().all(|&f| {
        pairing_norm(&mc, &d1, &d2, f).map(|r| r.norm.is_finite() && r.norm > 0.0).unwrap_or(false)
    });
    Ok(exact(ok))
}

fn hermitian_consistency(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, d1, d2) = gen::pair(rng, CurveKind::alternate(case), false);
    let norm = pairing_norm(&mc, &d1, &d2, Formula::Ad).map_err(err)?.norm;
    let h = hermitian_form(&mc, &d1, &d2).map_err(err)?;
    Ok(rel(norm, h.re.exp()))
}

fn sesquilinearity(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let inst = gen::instance(rng, CurveKind::alternate(case), 3, false, false);
    let (mc, d) = (&inst.mc, &inst.divisors);
    let (a, b) = (gen::gaussian(rng), gen::gaussian(rng));
    let h = |x: &ComplexDivisor, y: &ComplexDivisor| hermitian_form(mc, x, y).map_err(err);
    let combo = d[0].scale(&a).and_then(|x| x.add(&d[1].scale(&b)?)).map_err(err)?;
    let (ac, bc) = (a.to_complex(), b.to_complex());
    let h02 = h(&d[0], &d[2])?;
    let h12 = h(&d[1], &d[2])?;
    let left = h(&combo, &d[2])?;
    let right = h(&d[2], &combo)?;
    let scale = 1.0f64.max(h02.norm()).max(h12.norm());
    let r1 = (left - (ac * h02 + bc * h12)).norm() / scale;
    let r2 = (right - (ac.conj() * h02.conj() + bc.conj() * h12.conj())).norm() / scale;
    let r3 = (h02 - h(&d[2], &d[0])?.conj()).norm();
    Ok(r1.max(r2).max(r3))
}

fn integral_product(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let kind = CurveKind::alternate(case);
    let curve = gen::curve(rng, kind);
    let mc = MarkedCurve::unmarked(curve);
    let mut taken = Vec::new();
    let d1 = gen::integral_dipole(rng, &mc, &mut taken).add(&gen::integral_dipole(rng, &mc, &mut taken)).map_err(err)?;
    let d2 = gen::integral_dipole(rng, &mc, &mut taken);
    let norm = pairing_norm(&mc, &d1, &d2, Formula::Ad3).map_err(err)?.norm;
    let mut product = 1.0;
    for a in d1.terms() {
        for b in d2.terms() {
            let g = curve.green_kernel(a.point, b.point).map_err(err)?;
            let n = a.coefficient.to_i64().ok_or("non-integral")? * b.coefficient.to_i64().ok_or("non-integral")?;
            product *= g.exp().powi(n as i32);
        }
    }
    Ok(rel(norm, product))
}

fn closed_form_anchor(_: &mut Rng, _: usize) -> Result<f64, String> {
    let (mc, d1, d2) = anchor_instance();
    let mut worst: f64 = 0.0;
    for f in Formula::ALL {
        worst = worst.max((pairing_norm(&mc, &d1, &d2, f).map_err(err)?.norm - 1.0 / 9.0).abs());
    }
    Ok(worst)
}

/// Sphere, `D1 = 1@1 - 1@-1`, `D2 = 1@2 - 1@-2`.
pub fn anchor_instance() -> (MarkedCurve, ComplexDivisor, ComplexDivisor) {
    let mc = MarkedCurve::unmarked(CurveModel::Sphere);
    let d1 = ComplexDivisor::parse(&mc, "1@1,-1@-1").expect("valid literal");
    let d2 = ComplexDivisor::parse(&mc, "1@2,-1@-2").expect("valid literal");
    (mc, d1, d2)
}

// ---- strings ----

fn random_string_setup(rng: &mut Rng, case: usize) -> (MarkedCurve, MomentumConfig) {
    let n = rng.gen_range(2..=6);
    let curve = gen::curve(rng, CurveKind::alternate(case));
    (gen::marked_curve(rng, curve, n), gen::on_shell_config(rng, n))
}

fn unitary_invariance(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, cfg) = random_string_setup(rng, case);
    let u = gen::unitary(rng);
    let rotated = MomentumConfig::new(cfg.momenta().iter().map(|p| gen::apply(&u, p)).collect()).map_err(err)?;
    let a = string_pairing_factor(&mc, &cfg).map_err(err)?.factor;
    let b = string_pairing_factor(&mc, &rotated).map_err(err)?.factor;
    Ok(rel(b, a))
}

fn factorization(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, cfg) = random_string_setup(rng, case);
    let factor = string_pairing_factor(&mc, &cfg).map_err(err)?.factor;
    let mut exponent = 0.0;
    for d in momentum_divisors(&mc, &cfg).map_err(err)? {
        exponent += offdiagonal_self_pairing(mc.curve(), &d).map_err(err)?;
    }
    Ok(rel(exponent.exp(), factor))
}

fn momentum_degree(rng: &mut Rng, case: usize) -> Result<f64, String> {
    let (mc, cfg) = random_string_setup(rng, case);
    let ds = momentum_divisors(&mc, &cfg).map_err(err)?;
    Ok(exact(ds.iter().all(|d| d.degree() == 0 && d.marked_degree().is_zero())))
}

/// Two antipodal momenta at sphere marks `0` and `3`.
pub fn string_anchor_instance() -> (MarkedCurve, MomentumConfig) {
    let mc = MarkedCurve::new(CurveModel::Sphere, vec![CurvePoint::real(0.0), CurvePoint::real(3.0)]).expect("distinct");
    let mut p = [c(0.0, 0.0); divpair_core::strings::DIM];
    p[0] = c(1.0, 0.0);
    let q = p.map(|x| -x);
    (mc, MomentumConfig::new(vec![p, q]).expect("on shell"))
}

fn string_anchor(_: &mut Rng, _: usize) -> Result<f64, String> {
    let (mc, cfg) = string_anchor_instance();
    Ok((string_pairing_factor(&mc, &cfg).map_err(err)?.factor - 1.0 / 9.0).abs())
}

macro_rules! prop {
    ($module:literal, $name:literal, $tol:expr, $share:ident, $check:expr) => {
        Property { module: $module, name: $name, tolerance: $tol, share: Share::$share, check: $check }
    };
}

pub const PROPERTIES: &[Property] = &[
    prop!("curve", "kernel_symmetry", Some("kernel_symmetry"), Full, kernel_symmetry),
    prop!("curve", "torus_periodicity", Some("torus_periodicity"), Full, torus_periodicity),
    prop!("curve", "harmonicity", Some("harmonicity"), Full, harmonicity),
    prop!("curve", "mobius_invariance", Some("mobius_invariance"), Full, mobius_invariance),
    prop!("curve", "green_linearity", Some("green_linearity"), Full, green_linearity),
    prop!("curve", "theta_quasi_periodicity", Some("theta_quasi_periodicity"), Full, theta_quasi_periodicity),
    prop!("curve", "theta_series", Some("theta_series"), Fifth, theta_series),
    prop!("divisor", "group_laws", None, Full, group_laws),
    prop!("divisor", "scale_multiplicative", None, Full, scale_multiplicative),
    prop!("divisor", "degree_homomorphism", None, Full, degree_homomorphism),
    prop!("divisor", "class_additivity", Some("class_additivity"), Full, class_additivity),
    prop!("mvf", "ord_additivity", None, Full, ord_additivity),
    prop!("mvf", "normalization_idempotence", None, Full, normalization_idempotence),
    prop!("mvf", "residue_theorem", None, Full, residue_theorem),
    prop!("mvf", "principal_subgroup", None, Tenth, principal_subgroup),
    prop!("mvf", "multiplicator_homomorphism", Some("multiplicator_homomorphism"), Full, multiplicator_homomorphism),
    prop!("mvf", "integral_multiplicators", None, Full, integral_multiplicators),
    prop!("mvf", "class_principal", None, Fifth, class_principal),
    prop!("mvf", "oracle_periods", Some("monodromy_period"), Tenth, oracle_periods),
    prop!("pairing", "formula_equivalence", Some("formula_equivalence"), Full, formula_equivalence),
    prop!("pairing", "kernel_shift", Some("kernel_shift"), Full, kernel_shift),
    prop!("pairing", "reciprocity_sphere", Some("reciprocity"), Full, reciprocity_sphere),
    prop!("pairing", "reciprocity_torus", Some("reciprocity"), Fifth, reciprocity_torus),
    prop!("pairing", "symmetry", Some("symmetry"), Full, symmetry),
    prop!("pairing", "bimultiplicativity", Some("bimultiplicativity"), Full, bimultiplicativity),
    prop!("pairing", "scaling_real", Some("scaling"), Full, scaling_real),
    prop!("pairing", "scaling_complex", Some("scaling"), Full, scaling_complex),
    prop!("pairing", "norm_positive", None, Full, norm_positive),
    prop!("pairing", "hermitian_consistency", Some("hermitian_consistency"), Full, hermitian_consistency),
    prop!("pairing", "sesquilinearity", Some("sesquilinearity"), Full, sesquilinearity),
    prop!("pairing", "integral_product", Some("integral_product"), Full, integral_product),
    prop!("pairing", "closed_form_anchor", Some("anchor"), Once, closed_form_anchor),
    prop!("strings", "unitary_invariance", Some("unitary_invariance"), Tenth, unitary_invariance),
    prop!("strings", "factorization", Some("factorization"), Full, factorization),
    prop!("strings", "momentum_degree", None, Full, momentum_degree),
    prop!("strings", "two_puncture_anchor", Some("string_anchor"), Once, string_anchor),
];

impl Property {
    pub fn run(&self, stream: u64, seed: u64, cases: usize, tol: &Tolerances) -> PropertyResult {
        let mut rng = gen::rng(seed, stream);
        let cases = self.share.cases(cases);
        let tolerance = self.tolerance.map_or(0.0, |name| tol.get(name));
        let mut max_residual: f64 = 0.0;
        let mut errors = 0;
        let mut first_error = None;
        for case in 0..cases {
            match (self.check)(&mut rng, case) {
                Ok(r) if r.is_nan() => {
                    errors += 1;
                    first_error.get_or_insert_with(|| format!("case {case}: residual is NaN"));
                }
                Ok(r) => max_residual = max_residual.max(r),
                Err(e) => {
                    errors += 1;
                    first_error.get_or_insert_with(|| format!("case {case}: {e}"));
                }
            }
        }
        PropertyResult {
            module: self.module,
            name: self.name,
            cases,
            max_residual,
            tolerance,
            errors,
            first_error,
            passed: errors == 0 && max_residual <= tolerance,
        }
    }
}

/// Runs every property whose `module.name` contains `filter` (all if `None`).
pub fn run(seed: u64, cases: usize, tol: &Tolerances, filter: Option<&str>) -> Vec<PropertyResult> {
    PROPERTIES
        .iter()
        .enumerate()
        .filter(|(_, p)| filter.is_none_or(|f| format!("{}.{}", p.module, p.name).contains(f)))
        .map(|(i, p)| p.run(i as u64, seed, cases, tol))
        .collect()
}
