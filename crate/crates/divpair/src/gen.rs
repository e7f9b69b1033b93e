//! Seeded random instances for the property suite and the acceptance tests.

use divpair_core::curve::{CurveModel, CurvePoint};
use divpair_core::divisor::PointRef;
use divpair_core::mvf::{LocalExpansion, SphereWitness};
use divpair_core::pairing::RationalFunctionData;
use divpair_core::strings::{Momentum, MomentumConfig, DIM};
use divpair_core::{Complex64, ComplexDivisor, GaussianRational, MarkedCurve};
use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Minimum separation between distinct generated points.
pub const MIN_SEPARATION: f64 = 0.1;

/// An independent stream for each `(seed, stream)` pair.
pub fn rng(seed: u64, stream: u64) -> Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Sphere,
    Torus,
}

impl CurveKind {
    /// Alternates the two kinds so that every sweep covers both.
    pub fn alternate(case: usize) -> Self {
        if case.is_multiple_of(2) {
            CurveKind::Sphere
        } else {
            CurveKind::Torus
        }
    }
}

pub fn tau(rng: &mut Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0))
}

pub fn curve(rng: &mut Rng, kind: CurveKind) -> CurveModel {
    match kind {
        CurveKind::Sphere => CurveModel::Sphere,
        CurveKind::Torus => CurveModel::torus(tau(rng)).expect("Im tau > 0"),
    }
}

fn far_from(curve: &CurveModel, z: Complex64, taken: &[CurvePoint]) -> bool {
    taken.iter().all(|&p| curve.distance(z.into(), p) >= MIN_SEPARATION)
}

/// A point at least [`MIN_SEPARATION`] from everything in `taken`, which it joins.
///
/// Sphere points lie in the disk of radius 3; torus points have lattice
/// coordinates in `[0.05, 0.95)`, so any set of them fits in one period
/// parallelogram.
pub fn fresh_point(rng: &mut Rng, curve: &CurveModel, taken: &mut Vec<CurvePoint>) -> Complex64 {
    loop {
        let z = match curve {
            CurveModel::Sphere => {
                let r = 3.0 * rng.gen::<f64>().sqrt();
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(r, t)
            }
            CurveModel::Torus(t) => {
                let (a, b) = (rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
                t.value() * b + a
            }
        };
        if far_from(curve, z, taken) {
            taken.push(z.into());
            return z;
        }
    }
}

pub fn marked_curve(rng: &mut Rng, curve: CurveModel, marks: usize) -> MarkedCurve {
    let mut taken = Vec::new();
    for _ in 0..marks {
        fresh_point(rng, &curve, &mut taken);
    }
    MarkedCurve::new(curve, taken).expect("generated marks are distinct")
}

/// `p/q` with `|p| <= 6`, `1 <= q <= 6`.
pub fn small_rational(rng: &mut Rng) -> (i64, i64) {
    (rng.gen_range(-6..=6), rng.gen_range(1..=6))
}

pub fn gaussian(rng: &mut Rng) -> GaussianRational {
    let (a, b) = small_rational(rng);
    let (c, d) = small_rational(rng);
    GaussianRational::from_parts(a, b, c, d)
}

pub fn real_rational(rng: &mut Rng) -> GaussianRational {
    let (a, b) = small_rational(rng);
    GaussianRational::ratio(a, b)
}

/// Degree-0 divisor on the given marks: random coefficients, the last one
/// balancing the sum. Real coefficients only if `real`.
pub fn degree_zero_on_marks(rng: &mut Rng, mc: &MarkedCurve, marks: &[usize], real: bool) -> ComplexDivisor {
    let mut terms = Vec::with_capacity(marks.len());
    let mut total = GaussianRational::zero();
    for (k, &i) in marks.iter().enumerate() {
        let c = if k + 1 == marks.len() {
            -total.clone()
        } else if real {
            real_rational(rng)
        } else {
            gaussian(rng)
        };
        total += &c;
        terms.push((c, PointRef::Mark(i)));
    }
    ComplexDivisor::from_terms(mc, terms).expect("degree-0 divisor on marks")
}

/// `m@P - m@P'` at two fresh plain points, `m` a nonzero integer in `[-3, 3]`.
pub fn integral_dipole(rng: &mut Rng, mc: &MarkedCurve, taken: &mut Vec<CurvePoint>) -> ComplexDivisor {
    let m = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    let p = fresh_point(rng, mc.curve(), taken);
    let q = fresh_point(rng, mc.curve(), taken);
    let m = GaussianRational::from_integer(m);
    ComplexDivisor::from_terms(mc, [(m.clone(), PointRef::Point(p.into())), (-m, PointRef::Point(q.into()))])
        .expect("integral terms")
}

/// A marked curve with degree-0 divisors on disjoint sets of marks. With
/// `plain`, integral terms at plain points (and, on the sphere, at infinity in
/// the first divisor) may be added. With `count > 1`, the last divisor lives on
/// the second group of marks and all others share the first group.
#[derive(Debug, Clone)]
pub struct Instance {
    pub mc: MarkedCurve,
    pub divisors: Vec<ComplexDivisor>,
}

pub fn instance(rng: &mut Rng, kind: CurveKind, count: usize, real: bool, plain: bool) -> Instance {
    let curve = curve(rng, kind);
    let n = rng.gen_range(4..=8);
    let mc = marked_curve(rng, curve, n);
    let split = rng.gen_range(2..=n - 2);
    let first: Vec<usize> = (0..split).collect();
    let second: Vec<usize> = (split..n).collect();
    let mut taken = mc.marks().to_vec();
    let mut divisors = Vec::with_capacity(count);
    for k in 0..count {
        let group = if k + 1 == count && count > 1 { &second } else { &first };
        let mut d = degree_zero_on_marks(rng, &mc, group, real);
        if plain && rng.gen_bool(0.5) {
            d = d.add(&integral_dipole(rng, &mc, &mut taken)).expect("same context");
        }
        divisors.push(d);
    }
    if plain && kind == CurveKind::Sphere && rng.gen_bool(0.3) {
        let p = fresh_point(rng, mc.curve(), &mut taken);
        let m = GaussianRational::from_integer(rng.gen_range(1..=2));
        let at_infinity = ComplexDivisor::from_terms(
            &mc,
            [(m.clone(), PointRef::Point(p.into())), (-m, PointRef::Point(CurvePoint::Infinity))],
        )
        .expect("integral terms");
        divisors[0] = divisors[0].add(&at_infinity).expect("same context");
    }
    Instance { mc, divisors }
}

/// Two degree-0 divisors with disjoint supports.
pub fn pair(rng: &mut Rng, kind: CurveKind, plain: bool) -> (MarkedCurve, ComplexDivisor, ComplexDivisor) {
    let mut inst = instance(rng, kind, 2, false, plain);
    let d2 = inst.divisors.pop().expect("two divisors");
    let d1 = inst.divisors.pop().expect("two divisors");
    (inst.mc, d1, d2)
}

/// Random nonzero multiplicity in `[-2, 2]`.
fn multiplicity(rng: &mut Rng) -> i64 {
    *[-2i64, -1, 1, 2].choose(rng).expect("nonempty")
}

fn unit_constant(rng: &mut Rng) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Rational functions `f`, `g` on the sphere with disjoint divisors; at most
/// one of them has a zero or pole at infinity.
pub fn sphere_function_pair(rng: &mut Rng) -> (RationalFunctionData, RationalFunctionData) {
    let curve = CurveModel::Sphere;
    let mut taken = Vec::new();
    let unbalanced = rng.gen_range(0..3);
    let mut make = |rng: &mut Rng, allow_infinity: bool| {
        loop {
            let k = rng.gen_range(2..=4);
            let factors: Vec<(Complex64, i64)> =
                (0..k).map(|_| (fresh_point(rng, &curve, &mut taken), multiplicity(rng))).collect();
            let total: i64 = factors.iter().map(|f| f.1).sum();
            if total == 0 || allow_infinity {
                return RationalFunctionData::new(curve, factors, unit_constant(rng)).expect("nonzero constant");
            }
            taken.truncate(taken.len() - k);
        }
    };
    let f = make(rng, unbalanced == 0);
    let g = make(rng, unbalanced == 1);
    (f, g)
}

/// Elliptic function with zeros and poles at fresh points, made elliptic by
/// placing the last pole at `sum zeros - sum other poles + j + k tau`.
pub fn elliptic_function(rng: &mut Rng, curve: &CurveModel, taken: &mut Vec<CurvePoint>) -> RationalFunctionData {
    let tau = curve.tau().expect("torus");
    loop {
        let start = taken.len();
        let k = rng.gen_range(2..=3);
        let mut factors: Vec<(Complex64, i64)> = (0..k).map(|_| (fresh_point(rng, curve, taken), 1)).collect();
        for _ in 0..k - 1 {
            factors.push((fresh_point(rng, curve, taken), -1));
        }
        let shift = tau * rng.gen_range(-1..=1) as f64 + rng.gen_range(-1..=1) as f64;
        let last = factors.iter().map(|(a, m)| a * *m as f64).sum::<Complex64>() + shift;
        if far_from(curve, last, taken) {
            taken.push(last.into());
            factors.push((last, -1));
            factors.shuffle(rng);
            return RationalFunctionData::new(*curve, factors, unit_constant(rng)).expect("elliptic by construction");
        }
        taken.truncate(start);
    }
}

pub fn torus_function_pair(rng: &mut Rng) -> (RationalFunctionData, RationalFunctionData) {
    let curve = self::curve(rng, CurveKind::Torus);
    let mut taken = Vec::new();
    let f = elliptic_function(rng, &curve, &mut taken);
    let g = elliptic_function(rng, &curve, &mut taken);
    (f, g)
}

/// A degree-0 divisor that is principal on a torus: `a (Q_i - Q_j)` on marks,
/// balanced by `1@P' - 1@P` with `P' = P - a (Q_i - Q_j)`, plus an elliptic
/// function's divisor.
pub fn principal_torus_divisor(rng: &mut Rng, mc: &MarkedCurve, taken: &mut Vec<CurvePoint>) -> ComplexDivisor {
    let curve = mc.curve();
    let n = mc.mark_count();
    let i = rng.gen_range(0..n);
    let j = (i + rng.gen_range(1..n)) % n;
    let (qi, qj) = (mc.marks()[i].coordinate().expect("affine"), mc.marks()[j].coordinate().expect("affine"));
    loop {
        let a = gaussian(rng);
        if a.is_zero() {
            continue;
        }
        let start = taken.len();
        let p = fresh_point(rng, curve, taken);
        let p2 = p - a.to_complex() * (qi - qj);
        if !far_from(curve, p2, taken) {
            taken.truncate(start);
            continue;
        }
        taken.push(p2.into());
        let one = GaussianRational::one();
        let balanced = ComplexDivisor::from_terms(
            mc,
            [
                (a.clone(), PointRef::Mark(i)),
                (-a, PointRef::Mark(j)),
                (one.clone(), PointRef::Point(p2.into())),
                (-one, PointRef::Point(p.into())),
            ],
        )
        .expect("integral off marks");
        let f = elliptic_function(rng, curve, taken);
        return balanced.add(&f.divisor().expect("torus divisor").with_context(mc).expect("plain points away from marks")).expect("same context");
    }
}

/// Two divisors of equal degree on a torus; in the same class iff `same`.
pub fn class_pair(rng: &mut Rng, same: bool) -> (MarkedCurve, ComplexDivisor, ComplexDivisor) {
    let curve = curve(rng, CurveKind::Torus);
    let n = rng.gen_range(3..=5);
    let mc = marked_curve(rng, curve, n);
    let mut taken = mc.marks().to_vec();
    let all: Vec<usize> = (0..n).collect();
    let d1 = degree_zero_on_marks(rng, &mc, &all, false);
    let mut d2 = d1.add(&principal_torus_divisor(rng, &mc, &mut taken)).expect("same context");
    if !same {
        d2 = d2.add(&integral_dipole(rng, &mc, &mut taken)).expect("same context");
    }
    (mc, d1, d2)
}

/// A global multiple valued function on the sphere with Gaussian-rational exponents.
pub fn sphere_witness(rng: &mut Rng) -> SphereWitness {
    let mut taken = Vec::new();
    let k = rng.gen_range(1..=6);
    let factors: Vec<(Complex64, GaussianRational)> =
        (0..k).map(|_| (fresh_point(rng, &CurveModel::Sphere, &mut taken), gaussian(rng))).collect();
    SphereWitness::new(unit_constant(rng), factors).expect("nonzero constant")
}

/// Exponents on a 1/8 grid (exact in binary) and random coefficients.
pub fn local_expansion(rng: &mut Rng) -> LocalExpansion {
    let exponent = Complex64::new(rng.gen_range(-24..=24) as f64 / 8.0, rng.gen_range(-24..=24) as f64 / 8.0);
    let len = rng.gen_range(1..=8);
    let leading_zeros = rng.gen_range(0..=2);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); leading_zeros];
    coeffs.push(unit_constant(rng));
    coeffs.extend((1..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
    LocalExpansion::new(exponent, rng.gen_range(-4..=4), coeffs).expect("nonzero coefficient present")
}

/// Random unitary matrix: Gram-Schmidt on a random complex matrix.
pub fn unitary(rng: &mut Rng) -> [[Complex64; DIM]; DIM] {
    let mut rows = [[Complex64::new(0.0, 0.0); DIM]; DIM];
    let mut k = 0;
    while k < DIM {
        let mut v = [Complex64::new(0.0, 0.0); DIM];
        for c in v.iter_mut() {
            *c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        // Two passes for numerical orthogonality.
        for _ in 0..2 {
            for row in rows.iter().take(k) {
                let dot: Complex64 = row.iter().zip(&v).map(|(r, x)| r.conj() * x).sum();
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= dot * r;
                }
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        for (slot, x) in rows[k].iter_mut().zip(&v) {
            *slot = x / norm;
        }
        k += 1;
    }
    rows
}

pub fn apply(u: &[[Complex64; DIM]; DIM], p: &Momentum) -> Momentum {
    let mut out = [Complex64::new(0.0, 0.0); DIM];
    for (o, row) in out.iter_mut().zip(u) {
        *o = row.iter().zip(p).map(|(a, b)| a * b).sum();
    }
    out
}

fn basis(k: usize, scale: f64) -> Momentum {
    let mut p = [Complex64::new(0.0, 0.0); DIM];
    p[k] = Complex64::new(scale, 0.0);
    p
}

/// On-shell configuration with `n >= 2` momenta, built from antipodal pairs and
/// (for odd `n`) one planar triple, then rotated by a random unitary.
pub fn on_shell_config(rng: &mut Rng, n: usize) -> MomentumConfig {
    assert!(n >= 2, "need at least two momenta");
    let h = 3f64.sqrt() / 2.0;
    let mut momenta = Vec::with_capacity(n);
    let mut axis = 0;
    let mut remaining = n;
    if n % 2 == 1 {
        let (mut b, mut c) = (basis(0, -0.5), basis(0, -0.5));
        b[1] = Complex64::new(0.0, h);
        c[1] = Complex64::new(0.0, -h);
        momenta.extend([basis(0, 1.0), b, c]);
        axis = 2;
        remaining -= 3;
    }
    while remaining > 0 {
        momenta.push(basis(axis % DIM, 1.0));
        momenta.push(basis(axis % DIM, -1.0));
        axis += 1;
        remaining -= 2;
    }
    let u = unitary(rng);
    let rotated = momenta.iter().map(|p| apply(&u, p)).collect();
    MomentumConfig::new(rotated).expect("on-shell by construction")
}

/// Random divisor of degree in `[-3, 3]` on all marks, with an optional integral part.
pub fn any_divisor(rng: &mut Rng, mc: &MarkedCurve, taken: &mut Vec<CurvePoint>) -> ComplexDivisor {
    let n = mc.mark_count();
    let mut coefficients: Vec<GaussianRational> = (0..n).map(|_| gaussian(rng)).collect();
    if n > 0 {
        let partial: GaussianRational = coefficients[..n - 1].iter().sum();
        coefficients[n - 1] = GaussianRational::from_integer(rng.gen_range(-3..=3)) - partial;
    }
    let mut d = ComplexDivisor::on_marks(mc, &coefficients).expect("integral degree");
    if rng.gen_bool(0.5) {
        let p = fresh_point(rng, mc.curve(), taken);
        let m = GaussianRational::from_integer(multiplicity(rng));
        let single = ComplexDivisor::from_terms(mc, [(m, PointRef::Point(p.into()))]).expect("integral term");
        d = d.add(&single).expect("same context");
    }
    d
}
