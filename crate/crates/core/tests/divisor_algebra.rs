use divpair_core::curve::{CurveModel, CurvePoint};
use divpair_core::divisor::{class_invariant, PointRef};
use divpair_core::{Complex64, ComplexDivisor, Error, GaussianRational, MarkedCurve};
use proptest::prelude::*;

fn marked(curve: CurveModel) -> MarkedCurve {
    let marks = [(0.1, 0.2), (0.5, 0.1), (0.3, 0.7), (0.8, 0.6)];
    MarkedCurve::new(curve, marks.iter().map(|&(x, y)| CurvePoint::affine(Complex64::new(x, y))).collect()).unwrap()
}

fn torus() -> CurveModel {
    CurveModel::torus(Complex64::new(0.25, 1.3)).unwrap()
}

fn gaussian() -> impl Strategy<Value = GaussianRational> {
    (-9i64..=9, 1i64..=7, -9i64..=9, 1i64..=7).prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
}

/// Marked part with an integral total, plus integral terms at a few plain points.
fn divisor(mc: MarkedCurve) -> impl Strategy<Value = ComplexDivisor> {
    let plain = [(1.5, 0.4), (2.0, -1.0), (-0.7, 0.9)];
    (prop::collection::vec(gaussian(), 4), -3i64..=3, prop::collection::vec(-3i64..=3, 3)).prop_map(
        move |(mut coefficients, degree, integers)| {
            let partial: GaussianRational = coefficients[..3].iter().sum();
            coefficients[3] = GaussianRational::from_integer(degree) - partial;
            let marked = coefficients.into_iter().enumerate().map(|(i, c)| (c, PointRef::Mark(i)));
            let integral = integers.into_iter().zip(plain).map(|(n, (x, y))| {
                (GaussianRational::from_integer(n), PointRef::Point(CurvePoint::affine(Complex64::new(x, y))))
            });
            ComplexDivisor::from_terms(&mc, marked.chain(integral)).unwrap()
        },
    )
}

fn sphere_divisor() -> impl Strategy<Value = ComplexDivisor> {
    divisor(marked(CurveModel::Sphere))
}

proptest! {
    #[test]
    fn group_laws(a in sphere_divisor(), b in sphere_divisor(), c in sphere_divisor()) {
        let zero = ComplexDivisor::zero(a.context());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.add(&zero).unwrap(), a.clone());
        prop_assert!(a.add(&a.neg()).unwrap().is_zero());
        prop_assert_eq!(a.sub(&b).unwrap(), a.add(&b.neg()).unwrap());
    }

    #[test]
    fn degree_is_a_homomorphism(a in sphere_divisor(), b in sphere_divisor()) {
        prop_assert_eq!(a.add(&b).unwrap().degree(), a.degree() + b.degree());
        prop_assert_eq!(a.neg().degree(), -a.degree());
    }

    #[test]
    fn integer_scaling_is_multiplicative(d in sphere_divisor(), m in -5i64..=5, n in -5i64..=5) {
        let (gm, gn) = (GaussianRational::from_integer(m), GaussianRational::from_integer(n));
        prop_assert_eq!(d.scale(&(&gm * &gn)).unwrap(), d.scale(&gn).unwrap().scale(&gm).unwrap());
        prop_assert_eq!(d.scale(&gm).unwrap().degree(), m * d.degree());
    }

    #[test]
    fn complex_scaling_on_marks(coefficients in prop::collection::vec(gaussian(), 4), a in gaussian(), b in gaussian()) {
        let mc = marked(CurveModel::Sphere);
        let mut coefficients = coefficients;
        let partial: GaussianRational = coefficients[..3].iter().sum();
        coefficients[3] = -partial;
        let d = ComplexDivisor::on_marks(&mc, &coefficients).unwrap();
        prop_assert_eq!(d.scale(&(&a * &b)).unwrap(), d.scale(&b).unwrap().scale(&a).unwrap());
        prop_assert_eq!(d.scale(&a).unwrap().conj(), d.conj().scale(&a.conj()).unwrap());
    }

    #[test]
    fn display_round_trips(d in sphere_divisor()) {
        let text = d.to_string();
        prop_assert_eq!(ComplexDivisor::parse(d.context(), &text).unwrap(), d);
    }

    #[test]
    fn torus_class_invariant_is_additive(a in divisor(marked(torus())), b in divisor(marked(torus()))) {
        let mc = a.context().clone();
        let b = b.with_context(&mc).unwrap();
        let sum = class_invariant(&mc, &a.add(&b).unwrap()).unwrap();
        let parts = class_invariant(&mc, &a).unwrap().combine(&class_invariant(&mc, &b).unwrap());
        prop_assert!(sum.same_class(&parts));
    }
}

#[test]
fn contexts_must_match() {
    let a = ComplexDivisor::parse(&marked(CurveModel::Sphere), "1@Q1,-1@Q2").unwrap();
    let same = ComplexDivisor::parse(&marked(CurveModel::Sphere), "1@Q1,-1@Q2").unwrap();
    assert!(a.add(&same).is_ok());
    let other = MarkedCurve::new(CurveModel::Sphere, vec![CurvePoint::real(0.1), CurvePoint::real(0.5)]).unwrap();
    let b = ComplexDivisor::parse(&other, "1@Q1,-1@Q2").unwrap();
    assert_eq!(a.add(&b).unwrap_err(), Error::MismatchedContext);
    assert_eq!(a.with_context(&marked(torus())).unwrap_err(), Error::MismatchedContext);
}

#[test]
fn with_context_attaches_points_to_marks() {
    let bare = MarkedCurve::unmarked(CurveModel::Sphere);
    let d = ComplexDivisor::parse(&bare, "2@0.1+0.2i,-2@5").unwrap();
    let mc = marked(CurveModel::Sphere);
    let moved = d.with_context(&mc).unwrap();
    assert_eq!(moved.coefficient_at_mark(0).unwrap(), GaussianRational::from_integer(2));
    assert_eq!(moved.to_string(), "2@Q1,-2@5.0");
}

#[test]
fn non_integral_coefficients_need_marks() {
    let mc = marked(CurveModel::Sphere);
    assert_eq!(ComplexDivisor::parse(&mc, "1/2@7").unwrap_err(), Error::NonIntegralOffMarks);
    assert_eq!(ComplexDivisor::parse(&mc, "1/2@Q1").unwrap_err(), Error::DegreeNotIntegral);
    let d = ComplexDivisor::parse(&mc, "1/2@7,1/2@7").unwrap();
    assert_eq!(d.degree(), 1);
    assert!(d.is_integral());
}
