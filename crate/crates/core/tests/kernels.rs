use std::f64::consts::PI;

use divpair_core::curve::{self, log_abs_theta1, theta1, theta1_log_derivative, CurveModel, CurvePoint};
use divpair_core::{Complex64, ComplexDivisor, MarkedCurve};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tau() -> impl Strategy<Value = Complex64> {
    (-0.5f64..0.5, 0.5f64..2.0).prop_map(|(x, y)| c(x, y))
}

fn point() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y)| c(x, y))
}

proptest! {
    #[test]
    fn theta_is_odd_and_quasi_periodic(z in point(), t in tau()) {
        let v = theta1(z, t).unwrap();
        prop_assume!(v.norm() > 1e-6);
        prop_assert!((theta1(-z, t).unwrap() + v).norm() < 1e-12 * v.norm());
        prop_assert!((theta1(z + 1.0, t).unwrap() + v).norm() < 1e-10 * v.norm());
        let expected = -(c(0.0, -PI) * t - c(0.0, 2.0 * PI) * z).exp() * v;
        prop_assert!((theta1(z + t, t).unwrap() - expected).norm() < 1e-10 * expected.norm());
        prop_assert!((log_abs_theta1(z, t).unwrap() - v.norm().ln()).abs() < 1e-10);
    }

    #[test]
    fn log_derivative_matches_difference_quotient(z in point(), t in tau()) {
        prop_assume!(curve::lattice_distance(z, t) > 0.1);
        let h = 1e-5;
        let numeric = (theta1(z + h, t).unwrap() - theta1(z - h, t).unwrap()) / (2.0 * h) / theta1(z, t).unwrap();
        let exact = theta1_log_derivative(z, t).unwrap();
        prop_assert!((numeric - exact).norm() < 1e-5 * exact.norm().max(1.0));
    }

    #[test]
    fn kernels_are_symmetric(p in point(), q in point(), t in tau()) {
        for curve in [CurveModel::Sphere, CurveModel::torus(t).unwrap()] {
            let (p, q) = (CurvePoint::from(p), CurvePoint::from(q));
            prop_assume!(curve.distance(p, q) > 1e-6);
            let a = curve.green_kernel(p, q).unwrap();
            let b = curve.green_kernel(q, p).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_kernel_is_doubly_periodic(p in point(), q in point(), t in tau(), m in -2i32..=2, n in -2i32..=2) {
        let curve = CurveModel::torus(t).unwrap();
        prop_assume!(curve.distance(p.into(), q.into()) > 1e-6);
        let shifted = p + t * f64::from(n) + f64::from(m);
        let a = curve.green_kernel(shifted.into(), q.into()).unwrap();
        let b = curve.green_kernel(p.into(), q.into()).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn sphere_green_function_values() {
    let mc = MarkedCurve::unmarked(CurveModel::Sphere);
    let d = ComplexDivisor::parse(&mc, "1@2,-1@-2").unwrap();
    let g = curve::green_divisor(mc.curve(), &d, CurvePoint::real(1.0)).unwrap();
    assert!((g.re + 3f64.ln()).abs() < 1e-15 && g.im == 0.0);
    let at_infinity = curve::green_divisor(mc.curve(), &d, CurvePoint::Infinity).unwrap();
    assert_eq!(at_infinity, c(0.0, 0.0));
}

#[test]
fn torus_green_function_of_principal_divisor_is_log_modulus() {
    // f = theta1(z - a1) theta1(z - a2) / (theta1(z - b1) theta1(z - b2)) is elliptic
    // when a1 + a2 = b1 + b2, so g_D - ln|f| is constant.
    let t = c(0.2, 1.1);
    let curve = CurveModel::torus(t).unwrap();
    let mc = MarkedCurve::unmarked(curve);
    let (a1, a2, b1) = (c(0.3, 0.2), c(0.7, 0.5), c(0.1, 0.9));
    let b2 = a1 + a2 - b1;
    let d = ComplexDivisor::parse(&mc, "1@0.3+0.2i,1@0.7+0.5i,-1@0.1+0.9i,-1@0.9-0.2i").unwrap();
    assert!((b2 - c(0.9, -0.2)).norm() < 1e-15);
    let log_f = |z: Complex64| {
        let th = |p: Complex64| theta1(z - p, t).unwrap();
        (th(a1) * th(a2) / (th(b1) * th(b2))).norm().ln()
    };
    let points = [c(0.6, 0.05), c(-0.4, 0.9), c(1.7, -2.3), c(0.05, 0.45)];
    let offsets: Vec<f64> = points
        .iter()
        .map(|&z| curve::green_divisor(&curve, &d, z.into()).unwrap().re - log_f(z))
        .collect();
    for o in &offsets {
        assert!((o - offsets[0]).abs() < 1e-10, "{offsets:?}");
    }
}
