mod common;

use approx::assert_relative_eq;
use common::random_shapes;
use detector_tomography::coefficients::{engines, full_set, AnalyticEngine, QuadratureEngine};
use detector_tomography::shape::axis_angle;
use detector_tomography::{CoefficientEngine, DetectorShape, OracleConfig, Provenance};
use nalgebra::{Matrix3, Vector3};

fn max_rel(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    (a - b).abs().max() / a.abs().max().max(b.abs().max())
}

#[test]
fn analytic_engine_matches_quadrature_on_rotated_shapes() {
    let quad = QuadratureEngine { config: OracleConfig { angular_tolerance: 1e-11, ..OracleConfig::default() } };
    for shape in random_shapes(7, 6) {
        let a = AnalyticEngine.compute(&shape).unwrap();
        let q = quad.compute(&shape).unwrap();
        assert_relative_eq!(a.l0, q.l0, max_relative = 1e-9);
        assert_relative_eq!(a.lomega, q.lomega, max_relative = 1e-9);
        assert_relative_eq!(a.lr, q.lr, max_relative = 1e-9);
        assert!(max_rel(&a.lij, &q.lij) < 1e-9);
        assert!(max_rel(&a.q, &q.q) < 1e-9);
        assert!(q.d.norm() < 1e-12);
        assert_eq!(a.provenance.l0, Provenance::ClosedForm);
        assert_eq!(q.provenance.l0, Provenance::SemiAnalytic);
    }
}

#[test]
fn tensors_rotate_with_the_shape() {
    let shape = DetectorShape::axis_aligned([0.4, 0.9, 1.6], 1.2).unwrap();
    let base = full_set(&shape).unwrap();
    let rot = axis_angle(Vector3::new(0.2, -0.7, 0.4), 1.1).unwrap();
    let turned = full_set(&shape.rotated(&rot).unwrap()).unwrap();
    assert_relative_eq!(turned.l0, base.l0, max_relative = 1e-12);
    assert_relative_eq!(turned.lr, base.lr, max_relative = 1e-12);
    assert!(max_rel(&turned.lij, &(rot * base.lij * rot.transpose())) < 1e-9);
    assert!(max_rel(&turned.q, &(rot * base.q * rot.transpose())) < 1e-9);
}

#[test]
fn coupling_enters_as_an_overall_square() {
    let shape = DetectorShape::with_axis_angle([0.7, 1.0, 1.9], Vector3::new(1.0, 1.0, 0.0), 0.5, 1.0).unwrap();
    let one = full_set(&shape).unwrap();
    let lambda = 3.7;
    let other = full_set(&shape.with_coupling(lambda).unwrap()).unwrap();
    let k = lambda * lambda;
    assert_relative_eq!(other.l0, k * one.l0, max_relative = 1e-12);
    assert_relative_eq!(other.lomega, k * one.lomega, max_relative = 1e-12);
    assert_relative_eq!(other.lr, k * one.lr, max_relative = 1e-9);
    assert!(max_rel(&other.lij, &(one.lij * k)) < 1e-12);
    assert!(max_rel(&other.q, &(one.q * k)) < 1e-12);
}

#[test]
fn near_degenerate_axes_approach_the_sphere() {
    let sphere = full_set(&DetectorShape::sphere(1.0, 1.0).unwrap()).unwrap();
    for eps in [1e-3, 1e-5, 1e-7] {
        let s = full_set(&DetectorShape::axis_aligned([1.0 - eps, 1.0, 1.0 + eps], 1.0).unwrap()).unwrap();
        let tol = 10.0 * eps;
        assert_relative_eq!(s.l0, sphere.l0, max_relative = tol);
        assert_relative_eq!(s.lr, sphere.lr, max_relative = tol);
        assert!(max_rel(&s.lij, &sphere.lij) < tol);
        assert!(max_rel(&s.q, &sphere.q) < tol);
    }
    // two equal axes
    let prolate = full_set(&DetectorShape::axis_aligned([0.5, 1.0, 1.0], 1.0).unwrap()).unwrap();
    let near = full_set(&DetectorShape::axis_aligned([0.5, 1.0, 1.0 + 1e-8], 1.0).unwrap()).unwrap();
    assert!(max_rel(&prolate.lij, &near.lij) < 1e-7);
}

#[test]
fn trace_identity_holds_for_every_shape() {
    for shape in random_shapes(11, 10) {
        let c = full_set(&shape).unwrap();
        assert_relative_eq!(c.lij.trace(), c.lomega, max_relative = 1e-12);
        assert_relative_eq!(
            c.lomega,
            shape.coupling().powi(2) / (4.0 * std::f64::consts::PI.powi(2)),
            max_relative = 1e-12
        );
    }
}

#[test]
fn registry_selects_engines_by_name() {
    let reg = engines(OracleConfig::default());
    assert_eq!(reg.default_name(), Some("analytic"));
    assert_eq!(reg.names(), vec!["analytic", "monte-carlo", "quadrature"]);
    assert_eq!(reg.get("quadrature").unwrap().name(), "quadrature");
    let err = reg.get("lattice").err().expect("unknown engine").to_string();
    assert!(err.contains("lattice") && err.contains("analytic"), "{err}");
}

#[test]
fn monte_carlo_engine_is_reproducible() {
    let cfg = OracleConfig { mc_samples: 20_000, ..OracleConfig::default() };
    let reg = engines(cfg);
    let mc = reg.get("monte-carlo").unwrap();
    let shape = DetectorShape::axis_aligned([0.8, 1.0, 1.3], 1.0).unwrap();
    let a = mc.compute(&shape).unwrap();
    let b = mc.compute(&shape).unwrap();
    assert_eq!(a, b);
    let exact = full_set(&shape).unwrap();
    assert_relative_eq!(a.l0, exact.l0, max_relative = 0.05);
}
