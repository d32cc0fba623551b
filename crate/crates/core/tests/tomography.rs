mod common;

use approx::assert_relative_eq;
use common::{canonical_design, derived_truth, noiseless_recovery, random_riemann};
use detector_tomography::coefficients::AnalyticEngine;
use detector_tomography::geometry::catalog;
use detector_tomography::tomography::{
    canonical_pool, design_experiment, design_strategies, frame_point, multi_frame_recovery, solve, Probe,
};
use detector_tomography::{BoostSpec, Catalog, CurvaturePoint, DetectorShape, Error};
use nalgebra::Vector3;

#[test]
fn greedy_and_pool_order_designs() {
    let pool = canonical_pool(1.0, 1.0).unwrap();
    let strategies = design_strategies();
    let greedy =
        design_experiment(&pool, 13, &AnalyticEngine, strategies.get("greedy-condition").unwrap().as_ref()).unwrap();
    assert_eq!(greedy.rank, 13);
    assert!(greedy.condition_number < 1e4, "{}", greedy.condition_number);
    match design_experiment(&pool, 13, &AnalyticEngine, strategies.get("pool-order").unwrap().as_ref()) {
        Ok(plain) => assert_eq!(plain.pool_indices, (0..13).collect::<Vec<_>>()),
        Err(Error::Design { rank, .. }) => assert!(rank < 13),
        Err(e) => panic!("unexpected error {e}"),
    }
    // Greedy selection extends its thirteen-probe choice.
    let wider =
        design_experiment(&pool, 14, &AnalyticEngine, strategies.get("greedy-condition").unwrap().as_ref()).unwrap();
    assert_eq!(&wider.pool_indices[..13], &greedy.pool_indices[..]);
}

#[test]
fn degenerate_pool_reports_null_direction() {
    let pool: Vec<Probe> = (0..13)
        .map(|k| Probe::new(format!("s{k}"), DetectorShape::sphere(1.0 + 0.1 * f64::from(k), 1.0).unwrap()))
        .collect();
    let strategy = design_strategies().resolve(None).unwrap();
    match design_experiment(&pool, 13, &AnalyticEngine, strategy.as_ref()) {
        Err(Error::Design { rank, required, direction }) => {
            assert!(rank < required);
            assert!(!direction.is_empty());
        }
        other => panic!("expected a design error, got {other:?}"),
    }
}

#[test]
fn recovery_is_independent_of_coupling() {
    let truth = catalog(Catalog::SchwarzschildStaticFrame { mass: 1.0, radius: 10.0 }).unwrap().with_omega0(2e-5);
    let a = noiseless_recovery(&canonical_design(1.0, 1.0), &truth);
    let b = noiseless_recovery(&canonical_design(1.0, 0.3), &truth);
    let scale = derived_truth(&truth).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.derived().iter().zip(b.derived()) {
        assert!((x - y).abs() < 1e-9 * scale, "{x} vs {y}");
    }
}

#[test]
fn constant_spatial_curvature_round_trip() {
    let truth = catalog(Catalog::ConstantSpatialCurvature { k: 1e-4 }).unwrap().with_omega0(3e-6);
    let res = noiseless_recovery(&canonical_design(3.0, 1.0), &truth);
    let expected = derived_truth(&truth);
    let scale = expected.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (r, e) in res.derived().iter().zip(expected) {
        assert!((r - e).abs() < 1e-8 * scale, "{r} vs {e}");
    }
    assert_relative_eq!(res.r_scalar, 6e-4, max_relative = 1e-8);
}

#[test]
fn measurement_count_mismatch_is_rejected() {
    let design = canonical_design(1.0, 1.0);
    let p0s = design.p0s().unwrap();
    assert!(solve(&design, &[(0.1, 0.01)], &p0s).is_err());
    let mut bad: Vec<(f64, f64)> = p0s.iter().map(|p| (*p, 1.0)).collect();
    bad[3].1 = 0.0;
    assert!(solve(&design, &bad, &p0s).is_err());
}

#[test]
fn boosted_frames_recover_every_component() {
    let truth = CurvaturePoint { riemann: random_riemann(5, 1e-3), accel: Vector3::zeros(), omega0: 0.0 };
    let design = canonical_design(1.0, 1.0);
    let boosts = [
        BoostSpec::rest(),
        BoostSpec::new(Vector3::x(), 0.2).unwrap(),
        BoostSpec::new(Vector3::y(), 0.2).unwrap(),
        BoostSpec::new(Vector3::z(), 0.2).unwrap(),
    ];
    let frames: Vec<_> = boosts.iter().map(|b| (*b, noiseless_recovery(&design, &frame_point(&truth, b)))).collect();
    let r = multi_frame_recovery(&frames).unwrap();
    let scale = truth.riemann.max_abs();
    for (x, y) in r.independent().iter().zip(truth.riemann.independent()) {
        assert!((x - y).abs() < 1e-8 * scale);
    }
}

#[test]
fn insufficient_frames_name_unresolved_components() {
    let truth = CurvaturePoint { riemann: random_riemann(6, 1e-3), accel: Vector3::zeros(), omega0: 0.0 };
    let design = canonical_design(1.0, 1.0);
    let b = BoostSpec::new(Vector3::x(), 0.1).unwrap();
    let frames = vec![
        (BoostSpec::rest(), noiseless_recovery(&design, &truth)),
        (b, noiseless_recovery(&design, &frame_point(&truth, &b))),
    ];
    match multi_frame_recovery(&frames) {
        Err(Error::FrameSet { rank, unresolved }) => {
            assert!(rank < 20);
            assert!(!unresolved.is_empty());
        }
        other => panic!("expected a frame-set error, got {other:?}"),
    }
}
