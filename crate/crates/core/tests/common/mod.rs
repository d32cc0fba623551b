//! Shared fixtures for the integration tests.

#![allow(dead_code)]

use detector_tomography::coefficients::AnalyticEngine;
use detector_tomography::shape::DetectorShape;
use detector_tomography::tomography::{
    canonical_pool, design_experiment, design_strategies, solve, ExperimentDesign, RecoveryResult,
};
use detector_tomography::{CurvaturePoint, RiemannTensor};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shapes with axis parameters in `[0.5, 2]`, a random orientation and a
/// coupling in `[0.5, 2]`.
pub fn random_shapes(seed: u64, count: usize) -> Vec<DetectorShape> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let axes = [rng.random_range(0.5..2.0), rng.random_range(0.5..2.0), rng.random_range(0.5..2.0)];
            let axis =
                Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(0.1..1.0));
            let angle = rng.random_range(0.0..std::f64::consts::PI);
            let coupling = rng.random_range(0.5..2.0);
            DetectorShape::with_axis_angle(axes, axis, angle, coupling).expect("valid random shape")
        })
        .collect()
}

/// A Riemann tensor with its twenty independent components drawn from
/// `[−scale, scale]`.
pub fn random_riemann(seed: u64, scale: f64) -> RiemannTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: [f64; 20] = std::array::from_fn(|_| rng.random_range(-scale..scale));
    RiemannTensor::from_independent(&values)
}

/// Greedy thirteen-probe design on the canonical pool of size `length`.
pub fn canonical_design(length: f64, coupling: f64) -> ExperimentDesign {
    let pool = canonical_pool(length, coupling).unwrap();
    let strategy = design_strategies().resolve(None).unwrap();
    design_experiment(&pool, 13, &AnalyticEngine, strategy.as_ref()).unwrap()
}

/// Solves exact forward probabilities with unit weights.
pub fn noiseless_recovery(design: &ExperimentDesign, truth: &CurvaturePoint) -> RecoveryResult {
    let measurements: Vec<(f64, f64)> = design.forward(truth).unwrap().iter().map(|b| (b.p, 1.0)).collect();
    solve(design, &measurements, &design.p0s().unwrap()).unwrap()
}

/// The fourteen derived quantities of the truth in `RecoveryResult::derived` order.
pub fn derived_truth(point: &CurvaturePoint) -> [f64; 14] {
    let r = &point.riemann;
    let ric = r.spatial_ricci();
    let tidal = r.tidal_block();
    let sym = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];
    let mut out = [0.0; 14];
    for (k, &(i, j)) in sym.iter().enumerate() {
        out[k] = ric[(i, j)];
        out[6 + k] = tidal[(i, j)];
    }
    out[12] = point.omega0;
    out[13] = r.ricci()[(0, 0)];
    out
}
