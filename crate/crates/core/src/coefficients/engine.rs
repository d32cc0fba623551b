use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::{full_set, CoefficientProvenance, CoefficientSet, Provenance};
use crate::error::Result;
use crate::oracle::{b_functional, b_functional_mc, KernelKind, OracleConfig};
use crate::registry::Registry;
use crate::shape::DetectorShape;

/// A way of computing the coefficient set of a shape.
pub trait CoefficientEngine: Send + Sync {
    fn name(&self) -> &'static str;

    fn compute(&self, shape: &DetectorShape) -> Result<CoefficientSet>;

    /// Coefficients for many shapes, in input order.
    fn compute_many(&self, shapes: &[DetectorShape]) -> Result<Vec<CoefficientSet>> {
        shapes.par_iter().map(|s| self.compute(s)).collect()
    }
}

/// Carlson closed forms plus the one-dimensional L_R integral.
#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyticEngine;

impl CoefficientEngine for AnalyticEngine {
    fn name(&self) -> &'static str {
        "analytic"
    }

    fn compute(&self, shape: &DetectorShape) -> Result<CoefficientSet> {
        full_set(shape)
    }
}

/// Every coefficient from the angular-cubature oracle.
#[derive(Debug, Clone, Copy, Default)]
pub struct QuadratureEngine {
    pub config: OracleConfig,
}

/// Every coefficient from the Monte Carlo oracle (point estimates only).
#[derive(Debug, Clone, Copy, Default)]
pub struct MonteCarloEngine {
    pub config: OracleConfig,
}

fn assemble(eval: impl Fn(KernelKind) -> Result<f64>, p: Provenance) -> Result<CoefficientSet> {
    let mut q = Matrix3::zeros();
    let mut lij = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            q[(i, j)] = eval(KernelKind::Quadratic(i, j))?;
            q[(j, i)] = q[(i, j)];
            lij[(i, j)] = eval(KernelKind::DiffQuadratic(i, j))?;
            lij[(j, i)] = lij[(i, j)];
        }
    }
    let d = Vector3::new(eval(KernelKind::Linear(0))?, eval(KernelKind::Linear(1))?, eval(KernelKind::Linear(2))?);
    Ok(CoefficientSet {
        l0: eval(KernelKind::One)?,
        q,
        d,
        lij,
        lr: eval(KernelKind::DiffSquaredLog)?,
        lomega: eval(KernelKind::DiffSquared)?,
        provenance: CoefficientProvenance::uniform(p),
    })
}

impl CoefficientEngine for QuadratureEngine {
    fn name(&self) -> &'static str {
        "quadrature"
    }

    fn compute(&self, shape: &DetectorShape) -> Result<CoefficientSet> {
        assemble(|k| b_functional(shape, k, &self.config), Provenance::SemiAnalytic)
    }
}

impl CoefficientEngine for MonteCarloEngine {
    fn name(&self) -> &'static str {
        "monte-carlo"
    }

    fn compute(&self, shape: &DetectorShape) -> Result<CoefficientSet> {
        assemble(|k| Ok(b_functional_mc(shape, k, &self.config)?.estimate), Provenance::MonteCarlo)
    }
}

/// Registry of the built-in engines; `analytic` is the default.
pub fn engines(config: OracleConfig) -> Registry<dyn CoefficientEngine> {
    let mut reg: Registry<dyn CoefficientEngine> = Registry::new("coefficient engine");
    reg.register("analytic", Arc::new(AnalyticEngine));
    reg.register("quadrature", Arc::new(QuadratureEngine { config }));
    reg.register("monte-carlo", Arc::new(MonteCarloEngine { config }));
    reg
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn analytic_matches_quadrature() {
        let reg = engines(OracleConfig::default());
        assert_eq!(reg.default_name(), Some("analytic"));
        let shape = DetectorShape::with_axis_angle([0.7, 1.0, 1.9], Vector3::new(1.0, 1.0, 0.0), 0.4, 1.3).unwrap();
        let a = reg.resolve(None).unwrap().compute(&shape).unwrap();
        let q = reg.get("quadrature").unwrap().compute(&shape).unwrap();
        assert_relative_eq!(a.l0, q.l0, max_relative = 1e-8);
        assert_relative_eq!(a.lr, q.lr, max_relative = 1e-8);
        assert_relative_eq!(a.lomega, q.lomega, max_relative = 1e-8);
        assert_relative_eq!(a.q, q.q, max_relative = 1e-8, epsilon = 1e-14);
        assert_relative_eq!(a.lij, q.lij, max_relative = 1e-8, epsilon = 1e-14);
        assert!(q.d.norm() < 1e-12);
    }
}
