//! Smearing coefficients of an ellipsoidal Gaussian detector.
//!
//! The excitation probability depends on the detector shape only through
//! six integrals: L₀, Q^ij, D^i, L^ij, L_R and L_ω. For Gaussian profiles
//! all of them reduce to Carlson symmetric integrals except L_R, which is a
//! one-dimensional integral. The tensorial coefficients are diagonal in the
//! principal frame and rotated into the lab frame.

mod engine;
pub mod printed;

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::{integrate_to_infinity, Tolerance};
use crate::serde_matrix::{rows3, vec3};
use crate::shape::DetectorShape;
use crate::special::{carlson_rd, carlson_rf};

pub use engine::{engines, AnalyticEngine, CoefficientEngine, MonteCarloEngine, QuadratureEngine};

/// How a coefficient value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    SemiAnalytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientProvenance {
    pub l0: Provenance,
    pub q: Provenance,
    pub d: Provenance,
    pub lij: Provenance,
    pub lr: Provenance,
    pub lomega: Provenance,
}

impl CoefficientProvenance {
    pub fn uniform(p: Provenance) -> Self {
        Self { l0: p, q: p, d: p, lij: p, lr: p, lomega: p }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub l0: f64,
    #[serde(with = "rows3")]
    pub q: Matrix3<f64>,
    #[serde(with = "vec3")]
    pub d: Vector3<f64>,
    #[serde(with = "rows3")]
    pub lij: Matrix3<f64>,
    pub lr: f64,
    pub lomega: f64,
    pub provenance: CoefficientProvenance,
}

fn lambda2(shape: &DetectorShape) -> f64 {
    shape.coupling() * shape.coupling()
}

/// `L₀ = λ² abc R_F(a², b², c²) / (8π²)`.
pub fn coeff_l0(shape: &DetectorShape) -> Result<f64> {
    let [a, b, c] = shape.axes();
    Ok(lambda2(shape) * a * b * c * carlson_rf(a * a, b * b, c * c)? / (8.0 * PI * PI))
}

/// `L_ω = λ² / (4π²)`, independent of the shape.
pub fn coeff_lomega(shape: &DetectorShape) -> f64 {
    lambda2(shape) / (4.0 * PI * PI)
}

/// Vanishes by parity for every Gaussian profile.
pub fn coeff_d(_shape: &DetectorShape) -> Vector3<f64> {
    Vector3::zeros()
}

/// Principal-frame diagonal of L^ij:
/// `L^ii = λ² abc/(8π²) · (2/3) R_D(a_j², a_k², a_i²)`.
pub fn coeff_lij_principal(shape: &DetectorShape) -> Result<Vector3<f64>> {
    let [a, b, c] = shape.axes();
    let sq = [a * a, b * b, c * c];
    let pre = lambda2(shape) * a * b * c / (8.0 * PI * PI) * (2.0 / 3.0);
    let mut out = Vector3::zeros();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        out[i] = pre * carlson_rd(sq[j], sq[k], sq[i])?;
    }
    Ok(out)
}

/// L^ij in the lab frame.
pub fn coeff_lij(shape: &DetectorShape) -> Result<Matrix3<f64>> {
    Ok(shape.rotate(&Matrix3::from_diagonal(&coeff_lij_principal(shape)?)))
}

/// Second-moment ratio `E^ij` of the Gaussian: `A⁻¹` (so `1/a²` along each
/// principal axis).
pub fn moment_ratio(shape: &DetectorShape) -> Matrix3<f64> {
    shape.covariance()
}

/// `Q^ij = ¼ L^ij + ½ L₀ E^ij`.
pub fn coeff_qij(shape: &DetectorShape) -> Result<Matrix3<f64>> {
    Ok(coeff_lij(shape)? * 0.25 + moment_ratio(shape) * (0.5 * coeff_l0(shape)?))
}

/// L_R from the one-dimensional representation
/// `λ²/(4π²) ∫₀^∞ dt/t [e^{−t} − ∏ᵢ (1 + 2t/aᵢ²)^{−1/2}]`.
pub fn coeff_lr(shape: &DetectorShape) -> Result<f64> {
    let axes = shape.axes();
    let integrand = |t: f64| {
        if t == 0.0 {
            return axes.iter().map(|a| 1.0 / (a * a)).sum::<f64>() - 1.0;
        }
        let log_prod: f64 = axes.iter().map(|a| (2.0 * t / (a * a)).ln_1p()).sum();
        ((-t).exp_m1() - (-0.5 * log_prod).exp_m1()) / t
    };
    let tol = Tolerance { relative: 1e-13, absolute: 0.0, max_cells: 20_000 };
    let est = integrate_to_infinity(integrand, 0.0, tol)?;
    Ok(lambda2(shape) / (4.0 * PI * PI) * est.value)
}

/// All six coefficients from the closed forms and the L_R reduction.
pub fn full_set(shape: &DetectorShape) -> Result<CoefficientSet> {
    let l0 = coeff_l0(shape)?;
    let lij = coeff_lij(shape)?;
    Ok(CoefficientSet {
        l0,
        q: lij * 0.25 + moment_ratio(shape) * (0.5 * l0),
        d: coeff_d(shape),
        lij,
        lr: coeff_lr(shape)?,
        lomega: coeff_lomega(shape),
        provenance: CoefficientProvenance {
            lr: Provenance::SemiAnalytic,
            ..CoefficientProvenance::uniform(Provenance::ClosedForm)
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::digamma;
    use approx::assert_relative_eq;

    #[test]
    fn sphere_closed_forms() {
        let s = DetectorShape::sphere(1.0, 1.0).unwrap();
        let c = full_set(&s).unwrap();
        let pi2 = PI * PI;
        assert_relative_eq!(c.l0, 1.0 / (8.0 * pi2), max_relative = 1e-14);
        assert_relative_eq!(c.lij, Matrix3::identity() / (12.0 * pi2), max_relative = 1e-14);
        assert_relative_eq!(c.lomega, 1.0 / (4.0 * pi2), max_relative = 1e-15);
        let lr = (digamma(1.5).unwrap() + 2f64.ln()) / (4.0 * pi2);
        assert_relative_eq!(c.lr, lr, max_relative = 1e-11);
    }

    #[test]
    fn trace_of_lij_is_lomega() {
        let s = DetectorShape::with_axis_angle([0.4, 1.3, 2.9], Vector3::new(0.2, -1.0, 0.4), 1.1, 1.7).unwrap();
        let c = full_set(&s).unwrap();
        assert_relative_eq!(c.lij.trace(), c.lomega, max_relative = 1e-13);
        assert_relative_eq!(c.q, c.q.transpose(), epsilon = 1e-18);
    }
}
