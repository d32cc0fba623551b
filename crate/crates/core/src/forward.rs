//! Excitation probability of a smeared, delta-coupled detector.
//!
//! To leading order in curvature,
//! `P = P₀ + e^{−2L₀} (M_ij Q^ij + 2 a_i D^i + R_ij L^ij/12 + (2π²/3) R L_R + 4π² ω₀ L_ω)`
//! with the flat-space probability `P₀ = ½(1 − e^{−2L₀})`.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::geometry::CurvaturePoint;

/// Corrections larger than this fraction of `P₀` flag the expansion as
/// outside its regime of validity.
pub const VALIDITY_FRACTION: f64 = 0.1;

/// `P₀ = ½(1 − e^{−2L₀})`.
pub fn p0_of(l0: f64) -> Result<f64> {
    if !(l0 >= 0.0) {
        return Err(Error::Domain(format!("L₀ = {l0} must be non-negative")));
    }
    Ok(-0.5 * (-2.0 * l0).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityBreakdown {
    pub p0: f64,
    /// `M_ij Q^ij`
    pub correction_volume: f64,
    /// `2 a_i D^i`
    pub correction_accel: f64,
    /// `R_ij L^ij / 12`
    pub correction_vanvleck: f64,
    /// `(2π²/3) R L_R`
    pub correction_scalar: f64,
    /// `4π² ω₀ L_ω`
    pub correction_state: f64,
    /// `e^{−2L₀}`, the weight of every correction.
    pub damping: f64,
    /// `P₀ + e^{−2L₀} Σ corrections`, clamped to `[0, 1]`.
    pub p: f64,
    pub out_of_validity: bool,
    pub out_of_range: bool,
}

impl ProbabilityBreakdown {
    pub fn correction_sum(&self) -> f64 {
        self.correction_volume
            + self.correction_accel
            + self.correction_vanvleck
            + self.correction_scalar
            + self.correction_state
    }

    /// `P − P₀` before clamping.
    pub fn delta(&self) -> f64 {
        self.damping * self.correction_sum()
    }
}

pub fn excitation_probability(coeffs: &CoefficientSet, point: &CurvaturePoint) -> Result<ProbabilityBreakdown> {
    let p0 = p0_of(coeffs.l0)?;
    let r = &point.riemann;
    let ricci = r.spatial_ricci();
    let correction_volume = point.m().component_mul(&coeffs.q).sum();
    let correction_accel = 2.0 * point.accel.dot(&coeffs.d);
    let correction_vanvleck = ricci.component_mul(&coeffs.lij).sum() / 12.0;
    let correction_scalar = 2.0 * PI * PI / 3.0 * r.scalar() * coeffs.lr;
    let correction_state = 4.0 * PI * PI * point.omega0 * coeffs.lomega;
    let damping = (-2.0 * coeffs.l0).exp();
    let mut out = ProbabilityBreakdown {
        p0,
        correction_volume,
        correction_accel,
        correction_vanvleck,
        correction_scalar,
        correction_state,
        damping,
        p: 0.0,
        out_of_validity: false,
        out_of_range: false,
    };
    let raw = p0 + out.delta();
    out.out_of_validity = out.delta().abs() > VALIDITY_FRACTION * p0;
    out.out_of_range = !(0.0..=1.0).contains(&raw);
    out.p = raw.clamp(0.0, 1.0);
    if !raw.is_finite() {
        return Err(Error::InvalidInput("non-finite excitation probability".into()));
    }
    Ok(out)
}

/// Short-distance Wightman function between two points of the same Fermi
/// time slice: `W₀ [1 + R_ij d^i d^j/12 + (2π²/3) R d² ln|d²/2| + 4π² ω₀ d²]`
/// with `d = x − x′` and `W₀ = 1/(4π² d²)`.
pub fn wightman_short_distance(x: &Vector3<f64>, xp: &Vector3<f64>, point: &CurvaturePoint) -> Result<f64> {
    let d = x - xp;
    let d2 = d.norm_squared();
    if d2 == 0.0 {
        return Err(Error::Singularity("Wightman function at coincident points".into()));
    }
    let w0 = 1.0 / (4.0 * PI * PI * d2);
    let ricci = point.riemann.spatial_ricci();
    let bracket = 1.0
        + d.dot(&(ricci * d)) / 12.0
        + 2.0 * PI * PI / 3.0 * point.scalar() * d2 * (0.5 * d2).ln()
        + 4.0 * PI * PI * point.omega0 * d2;
    Ok(w0 * bracket)
}

/// `(2n − 1)!!` as a float, with `(−1)!! = 1`.
pub fn double_factorial_odd(n: u32) -> f64 {
    (1..=n).map(|k| f64::from(2 * k - 1)).product()
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Partial sum `Σ_{n<n_terms} (−1)ⁿ 2^{2n} (2n − 1)!!/(2n)! · lⁿ` of the
/// Wick expansion of `ω(e^{2iŶ})`. Each term is obtained from the previous
/// one through the ratio of the double factorial and factorial factors.
pub fn quasifree_series_check(l: f64, n_terms: usize) -> Result<f64> {
    if !(l >= 0.0) || !l.is_finite() {
        return Err(Error::Domain(format!("L = {l} must be finite and non-negative")));
    }
    if n_terms == 0 {
        return Err(Error::InvalidInput("need at least one term".into()));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..n_terms - 1 {
        let k = n as f64;
        // (2n + 1)!!/(2n − 1)!! = 2n + 1 and (2n + 2)!/(2n)! = (2n + 1)(2n + 2)
        let double_factorial_ratio = 2.0 * k + 1.0;
        let factorial_ratio = (2.0 * k + 1.0) * (2.0 * k + 2.0);
        term *= -4.0 * l * double_factorial_ratio / factorial_ratio;
        sum += term;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::full_set;
    use crate::geometry::{catalog, Catalog};
    use crate::shape::DetectorShape;
    use approx::assert_relative_eq;

    #[test]
    fn p0_values() {
        assert_eq!(p0_of(0.0).unwrap(), 0.0);
        assert!(p0_of(-1e-3).is_err());
        assert_relative_eq!(p0_of(0.004_476_75).unwrap(), 0.004_456_6, max_relative = 1e-4);
        assert!(p0_of(50.0).unwrap() <= 0.5);
        for l in [0.0, 0.1, 1.0, 3.0] {
            assert_relative_eq!(1.0 - 2.0 * p0_of(l).unwrap(), (-2.0 * l).exp(), epsilon = 1e-15);
        }
    }

    #[test]
    fn flat_point_with_state() {
        let s = DetectorShape::sphere(1.0, 1.0).unwrap();
        let c = full_set(&s).unwrap();
        let flat = excitation_probability(&c, &CurvaturePoint::flat()).unwrap();
        assert_eq!(flat.p, flat.p0);
        let omega0 = 1e-3;
        let b = excitation_probability(&c, &CurvaturePoint::flat().with_omega0(omega0)).unwrap();
        assert_relative_eq!(b.p - b.p0, b.damping * 4.0 * PI * PI * omega0 * c.lomega, max_relative = 1e-10);
        assert!(b.p > b.p0);
    }

    #[test]
    fn flags_large_corrections() {
        let s = DetectorShape::sphere(1.0, 1.0).unwrap();
        let c = full_set(&s).unwrap();
        let p = catalog(Catalog::DeSitter { hubble: 3.0 }).unwrap();
        let b = excitation_probability(&c, &p).unwrap();
        assert!(b.out_of_validity);
    }

    #[test]
    fn wightman_symmetry_and_coincidence() {
        let p = catalog(Catalog::DeSitter { hubble: 1e-3 }).unwrap();
        let x = Vector3::new(1.0, 2.0, 0.5);
        let y = Vector3::new(-0.3, 1.0, 2.0);
        assert_eq!(wightman_short_distance(&x, &y, &p).unwrap(), wightman_short_distance(&y, &x, &p).unwrap());
        assert!(wightman_short_distance(&x, &x, &p).is_err());
        let flat = wightman_short_distance(&x, &y, &CurvaturePoint::flat()).unwrap();
        assert_eq!(flat, 1.0 / (4.0 * PI * PI * (x - y).norm_squared()));
    }

    #[test]
    fn wick_counting_identity() {
        for n in 1..=12u32 {
            let lhs = double_factorial_odd(n);
            let rhs = 2f64.powi(1 - n as i32) * factorial(2 * n - 1) / factorial(n - 1);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-13);
        }
    }

    #[test]
    fn series_resums_to_exponential() {
        assert_eq!(quasifree_series_check(0.0, 5).unwrap(), 1.0);
        assert_relative_eq!(quasifree_series_check(0.3, 30).unwrap(), (-0.6f64).exp(), max_relative = 1e-12);
        let l: f64 = 0.7;
        let t = |n: i32| (-2.0 * l).powi(n) / factorial(n as u32);
        for n in 0..10 {
            assert_relative_eq!(t(n + 1) / t(n), -2.0 * l / f64::from(n + 1), max_relative = 1e-13);
        }
    }
}
