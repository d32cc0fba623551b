//! Rotated ellipsoidal Gaussian smearing profiles.
//!
//! A shape is described by three inverse lengths `a ≤ b ≤ c` along its
//! principal axes, a proper rotation taking principal-frame vectors to the
//! lab (Fermi) frame, and the coupling strength λ (units of length). The
//! smearing function is the normalized Gaussian
//! `f(x) = √det(A) / (2π)^{3/2} · exp(−½ xᵀ A x)` with
//! `A = R · diag(a², b², c²) · Rᵀ`.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ORTHO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeFields", into = "ShapeFields")]
pub struct DetectorShape {
    axes: [f64; 3],
    rotation: Matrix3<f64>,
    coupling: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ShapeFields {
    axes: [f64; 3],
    #[serde(with = "crate::serde_matrix::rows3")]
    rotation: Matrix3<f64>,
    coupling: f64,
}

impl TryFrom<ShapeFields> for DetectorShape {
    type Error = Error;

    fn try_from(f: ShapeFields) -> Result<Self> {
        Self::new(f.axes, f.rotation, f.coupling)
    }
}

impl From<DetectorShape> for ShapeFields {
    fn from(s: DetectorShape) -> Self {
        Self { axes: s.axes, rotation: s.rotation, coupling: s.coupling }
    }
}

impl DetectorShape {
    /// Builds a shape, sorting the axes ascending and permuting the rotation
    /// columns to match.
    pub fn new(axes: [f64; 3], rotation: Matrix3<f64>, coupling: f64) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if !a.is_finite() || *a <= 0.0 {
                return Err(Error::InvalidInput(format!("axis parameter {i} = {a} must be positive")));
            }
        }
        if !coupling.is_finite() || coupling <= 0.0 {
            return Err(Error::InvalidInput(format!("coupling λ = {coupling} must be positive")));
        }
        let ortho = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if !(ortho <= ORTHO_TOL) {
            return Err(Error::InvalidInput(format!("rotation is not orthogonal (max |RᵀR − I| = {ortho:e})")));
        }
        if (rotation.determinant() - 1.0).abs() > ORTHO_TOL * 10.0 {
            return Err(Error::InvalidInput("rotation must have determinant +1".into()));
        }

        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| axes[i].total_cmp(&axes[j]));
        let sorted = [axes[order[0]], axes[order[1]], axes[order[2]]];
        let mut rot = Matrix3::from_columns(&[
            rotation.column(order[0]).into_owned(),
            rotation.column(order[1]).into_owned(),
            rotation.column(order[2]).into_owned(),
        ]);
        // An odd permutation flips handedness; reversing one principal axis
        // leaves the Gaussian unchanged.
        if rot.determinant() < 0.0 {
            rot.column_mut(2).neg_mut();
        }
        Ok(Self { axes: sorted, rotation: rot, coupling })
    }

    pub fn axis_aligned(axes: [f64; 3], coupling: f64) -> Result<Self> {
        Self::new(axes, Matrix3::identity(), coupling)
    }

    /// Isotropic Gaussian of characteristic size `size` (`a = b = c = 1/size`).
    pub fn sphere(size: f64, coupling: f64) -> Result<Self> {
        if !size.is_finite() || size <= 0.0 {
            return Err(Error::InvalidInput(format!("sphere size {size} must be positive")));
        }
        Self::axis_aligned([1.0 / size; 3], coupling)
    }

    /// Rotation given as axis and angle in radians. A zero axis with zero
    /// angle is the identity.
    pub fn with_axis_angle(axes: [f64; 3], axis: Vector3<f64>, angle: f64, coupling: f64) -> Result<Self> {
        Self::new(axes, axis_angle(axis, angle)?, coupling)
    }

    pub fn axes(&self) -> [f64; 3] {
        self.axes
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    /// `A = R diag(a², b², c²) Rᵀ`.
    pub fn precision_matrix(&self) -> Matrix3<f64> {
        let [a, b, c] = self.axes;
        self.rotate(&Matrix3::from_diagonal(&Vector3::new(a * a, b * b, c * c)))
    }

    /// `A⁻¹`, the covariance of the smearing Gaussian.
    pub fn covariance(&self) -> Matrix3<f64> {
        let [a, b, c] = self.axes;
        self.rotate(&Matrix3::from_diagonal(&Vector3::new(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c))))
    }

    /// `√det A = abc`.
    pub fn sqrt_det(&self) -> f64 {
        self.axes.iter().product()
    }

    /// Rotates a principal-frame rank-2 tensor into the lab frame.
    pub fn rotate(&self, principal: &Matrix3<f64>) -> Matrix3<f64> {
        self.rotation * principal * self.rotation.transpose()
    }

    /// Normalized smearing density at a lab-frame point.
    pub fn density(&self, x: &Vector3<f64>) -> f64 {
        let a = self.precision_matrix();
        let norm = self.sqrt_det() / (2.0 * std::f64::consts::PI).powf(1.5);
        norm * (-0.5 * x.dot(&(a * x))).exp()
    }

    /// The same shape with every length scaled by `s` (axis parameters by `1/s`).
    pub fn dilated(&self, s: f64) -> Result<Self> {
        Self::new(self.axes.map(|a| a / s), self.rotation, self.coupling)
    }

    /// Applies an additional lab-frame rotation `q` (new rotation `q·R`).
    pub fn rotated(&self, q: &Matrix3<f64>) -> Result<Self> {
        Self::new(self.axes, q * self.rotation, self.coupling)
    }

    pub fn with_coupling(&self, coupling: f64) -> Result<Self> {
        Self::new(self.axes, self.rotation, coupling)
    }

    pub fn is_sphere(&self) -> bool {
        self.axes[0] == self.axes[2]
    }

    /// Stable 64-bit fingerprint of the exact parameter bits (FNV-1a).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut feed = |v: f64| {
            for byte in v.to_bits().to_le_bytes() {
                h ^= u64::from(byte);
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        self.axes.iter().for_each(|a| feed(*a));
        self.rotation.iter().for_each(|r| feed(*r));
        feed(self.coupling);
        h
    }
}

pub fn axis_angle(axis: Vector3<f64>, angle: f64) -> Result<Matrix3<f64>> {
    if !angle.is_finite() || axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("axis-angle rotation must be finite".into()));
    }
    if angle == 0.0 {
        return Ok(Matrix3::identity());
    }
    let norm = axis.norm();
    if norm == 0.0 {
        return Err(Error::InvalidInput("rotation axis must be non-zero".into()));
    }
    Ok(*Rotation3::from_axis_angle(&Unit::new_normalize(axis), angle).matrix())
}

/// Proper rotation taking `e₁` onto the unit vector along `direction`.
pub fn rotation_taking_x_to(direction: Vector3<f64>) -> Result<Matrix3<f64>> {
    let norm = direction.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidInput("direction must be non-zero".into()));
    }
    let d = direction / norm;
    let x = Vector3::x();
    Ok(match Rotation3::rotation_between(&x, &d) {
        Some(r) => *r.matrix(),
        // antiparallel: half turn about z
        None => *Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::PI).matrix(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn canonicalizes_axis_order() {
        let s = DetectorShape::axis_aligned([2.0, 0.5, 1.0], 1.0).unwrap();
        assert_eq!(s.axes(), [0.5, 1.0, 2.0]);
        assert_relative_eq!(s.rotation().determinant(), 1.0, epsilon = 1e-14);
        // precision matrix is invariant under canonicalization
        let a = s.precision_matrix();
        assert_relative_eq!(a, Matrix3::from_diagonal(&Vector3::new(4.0, 0.25, 1.0)), epsilon = 1e-14);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(DetectorShape::axis_aligned([0.0, 1.0, 1.0], 1.0).is_err());
        assert!(DetectorShape::axis_aligned([1.0, 1.0, 1.0], 0.0).is_err());
        let reflection = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert!(DetectorShape::new([1.0, 2.0, 3.0], reflection, 1.0).is_err());
        let skew = Matrix3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(DetectorShape::new([1.0, 2.0, 3.0], skew, 1.0).is_err());
    }

    #[test]
    fn density_is_normalized_on_axis() {
        let s = DetectorShape::sphere(1.0, 1.0).unwrap();
        let peak = s.density(&Vector3::zeros());
        assert_relative_eq!(peak, (2.0 * std::f64::consts::PI).powf(-1.5), max_relative = 1e-15);
    }

    #[test]
    fn rotation_to_direction() {
        for d in [Vector3::new(1.0, 1.0, 0.0), Vector3::new(-1.0, 0.0, 0.0), Vector3::new(0.0, 0.3, -2.0)] {
            let r = rotation_taking_x_to(d).unwrap();
            assert_relative_eq!(r * Vector3::x(), d.normalize(), epsilon = 1e-14);
            assert_relative_eq!(r.determinant(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn fingerprint_distinguishes_shapes() {
        let a = DetectorShape::axis_aligned([1.0, 2.0, 3.0], 1.0).unwrap();
        let b = a.with_coupling(2.0).unwrap();
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }
}
