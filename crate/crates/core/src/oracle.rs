//! Independent evaluation of the smearing integrals.
//!
//! Every shape coefficient is a six-dimensional integral
//! `λ² ∫∫ d³x d³x′ f(x) f(x′) W₀(x, x′) h(x, x′)` with the equal-time flat
//! correlator `W₀ = 1/(8π²σ)`, `σ = ½|x − x′|²`. Two evaluation paths are
//! provided:
//!
//! - [`b_functional`] changes variables to `u = (x − x′)/√2`,
//!   `v = (x + x′)/√2`, integrates `v` analytically, does the radial `u`
//!   integral in closed form and the remaining angular integral by adaptive
//!   cubature over the sphere.
//! - [`b_functional_mc`] samples the literal six-dimensional integrand by
//!   importance sampling with antithetic pairs.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_2d, Tolerance};
use crate::shape::DetectorShape;
use crate::special::{digamma, gamma_half_integer};

/// The factor `h(x, x′)` multiplying `f f W₀` in each coefficient.
/// Indices are zero-based lab-frame axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    /// `1`, giving L₀.
    One,
    /// `x^i`, giving D^i.
    Linear(usize),
    /// `x^i x^j`, giving Q^ij.
    Quadratic(usize, usize),
    /// `(x − x′)^i (x − x′)^j`, giving L^ij.
    DiffQuadratic(usize, usize),
    /// `(x − x′)² ln|½(x − x′)²|`, giving L_R.
    DiffSquaredLog,
    /// `(x − x′)²`, giving L_ω.
    DiffSquared,
}

impl KernelKind {
    pub fn validate(self) -> Result<Self> {
        let ok = |i: usize| i < 3;
        let valid = match self {
            Self::Linear(i) => ok(i),
            Self::Quadratic(i, j) | Self::DiffQuadratic(i, j) => ok(i) && ok(j),
            _ => true,
        };
        if valid {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!("kernel index out of range in {self:?}")))
        }
    }

    /// One representative of every distinct kernel (upper triangle for
    /// rank-2 kernels): 1 + 3 + 6 + 6 + 1 + 1 = 18 entries.
    pub fn all() -> Vec<Self> {
        let mut out = vec![Self::One];
        out.extend((0..3).map(Self::Linear));
        for i in 0..3 {
            for j in i..3 {
                out.push(Self::Quadratic(i, j));
            }
        }
        for i in 0..3 {
            for j in i..3 {
                out.push(Self::DiffQuadratic(i, j));
            }
        }
        out.push(Self::DiffSquaredLog);
        out.push(Self::DiffSquared);
        out
    }

    fn tag(self) -> u64 {
        match self {
            Self::One => 1,
            Self::Linear(i) => 0x10 + i as u64,
            Self::Quadratic(i, j) => 0x100 + 4 * i as u64 + j as u64,
            Self::DiffQuadratic(i, j) => 0x200 + 4 * i as u64 + j as u64,
            Self::DiffSquaredLog => 0x300,
            Self::DiffSquared => 0x400,
        }
    }

    /// The kernel as a function of the two lab-frame points.
    pub fn h(self, x: &Vector3<f64>, xp: &Vector3<f64>) -> f64 {
        let d = x - xp;
        match self {
            Self::One => 1.0,
            Self::Linear(i) => x[i],
            Self::Quadratic(i, j) => x[i] * x[j],
            Self::DiffQuadratic(i, j) => d[i] * d[j],
            Self::DiffSquaredLog => {
                let d2 = d.norm_squared();
                d2 * (0.5 * d2).abs().ln()
            }
            Self::DiffSquared => d.norm_squared(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Relative tolerance of the angular cubature, measured against the
    /// integral of the absolute integrand.
    pub angular_tolerance: f64,
    pub mc_samples: u64,
    pub seed: u64,
    pub max_cells: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { angular_tolerance: 1e-9, mc_samples: 1_000_000, seed: 0x5eed, max_cells: 20_000 }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.angular_tolerance > 0.0) {
            return Err(Error::InvalidInput("angular_tolerance must be positive".into()));
        }
        if self.mc_samples < 10_000 {
            return Err(Error::InvalidInput(format!("mc_samples = {} is below the minimum of 10000", self.mc_samples)));
        }
        Ok(())
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance { relative: self.angular_tolerance, absolute: 0.0, max_cells: self.max_cells }
    }
}

/// `∫₀^∞ r^power e^{−q r²/2} dr`, optionally with an extra factor `ln r²`.
pub fn radial_moment(q: f64, power: u32, with_log: bool) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("radial moment needs q > 0, got {q}")));
    }
    let s = 0.5 * f64::from(power + 1);
    let scale = 2.0 / q;
    let base = 0.5 * scale.powf(s) * gamma_half_integer(power + 1)?;
    if with_log {
        Ok(base * (digamma(s)? + scale.ln()))
    } else {
        Ok(base)
    }
}

/// `λ²/(8π²) · √det A / (2π)^{3/2}`: the prefactor left after the analytic
/// `v` integration.
fn reduced_prefactor(shape: &DetectorShape) -> f64 {
    let lambda = shape.coupling();
    lambda * lambda / (8.0 * PI * PI) * shape.sqrt_det() / (2.0 * PI).powf(1.5)
}

/// The `u`-integrand after integrating out `v`, reduced along a unit
/// direction `n` with `q = nᵀ A n`.
fn reduced_angular(kernel: KernelKind, n: &Vector3<f64>, q: f64, cov: &Matrix3<f64>) -> Result<f64> {
    Ok(match kernel {
        KernelKind::One => radial_moment(q, 0, false)?,
        KernelKind::Linear(i) => n[i] / SQRT_2 * radial_moment(q, 1, false)?,
        KernelKind::Quadratic(i, j) => {
            0.5 * n[i] * n[j] * radial_moment(q, 2, false)? + 0.5 * cov[(i, j)] * radial_moment(q, 0, false)?
        }
        KernelKind::DiffQuadratic(i, j) => 2.0 * n[i] * n[j] * radial_moment(q, 2, false)?,
        KernelKind::DiffSquared => 2.0 * radial_moment(q, 2, false)?,
        KernelKind::DiffSquaredLog => 2.0 * radial_moment(q, 2, true)?,
    })
}

/// Coefficient integral for `kernel` by the semi-analytic reduction.
pub fn b_functional(shape: &DetectorShape, kernel: KernelKind, cfg: &OracleConfig) -> Result<f64> {
    let kernel = kernel.validate()?;
    cfg.validate()?;
    let a = shape.precision_matrix();
    let cov = shape.covariance();
    let integrand = |theta: f64, phi: f64| {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let n = Vector3::new(st * cp, st * sp, ct);
        let q = n.dot(&(a * n));
        // q ≥ a_min² > 0 for every direction, so the reduction cannot fail.
        st * reduced_angular(kernel, &n, q, &cov).unwrap_or(f64::NAN)
    };
    let est = integrate_2d(integrand, (0.0, PI), (0.0, 2.0 * PI), [2, 4], cfg.tolerance())?;
    if !est.value.is_finite() {
        return Err(Error::Domain(format!("non-finite angular integral for {kernel:?}")));
    }
    Ok(reduced_prefactor(shape) * est.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

const MC_BATCHES: u64 = 64;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.n;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Self) -> Self {
        if self.n == 0.0 {
            return other;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Self { n, mean: self.mean + delta * other.n / n, m2: self.m2 + other.m2 + delta * delta * self.n * other.n / n }
    }
}

/// Coefficient integral for `kernel` by Monte Carlo over the literal
/// six-dimensional integrand.
///
/// `v` is drawn from the Gaussian `N(0, A⁻¹)`. `u` has a uniform direction
/// and a half-normal radius of scale `1/a_min`, so that its density
/// `e^{−a_min² r²/2}/(4πr²)` cancels the `1/u²` singularity of `W₀` and the
/// importance weights stay bounded. Each draw is paired with its mirror
/// image `(−u, −v)`.
pub fn b_functional_mc(shape: &DetectorShape, kernel: KernelKind, cfg: &OracleConfig) -> Result<McEstimate> {
    let kernel = kernel.validate()?;
    cfg.validate()?;
    let lambda2 = shape.coupling().powi(2);
    let rot = *shape.rotation();
    let [a_min, b, c] = shape.axes();
    let inv_axes = Vector3::new(1.0 / a_min, 1.0 / b, 1.0 / c);
    let mu = a_min * a_min;
    let a = shape.precision_matrix();
    let v_norm = shape.sqrt_det() / (2.0 * PI).powf(1.5);
    let r_norm = (2.0 * mu / PI).sqrt();

    let weight = |u: &Vector3<f64>, v: &Vector3<f64>| {
        let x = (u + v) / SQRT_2;
        let xp = (v - u) / SQRT_2;
        let d2 = (x - xp).norm_squared();
        let w0 = 1.0 / (4.0 * PI * PI * d2);
        let target = lambda2 * shape.density(&x) * shape.density(&xp) * w0 * kernel.h(&x, &xp);
        let r2 = u.norm_squared();
        let p_u = r_norm * (-0.5 * mu * r2).exp() / (4.0 * PI * r2);
        let p_v = v_norm * (-0.5 * v.dot(&(a * v))).exp();
        target / (p_u * p_v)
    };

    let key = mix(cfg.seed ^ mix(kernel.tag() ^ mix(shape.fingerprint())));
    let pairs = cfg.mc_samples.div_ceil(2);
    let per_batch = pairs.div_ceil(MC_BATCHES);
    let batches: Vec<Moments> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(key);
            rng.set_stream(batch);
            let count = per_batch.min(pairs.saturating_sub(batch * per_batch));
            let mut m = Moments::default();
            for _ in 0..count {
                let dir = loop {
                    let g = Vector3::new(
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                    );
                    let norm = g.norm();
                    if norm > 1e-300 {
                        break g / norm;
                    }
                };
                let radius = loop {
                    let w: f64 = rng.sample(StandardNormal);
                    if w != 0.0 {
                        break w.abs() / mu.sqrt();
                    }
                };
                let u = dir * radius;
                let z = Vector3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                );
                let v = rot * z.component_mul(&inv_axes);
                m.push(0.5 * (weight(&u, &v) + weight(&-u, &-v)));
            }
            m
        })
        .collect();
    let total = batches.into_iter().fold(Moments::default(), Moments::merge);
    let variance = if total.n > 1.0 { total.m2 / (total.n - 1.0) } else { 0.0 };
    Ok(McEstimate { estimate: total.mean, std_error: (variance / total.n).sqrt(), samples: 2 * total.n as u64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate_to_infinity, Tolerance};
    use approx::assert_relative_eq;

    #[test]
    fn radial_moment_closed_forms() {
        assert_relative_eq!(radial_moment(2.0, 0, false).unwrap(), PI.sqrt() / 2.0, max_relative = 1e-15);
        assert_relative_eq!(radial_moment(1.0, 2, false).unwrap(), (PI / 2.0).sqrt(), max_relative = 1e-15);
        assert!(radial_moment(0.0, 1, false).is_err());
    }

    #[test]
    fn radial_moment_with_log_matches_quadrature() {
        for (q, p) in [(1.0, 2), (0.3, 0), (4.0, 1), (2.5, 3)] {
            let exact = radial_moment(q, p, true).unwrap();
            let num = integrate_to_infinity(
                |r: f64| r.powi(p as i32) * (-0.5 * q * r * r).exp() * (r * r).ln(),
                0.0,
                Tolerance::relative(1e-13),
            )
            .unwrap();
            assert_relative_eq!(exact, num.value, max_relative = 1e-10);
        }
    }

    #[test]
    fn sphere_values() {
        let cfg = OracleConfig::default();
        let s = DetectorShape::sphere(1.0, 1.0).unwrap();
        let l0 = b_functional(&s, KernelKind::One, &cfg).unwrap();
        assert_relative_eq!(l0, 1.0 / (8.0 * PI * PI), max_relative = 1e-10);
        let lw = b_functional(&s, KernelKind::DiffSquared, &cfg).unwrap();
        assert_relative_eq!(lw, 1.0 / (4.0 * PI * PI), max_relative = 1e-10);
    }

    #[test]
    fn kernels_are_validated() {
        let s = DetectorShape::sphere(1.0, 1.0).unwrap();
        assert!(b_functional(&s, KernelKind::Linear(3), &OracleConfig::default()).is_err());
        let cfg = OracleConfig { mc_samples: 10, ..OracleConfig::default() };
        assert!(b_functional_mc(&s, KernelKind::One, &cfg).is_err());
    }

    #[test]
    fn kernel_list_is_complete() {
        assert_eq!(KernelKind::all().len(), 18);
    }

    #[test]
    fn monte_carlo_is_deterministic_and_parity_exact() {
        let s = DetectorShape::with_axis_angle([0.8, 1.0, 1.7], Vector3::new(1.0, 2.0, 0.5), 0.7, 1.0).unwrap();
        let cfg = OracleConfig { mc_samples: 20_000, ..OracleConfig::default() };
        let a = b_functional_mc(&s, KernelKind::One, &cfg).unwrap();
        let b = b_functional_mc(&s, KernelKind::One, &cfg).unwrap();
        assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        let d = b_functional_mc(&s, KernelKind::Linear(1), &cfg).unwrap();
        assert!(d.estimate.abs() < 1e-15);
    }
}
