//! Special functions used by the smearing-coefficient closed forms.
//!
//! The incomplete elliptic integrals are evaluated through Carlson's symmetric
//! forms with the duplication algorithm. Legendre forms use the *parameter*
//! convention: the second slot is `m = k²`, so
//!
//! ```text
//! F(φ | m) = ∫₀^φ dθ / √(1 − m sin²θ)
//! E(φ | m) = ∫₀^φ dθ √(1 − m sin²θ)
//! ```

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// Duplication stops once every normalized deviation is below these; the
// truncated series error is then O(tol^6), well under 1e-16.
const RF_TOL: f64 = 8.0e-4;
const RD_TOL: f64 = 8.0e-4;
const MAX_DUPLICATIONS: usize = 64;

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::Domain(format!("{name} = {v} must be finite and non-negative")));
    }
    Ok(())
}

/// Carlson's symmetric integral of the first kind,
/// `R_F(x,y,z) = ½ ∫₀^∞ dt / √((t+x)(t+y)(t+z))`.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    check_nonneg("y", y)?;
    check_nonneg("z", z)?;
    let zeros = [x, y, z].iter().filter(|v| **v == 0.0).count();
    if zeros >= 2 {
        return Err(Error::Domain(format!("R_F({x}, {y}, {z}) diverges: at most one argument may be zero")));
    }
    let (mut x, mut y, mut z) = (x, y, z);
    let mut mean = (x + y + z) / 3.0;
    let (mut dx, mut dy, mut dz);
    let mut iterations = 0;
    loop {
        dx = (mean - x) / mean;
        dy = (mean - y) / mean;
        dz = (mean - z) / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) <= RF_TOL || iterations >= MAX_DUPLICATIONS {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        mean = (x + y + z) / 3.0;
        iterations += 1;
    }
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    let series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0 - 5.0 * e2 * e2 * e2 / 208.0
        + 3.0 * e3 * e3 / 104.0
        + e2 * e2 * e3 / 16.0;
    Ok(series / mean.sqrt())
}

/// Carlson's symmetric integral of the second kind,
/// `R_D(x,y,z) = (3/2) ∫₀^∞ dt / ((t+z) √((t+x)(t+y)(t+z)))`.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    check_nonneg("y", y)?;
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!("R_D requires z > 0, got {z}")));
    }
    if x == 0.0 && y == 0.0 {
        return Err(Error::Domain("R_D diverges when x = y = 0".into()));
    }
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    let mut iterations = 0;
    let (mut dx, mut dy, mut dz, mut mean);
    loop {
        mean = 0.2 * (x + y + 3.0 * z);
        dx = (mean - x) / mean;
        dy = (mean - y) / mean;
        dz = (mean - z) / mean;
        if dx.abs().max(dy.abs()).max(dz.abs()) <= RD_TOL || iterations >= MAX_DUPLICATIONS {
            break;
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        iterations += 1;
    }
    let ea = dx * dy;
    let eb = dz * dz;
    let ec = ea - eb;
    let ed = ea - 6.0 * eb;
    let ee = ed + ec + ec;
    const C1: f64 = 3.0 / 14.0;
    const C2: f64 = 1.0 / 6.0;
    const C3: f64 = 9.0 / 22.0;
    const C4: f64 = 3.0 / 26.0;
    const C5: f64 = 0.25 * C3;
    const C6: f64 = 1.5 * C4;
    let series = 1.0 + ed * (-C1 + C5 * ed - C6 * dz * ee) + dz * (C2 * ee + dz * (-C3 * ec + dz * C4 * ea));
    Ok(3.0 * sum + fac * series / (mean * mean.sqrt()))
}

/// Amplitude and parameter of an incomplete Legendre elliptic integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticArgs {
    pub phi: f64,
    pub m: f64,
}

impl EllipticArgs {
    pub fn new(phi: f64, m: f64) -> Result<Self> {
        if !phi.is_finite() || !(0.0..=FRAC_PI_2).contains(&phi) {
            return Err(Error::Domain(format!("amplitude φ = {phi} must lie in [0, π/2]")));
        }
        if !m.is_finite() || !(0.0..=1.0).contains(&m) {
            return Err(Error::Domain(format!("parameter m = {m} must lie in [0, 1]")));
        }
        Ok(Self { phi, m })
    }

    fn is_pole(&self) -> bool {
        self.m == 1.0 && self.phi >= FRAC_PI_2
    }
}

/// Incomplete elliptic integral of the first kind `F(φ | m)`.
pub fn ellip_f(args: EllipticArgs) -> Result<f64> {
    let EllipticArgs { phi, m } = EllipticArgs::new(args.phi, args.m)?;
    if args.is_pole() {
        return Err(Error::Pole("F(π/2 | 1) is logarithmically divergent".into()));
    }
    legendre_f(phi, m)
}

/// Incomplete elliptic integral of the second kind `E(φ | m)`.
pub fn ellip_e(args: EllipticArgs) -> Result<f64> {
    let EllipticArgs { phi, m } = EllipticArgs::new(args.phi, args.m)?;
    if m == 1.0 {
        // √(1 − sin²θ) = |cos θ| on [0, π/2]
        return Ok(phi.sin());
    }
    legendre_e(phi, m)
}

/// `F(φ | m)` for any `m` with `m sin²φ < 1`; used where printed closed
/// forms pass a parameter above one.
pub(crate) fn legendre_f(phi: f64, m: f64) -> Result<f64> {
    if phi == 0.0 {
        return Ok(0.0);
    }
    let (s, c) = phi.sin_cos();
    let delta = 1.0 - m * s * s;
    if delta <= 0.0 {
        return Err(Error::Domain(format!("1 − m sin²φ = {delta} must be positive")));
    }
    Ok(s * carlson_rf(c * c, delta, 1.0)?)
}

pub(crate) fn legendre_e(phi: f64, m: f64) -> Result<f64> {
    if phi == 0.0 {
        return Ok(0.0);
    }
    let (s, c) = phi.sin_cos();
    let delta = 1.0 - m * s * s;
    if delta <= 0.0 {
        return Err(Error::Domain(format!("1 − m sin²φ = {delta} must be positive")));
    }
    let cc = c * c;
    let rf = carlson_rf(cc, delta, 1.0)?;
    if m == 0.0 {
        return Ok(s * rf);
    }
    let rd = carlson_rd(cc, delta, 1.0)?;
    Ok(s * rf - m * s * s * s * rd / 3.0)
}

/// Digamma function ψ(x) for x > 0.
pub fn digamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    // Stirling series with Bernoulli numbers B2..B14
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(shift + x.ln() - 0.5 * inv - tail)
}

/// Γ(n/2) for a positive integer `n`, by exact recurrence from Γ(½) and Γ(1).
pub fn gamma_half_integer(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("Γ(0) is a pole".into()));
    }
    let (mut value, mut s) = if n.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = f64::from(n) / 2.0;
    while s < target {
        value *= s;
        s += 1.0;
    }
    Ok(value)
}
