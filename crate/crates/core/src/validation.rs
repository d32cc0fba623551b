//! Side-by-side comparison of engine values, oracle values and the printed
//! closed forms.
//!
//! Entries are reported in the principal frame of each shape. Ratios of the
//! printed expressions to the oracle are recorded as measured; the oracle
//! value is the one used everywhere else.

use serde::{Deserialize, Serialize};

use crate::coefficients::{printed, CoefficientEngine};
use crate::error::Result;
use crate::oracle::{b_functional, b_functional_mc, KernelKind, McEstimate, OracleConfig};
use crate::shape::DetectorShape;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub quantity: String,
    pub engine: f64,
    pub oracle: f64,
    pub relative_difference: f64,
    pub printed: Option<f64>,
    pub printed_over_oracle: Option<f64>,
    pub monte_carlo: Option<McEstimate>,
    /// `(mc − oracle) / std_error`
    pub monte_carlo_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub axes: [f64; 3],
    pub coupling: f64,
    pub entries: Vec<ValidationEntry>,
}

impl ShapeReport {
    pub fn max_relative_difference(&self) -> f64 {
        self.entries.iter().filter(|e| !e.quantity.starts_with('D')).map(|e| e.relative_difference).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub engine: String,
    pub oracle: OracleConfig,
    pub shapes: Vec<ShapeReport>,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Compares `engine` with the oracle on the principal-frame version of
/// `shape`; `with_mc` adds the Monte Carlo path.
pub fn validate_shape(
    shape: &DetectorShape,
    engine: &dyn CoefficientEngine,
    cfg: &OracleConfig,
    with_mc: bool,
) -> Result<ShapeReport> {
    let principal = DetectorShape::axis_aligned(shape.axes(), shape.coupling())?;
    let set = engine.compute(&principal)?;
    let oracle = |k| b_functional(&principal, k, cfg);
    let mc = |k| -> Result<Option<McEstimate>> {
        if with_mc {
            b_functional_mc(&principal, k, cfg).map(Some)
        } else {
            Ok(None)
        }
    };

    let printed_l0 = printed::l0(&principal).or_else(|| printed::l0_sphere(&principal));
    let printed_lij = printed::lij_principal(&principal);
    let printed_e = printed::moment_ratio_principal(&principal);

    let mut entries = Vec::new();
    let mut push = |quantity: String, kernel: KernelKind, engine_value: f64, printed: Option<f64>| -> Result<f64> {
        let o = oracle(kernel)?;
        let m = mc(kernel)?;
        entries.push(ValidationEntry {
            quantity,
            engine: engine_value,
            oracle: o,
            relative_difference: rel(engine_value, o),
            printed,
            printed_over_oracle: printed.map(|p| p / o),
            monte_carlo: m,
            monte_carlo_z: m.map(|m| if m.std_error > 0.0 { (m.estimate - o) / m.std_error } else { 0.0 }),
        });
        Ok(o)
    };

    let l0 = push("L0".into(), KernelKind::One, set.l0, printed_l0)?;
    push("L_omega".into(), KernelKind::DiffSquared, set.lomega, Some(printed::lomega(&principal)))?;
    push("L_R".into(), KernelKind::DiffSquaredLog, set.lr, None)?;
    let mut lij = [0.0; 3];
    for i in 0..3 {
        lij[i] = push(format!("L^{0}{0}'", i + 1), KernelKind::DiffQuadratic(i, i), set.lij[(i, i)], printed_lij[i])?;
    }
    for i in 0..3 {
        let printed_q = printed_l0.zip(printed_lij[i]).map(|(l0p, lp)| 0.25 * lp + 0.5 * l0p * printed_e[i]);
        push(format!("Q^{0}{0}'", i + 1), KernelKind::Quadratic(i, i), set.q[(i, i)], printed_q)?;
    }
    for i in 0..3 {
        push(format!("D^{}'", i + 1), KernelKind::Linear(i), set.d[i], Some(0.0))?;
    }
    // Moment ratio E^ii recovered from the oracle values of Q, L and L₀.
    let [a, b, c] = principal.axes();
    for (i, axis) in [a, b, c].into_iter().enumerate() {
        let q_oracle = entries.iter().find(|e| e.quantity == format!("Q^{0}{0}'", i + 1)).map(|e| e.oracle);
        let e_oracle = q_oracle.map(|q| 2.0 * (q - 0.25 * lij[i]) / l0).unwrap_or(f64::NAN);
        let e_engine = 1.0 / (axis * axis);
        entries.push(ValidationEntry {
            quantity: format!("E^{0}{0}'", i + 1),
            engine: e_engine,
            oracle: e_oracle,
            relative_difference: rel(e_engine, e_oracle),
            printed: Some(printed_e[i]),
            printed_over_oracle: Some(printed_e[i] / e_oracle),
            monte_carlo: None,
            monte_carlo_z: None,
        });
    }
    Ok(ShapeReport { axes: principal.axes(), coupling: principal.coupling(), entries })
}

pub fn validation_report(
    shapes: &[DetectorShape],
    engine: &dyn CoefficientEngine,
    cfg: &OracleConfig,
    with_mc: bool,
) -> Result<ValidationReport> {
    let shapes = shapes.iter().map(|s| validate_shape(s, engine, cfg, with_mc)).collect::<Result<_>>()?;
    Ok(ValidationReport { engine: engine.name().to_owned(), oracle: *cfg, shapes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::AnalyticEngine;
    use approx::assert_relative_eq;

    #[test]
    fn report_records_printed_ratios() {
        let s = DetectorShape::axis_aligned([1.0, 1.5, 2.0], 1.0).unwrap();
        let r = validate_shape(&s, &AnalyticEngine, &OracleConfig::default(), false).unwrap();
        assert!(r.max_relative_difference() < 1e-8);
        let l0 = r.entries.iter().find(|e| e.quantity == "L0").unwrap();
        assert_relative_eq!(l0.printed_over_oracle.unwrap(), 3.0 / (2.0 * 2f64.sqrt()), max_relative = 1e-8);
        let lw = r.entries.iter().find(|e| e.quantity == "L_omega").unwrap();
        assert_relative_eq!(lw.printed_over_oracle.unwrap(), 0.5, max_relative = 1e-8);
        let e11 = r.entries.iter().find(|e| e.quantity == "E^11'").unwrap();
        assert_relative_eq!(e11.oracle, 1.0, max_relative = 1e-7);
    }
}
