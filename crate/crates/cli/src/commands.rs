//! One function per subcommand. Each returns a [`Report`] holding the JSON
//! document and a flat table for CSV export.

use std::sync::Arc;

use anyhow::Context;
use detector_tomography::coefficients::engines;
use detector_tomography::measurement::{run_campaign, Campaign};
use detector_tomography::tomography::{
    design_experiment, design_strategies, frame_point, multi_frame_recovery, solve, ExperimentDesign, DERIVED_LABELS,
    PARAM_LABELS,
};
use detector_tomography::validation::{validate_shape, validation_report, ShapeReport};
use detector_tomography::{CoefficientEngine, CoefficientSet, CurvaturePoint, Error, RecoveryResult};
use serde_json::{json, Value};

use crate::config::{ConfigDocument, ConfigError};

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| (*h).to_owned()).collect(), rows: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub name: &'static str,
    pub json: Value,
    pub table: Table,
    /// Human-readable remarks written to stderr.
    pub notes: Vec<String>,
}

/// Shortest representation that parses back to the same value.
fn num(v: f64) -> String {
    if v.is_finite() {
        serde_json::to_string(&v).unwrap_or_else(|_| v.to_string())
    } else {
        v.to_string()
    }
}

const SYM: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn engine(doc: &ConfigDocument, name: Option<&str>) -> anyhow::Result<Arc<dyn CoefficientEngine>> {
    engines(doc.oracle).resolve(name.or(doc.engine.as_deref())).map_err(|e| ConfigError(e.to_string()).into())
}

fn coefficient_columns(c: &CoefficientSet) -> Vec<String> {
    let mut out = vec![num(c.l0)];
    out.extend(SYM.iter().map(|&(i, j)| num(c.q[(i, j)])));
    out.extend(c.d.iter().map(|v| num(*v)));
    out.extend(SYM.iter().map(|&(i, j)| num(c.lij[(i, j)])));
    out.push(num(c.lr));
    out.push(num(c.lomega));
    out.push(serde_json::to_value(c.provenance.l0).map(|v| v.as_str().unwrap_or("").to_owned()).unwrap_or_default());
    out
}

const COEFF_HEADERS: [&str; 19] = [
    "l0",
    "q11",
    "q22",
    "q33",
    "q12",
    "q13",
    "q23",
    "d1",
    "d2",
    "d3",
    "l11",
    "l22",
    "l33",
    "l12",
    "l13",
    "l23",
    "lr",
    "lomega",
    "provenance",
];

pub fn coeffs(doc: &ConfigDocument, engine_name: Option<&str>, with_validation: bool) -> anyhow::Result<Report> {
    let shapes = doc.shapes()?;
    let engine = engine(doc, engine_name)?;
    let mut headers: Vec<&str> = vec!["id"];
    headers.extend(COEFF_HEADERS);
    if with_validation {
        headers.extend(["oracle_max_relative_difference", "printed_l0_over_oracle", "printed_lomega_over_oracle"]);
    }
    let mut table = Table::new(&headers);
    let mut items = Vec::new();
    for (id, shape) in &shapes {
        let set = engine.compute(shape).with_context(|| format!("coefficients of shape `{id}`"))?;
        let mut row = vec![id.clone()];
        row.extend(coefficient_columns(&set));
        let mut item = json!({ "id": id, "coefficients": set });
        if with_validation {
            let report = validate_shape(shape, engine.as_ref(), &doc.oracle, false)?;
            let ratio = |q: &str| report.entries.iter().find(|e| e.quantity == q).and_then(|e| e.printed_over_oracle);
            row.push(num(report.max_relative_difference()));
            row.push(ratio("L0").map(num).unwrap_or_default());
            row.push(ratio("L_omega").map(num).unwrap_or_default());
            item["validation"] = serde_json::to_value(&report)?;
        }
        table.rows.push(row);
        items.push(item);
    }
    Ok(Report { name: "coeffs", json: json!({ "engine": engine.name(), "shapes": items }), table, notes: Vec::new() })
}

pub fn forward(doc: &ConfigDocument, engine_name: Option<&str>) -> anyhow::Result<Report> {
    let shapes = doc.shapes()?;
    let point = doc.curvature()?;
    let engine = engine(doc, engine_name)?;
    let mut table = Table::new(&[
        "id",
        "p0",
        "correction_volume",
        "correction_accel",
        "correction_vanvleck",
        "correction_scalar",
        "correction_state",
        "damping",
        "p",
        "out_of_validity",
        "out_of_range",
    ]);
    let mut items = Vec::new();
    let mut notes = Vec::new();
    for (id, shape) in &shapes {
        let c = engine.compute(shape)?;
        let b = detector_tomography::forward::excitation_probability(&c, &point)?;
        if b.out_of_validity {
            notes.push(format!("warning: shape `{id}` is outside the validity regime of the expansion"));
        }
        if b.out_of_range {
            notes.push(format!("warning: shape `{id}` has an unclamped probability outside [0, 1]"));
        }
        table.rows.push(vec![
            id.clone(),
            num(b.p0),
            num(b.correction_volume),
            num(b.correction_accel),
            num(b.correction_vanvleck),
            num(b.correction_scalar),
            num(b.correction_state),
            num(b.damping),
            num(b.p),
            b.out_of_validity.to_string(),
            b.out_of_range.to_string(),
        ]);
        items.push(json!({ "id": id, "breakdown": b }));
    }
    Ok(Report {
        name: "forward",
        json: json!({ "engine": engine.name(), "curvature": point, "probes": items }),
        table,
        notes,
    })
}

fn build_design(doc: &ConfigDocument, engine_name: Option<&str>) -> anyhow::Result<ExperimentDesign> {
    let spec = doc.design_spec()?;
    let pool = doc.pool()?;
    let engine = engine(doc, engine_name)?;
    let strategy = design_strategies().resolve(spec.strategy.as_deref()).map_err(|e| ConfigError(e.to_string()))?;
    match design_experiment(&pool, spec.count, engine.as_ref(), strategy.as_ref()) {
        Err(Error::InvalidInput(msg)) => Err(ConfigError(format!("design: {msg}")).into()),
        other => Ok(other?),
    }
}

pub fn design(doc: &ConfigDocument, engine_name: Option<&str>) -> anyhow::Result<Report> {
    let design = build_design(doc, engine_name)?;
    let mut headers = vec!["id", "pool_index"];
    headers.extend(PARAM_LABELS);
    let mut table = Table::new(&headers);
    for ((probe, idx), row) in design.probes.iter().zip(&design.pool_indices).zip(&design.design_matrix) {
        let mut r = vec![probe.id.clone(), idx.to_string()];
        r.extend(row.iter().map(|v| num(*v)));
        table.rows.push(r);
    }
    let notes = vec![format!(
        "rank {} of 13, condition number {:.6e}, strategy {}",
        design.rank, design.condition_number, design.strategy
    )];
    Ok(Report { name: "design", json: serde_json::to_value(&design)?, table, notes })
}

/// `with_std` is false for unit-weight noiseless fits, whose covariance
/// carries no information.
fn recovery_table(r: &RecoveryResult, truth: Option<&CurvaturePoint>, with_std: bool) -> Table {
    let mut table = Table::new(&["quantity", "value", "std", "truth"]);
    let p_truth = truth.map(detector_tomography::tomography::truth_parameters);
    let std = r.parameter_std();
    let std_col = |v: f64| if with_std { num(v) } else { String::new() };
    for (k, label) in PARAM_LABELS.iter().enumerate() {
        table.rows.push(vec![
            (*label).to_owned(),
            num(r.parameters[k]),
            std_col(std[k]),
            p_truth.map(|t| num(t[k])).unwrap_or_default(),
        ]);
    }
    let d_truth = truth.map(derived_truth);
    let (derived, dstd) = (r.derived(), r.derived_std());
    for (k, label) in DERIVED_LABELS.iter().enumerate() {
        table.rows.push(vec![
            (*label).to_owned(),
            num(derived[k]),
            std_col(dstd[k]),
            d_truth.map(|t| num(t[k])).unwrap_or_default(),
        ]);
    }
    table
}

/// Truth values in `RecoveryResult::derived` order.
fn derived_truth(point: &CurvaturePoint) -> [f64; 14] {
    let (ric, tidal) = (point.riemann.spatial_ricci(), point.riemann.tidal_block());
    let mut out = [0.0; 14];
    for (k, &(i, j)) in SYM.iter().enumerate() {
        out[k] = ric[(i, j)];
        out[6 + k] = tidal[(i, j)];
    }
    out[12] = point.omega0;
    out[13] = point.riemann.ricci()[(0, 0)];
    out
}

fn noiseless(design: &ExperimentDesign, point: &CurvaturePoint) -> anyhow::Result<RecoveryResult> {
    let measurements: Vec<(f64, f64)> = design.forward(point)?.iter().map(|b| (b.p, 1.0)).collect();
    Ok(solve(design, &measurements, &design.p0s()?)?)
}

pub fn recover(doc: &ConfigDocument, engine_name: Option<&str>) -> anyhow::Result<Report> {
    let design = build_design(doc, engine_name)?;
    let truth = doc.curvature.as_ref().map(|c| c.build()).transpose()?;
    let (recovery, source) = match (&doc.measurements, &truth) {
        (Some(ms), _) => {
            let measurements = design
                .probes
                .iter()
                .map(|p| {
                    ms.iter()
                        .find(|m| m.id == p.id)
                        .map(|m| (m.p, m.sigma))
                        .ok_or_else(|| ConfigError(format!("no measurement for design probe `{}`", p.id)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            (solve(&design, &measurements, &design.p0s()?)?, "measurements")
        }
        (None, Some(point)) => (noiseless(&design, point)?, "noiseless forward model"),
        (None, None) => return Err(ConfigError("recover needs `measurements` or `curvature`".into()).into()),
    };
    let table = recovery_table(&recovery, truth.as_ref(), doc.measurements.is_some());
    Ok(Report {
        name: "recover",
        json: json!({
            "source": source,
            "design": design,
            "recovery": recovery,
            "truth": truth,
        }),
        table,
        notes: vec![format!(
            "condition number {:.6e}, residual norm {:.3e}",
            recovery.condition_number, recovery.residual_norm
        )],
    })
}

pub fn simulate(doc: &ConfigDocument, engine_name: Option<&str>) -> anyhow::Result<Report> {
    let design = build_design(doc, engine_name)?;
    let truth = doc.curvature()?;
    let spec = doc.campaign()?;
    let campaign = Campaign { design, truth, shots_per_probe: spec.shots, seed: spec.seed };
    let result = run_campaign(&campaign).map_err(|e| match e {
        Error::InvalidInput(msg) => anyhow::Error::from(ConfigError(format!("campaign: {msg}"))),
        other => other.into(),
    })?;
    let mut table = Table::new(&["id", "p_truth", "clicks", "p_hat", "sigma", "shots_for_5_sigma"]);
    for p in &result.probes {
        table.rows.push(vec![
            p.id.clone(),
            num(p.p_truth),
            p.clicks.to_string(),
            num(p.p_hat),
            num(p.sigma),
            num(p.shots_for_5_sigma),
        ]);
    }
    let needed = result.probes.iter().map(|p| p.shots_for_5_sigma).fold(0.0, f64::max);
    Ok(Report {
        name: "simulate",
        json: json!({ "truth": campaign.truth, "result": result }),
        table,
        notes: vec![format!("shots per probe for 5σ detection on every probe: {needed:.3e}")],
    })
}

/// Noiseless per-frame recoveries unless `simulated`, in which case frame
/// `k` runs the configured campaign with seed `seed + k`.
pub fn boost_recover(doc: &ConfigDocument, engine_name: Option<&str>, simulated: bool) -> anyhow::Result<Report> {
    if doc.frames.is_empty() {
        return Err(ConfigError("boost-recover needs a non-empty `frames` list".into()).into());
    }
    let design = build_design(doc, engine_name)?;
    let truth = doc.curvature()?;
    let campaign = if simulated { Some(doc.campaign()?) } else { None };
    let mut frames = Vec::with_capacity(doc.frames.len());
    for (k, boost) in doc.frames.iter().enumerate() {
        let point = frame_point(&truth, boost);
        let recovery = match campaign {
            Some(spec) => {
                let c = Campaign {
                    design: design.clone(),
                    truth: point,
                    shots_per_probe: spec.shots,
                    seed: spec.seed.wrapping_add(k as u64),
                };
                run_campaign(&c)?.recovery
            }
            None => noiseless(&design, &point)?,
        };
        frames.push((*boost, recovery));
    }
    let recovered = multi_frame_recovery(&frames)?;
    let scale = truth.riemann.max_abs();
    let mut table = Table::new(&["component", "recovered", "truth"]);
    let (rec, tru) = (recovered.labelled(), truth.riemann.labelled());
    let mut max_err: f64 = 0.0;
    for (label, v) in &rec {
        let t = tru[label];
        max_err = max_err.max((v - t).abs());
        table.rows.push(vec![label.clone(), num(*v), num(t)]);
    }
    Ok(Report {
        name: "boost_recover",
        json: json!({
            "frames": doc.frames,
            "riemann": recovered,
            "truth": truth.riemann,
            "max_abs_error": max_err,
        }),
        table,
        notes: vec![format!("{} frames, max component error {max_err:.3e} (max |R| = {scale:.3e})", doc.frames.len())],
    })
}

pub fn validate(doc: &ConfigDocument, engine_name: Option<&str>, monte_carlo: bool) -> anyhow::Result<Report> {
    let shapes: Vec<_> = doc.shapes()?;
    let engine = engine(doc, engine_name)?;
    let just_shapes: Vec<_> = shapes.iter().map(|(_, s)| s.clone()).collect();
    let report = validation_report(&just_shapes, engine.as_ref(), &doc.oracle, monte_carlo)?;
    let mut table = Table::new(&[
        "id",
        "quantity",
        "engine",
        "oracle",
        "relative_difference",
        "printed",
        "printed_over_oracle",
        "monte_carlo",
        "monte_carlo_std_error",
        "monte_carlo_z",
    ]);
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    for ((id, _), r) in shapes.iter().zip(&report.shapes) {
        push_entries(&mut table, id, r, opt);
    }
    let notes = report
        .shapes
        .iter()
        .zip(&shapes)
        .map(|(r, (id, _))| {
            format!("shape `{id}`: max engine/oracle relative difference {:.3e}", r.max_relative_difference())
        })
        .collect();
    let ids: Vec<&str> = shapes.iter().map(|(id, _)| id.as_str()).collect();
    Ok(Report { name: "validate", json: json!({ "ids": ids, "report": report }), table, notes })
}

fn push_entries(table: &mut Table, id: &str, r: &ShapeReport, opt: impl Fn(Option<f64>) -> String) {
    for e in &r.entries {
        table.rows.push(vec![
            id.to_owned(),
            e.quantity.clone(),
            num(e.engine),
            num(e.oracle),
            num(e.relative_difference),
            opt(e.printed),
            opt(e.printed_over_oracle),
            opt(e.monte_carlo.map(|m| m.estimate)),
            opt(e.monte_carlo.map(|m| m.std_error)),
            opt(e.monte_carlo_z),
        ]);
    }
}
