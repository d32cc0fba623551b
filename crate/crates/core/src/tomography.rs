//! Experiment design and curvature recovery.
//!
//! With Gaussian profiles the excitation probability is linear in thirteen
//! unknowns,
//! `P − P₀ = e^{−2L₀} (M_ij Q^ij + N_ij L^ij + (2π²/3) R L_R)`,
//! so thirteen or more probes with independent coefficient rows determine
//! `M_ij`, `N_ij` and `R` by weighted least squares. The Ricci tensor, the
//! tidal block, `R_ττ` and `ω₀` follow algebraically. Repeating the protocol
//! in boosted frames recovers all twenty Riemann components.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix3, Matrix4, SMatrix, SVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientEngine, CoefficientSet};
use crate::error::{Error, Result};
use crate::forward::{excitation_probability, ProbabilityBreakdown};
use crate::geometry::{boost_riemann, component_labels, BoostSpec, CurvaturePoint, RiemannTensor};
use crate::registry::Registry;
use crate::serde_matrix::rows3;
use crate::shape::{rotation_taking_x_to, DetectorShape};

pub const N_PARAMS: usize = 13;

pub const PARAM_LABELS: [&str; N_PARAMS] =
    ["M11", "M22", "M33", "M12", "M13", "M23", "N11", "N22", "N33", "N12", "N13", "N23", "R"];

const SYM: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

/// Singular values below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-10;

pub type Row = [f64; N_PARAMS];

fn sym_pack(m: &Matrix3<f64>, double_off: bool) -> [f64; 6] {
    std::array::from_fn(|k| {
        let (i, j) = SYM[k];
        if double_off && i != j {
            2.0 * m[(i, j)]
        } else {
            m[(i, j)]
        }
    })
}

fn sym_unpack(v: &[f64]) -> Matrix3<f64> {
    let mut m = Matrix3::zeros();
    for (k, &(i, j)) in SYM.iter().enumerate() {
        m[(i, j)] = v[k];
        m[(j, i)] = v[k];
    }
    m
}

/// `e^{−2L₀} (Q | L | (2π²/3) L_R)` with off-diagonal entries doubled.
pub fn assemble_row(c: &CoefficientSet) -> Row {
    let damping = (-2.0 * c.l0).exp();
    let mut row = [0.0; N_PARAMS];
    row[..6].copy_from_slice(&sym_pack(&c.q, true));
    row[6..12].copy_from_slice(&sym_pack(&c.lij, true));
    row[12] = 2.0 * PI * PI / 3.0 * c.lr;
    row.map(|v| v * damping)
}

/// `(M | N | R)` of a curvature point in column order.
pub fn truth_parameters(point: &CurvaturePoint) -> Row {
    let mut out = [0.0; N_PARAMS];
    out[..6].copy_from_slice(&sym_pack(&point.m(), false));
    out[6..12].copy_from_slice(&sym_pack(&point.n(), false));
    out[12] = point.scalar();
    out
}

fn to_matrix(rows: &[Row]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), N_PARAMS, |i, j| rows[i][j])
}

/// Largest over smallest of the leading `min(rows, 13)` singular values.
pub fn condition_number(rows: &[Row]) -> f64 {
    if rows.is_empty() {
        return f64::INFINITY;
    }
    let sv = to_matrix(rows).singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= RANK_TOL * max {
        f64::INFINITY
    } else {
        max / min
    }
}

fn rank_and_null(rows: &[Row]) -> (usize, Option<SVector<f64, N_PARAMS>>) {
    let svd = to_matrix(rows).svd(false, true);
    let max = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * max).count();
    if rank == N_PARAMS {
        return (rank, None);
    }
    let v_t = svd.v_t.expect("requested V");
    let row_space: Vec<SVector<f64, N_PARAMS>> = (0..v_t.nrows())
        .filter(|&k| svd.singular_values[k] > RANK_TOL * max)
        .map(|k| SVector::from_fn(|j, _| v_t[(k, j)]))
        .collect();
    // Project unit vectors off the row space; the first survivor spans part
    // of the null space.
    let null = (0..N_PARAMS).find_map(|e| {
        let mut cand = SVector::<f64, N_PARAMS>::zeros();
        cand[e] = 1.0;
        for b in &row_space {
            cand -= b * b.dot(&cand);
        }
        (cand.norm() > 1e-6).then(|| cand.normalize())
    });
    (rank, null)
}

fn describe_direction(v: &SVector<f64, N_PARAMS>) -> String {
    let mut terms: Vec<(usize, f64)> = v.iter().copied().enumerate().filter(|(_, c)| c.abs() > 1e-3).collect();
    terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    terms.iter().map(|(k, c)| format!("{c:+.3}·{}", PARAM_LABELS[*k])).collect::<Vec<_>>().join(" ")
}

/// A detector shape together with the frame it is operated in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub id: String,
    pub shape: DetectorShape,
    pub boost: BoostSpec,
}

impl Probe {
    pub fn new(id: impl Into<String>, shape: DetectorShape) -> Self {
        Self { id: id.into(), shape, boost: BoostSpec::rest() }
    }
}

/// Fifteen probes of characteristic size `length`: two triaxial shapes
/// with their long axis along each coordinate axis and each face diagonal,
/// two spheres, and one strongly triaxial rotated shape.
pub fn canonical_pool(length: f64, coupling: f64) -> Result<Vec<Probe>> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidInput(format!("pool length {length} must be positive")));
    }
    let s = 1.0 / length;
    let dirs: [(&str, [f64; 3]); 6] = [
        ("x", [1.0, 0.0, 0.0]),
        ("y", [0.0, 1.0, 0.0]),
        ("z", [0.0, 0.0, 1.0]),
        ("xy", [1.0, 1.0, 0.0]),
        ("xz", [1.0, 0.0, 1.0]),
        ("yz", [0.0, 1.0, 1.0]),
    ];
    let mut out = Vec::with_capacity(15);
    for (base, axes) in [("tri-a", [0.5, 1.0, 1.5]), ("tri-b", [0.7, 1.0, 1.2])] {
        for (name, d) in dirs {
            let rot = rotation_taking_x_to(d.into())?;
            let shape = DetectorShape::new(axes.map(|a| a * s), rot, coupling)?;
            out.push(Probe::new(format!("{base}-{name}"), shape));
        }
    }
    out.push(Probe::new("sphere-1", DetectorShape::sphere(length, coupling)?));
    out.push(Probe::new("sphere-2", DetectorShape::sphere(2.0 * length, coupling)?));
    let tri = DetectorShape::with_axis_angle(
        [0.3 * s, s, 3.0 * s],
        nalgebra::Vector3::new(0.3, 0.5, 0.7),
        nalgebra::Vector3::new(0.3, 0.5, 0.7).norm(),
        coupling,
    )?;
    out.push(Probe::new("tri-c", tri));
    Ok(out)
}

/// Chooses which pool rows enter a design.
pub trait DesignStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Indices into `rows`, in selection order.
    fn select(&self, rows: &[Row], count: usize) -> Vec<usize>;
}

/// Adds, one at a time, the row that keeps the selected set best conditioned.
/// Ties go to the lowest pool index.
#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyCondition;

/// Takes the first `count` rows.
#[derive(Debug, Clone, Copy, Default)]
pub struct PoolOrder;

impl DesignStrategy for GreedyCondition {
    fn name(&self) -> &'static str {
        "greedy-condition"
    }

    fn select(&self, rows: &[Row], count: usize) -> Vec<usize> {
        let mut chosen: Vec<usize> = Vec::with_capacity(count);
        let mut buf: Vec<Row> = Vec::with_capacity(count);
        while chosen.len() < count.min(rows.len()) {
            let costs: Vec<(usize, f64)> = (0..rows.len())
                .into_par_iter()
                .filter(|i| !chosen.contains(i))
                .map(|i| {
                    let mut trial = buf.clone();
                    trial.push(rows[i]);
                    (i, condition_number(&trial))
                })
                .collect();
            let (best, _) = costs
                .iter()
                .copied()
                .fold(None, |acc: Option<(usize, f64)>, (i, c)| match acc {
                    Some((_, bc)) if !(c < bc) => acc,
                    _ => Some((i, c)),
                })
                .expect("at least one candidate remains");
            chosen.push(best);
            buf.push(rows[best]);
        }
        chosen
    }
}

impl DesignStrategy for PoolOrder {
    fn name(&self) -> &'static str {
        "pool-order"
    }

    fn select(&self, rows: &[Row], count: usize) -> Vec<usize> {
        (0..count.min(rows.len())).collect()
    }
}

/// Registry of the built-in strategies; `greedy-condition` is the default.
pub fn design_strategies() -> Registry<dyn DesignStrategy> {
    let mut reg: Registry<dyn DesignStrategy> = Registry::new("design strategy");
    reg.register("greedy-condition", Arc::new(GreedyCondition));
    reg.register("pool-order", Arc::new(PoolOrder));
    reg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    pub probes: Vec<Probe>,
    pub coefficients: Vec<CoefficientSet>,
    pub design_matrix: Vec<Row>,
    pub condition_number: f64,
    pub rank: usize,
    pub strategy: String,
    /// Position of each probe in the pool it was selected from.
    pub pool_indices: Vec<usize>,
}

impl ExperimentDesign {
    pub fn matrix(&self) -> DMatrix<f64> {
        to_matrix(&self.design_matrix)
    }

    pub fn p0s(&self) -> Result<Vec<f64>> {
        self.coefficients.iter().map(|c| crate::forward::p0_of(c.l0)).collect()
    }

    /// Forward breakdown for every probe at `point`.
    pub fn forward(&self, point: &CurvaturePoint) -> Result<Vec<ProbabilityBreakdown>> {
        self.coefficients.par_iter().map(|c| excitation_probability(c, point)).collect()
    }
}

/// Selects `count` probes from `pool` and assembles their design matrix.
pub fn design_experiment(
    pool: &[Probe],
    count: usize,
    engine: &dyn CoefficientEngine,
    strategy: &dyn DesignStrategy,
) -> Result<ExperimentDesign> {
    if count < N_PARAMS {
        return Err(Error::InvalidInput(format!("a design needs at least {N_PARAMS} probes, got {count}")));
    }
    if pool.len() < count {
        return Err(Error::InvalidInput(format!("pool has {} probes but {count} were requested", pool.len())));
    }
    let shapes: Vec<DetectorShape> = pool.iter().map(|p| p.shape.clone()).collect();
    let coeffs = engine.compute_many(&shapes)?;
    let rows: Vec<Row> = coeffs.iter().map(assemble_row).collect();
    let picked = strategy.select(&rows, count);
    let selected: Vec<Row> = picked.iter().map(|&i| rows[i]).collect();
    let (rank, null) = rank_and_null(&selected);
    if let Some(v) = null {
        return Err(Error::Design { rank, required: N_PARAMS, direction: describe_direction(&v) });
    }
    Ok(ExperimentDesign {
        probes: picked.iter().map(|&i| pool[i].clone()).collect(),
        coefficients: picked.iter().map(|&i| coeffs[i].clone()).collect(),
        condition_number: condition_number(&selected),
        design_matrix: selected,
        rank,
        strategy: strategy.name().to_owned(),
        pool_indices: picked,
    })
}

/// Quantities derived from the thirteen fitted parameters, in the order of
/// [`DERIVED_LABELS`].
pub const DERIVED_LABELS: [&str; 14] = [
    "R_11", "R_22", "R_33", "R_12", "R_13", "R_23", "R_t1t1", "R_t2t2", "R_t3t3", "R_t1t2", "R_t1t3", "R_t2t3",
    "omega0", "R_tt",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub parameters: Row,
    #[serde(with = "rows3")]
    pub m: Matrix3<f64>,
    #[serde(with = "rows3")]
    pub n: Matrix3<f64>,
    pub r_scalar: f64,
    #[serde(with = "rows3")]
    pub ricci_spatial: Matrix3<f64>,
    #[serde(with = "rows3")]
    pub riemann_tautau_block: Matrix3<f64>,
    pub omega0: f64,
    pub r_tautau: f64,
    pub covariance: [[f64; N_PARAMS]; N_PARAMS],
    pub derived_covariance: [[f64; 14]; 14],
    pub residual_norm: f64,
    pub condition_number: f64,
}

impl RecoveryResult {
    pub fn parameter_std(&self) -> Row {
        std::array::from_fn(|k| self.covariance[k][k].sqrt())
    }

    pub fn derived(&self) -> [f64; 14] {
        let mut out = [0.0; 14];
        out[..6].copy_from_slice(&sym_pack(&self.ricci_spatial, false));
        out[6..12].copy_from_slice(&sym_pack(&self.riemann_tautau_block, false));
        out[12] = self.omega0;
        out[13] = self.r_tautau;
        out
    }

    pub fn derived_std(&self) -> [f64; 14] {
        std::array::from_fn(|k| self.derived_covariance[k][k].sqrt())
    }
}

/// The recovery algebra, linear in the fitted parameters.
fn derive(p: &SVector<f64, N_PARAMS>) -> SVector<f64, 14> {
    let m = sym_unpack(&p.as_slice()[..6]);
    let n = sym_unpack(&p.as_slice()[6..12]);
    let r = p[12];
    let ricci_trace = 2.0 * r + 3.0 * m.trace();
    let omega0 = (n.trace() - ricci_trace / 12.0) / (12.0 * PI * PI);
    let ricci = (n - Matrix3::identity() * (4.0 * PI * PI * omega0)) * 12.0;
    let tidal = m * 1.5 + ricci * 0.5;
    let mut out = SVector::<f64, 14>::zeros();
    out.as_mut_slice()[..6].copy_from_slice(&sym_pack(&ricci, false));
    out.as_mut_slice()[6..12].copy_from_slice(&sym_pack(&tidal, false));
    out[12] = omega0;
    out[13] = ricci_trace - r;
    out
}

fn derive_jacobian() -> SMatrix<f64, 14, N_PARAMS> {
    let mut j = SMatrix::<f64, 14, N_PARAMS>::zeros();
    for k in 0..N_PARAMS {
        let mut e = SVector::<f64, N_PARAMS>::zeros();
        e[k] = 1.0;
        j.set_column(k, &derive(&e));
    }
    j
}

fn to_array<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> [[f64; C]; R] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Weighted least squares on `p̂ − P₀` followed by the recovery algebra.
/// `measurements` holds `(p̂, σ)`; use `σ = 1` for noiseless data.
pub fn solve(design: &ExperimentDesign, measurements: &[(f64, f64)], p0s: &[f64]) -> Result<RecoveryResult> {
    let n = design.design_matrix.len();
    if measurements.len() != n || p0s.len() != n {
        return Err(Error::InvalidInput(format!(
            "design has {n} probes but got {} measurements and {} reference probabilities",
            measurements.len(),
            p0s.len()
        )));
    }
    if let Some((k, _)) = measurements.iter().enumerate().find(|(_, (_, s))| !(*s > 0.0)) {
        return Err(Error::InvalidInput(format!("measurement {k} has non-positive uncertainty")));
    }
    let x = design.matrix();
    let weights = DVector::from_iterator(n, measurements.iter().map(|(_, s)| 1.0 / s));
    let y = DVector::from_iterator(n, measurements.iter().zip(p0s).map(|((p, _), p0)| p - p0));
    let mut xw = x.clone();
    for (i, mut row) in xw.row_iter_mut().enumerate() {
        row *= weights[i];
    }
    let yw = y.component_mul(&weights);

    // Column equilibration.
    let scales: Vec<f64> = (0..N_PARAMS)
        .map(|j| {
            let norm = xw.column(j).norm();
            if norm > 0.0 {
                1.0 / norm
            } else {
                1.0
            }
        })
        .collect();
    let mut xs = xw.clone();
    for (j, mut col) in xs.column_iter_mut().enumerate() {
        col *= scales[j];
    }

    let svd = xs.svd(true, true);
    let sv = &svd.singular_values;
    let (max, min) = (sv.max(), sv.min());
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if sv.len() < N_PARAMS || !(min > RANK_TOL * max) {
        return Err(Error::Solve { condition });
    }
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V");
    let uty = u.transpose() * &yw;
    let mut gamma = SVector::<f64, N_PARAMS>::zeros();
    let mut cov = SMatrix::<f64, N_PARAMS, N_PARAMS>::zeros();
    for k in 0..N_PARAMS {
        let vk: SVector<f64, N_PARAMS> = SVector::from_fn(|j, _| v_t[(k, j)]);
        gamma += vk * (uty[k] / sv[k]);
        cov += vk * vk.transpose() / (sv[k] * sv[k]);
    }
    let d = SMatrix::<f64, N_PARAMS, N_PARAMS>::from_diagonal(&SVector::from_fn(|j, _| scales[j]));
    let beta = d * gamma;
    let cov = d * cov * d;

    let fitted = &xw * DVector::from_column_slice(beta.as_slice());
    let residual_norm = (yw - fitted).norm();

    let derived = derive(&beta);
    let jac = derive_jacobian();
    let derived_cov = jac * cov * jac.transpose();
    let ds = derived.as_slice();
    Ok(RecoveryResult {
        parameters: std::array::from_fn(|k| beta[k]),
        m: sym_unpack(&beta.as_slice()[..6]),
        n: sym_unpack(&beta.as_slice()[6..12]),
        r_scalar: beta[12],
        ricci_spatial: sym_unpack(&ds[..6]),
        riemann_tautau_block: sym_unpack(&ds[6..12]),
        omega0: ds[12],
        r_tautau: ds[13],
        covariance: to_array(&cov),
        derived_covariance: to_array(&derived_cov),
        residual_norm,
        condition_number: condition_number(&design.design_matrix),
    })
}

/// The curvature point as seen from a frame moving with `boost`. Acceleration
/// and `ω₀` are carried over unchanged.
pub fn frame_point(point: &CurvaturePoint, boost: &BoostSpec) -> CurvaturePoint {
    CurvaturePoint { riemann: boost_riemann(&point.riemann, boost), accel: point.accel, omega0: point.omega0 }
}

/// The thirteen quantities a single frame measures: spatial Ricci, tidal
/// block (upper triangles) and `R_ττ`.
fn frame_observables(r: &RiemannTensor) -> [f64; 13] {
    let ric: Matrix4<f64> = r.ricci();
    let mut out = [0.0; 13];
    out[..6].copy_from_slice(&sym_pack(&r.spatial_ricci(), false));
    out[6..12].copy_from_slice(&sym_pack(&r.tidal_block(), false));
    out[12] = ric[(0, 0)];
    out
}

fn recovered_observables(res: &RecoveryResult) -> [f64; 13] {
    let mut out = [0.0; 13];
    out[..6].copy_from_slice(&sym_pack(&res.ricci_spatial, false));
    out[6..12].copy_from_slice(&sym_pack(&res.riemann_tautau_block, false));
    out[12] = res.r_tautau;
    out
}

/// Least-squares reconstruction of all twenty rest-frame Riemann components
/// from single-frame recoveries in several boosted frames.
pub fn multi_frame_recovery(frames: &[(BoostSpec, RecoveryResult)]) -> Result<RiemannTensor> {
    if frames.is_empty() {
        return Err(Error::FrameSet { rank: 0, unresolved: component_labels().to_vec() });
    }
    let rows = 13 * frames.len();
    let mut a = DMatrix::<f64>::zeros(rows, 20);
    let mut y = DVector::<f64>::zeros(rows);
    for (f, (boost, res)) in frames.iter().enumerate() {
        for k in 0..20 {
            let mut e = [0.0; 20];
            e[k] = 1.0;
            let obs = frame_observables(&boost_riemann(&RiemannTensor::from_independent(&e), boost));
            for (m, v) in obs.iter().enumerate() {
                a[(13 * f + m, k)] = *v;
            }
        }
        for (m, v) in recovered_observables(res).iter().enumerate() {
            y[13 * f + m] = *v;
        }
    }
    let svd = a.svd(true, true);
    let max = svd.singular_values.max();
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > RANK_TOL * max).collect();
    let v_t = svd.v_t.as_ref().expect("requested V");
    if keep.len() < 20 {
        let labels = component_labels();
        let unresolved = (0..20)
            .filter(|&c| {
                let in_row_space: f64 = keep.iter().map(|&k| v_t[(k, c)].powi(2)).sum();
                1.0 - in_row_space > 1e-6
            })
            .map(|c| labels[c].clone())
            .collect();
        return Err(Error::FrameSet { rank: keep.len(), unresolved });
    }
    let sol = svd.solve(&y, RANK_TOL * max).map_err(|e| Error::InvalidInput(e.to_owned()))?;
    let values: [f64; 20] = std::array::from_fn(|k| sol[k]);
    Ok(RiemannTensor::from_independent(&values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{full_set, AnalyticEngine};
    use crate::geometry::{catalog, Catalog};
    use approx::assert_relative_eq;

    #[test]
    fn row_matches_forward_delta() {
        let pool = canonical_pool(1.0, 1.0).unwrap();
        let point = catalog(Catalog::SchwarzschildStaticFrame { mass: 1.0, radius: 10.0 }).unwrap().with_omega0(2e-4);
        let truth = truth_parameters(&point);
        for probe in &pool {
            let c = full_set(&probe.shape).unwrap();
            let row = assemble_row(&c);
            let lin: f64 = row.iter().zip(&truth).map(|(a, b)| a * b).sum();
            let b = excitation_probability(&c, &point).unwrap();
            assert_relative_eq!(lin, b.delta(), max_relative = 1e-12);
        }
    }

    #[test]
    fn sphere_rows_are_isotropic() {
        let c = full_set(&DetectorShape::sphere(1.5, 1.0).unwrap()).unwrap();
        let row = assemble_row(&c);
        assert_relative_eq!(row[0], row[1], max_relative = 1e-14);
        assert_relative_eq!(row[1], row[2], max_relative = 1e-14);
        assert!(row[3..6].iter().chain(&row[9..12]).all(|v| v.abs() < 1e-18));
    }

    #[test]
    fn identical_spheres_are_rank_deficient() {
        let pool: Vec<Probe> =
            (0..13).map(|i| Probe::new(format!("s{i}"), DetectorShape::sphere(1.0, 1.0).unwrap())).collect();
        match design_experiment(&pool, 13, &AnalyticEngine, &GreedyCondition) {
            Err(Error::Design { rank, required, direction }) => {
                assert_eq!(rank, 1);
                assert_eq!(required, 13);
                assert!(!direction.is_empty());
            }
            other => panic!("expected design error, got {other:?}"),
        }
    }

    #[test]
    fn canonical_pool_has_full_rank() {
        let pool = canonical_pool(1.0, 1.0).unwrap();
        let design = design_experiment(&pool, 13, &AnalyticEngine, &GreedyCondition).unwrap();
        assert_eq!(design.rank, 13);
        assert!(design.condition_number < 1e4);
        let again = design_experiment(&pool, 13, &AnalyticEngine, &GreedyCondition).unwrap();
        assert_eq!(design, again);
    }

    #[test]
    fn zero_signal_recovers_zero() {
        let pool = canonical_pool(1.0, 1.0).unwrap();
        let design = design_experiment(&pool, 13, &AnalyticEngine, &GreedyCondition).unwrap();
        let p0s = design.p0s().unwrap();
        let meas: Vec<(f64, f64)> = p0s.iter().map(|&p| (p, 1.0)).collect();
        let res = solve(&design, &meas, &p0s).unwrap();
        assert!(res.parameters.iter().all(|v| *v == 0.0));
        assert_eq!(res.omega0, 0.0);
    }

    #[test]
    fn derived_algebra_is_consistent() {
        let point = catalog(Catalog::DeSitter { hubble: 0.2 }).unwrap().with_omega0(0.003);
        let p = SVector::from(truth_parameters(&point));
        let d = derive(&p);
        let ric = point.riemann.spatial_ricci();
        let tidal = point.riemann.tidal_block();
        assert_relative_eq!(sym_unpack(&d.as_slice()[..6]), ric, epsilon = 1e-14);
        assert_relative_eq!(sym_unpack(&d.as_slice()[6..12]), tidal, epsilon = 1e-14);
        assert_relative_eq!(d[12], 0.003, max_relative = 1e-12);
        assert_relative_eq!(d[13], point.riemann.ricci()[(0, 0)], epsilon = 1e-14);
    }

    #[test]
    fn rest_frame_only_leaves_magnetic_part_unresolved() {
        let point = catalog(Catalog::DeSitter { hubble: 0.2 }).unwrap();
        let pool = canonical_pool(1.0, 1.0).unwrap();
        let design = design_experiment(&pool, 13, &AnalyticEngine, &GreedyCondition).unwrap();
        let meas: Vec<(f64, f64)> = design.forward(&point).unwrap().iter().map(|b| (b.p, 1.0)).collect();
        let res = solve(&design, &meas, &design.p0s().unwrap()).unwrap();
        let frames = vec![(BoostSpec::rest(), res.clone()), (BoostSpec::rest(), res)];
        match multi_frame_recovery(&frames) {
            Err(Error::FrameSet { rank, unresolved }) => {
                assert_eq!(rank, 12);
                assert_eq!(unresolved.len(), 8);
                assert!(unresolved.iter().all(|l| l.starts_with('0') && !l[2..].starts_with('0')));
            }
            other => panic!("expected frame-set error, got {other:?}"),
        }
    }
}
