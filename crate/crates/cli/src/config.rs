//! JSON configuration documents.
//!
//! Lengths are in an arbitrary user unit, curvature in its inverse square
//! and the coupling λ in the same unit; `c = ℏ = 1`. Unknown keys are
//! rejected everywhere.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use detector_tomography::geometry::catalog;
use detector_tomography::tomography::{canonical_pool, Probe};
use detector_tomography::{BoostSpec, Catalog, CurvaturePoint, DetectorShape, OracleConfig, RiemannTensor};
use nalgebra::Vector3;
use serde::Deserialize;

/// A problem with the configuration itself, as opposed to a failure while
/// running it.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_err(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigDocument {
    #[serde(default)]
    pub shapes: Vec<ShapeSpec>,
    pub curvature: Option<CurvatureSpec>,
    pub design: Option<DesignSpec>,
    pub campaign: Option<CampaignSpec>,
    #[serde(default)]
    pub frames: Vec<BoostSpec>,
    /// Measured `(p̂, σ)` per design probe, by probe id.
    pub measurements: Option<Vec<MeasurementSpec>>,
    pub engine: Option<String>,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisAngle {
    pub axis: [f64; 3],
    /// Radians.
    pub angle: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub id: String,
    /// Inverse lengths `a, b, c` along the principal axes.
    pub axes: [f64; 3],
    pub rotation: Option<AxisAngle>,
    pub coupling: f64,
}

impl ShapeSpec {
    pub fn build(&self) -> anyhow::Result<DetectorShape> {
        let (axis, angle) = match &self.rotation {
            Some(r) => (Vector3::from(r.axis), r.angle),
            None => (Vector3::zeros(), 0.0),
        };
        DetectorShape::with_axis_angle(self.axes, axis, angle, self.coupling)
            .map_err(|e| config_err(format!("shape `{}`: {e}", self.id)))
    }
}

/// Either a catalog entry or explicit components.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvatureSpec {
    pub catalog: Option<Catalog>,
    /// Independent components keyed by index label, e.g. `"0101"`.
    pub riemann: Option<BTreeMap<String, f64>>,
    pub accel: Option<[f64; 3]>,
    #[serde(default)]
    pub omega0: f64,
}

impl CurvatureSpec {
    pub fn build(&self) -> anyhow::Result<CurvaturePoint> {
        let mut point = match (&self.catalog, &self.riemann) {
            (Some(c), None) => catalog(*c).map_err(|e| config_err(format!("curvature.catalog: {e}")))?,
            (None, Some(map)) => CurvaturePoint {
                riemann: RiemannTensor::from_labelled(map)
                    .map_err(|e| config_err(format!("curvature.riemann: {e}")))?,
                accel: Vector3::zeros(),
                omega0: 0.0,
            },
            _ => return Err(config_err("curvature needs exactly one of `catalog` or `riemann`")),
        };
        if let Some(a) = self.accel {
            point.accel = Vector3::from(a);
        }
        point.omega0 = self.omega0;
        Ok(point)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PoolSpec {
    Canonical {
        length: f64,
        coupling: f64,
    },
    /// Ids from `shapes`, in pool order.
    Shapes(Vec<String>),
}

fn default_count() -> usize {
    13
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignSpec {
    pub pool: PoolSpec,
    #[serde(default = "default_count")]
    pub count: usize,
    pub strategy: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSpec {
    pub shots: u64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementSpec {
    pub id: String,
    pub p: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ConfigDocument {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let doc: Self = serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        doc.oracle.validate().map_err(|e| config_err(format!("oracle: {e}")))?;
        Ok(doc)
    }

    pub fn shapes(&self) -> anyhow::Result<Vec<(String, DetectorShape)>> {
        if self.shapes.is_empty() {
            return Err(config_err("`shapes` must list at least one shape"));
        }
        let mut seen = std::collections::BTreeSet::new();
        self.shapes
            .iter()
            .map(|s| {
                if !seen.insert(s.id.as_str()) {
                    return Err(config_err(format!("duplicate shape id `{}`", s.id)));
                }
                Ok((s.id.clone(), s.build()?))
            })
            .collect()
    }

    pub fn curvature(&self) -> anyhow::Result<CurvaturePoint> {
        self.curvature.as_ref().ok_or_else(|| config_err("missing `curvature` section"))?.build()
    }

    pub fn design_spec(&self) -> anyhow::Result<&DesignSpec> {
        self.design.as_ref().ok_or_else(|| config_err("missing `design` section"))
    }

    pub fn campaign(&self) -> anyhow::Result<&CampaignSpec> {
        self.campaign.as_ref().ok_or_else(|| config_err("missing `campaign` section"))
    }

    pub fn pool(&self) -> anyhow::Result<Vec<Probe>> {
        match &self.design_spec()?.pool {
            PoolSpec::Canonical { length, coupling } => {
                canonical_pool(*length, *coupling).map_err(|e| config_err(format!("design.pool: {e}")))
            }
            PoolSpec::Shapes(ids) => {
                let shapes = self.shapes()?;
                ids.iter()
                    .map(|id| {
                        shapes
                            .iter()
                            .find(|(sid, _)| sid == id)
                            .map(|(sid, s)| Probe::new(sid.clone(), s.clone()))
                            .ok_or_else(|| config_err(format!("design.pool refers to unknown shape `{id}`")))
                    })
                    .collect()
            }
        }
    }
}
