//! Curvature in orthonormal Fermi frames.
//!
//! Frame indices run over `τ = 0` and spatial `1, 2, 3`; the frame metric is
//! `η = diag(−1, 1, 1, 1)`. The Ricci tensor is `R_bd = η^{ac} R_abcd`, so a
//! de Sitter point with Hubble rate `H` has
//! `R_abcd = H² (η_ac η_bd − η_ad η_bc)` and `R = 12 H²`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type Array4 = [[[[f64; 4]; 4]; 4]; 4];

const SYMMETRY_TOL: f64 = 1e-12;

/// Bivector index pairs used for the independent-component packing.
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];

/// `(A, B)` positions in the symmetric 6×6 bivector matrix that are stored.
/// The entry `(03|12)` is omitted; it follows from the first Bianchi
/// identity as `−(01|23) − (02|31)`.
const PACKED: [(usize, usize); 20] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (0, 5),
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (1, 5),
    (2, 2),
    (2, 3),
    (2, 4),
    (3, 3),
    (3, 4),
    (3, 5),
    (4, 4),
    (4, 5),
    (5, 5),
];

/// Labels `"abcd"` of the 20 independent components, in packing order.
pub fn component_labels() -> [String; 20] {
    std::array::from_fn(|k| {
        let (a, b) = PACKED[k];
        let (p, q) = (PAIRS[a], PAIRS[b]);
        format!("{}{}{}{}", p.0, p.1, q.0, q.1)
    })
}

fn eta(i: usize) -> f64 {
    if i == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Frame metric `diag(−1, 1, 1, 1)`.
pub fn frame_metric() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

/// Riemann tensor with all four indices down, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor {
    c: Array4,
}

impl RiemannTensor {
    pub fn zero() -> Self {
        Self { c: [[[[0.0; 4]; 4]; 4]; 4] }
    }

    /// Validates antisymmetry, pair symmetry and the first Bianchi identity.
    pub fn new(components: Array4) -> Result<Self> {
        let t = Self { c: components };
        let scale = t.max_abs().max(1.0);
        let v = t.symmetry_violation();
        if !(v <= SYMMETRY_TOL * scale) {
            return Err(Error::InvalidInput(format!("Riemann symmetries violated by {v:e}")));
        }
        Ok(t)
    }

    /// Builds the tensor from its 20 independent components in
    /// [`component_labels`] order.
    pub fn from_independent(values: &[f64; 20]) -> Self {
        let mut s = [[0.0; 6]; 6];
        for (k, &(a, b)) in PACKED.iter().enumerate() {
            s[a][b] = values[k];
            s[b][a] = values[k];
        }
        s[2][5] = -s[0][3] - s[1][4];
        s[5][2] = s[2][5];
        let mut c = [[[[0.0; 4]; 4]; 4]; 4];
        for (a, &(i, j)) in PAIRS.iter().enumerate() {
            for (b, &(k, l)) in PAIRS.iter().enumerate() {
                let v = s[a][b];
                c[i][j][k][l] = v;
                c[j][i][k][l] = -v;
                c[i][j][l][k] = -v;
                c[j][i][l][k] = v;
            }
        }
        Self { c }
    }

    pub fn from_labelled(map: &BTreeMap<String, f64>) -> Result<Self> {
        let labels = component_labels();
        let mut values = [0.0; 20];
        for (key, v) in map {
            let k = labels
                .iter()
                .position(|l| l == key)
                .ok_or_else(|| Error::InvalidInput(format!("`{key}` is not an independent Riemann component label")))?;
            values[k] = *v;
        }
        Ok(Self::from_independent(&values))
    }

    pub fn independent(&self) -> [f64; 20] {
        std::array::from_fn(|k| {
            let (a, b) = PACKED[k];
            let ((i, j), (l, m)) = (PAIRS[a], PAIRS[b]);
            self.c[i][j][l][m]
        })
    }

    pub fn labelled(&self) -> BTreeMap<String, f64> {
        component_labels().into_iter().zip(self.independent()).collect()
    }

    /// `(h ⊙ k)_abcd = h_ac k_bd + h_bd k_ac − h_ad k_bc − h_bc k_ad` for
    /// symmetric `h`, `k`.
    pub fn kulkarni_nomizu(h: &Matrix4<f64>, k: &Matrix4<f64>) -> Result<Self> {
        if (h - h.transpose()).abs().max() > 0.0 || (k - k.transpose()).abs().max() > 0.0 {
            return Err(Error::InvalidInput("Kulkarni–Nomizu factors must be symmetric".into()));
        }
        let mut c = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for cc in 0..4 {
                    for d in 0..4 {
                        c[a][b][cc][d] = h[(a, cc)] * k[(b, d)] + h[(b, d)] * k[(a, cc)]
                            - h[(a, d)] * k[(b, cc)]
                            - h[(b, cc)] * k[(a, d)];
                    }
                }
            }
        }
        Ok(Self { c })
    }

    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.c[a][b][c][d]
    }

    pub fn components(&self) -> &Array4 {
        &self.c
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().flatten().flatten().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest violation of any of the algebraic Riemann symmetries.
    #[allow(clippy::needless_range_loop)]
    pub fn symmetry_violation(&self) -> f64 {
        let r = &self.c;
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = r[a][b][c][d];
                        worst = worst
                            .max((v + r[b][a][c][d]).abs())
                            .max((v + r[a][b][d][c]).abs())
                            .max((v - r[c][d][a][b]).abs())
                            .max((v + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        if worst.is_nan() {
            f64::INFINITY
        } else {
            worst
        }
    }

    /// `R_bd = η^{ac} R_abcd`.
    pub fn ricci(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|b, d| (0..4).map(|a| eta(a) * self.c[a][b][a][d]).sum())
    }

    /// `R = η^{bd} R_bd`.
    pub fn scalar(&self) -> f64 {
        let ric = self.ricci();
        (0..4).map(|b| eta(b) * ric[(b, b)]).sum()
    }

    /// The tidal block `R_τiτj`.
    pub fn tidal_block(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.c[0][i + 1][0][j + 1])
    }

    /// Spatial block `R_ij` of the four-dimensional Ricci tensor.
    pub fn spatial_ricci(&self) -> Matrix3<f64> {
        self.ricci().fixed_view::<3, 3>(1, 1).into_owned()
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut c = self.c;
        c.iter_mut().flatten().flatten().flatten().for_each(|v| *v = f(*v));
        Self { c }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }
}

impl Serialize for RiemannTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.labelled().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RiemannTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        Self::from_labelled(&map).map_err(serde::de::Error::custom)
    }
}

/// Ricci tensor and scalar, after checking the input symmetries.
pub fn ricci_from_riemann(r: &RiemannTensor) -> Result<(Matrix4<f64>, f64)> {
    let scale = r.max_abs().max(1.0);
    let v = r.symmetry_violation();
    if !(v <= SYMMETRY_TOL * scale) {
        return Err(Error::InvalidInput(format!("Riemann symmetries violated by {v:e}")));
    }
    let ric = r.ricci();
    let scalar = (0..4).map(|b| eta(b) * ric[(b, b)]).sum();
    Ok((ric, scalar))
}

/// `M_ij = (2/3) R_τiτj − (1/3) R_ij`.
pub fn m_tensor(r: &RiemannTensor) -> Matrix3<f64> {
    r.tidal_block() * (2.0 / 3.0) - r.spatial_ricci() / 3.0
}

/// `N_ij = R_ij / 12 + 4π² ω₀ δ_ij`.
pub fn n_tensor(ricci_spatial: &Matrix3<f64>, omega0: f64) -> Matrix3<f64> {
    ricci_spatial / 12.0 + Matrix3::identity() * (4.0 * PI * PI * omega0)
}

/// Local geometry at the interaction event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePoint {
    pub riemann: RiemannTensor,
    #[serde(with = "crate::serde_matrix::vec3")]
    pub accel: Vector3<f64>,
    pub omega0: f64,
}

impl CurvaturePoint {
    pub fn flat() -> Self {
        Self { riemann: RiemannTensor::zero(), accel: Vector3::zeros(), omega0: 0.0 }
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn m(&self) -> Matrix3<f64> {
        m_tensor(&self.riemann)
    }

    pub fn n(&self) -> Matrix3<f64> {
        n_tensor(&self.riemann.spatial_ricci(), self.omega0)
    }

    pub fn scalar(&self) -> f64 {
        self.riemann.scalar()
    }
}

/// Metric blocks in Fermi normal coordinates to quadratic order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricExpansion {
    pub g_tt: f64,
    pub g_ti: Vector3<f64>,
    pub g_ij: Matrix3<f64>,
    pub sqrt_minus_g: f64,
}

pub fn metric_fermi_expansion(point: &CurvaturePoint, x: &Vector3<f64>) -> MetricExpansion {
    let r = &point.riemann;
    let ax = point.accel.dot(x);
    let tidal = r.tidal_block();
    let g_tt = -(1.0 + 2.0 * ax + ax * ax + x.dot(&(tidal * x)));
    let g_ti = Vector3::from_fn(|i, _| {
        let mut s = 0.0;
        for k in 0..3 {
            for j in 0..3 {
                s += r.get(0, k + 1, i + 1, j + 1) * x[k] * x[j];
            }
        }
        -2.0 / 3.0 * s
    });
    let g_ij = Matrix3::from_fn(|i, j| {
        let mut s = 0.0;
        for k in 0..3 {
            for l in 0..3 {
                s += r.get(i + 1, k + 1, j + 1, l + 1) * x[k] * x[l];
            }
        }
        f64::from(u8::from(i == j)) - s / 3.0
    });
    let sqrt_minus_g = 1.0 + ax + 0.5 * x.dot(&(point.m() * x));
    MetricExpansion { g_tt, g_ti, g_ij, sqrt_minus_g }
}

/// Exactly known curvature points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Catalog {
    Minkowski,
    DeSitter {
        hubble: f64,
    },
    ConstantSpatialCurvature {
        k: f64,
    },
    /// Orthonormal frame of a static observer at areal radius `radius`;
    /// spatial index 1 points radially outward.
    SchwarzschildStaticFrame {
        mass: f64,
        radius: f64,
    },
}

/// Curvature point for a catalog entry, with `ω₀ = 0`.
pub fn catalog(entry: Catalog) -> Result<CurvaturePoint> {
    let finite = |v: f64, what: &str| {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{what} must be finite")))
        }
    };
    let point = match entry {
        Catalog::Minkowski => CurvaturePoint::flat(),
        Catalog::DeSitter { hubble } => {
            finite(hubble, "Hubble rate")?;
            let eta = frame_metric();
            let r = RiemannTensor::kulkarni_nomizu(&eta, &eta)?.scaled(0.5 * hubble * hubble);
            CurvaturePoint { riemann: r, accel: Vector3::zeros(), omega0: 0.0 }
        }
        Catalog::ConstantSpatialCurvature { k } => {
            finite(k, "spatial curvature")?;
            let delta = Matrix4::from_diagonal(&nalgebra::Vector4::new(0.0, 1.0, 1.0, 1.0));
            let r = RiemannTensor::kulkarni_nomizu(&delta, &delta)?.scaled(0.5 * k);
            CurvaturePoint { riemann: r, accel: Vector3::zeros(), omega0: 0.0 }
        }
        Catalog::SchwarzschildStaticFrame { mass, radius } => {
            finite(mass, "mass")?;
            finite(radius, "radius")?;
            if !(mass >= 0.0) {
                return Err(Error::Domain(format!("mass {mass} must be non-negative")));
            }
            if !(radius > 2.0 * mass) {
                return Err(Error::Domain(format!("static frame needs r > 2M (r = {radius}, M = {mass})")));
            }
            let e = mass / radius.powi(3);
            // (01|01), (02|02), (03|03), (23|23), (31|31), (12|12)
            let mut v = [0.0; 20];
            let diag = [-2.0 * e, e, e, 2.0 * e, -e, -e];
            let labels = component_labels();
            for (k, &(i, j)) in PAIRS.iter().enumerate() {
                let label = format!("{i}{j}{i}{j}");
                let idx = labels.iter().position(|l| *l == label).expect("diagonal labels exist");
                v[idx] = diag[k];
            }
            let accel = mass / (radius * radius * (1.0 - 2.0 * mass / radius).sqrt());
            CurvaturePoint {
                riemann: RiemannTensor::from_independent(&v),
                accel: Vector3::new(accel, 0.0, 0.0),
                omega0: 0.0,
            }
        }
    };
    Ok(point)
}

/// Instantaneous relative velocity of a boosted detector frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoostFields", into = "BoostFields")]
pub struct BoostSpec {
    direction: Vector3<f64>,
    speed: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoostFields {
    direction: [f64; 3],
    speed: f64,
}

impl TryFrom<BoostFields> for BoostSpec {
    type Error = Error;

    fn try_from(f: BoostFields) -> Result<Self> {
        Self::new(Vector3::from(f.direction), f.speed)
    }
}

impl From<BoostSpec> for BoostFields {
    fn from(b: BoostSpec) -> Self {
        Self { direction: b.direction.into(), speed: b.speed }
    }
}

impl BoostSpec {
    /// `direction` is normalized; it may only be zero when `speed` is zero.
    pub fn new(direction: Vector3<f64>, speed: f64) -> Result<Self> {
        if !speed.is_finite() || speed.abs() >= 1.0 {
            return Err(Error::InvalidInput(format!("boost speed {speed} must satisfy |v| < 1")));
        }
        let norm = direction.norm();
        if !norm.is_finite() {
            return Err(Error::InvalidInput("boost direction must be finite".into()));
        }
        if norm == 0.0 {
            if speed == 0.0 {
                return Ok(Self::rest());
            }
            return Err(Error::InvalidInput("boost direction must be non-zero".into()));
        }
        Ok(Self { direction: direction / norm, speed })
    }

    pub fn rest() -> Self {
        Self { direction: Vector3::x(), speed: 0.0 }
    }

    pub fn direction(&self) -> Vector3<f64> {
        self.direction
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn gamma(&self) -> f64 {
        1.0 / (1.0 - self.speed * self.speed).sqrt()
    }

    pub fn inverse(&self) -> Self {
        Self { direction: self.direction, speed: -self.speed }
    }

    /// Columns are the boosted frame vectors in rest-frame components:
    /// `e′_μ = Λ^α_μ e_α`, with `e′_τ = γ (e_τ + v n)`.
    pub fn matrix(&self) -> Matrix4<f64> {
        let g = self.gamma();
        let n = self.direction;
        let gv = g * self.speed;
        let mut l = Matrix4::identity();
        l[(0, 0)] = g;
        for i in 0..3 {
            l[(0, i + 1)] = gv * n[i];
            l[(i + 1, 0)] = gv * n[i];
            for j in 0..3 {
                l[(i + 1, j + 1)] += (g - 1.0) * n[i] * n[j];
            }
        }
        l
    }
}

/// Components of a covariant rank-2 tensor in the boosted frame: `Λᵀ T Λ`.
pub fn boost_rank2(t: &Matrix4<f64>, b: &BoostSpec) -> Matrix4<f64> {
    let l = b.matrix();
    l.transpose() * t * l
}

/// Components of the Riemann tensor in the boosted frame.
#[allow(clippy::needless_range_loop)]
pub fn boost_riemann(r: &RiemannTensor, b: &BoostSpec) -> RiemannTensor {
    let l = b.matrix();
    let mut cur = r.c;
    // Transform one slot at a time.
    for slot in 0..4 {
        let mut next = [[[[0.0; 4]; 4]; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for m in 0..4 {
                        let idx = [i, j, k, m];
                        let mut s = 0.0;
                        for a in 0..4 {
                            let mut src = idx;
                            src[slot] = a;
                            s += l[(a, idx[slot])] * cur[src[0]][src[1]][src[2]][src[3]];
                        }
                        next[i][j][k][m] = s;
                    }
                }
            }
        }
        cur = next;
    }
    RiemannTensor { c: cur }
}
