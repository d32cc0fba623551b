//! Globally adaptive Gauss–Kronrod integration in one and two dimensions.
//!
//! Both integrators keep a max-heap of cells keyed by their error estimate
//! and bisect the worst cell until the summed error falls below the
//! requested tolerance. Error estimates are `|K15 − G7|`, which overstates
//! the true error of the Kronrod value for smooth integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The 15 Kronrod abscissae on [-1, 1] with their Kronrod and Gauss weights
/// (Gauss weight is zero on Kronrod-only nodes).
fn rule() -> [(f64, f64, f64); 15] {
    let mut out = [(0.0, 0.0, 0.0); 15];
    for k in 0..7 {
        let wg = if k % 2 == 1 { WG[k / 2] } else { 0.0 };
        out[k] = (-XGK[k], WGK[k], wg);
        out[14 - k] = (XGK[k], WGK[k], wg);
    }
    out[7] = (0.0, WGK[7], WG[3]);
    out
}

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Relative tolerance, measured against the integral of `|f|`.
    pub relative: f64,
    pub absolute: f64,
    pub max_cells: usize,
}

impl Tolerance {
    pub fn relative(relative: f64) -> Self {
        Self { relative, absolute: 0.0, max_cells: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Integral of `|f|` over the same domain, used as the tolerance scale.
    pub magnitude: f64,
}

struct Cell<D> {
    domain: D,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl<D> PartialEq for Cell<D> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<D> Eq for Cell<D> {}
impl<D> PartialOrd for Cell<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<D> Ord for Cell<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn drive<D, S, E>(initial: Vec<D>, tol: Tolerance, mut eval: E, mut split: S) -> Result<Estimate>
where
    E: FnMut(&D) -> Cell<D>,
    S: FnMut(&Cell<D>) -> (D, D),
{
    let mut heap = BinaryHeap::new();
    let (mut value, mut error, mut magnitude) = (0.0, 0.0, 0.0);
    for d in initial {
        let c = eval(&d);
        value += c.value;
        error += c.error;
        magnitude += c.magnitude;
        heap.push(c);
    }
    loop {
        let target = tol.absolute.max(tol.relative * magnitude);
        if error <= target {
            break;
        }
        if heap.len() >= tol.max_cells {
            return Err(Error::Convergence { estimate: value, error_bound: error });
        }
        let worst = heap.pop().expect("heap is never empty");
        let (left, right) = split(&worst);
        let (l, r) = (eval(&left), eval(&right));
        value += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        magnitude += l.magnitude + r.magnitude - worst.magnitude;
        heap.push(l);
        heap.push(r);
    }
    // Re-sum in a fixed order so the result does not carry the drift of the
    // running updates.
    let mut cells: Vec<_> = heap.into_vec();
    cells.sort_by(|a, b| a.error.total_cmp(&b.error));
    let value = cells.iter().map(|c| c.value).sum();
    let error = cells.iter().map(|c| c.error).sum();
    let magnitude = cells.iter().map(|c| c.magnitude).sum();
    Ok(Estimate { value, error, magnitude })
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    let nodes = rule();
    let eval = |&(lo, hi): &(f64, f64)| {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let (mut k, mut g, mut abs) = (0.0, 0.0, 0.0);
        for &(x, wk, wg) in &nodes {
            let y = f(mid + half * x);
            k += wk * y;
            g += wg * y;
            abs += wk * y.abs();
        }
        Cell { domain: (lo, hi), value: k * half, error: ((k - g) * half).abs(), magnitude: abs * half.abs() }
    };
    let split = |c: &Cell<(f64, f64)>| {
        let (lo, hi) = c.domain;
        let mid = 0.5 * (lo + hi);
        ((lo, mid), (mid, hi))
    };
    drive(vec![(a, b)], tol, eval, split)
}

/// Adaptive integral of `f` over `[a, ∞)` through `t = a + s / (1 − s)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Estimate> {
    let g = |s: f64| {
        let one_minus = 1.0 - s;
        let t = a + s / one_minus;
        let y = f(t) / (one_minus * one_minus);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, tol)
}

type Rect = [(f64, f64); 2];

/// A rectangle plus the axis along which it should next be bisected.
#[derive(Clone, Copy)]
struct Patch {
    rect: Rect,
    split_x: bool,
}

/// Adaptive integral of `f(x, y)` over a rectangle, with a tensor-product
/// Gauss–Kronrod rule per cell. Cells are bisected along the direction whose
/// one-dimensional Gauss/Kronrod discrepancy is larger.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x: (f64, f64),
    y: (f64, f64),
    initial: [usize; 2],
    tol: Tolerance,
) -> Result<Estimate> {
    let nodes = rule();
    let eval = |patch: &Patch| {
        let [(x0, x1), (y0, y1)] = patch.rect;
        let (hx, mx) = (0.5 * (x1 - x0), 0.5 * (x1 + x0));
        let (hy, my) = (0.5 * (y1 - y0), 0.5 * (y1 + y0));
        let (mut kk, mut gk, mut kg, mut gg, mut abs) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(xi, wkx, wgx) in &nodes {
            let px = mx + hx * xi;
            let (mut rk, mut rg, mut ra) = (0.0, 0.0, 0.0);
            for &(yi, wky, wgy) in &nodes {
                let v = f(px, my + hy * yi);
                rk += wky * v;
                rg += wgy * v;
                ra += wky * v.abs();
            }
            kk += wkx * rk;
            kg += wkx * rg;
            gk += wgx * rk;
            gg += wgx * rg;
            abs += wkx * ra;
        }
        let area = hx * hy;
        let err_x = ((kk - gk) * area).abs();
        let err_y = ((kk - kg) * area).abs();
        let err_both = ((kk - gg) * area).abs();
        Cell {
            domain: Patch { rect: patch.rect, split_x: err_x >= err_y },
            value: kk * area,
            error: err_both.max(err_x + err_y),
            magnitude: abs * area.abs(),
        }
    };
    let split = |c: &Cell<Patch>| {
        let [(x0, x1), (y0, y1)] = c.domain.rect;
        let halves = if c.domain.split_x {
            let m = 0.5 * (x0 + x1);
            ([(x0, m), (y0, y1)], [(m, x1), (y0, y1)])
        } else {
            let m = 0.5 * (y0 + y1);
            ([(x0, x1), (y0, m)], [(x0, x1), (m, y1)])
        };
        (Patch { rect: halves.0, split_x: false }, Patch { rect: halves.1, split_x: false })
    };
    let mut cells = Vec::with_capacity(initial[0] * initial[1]);
    let dx = (x.1 - x.0) / initial[0] as f64;
    let dy = (y.1 - y.0) / initial[1] as f64;
    for i in 0..initial[0] {
        for j in 0..initial[1] {
            let xa = x.0 + dx * i as f64;
            let ya = y.0 + dy * j as f64;
            cells.push(Patch { rect: [(xa, xa + dx), (ya, ya + dy)], split_x: false });
        }
    }
    drive(cells, tol, eval, split)
}
