//! Literal transcriptions of the published closed forms.
//!
//! These are kept only so validation reports can show how each printed
//! expression compares with the oracle. Nothing downstream uses them.
//! Expressions that are undefined for a given shape (coincident axes, or
//! elliptic arguments outside their domain) return `None`.

use std::f64::consts::{PI, SQRT_2};

use crate::shape::DetectorShape;
use crate::special::{legendre_e, legendre_f};

fn pre(shape: &DetectorShape) -> f64 {
    shape.coupling().powi(2) / (16.0 * SQRT_2 * PI * PI)
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// `λ²/(16√2π²) · det(a)/√(c² − a²) · F(arccos(a/c); (c² − b²)/(c² − a²))`.
pub fn l0(shape: &DetectorShape) -> Option<f64> {
    let [a, b, c] = shape.axes();
    if a == c {
        return None;
    }
    let det = (a * b * c).powi(2);
    let m = (c * c - b * b) / (c * c - a * a);
    let f = legendre_f((a / c).acos(), m).ok()?;
    finite(pre(shape) * det / (c * c - a * a).sqrt() * f)
}

/// The spherical special case `λ²/(16√2π²σ²)` with `σ = 1/a`.
pub fn l0_sphere(shape: &DetectorShape) -> Option<f64> {
    let [a, _, c] = shape.axes();
    (a == c).then(|| pre(shape) * a * a)
}

/// `λ²/(8π²)`.
pub fn lomega(shape: &DetectorShape) -> f64 {
    shape.coupling().powi(2) / (8.0 * PI * PI)
}

/// The three principal-frame diagonal entries of L^ij.
pub fn lij_principal(shape: &DetectorShape) -> [Option<f64>; 3] {
    let [a, b, c] = shape.axes();
    if a == b || b == c {
        return [None; 3];
    }
    let sqrt_det = a * b * c;
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let p = pre(shape) * sqrt_det;

    let l11 = (|| {
        let phi = (b / c).asin();
        let m = (c2 - a2) / (c2 - b2);
        let e = legendre_e(phi, m).ok()?;
        let f = legendre_f(phi, m).ok()?;
        finite(-0.5 * p * (c2 - b2).sqrt() / (b2 - a2) * (e / (a2 - c2) + f / (c2 - b2) - 2.0 * b / (a * c)))
    })();

    let phi = (a / c).asin();
    let m = (c2 - b2) / (c2 - a2);
    let ef = legendre_e(phi, m).ok().zip(legendre_f(phi, m).ok());

    let f2 = pre(shape) * sqrt_det / (2.0 * PI).powf(1.5)
        * a
        * (a2 * (2.0 * b2 + c2)
            + c2 * (b2 - 4.0 * c2)
            + 6.0 * c.powi(3) * (c2 - b2).sqrt() * (1.0 - b2 / c2).sqrt().atanh())
        / (3.0 * b * c.powi(3) * (a2 - b2).powi(2));
    let l22 = ef.and_then(|(e, f)| {
        finite(p * (c2 - a2).sqrt() * (e / ((b2 - a2) * (b2 - c2)) - f / ((c2 - a2) * (c2 - b2))) + f2)
    });
    let l33 = ef.and_then(|(e, f)| finite(p * (f - e) / ((c2 - a2).sqrt() * (c2 - b2))));
    [l11, l22, l33]
}

/// The printed diagonal of E^ij: `√2/a, √2/b, √2/c`.
pub fn moment_ratio_principal(shape: &DetectorShape) -> [f64; 3] {
    shape.axes().map(|a| SQRT_2 / a)
}
