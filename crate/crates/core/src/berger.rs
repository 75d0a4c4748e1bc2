//! Ambient geometry of the Berger sphere S^3_ε.
//!
//! The sphere is parallelized by the Hopf frame `X1 = (iz, iw)`,
//! `X2 = (-i w̄, i z̄)`, `X3 = (-w̄, z̄)` and carries the metric
//! `g_ε(X, Y) = <X, Y> + (ε² - 1) <X, X1> <Y, X1>`, for which
//! `E1 = X1 / ε`, `E2 = X2`, `E3 = X3` is an orthonormal frame.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::linalg::{Mat4, Vec4};
use crate::{Error, Result};

/// Tolerance on `| |p| - 1 |` for points handed to the sphere operations.
pub const SPHERE_TOL: f64 = 1e-9;
/// Tolerance on `|<X, p>|` for vectors that must be tangent at `p`.
pub const TANGENT_TOL: f64 = 1e-8;

/// The complex structure whose action realizes the Hopf field: `J1 p = X1(p)`.
pub const J1: Mat4 = Mat4::new([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
]);

pub const J2: Mat4 = Mat4::new([
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
]);

pub const J3: Mat4 = Mat4::new([
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
]);

/// Returns `(J1, J2, J3)`.
pub fn complex_structures() -> (Mat4, Mat4, Mat4) {
    (J1, J2, J3)
}

/// Angles within this distance of π/2 are treated as the Hopf-tube case.
pub const HOPF_ANGLE_TOL: f64 = 1e-6;

/// The pair (ε, ϑ): deformation of the fibres and the constant angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BergerParams {
    epsilon: f64,
    theta: f64,
}

impl BergerParams {
    pub fn new(epsilon: f64, theta: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if !(theta.is_finite() && theta > 0.0 && theta < FRAC_PI_2 - HOPF_ANGLE_TOL) {
            return Err(Error::InvalidAngle(theta));
        }
        Ok(Self { epsilon, theta })
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Values of a tangent frame at one base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTriple {
    pub e1: Vec4,
    pub e2: Vec4,
    pub e3: Vec4,
}

impl FrameTriple {
    pub fn as_array(&self) -> [Vec4; 3] {
        [self.e1, self.e2, self.e3]
    }
}

fn check_on_sphere(p: Vec4) -> Result<()> {
    let norm = p.norm();
    if (norm - 1.0).abs() > SPHERE_TOL || !norm.is_finite() {
        return Err(Error::NotOnSphere { norm });
    }
    Ok(())
}

fn check_tangent(p: Vec4, x: Vec4) -> Result<()> {
    let inner = x.dot(p);
    if inner.abs() > TANGENT_TOL || !inner.is_finite() {
        return Err(Error::NotTangent { inner });
    }
    Ok(())
}

/// The Hopf map ψ(z, w) = ½ (2 z w̄, |z|² − |w|²), written as a point of
/// C × R = R^3 on the sphere of radius 1/2.
pub fn hopf_map(p: Vec4) -> Result<[f64; 3]> {
    check_on_sphere(p)?;
    // z w̄ = (x1 + i y1)(x2 - i y2)
    let re = p.x1 * p.x2 + p.y1 * p.y2;
    let im = p.y1 * p.x2 - p.x1 * p.y2;
    let t = 0.5 * (p.x1 * p.x1 + p.y1 * p.y1 - p.x2 * p.x2 - p.y2 * p.y2);
    Ok([re, im, t])
}

/// Hopf frame (X1, X2, X3) without the sphere-membership check.
#[inline]
pub fn hopf_frame_unchecked(p: Vec4) -> FrameTriple {
    let Vec4 { x1, y1, x2, y2 } = p;
    FrameTriple {
        // (iz, iw)
        e1: Vec4::new(-y1, x1, -y2, x2),
        // (-i w̄, i z̄)
        e2: Vec4::new(-y2, -x2, y1, x1),
        // (-w̄, z̄)
        e3: Vec4::new(-x2, y2, x1, -y1),
    }
}

/// The Hopf frame (X1, X2, X3) at `p`: X1 vertical, X2 and X3 horizontal.
pub fn hopf_frame(p: Vec4) -> Result<FrameTriple> {
    check_on_sphere(p)?;
    Ok(hopf_frame_unchecked(p))
}

/// The g_ε-orthonormal frame (E1, E2, E3) = (X1/ε, X2, X3) at `p`.
pub fn berger_frame(params: &BergerParams, p: Vec4) -> Result<FrameTriple> {
    let x = hopf_frame(p)?;
    Ok(FrameTriple { e1: x.e1 * (1.0 / params.epsilon), ..x })
}

#[inline]
fn metric_unchecked(eps: f64, p: Vec4, x: Vec4, y: Vec4) -> f64 {
    let x1 = hopf_frame_unchecked(p).e1;
    x.dot(y) + (eps * eps - 1.0) * x.dot(x1) * y.dot(x1)
}

/// The Berger metric g_ε(X, Y) at `p`.
pub fn berger_metric(params: &BergerParams, p: Vec4, x: Vec4, y: Vec4) -> Result<f64> {
    check_tangent(p, x)?;
    check_tangent(p, y)?;
    Ok(metric_unchecked(params.epsilon, p, x, y))
}

/// Components `(g_ε(X,E1), g_ε(X,E2), g_ε(X,E3))` of a tangent vector.
pub fn frame_decompose(params: &BergerParams, p: Vec4, x: Vec4) -> Result<[f64; 3]> {
    check_tangent(p, x)?;
    Ok(frame_components(params.epsilon, p, x))
}

/// Frame components without precondition checks; for inner loops on points
/// already known to be on the sphere.
#[inline]
pub(crate) fn frame_components(eps: f64, p: Vec4, x: Vec4) -> [f64; 3] {
    let f = hopf_frame_unchecked(p);
    // g_ε(X, X1/ε) = ε <X, X1>; X2, X3 are euclidean-orthogonal to X1.
    [eps * x.dot(f.e1), x.dot(f.e2), x.dot(f.e3)]
}

/// Inverse of [`frame_decompose`]: `Σ cᵢ Eᵢ(p)`.
pub fn frame_reconstruct(params: &BergerParams, p: Vec4, c: [f64; 3]) -> Vec4 {
    let f = hopf_frame_unchecked(p);
    f.e1 * (c[0] / params.epsilon) + f.e2 * c[1] + f.e3 * c[2]
}

/// Levi-Civita coefficients `∇_{Ei} Ej = Σ_k Γ[i][j][k] E_k` (zero-based indices).
pub type ConnectionTable = [[[f64; 3]; 3]; 3];

pub fn connection_table(params: &BergerParams) -> ConnectionTable {
    let e = params.epsilon;
    let c = (2.0 - e * e) / e;
    [
        // ∇_{E1}
        [[0.0, 0.0, 0.0], [0.0, 0.0, c], [0.0, -c, 0.0]],
        // ∇_{E2}
        [[0.0, 0.0, -e], [0.0, 0.0, 0.0], [e, 0.0, 0.0]],
        // ∇_{E3}
        [[0.0, e, 0.0], [-e, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ]
}

/// Coefficients of `∇_{Ei} Ej` in the frame (E1, E2, E3); `i`, `j` are 1-based.
pub fn connection_coefficients(params: &BergerParams, i: usize, j: usize) -> Result<[f64; 3]> {
    for idx in [i, j] {
        if !(1..=3).contains(&idx) {
            return Err(Error::IndexOutOfRange(idx));
        }
    }
    Ok(connection_table(params)[i - 1][j - 1])
}

/// Covariant derivative `∇_X Y` of a vector field along a surface, both given
/// in frame components: `dy` holds the directional derivatives of the
/// components of `Y` in the direction `X`.
pub fn covariant_derivative(table: &ConnectionTable, x: [f64; 3], y: [f64; 3], dy: [f64; 3]) -> [f64; 3] {
    let mut out = dy;
    for (xi, row) in x.iter().zip(table.iter()) {
        for (yj, coeff) in y.iter().zip(row.iter()) {
            for k in 0..3 {
                out[k] += xi * yj * coeff[k];
            }
        }
    }
    out
}

/// Fibre rotation `e^{iφ} p = cos φ p + sin φ J1 p`.
pub fn fibre_rotate(p: Vec4, phi: f64) -> Vec4 {
    p * phi.cos() + J1.mul_vec(p) * phi.sin()
}
