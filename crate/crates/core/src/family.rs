//! The one-parameter family `A(v)` of orthogonal matrices commuting with `J1`.
//!
//! Given the first row `r1(v)`, the remaining rows are forced up to the
//! angle ξ: `J1 r1`, `cos ξ J2 r1 + sin ξ J3 r1` and
//! `−cos ξ J3 r1 + sin ξ J2 r1`.

use serde::Serialize;

use crate::berger::{J1, J2, J3};
use crate::linalg::{Mat4, Vec4};
use crate::profile::{ProfileFn, Tabulated, XiProfile};
use crate::{Error, Result};

/// Minimum |sin ξ1| accepted when solving the constraint for ξ3.
pub const XI1_SIN_TOL: f64 = 1e-6;
/// Tolerance on the Hopf-tube branch conditions.
pub const HOPF_TUBE_TOL: f64 = 1e-9;
/// Minimum node count of the quadrature grid used by [`derive_xi3`].
pub const MIN_QUADRATURE_NODES: usize = 1001;
/// Largest node spacing of that grid.
pub const MAX_QUADRATURE_STEP: f64 = 1e-3;

/// First row of `A(v)` as a function of (ξ1, ξ2, ξ3).
pub fn first_row(xi1: f64, xi2: f64, xi3: f64) -> Vec4 {
    let (s1, c1) = xi1.sin_cos();
    let (s2, c2) = xi2.sin_cos();
    let (s3, c3) = xi3.sin_cos();
    Vec4::new(c1 * c2, -c1 * s2, s1 * c3, -s1 * s3)
}

/// Stacks the rows generated by `r1` for the angle `xi`. Linear in `r1`.
pub fn rows_from_first(r1: Vec4, xi: f64) -> Mat4 {
    let (s, c) = xi.sin_cos();
    let j2 = J2 * r1;
    let j3 = J3 * r1;
    Mat4::from_row_vectors([r1, J1 * r1, j2 * c + j3 * s, j3 * (-c) + j2 * s])
}

/// The family `v ↦ A(v)` built from a profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrthoFamily {
    profile: XiProfile,
}

impl OrthoFamily {
    pub fn new(profile: XiProfile) -> Self {
        Self { profile }
    }

    pub fn profile(&self) -> &XiProfile {
        &self.profile
    }

    pub fn row1(&self, v: f64) -> Result<Vec4> {
        self.profile.check_domain(v)?;
        let (a, b, c) = self.profile.angles(v);
        Ok(first_row(a, b, c))
    }

    pub fn assemble(&self, v: f64) -> Result<Mat4> {
        self.profile.check_domain(v)?;
        Ok(self.assemble_unchecked(v))
    }

    /// `A(v)` without the domain check; profile functions extend past the
    /// domain, which finite differences at the boundary rely on.
    pub fn assemble_unchecked(&self, v: f64) -> Mat4 {
        let (a, b, c) = self.profile.angles(v);
        rows_from_first(first_row(a, b, c), self.profile.xi)
    }

    /// `A'(v)` from the profile derivatives (ξ is constant).
    pub fn derivative_unchecked(&self, v: f64) -> Mat4 {
        let (x1, x2, x3) = self.profile.angles(v);
        let (d1, d2, d3) = self.profile.angle_derivatives(v);
        let (s1, c1) = x1.sin_cos();
        let (s2, c2) = x2.sin_cos();
        let (s3, c3) = x3.sin_cos();
        let dr1 = Vec4::new(-s1 * c2, s1 * s2, c1 * c3, -c1 * s3) * d1
            + Vec4::new(-c1 * s2, -c1 * c2, 0.0, 0.0) * d2
            + Vec4::new(0.0, 0.0, -s1 * s3, -s1 * c3) * d3;
        rows_from_first(dr1, self.profile.xi)
    }

    pub fn derivative(&self, v: f64) -> Result<Mat4> {
        self.profile.check_domain(v)?;
        Ok(self.derivative_unchecked(v))
    }

    /// `‖AᵀA − I‖∞` at `v`.
    pub fn orthogonality_defect(&self, v: f64) -> f64 {
        let a = self.assemble_unchecked(v);
        (a.transpose() * a).max_abs_diff(&Mat4::IDENTITY)
    }

    /// `‖A J1 − J1 A‖∞` at `v`.
    pub fn commutator_defect(&self, v: f64) -> f64 {
        let a = self.assemble_unchecked(v);
        (a * J1).max_abs_diff(&(J1 * a))
    }
}

/// Solves `cos²ξ1 ξ2' − sin²ξ1 ξ3' = 0` for ξ3 with `ξ3(v_min) = xi3_at_vmin`.
///
/// The antiderivative of `cot²ξ1 ξ2'` is accumulated by Simpson's rule on each
/// cell of a uniform grid and stored as a cubic Hermite table whose node
/// slopes are the integrand itself.
pub fn derive_xi3(
    xi: f64,
    xi1: ProfileFn,
    xi2: ProfileFn,
    v_min: f64,
    v_max: f64,
    xi3_at_vmin: f64,
) -> Result<XiProfile> {
    // Validates the domain before sizing the grid.
    XiProfile::new(xi, xi1.clone(), xi2.clone(), ProfileFn::Constant(0.0), v_min, v_max)?;
    let span = v_max - v_min;
    let cells = ((span / MAX_QUADRATURE_STEP).ceil() as usize).max(MIN_QUADRATURE_NODES - 1);
    let step = span / cells as f64;

    let integrand = |v: f64| -> Result<f64> {
        let (s, c) = xi1.value(v).sin_cos();
        if s.abs() < XI1_SIN_TOL {
            return Err(Error::DegenerateXi1 { v, value: s.abs() });
        }
        Ok(c * c / (s * s) * xi2.derivative(v))
    };

    let mut nodes = Vec::with_capacity(cells + 1);
    let mut values = Vec::with_capacity(cells + 1);
    let mut slopes = Vec::with_capacity(cells + 1);
    let mut acc = xi3_at_vmin;
    let mut left = integrand(v_min)?;
    nodes.push(v_min);
    values.push(acc);
    slopes.push(left);
    for i in 0..cells {
        let a = v_min + step * i as f64;
        let b = if i + 1 == cells { v_max } else { v_min + step * (i + 1) as f64 };
        let mid = integrand(0.5 * (a + b))?;
        let right = integrand(b)?;
        acc += (b - a) / 6.0 * (left + 4.0 * mid + right);
        nodes.push(b);
        values.push(acc);
        slopes.push(right);
        left = right;
    }
    let xi3 = ProfileFn::Table(Tabulated::with_slopes(nodes, values, slopes)?);
    XiProfile::new(xi, xi1, xi2, xi3, v_min, v_max)
}

/// Which degenerate branch a profile falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HopfTubeBranch {
    /// ξ1 constant and a multiple of π/2.
    Xi1MultipleOfHalfPi,
    /// ξ1 constant and `−ξ' + ξ2' + ξ3'` identically zero.
    PhaseFactorVanishes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HopfTubeDiagnosis {
    pub is_hopf_tube: bool,
    pub branch: Option<HopfTubeBranch>,
    /// max |ξ1'| over the samples.
    pub xi1_derivative: f64,
    /// max |sin 2ξ1| over the samples.
    pub sin_two_xi1: f64,
    /// max |−ξ' + ξ2' + ξ3'| over the samples.
    pub phase_factor: f64,
    /// max of `4ξ1'² + sin²(2ξ1)(−ξ' + ξ2' + ξ3')²` (its square root).
    pub tangency_measure: f64,
}

/// Detects the profiles for which the Hopf field is tangent to the surface.
pub fn detect_hopf_tube(profile: &XiProfile) -> HopfTubeDiagnosis {
    detect_hopf_tube_sampled(profile, 201)
}

pub fn detect_hopf_tube_sampled(profile: &XiProfile, samples: usize) -> HopfTubeDiagnosis {
    let mut d1_max = 0.0_f64;
    let mut sin_max = 0.0_f64;
    let mut phase_max = 0.0_f64;
    let mut measure = 0.0_f64;
    let xi1_first = profile.xi1.value(profile.v_min);
    let mut xi1_spread = 0.0_f64;
    for v in profile.sample_points(samples) {
        let x1 = profile.xi1.value(v);
        let (d1, d2, d3) = profile.angle_derivatives(v);
        // ξ is constant, so ξ' = 0.
        let phase = d2 + d3;
        let s = (2.0 * x1).sin();
        d1_max = d1_max.max(d1.abs());
        sin_max = sin_max.max(s.abs());
        phase_max = phase_max.max(phase.abs());
        xi1_spread = xi1_spread.max((x1 - xi1_first).abs());
        measure = measure.max((4.0 * d1 * d1 + s * s * phase * phase).sqrt());
    }
    let xi1_constant = d1_max <= HOPF_TUBE_TOL && xi1_spread <= HOPF_TUBE_TOL;
    let branch = if !xi1_constant {
        None
    } else if sin_max <= HOPF_TUBE_TOL {
        Some(HopfTubeBranch::Xi1MultipleOfHalfPi)
    } else if phase_max <= HOPF_TUBE_TOL {
        Some(HopfTubeBranch::PhaseFactorVanishes)
    } else {
        None
    };
    HopfTubeDiagnosis {
        is_hopf_tube: branch.is_some(),
        branch,
        xi1_derivative: d1_max,
        sin_two_xi1: sin_max,
        phase_factor: phase_max,
        tangency_measure: measure,
    }
}
