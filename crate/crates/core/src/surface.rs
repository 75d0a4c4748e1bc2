//! The surface `F(u,v) = A(v) β(u)` and its sampled grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::berger::{frame_components, BergerParams};
use crate::family::OrthoFamily;
use crate::helix::{compute_constants, HelixConstants};
use crate::linalg::{cross3, dot3, Vec4};
use crate::{Error, Result};

/// Step of the finite-difference `F_v`.
pub const FV_STEP: f64 = 1e-5;
/// Smallest accepted g_ε Gram determinant of `(F_u, F_v)`.
pub const GRAM_TOL: f64 = 1e-12;

/// The torus geodesic `β(u)`.
pub fn beta(u: f64, consts: &HelixConstants) -> Vec4 {
    beta_with_order(u, consts, 0)
}

/// `dⁿβ/duⁿ` for `order ∈ 1..=4`, from closed-form trigonometric derivatives.
pub fn beta_derivatives(u: f64, consts: &HelixConstants, order: u32) -> Result<Vec4> {
    if !(1..=4).contains(&order) {
        return Err(Error::BadOrder(order));
    }
    Ok(beta_with_order(u, consts, order))
}

fn beta_with_order(u: f64, consts: &HelixConstants, order: u32) -> Vec4 {
    let circle = |radius: f64, alpha: f64| {
        let (s, c) = (alpha * u).sin_cos();
        // d/du (c, s) = α (−s, c); n steps rotate by n quarter turns.
        let (x, y) = match order % 4 {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        };
        let k = radius * alpha.powi(order as i32);
        (k * x, k * y)
    };
    let (x1, y1) = circle(consts.g11.sqrt(), consts.alpha1);
    let (x2, y2) = circle(consts.g33.sqrt(), consts.alpha2);
    Vec4::new(x1, y1, x2, y2)
}

/// How `F_v` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FvMode {
    /// Analytic when every profile derivative is closed-form.
    #[default]
    Auto,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FvPath {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Partials {
    pub fu: Vec4,
    pub fv: Vec4,
    pub path: FvPath,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HelixSurface {
    params: BergerParams,
    consts: HelixConstants,
    family: OrthoFamily,
    u_range: (f64, f64),
    v_range: (f64, f64),
    fv_mode: FvMode,
}

impl HelixSurface {
    /// u-domain defaults to one slow period `[0, 2π/α₂]`; v-domain is the profile's.
    pub fn new(params: BergerParams, family: OrthoFamily) -> Self {
        let consts = compute_constants(&params);
        let v_range = (family.profile().v_min, family.profile().v_max);
        Self {
            params,
            consts,
            family,
            u_range: (0.0, std::f64::consts::TAU / consts.alpha2),
            v_range,
            fv_mode: FvMode::Auto,
        }
    }

    /// Replaces the constants used by β, leaving the ambient parameters alone.
    pub fn with_constants(mut self, consts: HelixConstants) -> Self {
        self.consts = consts;
        self
    }

    pub fn with_u_range(mut self, u_min: f64, u_max: f64) -> Result<Self> {
        if !(u_min.is_finite() && u_max.is_finite() && u_min < u_max) {
            return Err(Error::Config(format!("invalid u range [{u_min}, {u_max}]")));
        }
        self.u_range = (u_min, u_max);
        Ok(self)
    }

    pub fn with_fv_mode(mut self, mode: FvMode) -> Self {
        self.fv_mode = mode;
        self
    }

    pub fn params(&self) -> &BergerParams {
        &self.params
    }

    pub fn constants(&self) -> &HelixConstants {
        &self.consts
    }

    pub fn family(&self) -> &OrthoFamily {
        &self.family
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn v_range(&self) -> (f64, f64) {
        self.v_range
    }

    pub fn fv_path(&self) -> FvPath {
        match self.fv_mode {
            FvMode::Auto if self.family.profile().has_closed_form_derivatives() => FvPath::Analytic,
            _ => FvPath::FiniteDifference,
        }
    }

    fn check_u(&self, u: f64) -> Result<()> {
        let (min, max) = self.u_range;
        let slack = 1e-12 * (max - min).abs().max(1.0);
        if !(u >= min - slack && u <= max + slack) {
            return Err(Error::OutOfDomain { value: u, min, max });
        }
        Ok(())
    }

    fn check(&self, u: f64, v: f64) -> Result<()> {
        self.check_u(u)?;
        self.family.profile().check_domain(v)
    }

    pub fn beta(&self, u: f64) -> Vec4 {
        beta(u, &self.consts)
    }

    pub fn beta_derivatives(&self, u: f64, order: u32) -> Result<Vec4> {
        beta_derivatives(u, &self.consts, order)
    }

    pub fn position(&self, u: f64, v: f64) -> Result<Vec4> {
        self.check(u, v)?;
        Ok(self.position_unchecked(u, v))
    }

    /// `F(u,v)` without domain checks; used by stencils reaching past the boundary.
    pub fn position_unchecked(&self, u: f64, v: f64) -> Vec4 {
        self.family.assemble_unchecked(v) * self.beta(u)
    }

    /// `∂ⁿF/∂uⁿ = A(v) β⁽ⁿ⁾(u)`.
    pub fn u_derivative(&self, u: f64, v: f64, order: u32) -> Result<Vec4> {
        self.check(u, v)?;
        Ok(self.family.assemble_unchecked(v) * beta_derivatives(u, &self.consts, order)?)
    }

    pub fn partials(&self, u: f64, v: f64) -> Result<Partials> {
        self.check(u, v)?;
        Ok(self.partials_unchecked(u, v))
    }

    pub fn partials_unchecked(&self, u: f64, v: f64) -> Partials {
        let b = self.beta(u);
        let fu = self.family.assemble_unchecked(v) * beta_with_order(u, &self.consts, 1);
        let path = self.fv_path();
        let fv = match path {
            FvPath::Analytic => self.family.derivative_unchecked(v) * b,
            FvPath::FiniteDifference => {
                let central = |h: f64| {
                    (self.family.assemble_unchecked(v + h) * b - self.family.assemble_unchecked(v - h) * b)
                        * (0.5 / h)
                };
                // One Richardson level cancels the h² term.
                (central(0.5 * FV_STEP) * 4.0 - central(FV_STEP)) * (1.0 / 3.0)
            }
        };
        Partials { fu, fv, path }
    }

    /// Frame components of `F_u` and `F_v` at `F(u,v)`.
    pub fn tangent_components(&self, u: f64, v: f64) -> ([f64; 3], [f64; 3]) {
        let p = self.position_unchecked(u, v);
        let d = self.partials_unchecked(u, v);
        let eps = self.params.epsilon();
        (frame_components(eps, p, d.fu), frame_components(eps, p, d.fv))
    }

    /// `(N₁, N₂, N₃) = F_u × F_v` in the frame `{E₁, E₂, E₃}`; unnormalized.
    pub fn normal_components(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        self.check(u, v)?;
        self.normal_components_unchecked(u, v)
    }

    pub fn normal_components_unchecked(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        let (xu, xv) = self.tangent_components(u, v);
        normal_from_components(xu, xv)
    }

    /// g_ε-unit normal components, oriented so that `N₁ ≥ 0`.
    pub fn unit_normal_unchecked(&self, u: f64, v: f64) -> Result<[f64; 3]> {
        let n = self.normal_components_unchecked(u, v)?;
        let len = dot3(n, n).sqrt();
        let s = if n[0] < 0.0 { -1.0 / len } else { 1.0 / len };
        Ok([n[0] * s, n[1] * s, n[2] * s])
    }

    /// Angle between the unit normal and `E₁`, in `[0, π/2]`.
    pub fn measured_angle(&self, u: f64, v: f64) -> Result<f64> {
        angle_from_normal(self.normal_components(u, v)?)
    }

    /// The g_ε first fundamental form `(E, F, G)` at `(u,v)`.
    pub fn first_fundamental_form(&self, u: f64, v: f64) -> [f64; 3] {
        let (xu, xv) = self.tangent_components(u, v);
        [dot3(xu, xu), dot3(xu, xv), dot3(xv, xv)]
    }

    /// Uniform `nu × nv` grid over the domain, `u` outer.
    pub fn sample_grid(&self, nu: usize, nv: usize) -> Result<SurfaceGrid> {
        if nu < 2 || nv < 2 {
            return Err(Error::Config(format!("grid needs at least 2x2 samples, got {nu}x{nv}")));
        }
        let us = uniform_nodes(self.u_range, nu);
        let vs = uniform_nodes(self.v_range, nv);
        let path = self.fv_path();
        let samples: Vec<GridSample> = (0..nu * nv)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / nv, k % nv);
                let (u, v) = (us[i], vs[j]);
                let position = self.position_unchecked(u, v);
                let d = self.partials_unchecked(u, v);
                let eps = self.params.epsilon();
                let xu = frame_components(eps, position, d.fu);
                let xv = frame_components(eps, position, d.fv);
                let (normal, angle, defect) = match normal_from_components(xu, xv) {
                    Ok(n) => (Some(n), angle_from_normal(n).ok(), None),
                    Err(e) => (None, None, Some(e.to_string())),
                };
                GridSample { i, j, u, v, position, fu: d.fu, fv: d.fv, normal, angle, defect }
            })
            .collect();
        let defects = samples
            .iter()
            .filter_map(|s| s.defect.as_ref().map(|r| Defect { i: s.i, j: s.j, u: s.u, v: s.v, reason: r.clone() }))
            .collect();
        Ok(SurfaceGrid { nu, nv, u_range: self.u_range, v_range: self.v_range, fv_path: path, samples, defects })
    }
}

/// `n` equispaced nodes with exact endpoints.
pub fn uniform_nodes((min, max): (f64, f64), n: usize) -> Vec<f64> {
    let step = (max - min) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { max } else { min + step * i as f64 }).collect()
}

/// Cross product of frame components; the g_ε Gram determinant equals `|N|²`.
pub fn normal_from_components(xu: [f64; 3], xv: [f64; 3]) -> Result<[f64; 3]> {
    let n = cross3(xu, xv);
    let gram = dot3(n, n);
    if !(gram >= GRAM_TOL) {
        return Err(Error::DegenerateTangentPlane { gram });
    }
    Ok(n)
}

pub fn angle_from_normal(n: [f64; 3]) -> Result<f64> {
    let len2 = dot3(n, n);
    if !(len2 > 0.0) {
        return Err(Error::DegenerateTangentPlane { gram: len2 });
    }
    Ok((n[0].abs() / len2.sqrt()).min(1.0).acos())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSample {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
    pub position: Vec4,
    pub fu: Vec4,
    pub fv: Vec4,
    pub normal: Option<[f64; 3]>,
    pub angle: Option<f64>,
    pub defect: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defect {
    pub i: usize,
    pub j: usize,
    pub u: f64,
    pub v: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceGrid {
    pub nu: usize,
    pub nv: usize,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
    pub fv_path: FvPath,
    /// Row-major: sample `(i, j)` sits at `i * nv + j`.
    pub samples: Vec<GridSample>,
    pub defects: Vec<Defect>,
}

impl SurfaceGrid {
    pub fn sample(&self, i: usize, j: usize) -> &GridSample {
        &self.samples[i * self.nv + j]
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `(max |ϑ̂ − target|, argmax)` over non-defect samples.
    pub fn max_angle_deviation(&self, target: f64) -> Option<(f64, (usize, usize))> {
        self.samples
            .iter()
            .filter_map(|s| s.angle.map(|a| ((a - target).abs(), (s.i, s.j))))
            .fold(None, |acc, x| match acc {
                Some((d, _)) if d >= x.0 => acc,
                _ => Some(x),
            })
    }

    /// `max − min` of the measured angle over non-defect samples.
    pub fn angle_spread(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .filter_map(|s| s.angle)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
        if lo > hi { 0.0 } else { hi - lo }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::first_row;
    use crate::linalg::Mat4;
    use crate::profile::{ProfileFn, Tabulated, XiProfile};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI, TAU};

    fn example(eps: f64, theta: f64) -> HelixSurface {
        let p = BergerParams::new(eps, theta).unwrap();
        HelixSurface::new(p, OrthoFamily::new(XiProfile::example(0.0, TAU).unwrap()))
    }

    fn lin(slope: f64, offset: f64) -> ProfileFn {
        ProfileFn::Linear { slope, offset }
    }

    #[test]
    fn beta_examples() {
        let s = example(1.0, FRAC_PI_4);
        let c = *s.constants();
        let b0 = s.beta(0.0);
        assert_eq!(b0, Vec4::new(c.g11.sqrt(), 0.0, c.g33.sqrt(), 0.0));
        let d1 = s.beta_derivatives(0.0, 1).unwrap();
        assert!((d1 - Vec4::new(0.0, c.g11.sqrt() * c.alpha1, 0.0, c.g33.sqrt() * c.alpha2)).max_abs() < 1e-15);
        let d2 = s.beta_derivatives(0.0, 2).unwrap();
        let expected = Vec4::new(-c.g11.sqrt() * c.alpha1.powi(2), 0.0, -c.g33.sqrt() * c.alpha2.powi(2), 0.0);
        assert!((d2 - expected).max_abs() < 1e-15);
        assert!(matches!(s.beta_derivatives(0.0, 0), Err(Error::BadOrder(0))));
        assert!(matches!(s.beta_derivatives(0.0, 5), Err(Error::BadOrder(5))));
    }

    #[test]
    fn beta_derivatives_match_differences() {
        let s = example(0.7, 1.1);
        let h = 1e-4;
        for u in [0.0, 0.4, 2.9] {
            for order in 1..=4u32 {
                let lower = |x: f64| if order == 1 { s.beta(x) } else { s.beta_derivatives(x, order - 1).unwrap() };
                let fd = (lower(u + h) - lower(u - h)) * (0.5 / h);
                let exact = s.beta_derivatives(u, order).unwrap();
                assert!((fd - exact).max_abs() < 1e-6 * exact.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn beta_has_no_short_period() {
        // β(u) = β(0) needs α₁u, α₂u ∈ 2πZ, i.e. m = l/k with u = 2πk/α₁.
        let c = *example(1.0, FRAC_PI_4).constants();
        let m = c.alpha2 / c.alpha1;
        let mut k = 1u64;
        while TAU * k as f64 / c.alpha1 <= 1e4 {
            let l = m * k as f64;
            assert!((l - l.round()).abs() > 1e-9, "period candidate k={k}");
            k += 1;
        }
    }

    #[test]
    fn position_example_at_origin() {
        let s = example(1.0, FRAC_PI_4);
        let c = *s.constants();
        let (a, b) = (c.g11.sqrt(), c.g33.sqrt());
        let expected = Vec4::new(a + b, 0.0, -a + b, 0.0) * FRAC_1_SQRT_2;
        assert!((s.position(0.0, 0.0).unwrap() - expected).max_abs() < 1e-15);
        assert!(s.position(-1.0, 0.0).is_err());
        assert!(s.position(0.0, 7.0).is_err());
    }

    #[test]
    fn position_matches_matrix_product() {
        let s = example(0.5, 1.0);
        for (u, v) in [(0.3, 0.2), (4.0, 5.5)] {
            // Independent oracle: build the rows by hand and multiply.
            let r1 = first_row(FRAC_PI_4, v, v);
            let j = |m: Mat4, x: Vec4| m * x;
            let rows = [
                r1,
                j(crate::berger::J1, r1),
                j(crate::berger::J3, r1),
                j(crate::berger::J2, r1),
            ];
            let b = s.beta(u);
            let f = Vec4::new(rows[0].dot(b), rows[1].dot(b), rows[2].dot(b), rows[3].dot(b));
            assert!((s.position(u, v).unwrap() - f).max_abs() < 1e-15);
        }
    }

    #[test]
    fn tangent_vectors_and_metric() {
        let s = example(0.8, FRAC_PI_6);
        let st = FRAC_PI_6.sin();
        for (u, v) in [(0.31, 0.5), (1.2, 3.3), (5.0, 6.0)] {
            let f = s.position(u, v).unwrap();
            let d = s.partials(u, v).unwrap();
            assert_eq!(d.path, FvPath::Analytic);
            assert!(d.fu.dot(f).abs() < 1e-12);
            assert!(d.fv.dot(f).abs() < 1e-12);
            let g = crate::berger::berger_metric(s.params(), f, d.fu, d.fu).unwrap();
            assert!((g - st * st).abs() < 1e-9);
            let c = s.constants();
            assert!((d.fu.norm_squared() - c.b * st * st / 0.64).abs() < 1e-12);
        }
    }

    #[test]
    fn finite_difference_fv_matches_analytic() {
        let p = XiProfile::new(0.4, ProfileFn::Constant(0.9), lin(1.3, 0.2), lin(0.7, -0.1), -1.0, 1.0).unwrap();
        let params = BergerParams::new(1.3, 0.6).unwrap();
        let s = HelixSurface::new(params, OrthoFamily::new(p));
        let fd = s.clone().with_fv_mode(FvMode::FiniteDifference);
        for (u, v) in [(0.2, -0.3), (1.7, 0.0), (3.0, 0.99)] {
            let a = s.partials(u, v).unwrap();
            let b = fd.partials(u, v).unwrap();
            assert_eq!(b.path, FvPath::FiniteDifference);
            assert!((a.fv - b.fv).max_abs() < 1e-9);
        }
    }

    #[test]
    fn tabulated_profile_uses_finite_differences() {
        let nodes: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
        let values: Vec<f64> = nodes.to_vec();
        let slopes = vec![1.0; nodes.len()];
        let table = ProfileFn::Table(Tabulated::with_slopes(nodes, values, slopes).unwrap());
        let p = XiProfile::new(FRAC_PI_2, ProfileFn::Constant(FRAC_PI_4), lin(1.0, 0.0), table, 0.0, 2.0).unwrap();
        let s = HelixSurface::new(BergerParams::new(1.0, FRAC_PI_4).unwrap(), OrthoFamily::new(p));
        assert_eq!(s.fv_path(), FvPath::FiniteDifference);
        let exact = example(1.0, FRAC_PI_4);
        let a = s.partials(1.0, 0.7).unwrap();
        let b = exact.partials(1.0, 0.7).unwrap();
        assert!((a.fv - b.fv).max_abs() < 1e-9);
    }

    #[test]
    fn normal_swaps_sign_with_tangents() {
        let s = example(1.0, FRAC_PI_4);
        let (xu, xv) = s.tangent_components(0.7, 1.1);
        let a = normal_from_components(xu, xv).unwrap();
        let b = normal_from_components(xv, xu).unwrap();
        for k in 0..3 {
            assert_eq!(a[k], -b[k]);
        }
    }

    #[test]
    fn normal_is_orthogonal_and_angle_constant() {
        for (eps, theta) in [(1.0, FRAC_PI_4), (0.5, PI / 3.0), (1.5, FRAC_PI_6)] {
            let s = example(eps, theta);
            for (u, v) in [(0.37, 0.2), (2.2, 1.9), (4.1, 5.0)] {
                let n = s.normal_components(u, v).unwrap();
                let (xu, xv) = s.tangent_components(u, v);
                let scale = dot3(n, n).sqrt();
                assert!(dot3(n, xu).abs() / scale < 1e-9);
                assert!(dot3(n, xv).abs() / scale < 1e-9);
                assert!((n[0] * n[0] / dot3(n, n) - theta.cos().powi(2)).abs() < 1e-9);
                assert!((s.measured_angle(u, v).unwrap() - theta).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn hopf_tube_normal_is_horizontal() {
        let p = XiProfile::new(0.3, ProfileFn::Constant(0.0), lin(1.0, 0.0), lin(0.5, 0.0), 0.0, 2.0).unwrap();
        let s = HelixSurface::new(BergerParams::new(1.0, FRAC_PI_4).unwrap(), OrthoFamily::new(p));
        for (u, v) in [(0.3, 0.4), (1.9, 1.2)] {
            let n = s.normal_components(u, v).unwrap();
            assert!(n[0].abs() < 1e-10);
            assert!((s.measured_angle(u, v).unwrap() - FRAC_PI_2).abs() < 1e-8);
        }
    }

    #[test]
    fn singular_line_is_a_defect() {
        // At u = 0 the Example surface has F_u parallel to F_v.
        let s = example(1.0, FRAC_PI_4);
        assert!(matches!(s.normal_components(0.0, 0.3), Err(Error::DegenerateTangentPlane { .. })));
        let g = s.sample_grid(5, 4).unwrap();
        assert!(g.defects.iter().any(|d| d.i == 0));
        assert!(g.samples.iter().filter(|x| x.i == 0).all(|x| x.defect.is_some()));
    }

    #[test]
    fn grid_shape_and_determinism() {
        let s = example(1.0, FRAC_PI_4);
        let g = s.sample_grid(2, 2).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.sample(1, 0).u, s.u_range().1);
        assert_eq!(g.sample(0, 1).v, TAU);
        assert!(s.sample_grid(1, 5).is_err());

        let g = s.sample_grid(41, 37).unwrap();
        let sequential: Vec<Vec4> = uniform_nodes(s.u_range(), 41)
            .iter()
            .flat_map(|&u| uniform_nodes(s.v_range(), 37).into_iter().map(move |v| (u, v)))
            .map(|(u, v)| s.position_unchecked(u, v))
            .collect();
        assert!(g.samples.iter().zip(&sequential).all(|(a, b)| a.position == *b));
        assert!(g.samples.iter().all(|x| (x.position.norm() - 1.0).abs() < 1e-10));
        assert!(g.angle_spread() <= 1e-8);
        assert_eq!(g, s.sample_grid(41, 37).unwrap());
    }

    proptest! {
        #[test]
        fn positions_stay_on_sphere(eps in 0.2f64..2.5, theta in 0.1f64..1.45, t in 0.0f64..1.0, w in 0.0f64..1.0) {
            let s = example(eps, theta);
            let (u0, u1) = s.u_range();
            let f = s.position(u0 + t * (u1 - u0), w * TAU).unwrap();
            prop_assert!((f.norm() - 1.0).abs() < 1e-12);
            prop_assert!((s.beta(t * 10.0).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn fourth_order_ode_on_beta(eps in 0.2f64..2.5, theta in 0.1f64..1.45, u in -20.0f64..20.0) {
            let c = *example(eps, theta).constants();
            let b = beta(u, &c);
            let b2 = beta_derivatives(u, &c, 2).unwrap();
            let b4 = beta_derivatives(u, &c, 4).unwrap();
            let r = b4 + b2 * c.ode_mid() + b * c.a_tilde.powi(2);
            prop_assert!(r.max_abs() <= 1e-10 * c.alpha1.powi(4).max(1.0));
        }
    }
}
