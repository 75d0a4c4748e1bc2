//! Closed-form constants of a helix surface and the auxiliary fields λ, a, b, φ.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::berger::BergerParams;
use crate::profile::ProfileFn;
use crate::{Error, Result};

/// Minimum distance of the tan argument from its poles before λ is refused.
pub const POLE_TOL: f64 = 1e-6;

/// Every scalar the construction needs, derived once from (ε, ϑ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HelixConstants {
    pub epsilon: f64,
    pub theta: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub g11: f64,
    pub g33: f64,
    pub c1: f64,
    pub c2: f64,
    pub a_tilde: f64,
    pub b_tilde: f64,
    #[serde(rename = "D")]
    pub d_const: f64,
    #[serde(rename = "E")]
    pub e_const: f64,
    #[serde(rename = "I")]
    pub i_const: f64,
    #[serde(rename = "K")]
    pub gauss_k: f64,
    pub slope: f64,
}

/// Evaluates the closed forms for the given parameters.
pub fn compute_constants(params: &BergerParams) -> HelixConstants {
    let eps = params.epsilon();
    let theta = params.theta();
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let b = 1.0 + (eps * eps - 1.0) * c2;
    let sb = b.sqrt();

    let alpha1 = (b + eps * sb * c) / eps;
    // (B - ε√B cosϑ)/ε rewritten with B - ε² cos²ϑ = sin²ϑ to avoid cancellation.
    let alpha2 = sb * s2 / (eps * (sb + eps * c));

    let a_tilde = s2 * b / (eps * eps);
    let b_tilde = -2.0 * b / eps;
    let d_const = b * b_tilde * b_tilde * s2 / (eps * eps) - 3.0 * a_tilde * a_tilde;
    let e_const =
        (b_tilde * b_tilde - 2.0 * a_tilde) * d_const - b * a_tilde * a_tilde * s2 / (eps * eps);

    HelixConstants {
        epsilon: eps,
        theta,
        b,
        alpha1,
        alpha2,
        g11: eps * alpha2 / (2.0 * b),
        g33: eps * alpha1 / (2.0 * b),
        c1: 0.5 - eps * c / (2.0 * sb),
        c2: 0.5 + eps * c / (2.0 * sb),
        a_tilde,
        b_tilde,
        d_const,
        e_const,
        i_const: b * s2 * (s2 - 2.0 * b) / (eps * eps * eps),
        gauss_k: 4.0 * (1.0 - eps * eps) * c2,
        slope: alpha2 / alpha1,
    }
}

impl HelixConstants {
    pub fn new(params: &BergerParams) -> Self {
        compute_constants(params)
    }

    /// Coefficient of the second derivative in the fourth-order ODE.
    #[inline]
    pub fn ode_mid(&self) -> f64 {
        self.b_tilde * self.b_tilde - 2.0 * self.a_tilde
    }

    /// Slope of the torus geodesic from its closed form in (ε, ϑ).
    pub fn slope_closed_form(&self) -> f64 {
        let sb = self.b.sqrt();
        let ec = self.epsilon * self.theta.cos();
        (sb - ec) / (sb + ec)
    }
}

/// Free data for the auxiliary fields: the function η(v) and the
/// integration constant of φ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxFieldParams {
    pub eta: ProfileFn,
    pub c_phi: f64,
}

impl Default for AuxFieldParams {
    fn default() -> Self {
        Self { eta: ProfileFn::Constant(0.0), c_phi: 0.0 }
    }
}

/// The common phase `η(v) - 2 cosϑ √B u` of λ, a and b.
#[inline]
pub fn field_phase(u: f64, v: f64, aux: &AuxFieldParams, consts: &HelixConstants) -> f64 {
    aux.eta.value(v) - 2.0 * consts.theta.cos() * consts.b.sqrt() * u
}

/// λ(u,v) = 2√B tan(η(v) - 2 cosϑ √B u).
pub fn lambda_field(u: f64, v: f64, aux: &AuxFieldParams, consts: &HelixConstants) -> Result<f64> {
    let arg = field_phase(u, v, aux, consts);
    let k = ((arg - FRAC_PI_2) / PI).round();
    if (arg - FRAC_PI_2 - k * PI).abs() < POLE_TOL {
        return Err(Error::NearPole { arg });
    }
    Ok(2.0 * consts.b.sqrt() * arg.tan())
}

/// The coefficients (a, b) of `∂v = a T + b JT`.
pub fn ab_coefficients(u: f64, v: f64, aux: &AuxFieldParams, consts: &HelixConstants) -> (f64, f64) {
    let (s, c) = field_phase(u, v, aux, consts).sin_cos();
    (consts.epsilon / consts.b.sqrt() * s, c)
}

/// φ(u) = -2 B u / ε + c.
pub fn phi_field(u: f64, aux: &AuxFieldParams, consts: &HelixConstants) -> f64 {
    -2.0 * consts.b / consts.epsilon * u + aux.c_phi
}
