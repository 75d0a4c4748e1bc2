//! Scalar profile functions of `v` and the four-function profile (ξ, ξ1, ξ2, ξ3)
//! that parametrizes the family `A(v)`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A smooth scalar function of one variable with a first-derivative evaluator.
///
/// Serialized in the externally tagged form
/// `{"constant": c}`, `{"linear": {"slope": s, "offset": o}}`,
/// `{"sinusoidal": {...}}` or `{"table": {"v": [...], "value": [...]}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileFn {
    Constant(f64),
    Linear {
        slope: f64,
        offset: f64,
    },
    /// `offset + amplitude * sin(frequency * v + phase)`
    Sinusoidal {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    Table(Tabulated),
}

impl ProfileFn {
    pub fn value(&self, v: f64) -> f64 {
        match self {
            ProfileFn::Constant(c) => *c,
            ProfileFn::Linear { slope, offset } => slope * v + offset,
            ProfileFn::Sinusoidal { amplitude, frequency, phase, offset } => {
                offset + amplitude * (frequency * v + phase).sin()
            }
            ProfileFn::Table(t) => t.value(v),
        }
    }

    pub fn derivative(&self, v: f64) -> f64 {
        match self {
            ProfileFn::Constant(_) => 0.0,
            ProfileFn::Linear { slope, .. } => *slope,
            ProfileFn::Sinusoidal { amplitude, frequency, phase, .. } => {
                amplitude * frequency * (frequency * v + phase).cos()
            }
            ProfileFn::Table(t) => t.derivative(v),
        }
    }

    /// Whether `derivative` is exact rather than the derivative of an interpolant.
    pub fn has_closed_form_derivative(&self) -> bool {
        !matches!(self, ProfileFn::Table(_))
    }

    /// The function `v -> self(v - shift)`.
    pub fn shifted(&self, shift: f64) -> ProfileFn {
        match self {
            ProfileFn::Constant(c) => ProfileFn::Constant(*c),
            ProfileFn::Linear { slope, offset } => {
                ProfileFn::Linear { slope: *slope, offset: offset - slope * shift }
            }
            ProfileFn::Sinusoidal { amplitude, frequency, phase, offset } => ProfileFn::Sinusoidal {
                amplitude: *amplitude,
                frequency: *frequency,
                phase: phase - frequency * shift,
                offset: *offset,
            },
            ProfileFn::Table(t) => ProfileFn::Table(Tabulated {
                nodes: t.nodes.iter().map(|x| x + shift).collect(),
                values: t.values.clone(),
                slopes: t.slopes.clone(),
            }),
        }
    }

    /// True when the function is constant in `v`.
    pub fn is_constant(&self) -> bool {
        match self {
            ProfileFn::Constant(_) => true,
            ProfileFn::Linear { slope, .. } => *slope == 0.0,
            ProfileFn::Sinusoidal { amplitude, frequency, .. } => *amplitude == 0.0 || *frequency == 0.0,
            ProfileFn::Table(t) => t.values.windows(2).all(|w| w[0] == w[1]) && t.slopes.iter().all(|s| *s == 0.0),
        }
    }
}

#[derive(Deserialize)]
struct TableSpec {
    v: Vec<f64>,
    value: Vec<f64>,
}

#[derive(Serialize)]
struct TableOut<'a> {
    v: &'a [f64],
    value: &'a [f64],
}

/// Piecewise cubic Hermite interpolant through tabulated samples.
///
/// Outside of the node range the first or last cubic is extended.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(try_from = "TableSpec")]
pub struct Tabulated {
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Serialize for Tabulated {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableOut { v: &self.nodes, value: &self.values }.serialize(s)
    }
}

impl TryFrom<TableSpec> for Tabulated {
    type Error = Error;

    fn try_from(spec: TableSpec) -> Result<Self> {
        Tabulated::from_samples(spec.v, spec.value)
    }
}

impl Tabulated {
    /// Builds an interpolant with known slopes at the nodes.
    pub fn with_slopes(nodes: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidProfile("table needs at least two nodes".into()));
        }
        if nodes.len() != values.len() || nodes.len() != slopes.len() {
            return Err(Error::InvalidProfile("table columns have different lengths".into()));
        }
        if nodes.iter().chain(&values).chain(&slopes).any(|x| !x.is_finite()) {
            return Err(Error::InvalidProfile("table contains non-finite entries".into()));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProfile("table nodes must be strictly increasing".into()));
        }
        Ok(Self { nodes, values, slopes })
    }

    /// Builds an interpolant whose node slopes are estimated by three-point
    /// finite differences on the (possibly non-uniform) grid.
    pub fn from_samples(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let n = nodes.len();
        if n < 2 || n != values.len() {
            return Tabulated::with_slopes(nodes, values, vec![0.0; n]);
        }
        let slopes = if n == 2 {
            let s = (values[1] - values[0]) / (nodes[1] - nodes[0]);
            vec![s, s]
        } else {
            (0..n).map(|i| three_point_slope(&nodes, &values, i)).collect()
        };
        Tabulated::with_slopes(nodes, values, slopes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn segment(&self, v: f64) -> usize {
        let last = self.nodes.len() - 2;
        match self.nodes.binary_search_by(|x| x.total_cmp(&v)) {
            Ok(i) => i.min(last),
            Err(0) => 0,
            Err(i) => (i - 1).min(last),
        }
    }

    fn hermite(&self, v: f64) -> (f64, f64) {
        let i = self.segment(v);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let h = x1 - x0;
        let t = (v - x0) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let dt = (6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1;
        (value, dt / h)
    }

    pub fn value(&self, v: f64) -> f64 {
        self.hermite(v).0
    }

    pub fn derivative(&self, v: f64) -> f64 {
        self.hermite(v).1
    }
}

fn three_point_slope(x: &[f64], y: &[f64], i: usize) -> f64 {
    let n = x.len();
    // Second-order derivative of the parabola through three consecutive nodes.
    let (a, b, c) = match i {
        0 => (0, 1, 2),
        _ if i == n - 1 => (n - 3, n - 2, n - 1),
        _ => (i - 1, i, i + 1),
    };
    let (xa, xb, xc) = (x[a], x[b], x[c]);
    let xi = x[i];
    y[a] * (2.0 * xi - xb - xc) / ((xa - xb) * (xa - xc))
        + y[b] * (2.0 * xi - xa - xc) / ((xb - xa) * (xb - xc))
        + y[c] * (2.0 * xi - xa - xb) / ((xc - xa) * (xc - xb))
}

/// The four profile functions defining `A(v)`, with ξ held constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiProfile {
    pub xi: f64,
    pub xi1: ProfileFn,
    pub xi2: ProfileFn,
    pub xi3: ProfileFn,
    pub v_min: f64,
    pub v_max: f64,
}

/// Tolerance on the helix-admissibility constraint.
pub const CONSTRAINT_TOL: f64 = 1e-8;

impl XiProfile {
    pub fn new(xi: f64, xi1: ProfileFn, xi2: ProfileFn, xi3: ProfileFn, v_min: f64, v_max: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::InvalidProfile(format!("xi = {xi} is not finite")));
        }
        if !(v_min.is_finite() && v_max.is_finite() && v_min < v_max) {
            return Err(Error::InvalidProfile(format!("empty v-domain [{v_min}, {v_max}]")));
        }
        Ok(Self { xi, xi1, xi2, xi3, v_min, v_max })
    }

    /// The profile of the worked example: ξ = π/2, ξ1 = π/4, ξ2 = ξ3 = v.
    pub fn example(v_min: f64, v_max: f64) -> Result<Self> {
        let lin = ProfileFn::Linear { slope: 1.0, offset: 0.0 };
        XiProfile::new(
            std::f64::consts::FRAC_PI_2,
            ProfileFn::Constant(std::f64::consts::FRAC_PI_4),
            lin.clone(),
            lin,
            v_min,
            v_max,
        )
    }

    pub fn check_domain(&self, v: f64) -> Result<()> {
        if v.is_nan() || v < self.v_min || v > self.v_max {
            return Err(Error::OutOfDomain { value: v, min: self.v_min, max: self.v_max });
        }
        Ok(())
    }

    #[inline]
    pub fn angles(&self, v: f64) -> (f64, f64, f64) {
        (self.xi1.value(v), self.xi2.value(v), self.xi3.value(v))
    }

    #[inline]
    pub fn angle_derivatives(&self, v: f64) -> (f64, f64, f64) {
        (self.xi1.derivative(v), self.xi2.derivative(v), self.xi3.derivative(v))
    }

    pub fn has_closed_form_derivatives(&self) -> bool {
        self.xi1.has_closed_form_derivative()
            && self.xi2.has_closed_form_derivative()
            && self.xi3.has_closed_form_derivative()
    }

    /// `cos²ξ1 ξ2' − sin²ξ1 ξ3'` at `v`.
    pub fn constraint_residual(&self, v: f64) -> f64 {
        let x1 = self.xi1.value(v);
        let (_, d2, d3) = self.angle_derivatives(v);
        let (s, c) = x1.sin_cos();
        c * c * d2 - s * s * d3
    }

    /// Uniform sample positions over the domain (both ends included).
    pub fn sample_points(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let n = n.max(2);
        let step = (self.v_max - self.v_min) / (n - 1) as f64;
        (0..n).map(move |i| if i == n - 1 { self.v_max } else { self.v_min + step * i as f64 })
    }

    pub fn max_constraint_residual(&self, n: usize) -> f64 {
        self.sample_points(n).map(|v| self.constraint_residual(v).abs()).fold(0.0, f64::max)
    }

    pub fn is_admissible(&self, n: usize) -> bool {
        self.max_constraint_residual(n) <= CONSTRAINT_TOL
    }

    /// The same family reparametrized by `v -> v + shift`.
    /// Node count of a tabulated ξ3 (1 when ξ3 is a closed form).
    pub fn xi3_table_len(&self) -> usize {
        match &self.xi3 {
            ProfileFn::Table(t) => t.nodes().len(),
            _ => 1,
        }
    }

    pub fn shifted(&self, shift: f64) -> XiProfile {
        XiProfile {
            xi: self.xi,
            xi1: self.xi1.shifted(shift),
            xi2: self.xi2.shifted(shift),
            xi3: self.xi3.shifted(shift),
            v_min: self.v_min + shift,
            v_max: self.v_max + shift,
        }
    }
}

/// `"xi3"` in a profile configuration: a function, or `"auto"` to derive it
/// from the admissibility constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Xi3Spec {
    Auto(AutoTag),
    Explicit(ProfileFn),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// JSON profile schema shared by the CLI and tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub xi: f64,
    pub xi1: ProfileFn,
    pub xi2: ProfileFn,
    pub xi3: Xi3Spec,
    pub v_min: f64,
    pub v_max: f64,
    /// Initial value used when `xi3` is `"auto"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi3_at_vmin: Option<f64>,
}

impl ProfileConfig {
    pub fn example() -> Self {
        let lin = ProfileFn::Linear { slope: 1.0, offset: 0.0 };
        ProfileConfig {
            xi: std::f64::consts::FRAC_PI_2,
            xi1: ProfileFn::Constant(std::f64::consts::FRAC_PI_4),
            xi2: lin.clone(),
            xi3: Xi3Spec::Explicit(lin),
            v_min: 0.0,
            v_max: 2.0 * std::f64::consts::PI,
            xi3_at_vmin: None,
        }
    }

    pub fn build(&self) -> Result<XiProfile> {
        match &self.xi3 {
            Xi3Spec::Explicit(f) => {
                XiProfile::new(self.xi, self.xi1.clone(), self.xi2.clone(), f.clone(), self.v_min, self.v_max)
            }
            Xi3Spec::Auto(_) => crate::family::derive_xi3(
                self.xi,
                self.xi1.clone(),
                self.xi2.clone(),
                self.v_min,
                self.v_max,
                self.xi3_at_vmin.unwrap_or(0.0),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_derivatives() {
        let f = ProfileFn::Sinusoidal { amplitude: 0.5, frequency: 2.0, phase: 0.3, offset: 1.0 };
        let h = 1e-6;
        for v in [-1.0, 0.0, 0.7, 3.0] {
            let fd = (f.value(v + h) - f.value(v - h)) / (2.0 * h);
            assert!((fd - f.derivative(v)).abs() < 1e-8);
        }
        assert!(f.has_closed_form_derivative());
        assert_eq!(ProfileFn::Constant(2.0).derivative(5.0), 0.0);
    }

    #[test]
    fn shifted_functions_translate() {
        let fs = [
            ProfileFn::Linear { slope: 2.0, offset: -1.0 },
            ProfileFn::Sinusoidal { amplitude: 0.5, frequency: 2.0, phase: 0.3, offset: 1.0 },
            ProfileFn::Table(Tabulated::from_samples(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 0.5, 2.0]).unwrap()),
        ];
        for f in fs {
            let g = f.shifted(0.75);
            for v in [0.2, 1.3, 2.9] {
                assert!((g.value(v + 0.75) - f.value(v)).abs() < 1e-14);
                assert!((g.derivative(v + 0.75) - f.derivative(v)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn table_reproduces_cubic_samples() {
        // Three-point slopes are exact on quadratics; Hermite is exact on cubics
        // with exact slopes.
        let nodes: Vec<f64> = (0..11).map(|i| i as f64 * 0.3).collect();
        let quad: Vec<f64> = nodes.iter().map(|x| 1.0 + 2.0 * x - x * x).collect();
        let t = Tabulated::from_samples(nodes.clone(), quad).unwrap();
        for v in [0.05, 0.71, 1.5, 2.99] {
            assert!((t.value(v) - (1.0 + 2.0 * v - v * v)).abs() < 1e-13);
            assert!((t.derivative(v) - (2.0 - 2.0 * v)).abs() < 1e-12);
        }
        let cubic: Vec<f64> = nodes.iter().map(|x| x * x * x).collect();
        let slopes: Vec<f64> = nodes.iter().map(|x| 3.0 * x * x).collect();
        let t = Tabulated::with_slopes(nodes, cubic, slopes).unwrap();
        assert!((t.value(1.234) - 1.234f64.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn table_rejects_bad_input() {
        assert!(Tabulated::from_samples(vec![0.0], vec![1.0]).is_err());
        assert!(Tabulated::from_samples(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(Tabulated::from_samples(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn parse_profile_config() {
        let json = r#"{
            "xi": 1.5707963267948966,
            "xi1": {"constant": 0.7853981633974483},
            "xi2": {"linear": {"slope": 1.0, "offset": 0.0}},
            "xi3": "auto",
            "v_min": 0.0, "v_max": 1.0
        }"#;
        let cfg: ProfileConfig = serde_json::from_str(json).unwrap();
        assert!(matches!(cfg.xi3, Xi3Spec::Auto(_)));
        let json = r#"{
            "xi": 0.0,
            "xi1": {"table": {"v": [0, 1, 2], "value": [0.5, 0.6, 0.9]}},
            "xi2": {"constant": 0.0},
            "xi3": {"linear": {"slope": 1.0, "offset": 0.0}},
            "v_min": 0.0, "v_max": 2.0
        }"#;
        let cfg: ProfileConfig = serde_json::from_str(json).unwrap();
        let p = cfg.build().unwrap();
        assert!(!p.has_closed_form_derivatives());
        assert!((p.xi1.value(1.0) - 0.6).abs() < 1e-15);
        let bad = r#"{"xi": 0.0, "xi1": {"table": {"v": [1, 0], "value": [0, 0]}},
            "xi2": {"constant": 0.0}, "xi3": {"constant": 0.0}, "v_min": 0, "v_max": 1}"#;
        assert!(serde_json::from_str::<ProfileConfig>(bad).is_err());
    }

    #[test]
    fn example_profile_is_admissible() {
        let p = XiProfile::example(0.0, 1.0).unwrap();
        assert!(p.max_constraint_residual(101) < 1e-15);
        assert!(p.check_domain(1.5).is_err());
        assert!(XiProfile::example(1.0, 1.0).is_err());
    }
}
