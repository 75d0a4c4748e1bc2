//! Run configuration, stereographic projection and mesh/CSV emission.
//!
//! All text output uses `.` as decimal point and LF line endings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::berger::{BergerParams, SPHERE_TOL};
use crate::family::OrthoFamily;
use crate::helix::AuxFieldParams;
use crate::linalg::Vec4;
use crate::profile::ProfileConfig;
use crate::surface::{FvMode, HelixSurface, SurfaceGrid};
use crate::verify::VerifyConfig;
use crate::{Error, Result};

/// Smallest accepted `|1 − x_pole|`.
pub const POLE_TOL: f64 = 1e-9;

/// `σ(x) = (x_i)_{i≠pole} / (1 − x_pole)`, `pole ∈ 1..=4`.
pub fn stereographic(p: Vec4, pole: usize) -> Result<[f64; 3]> {
    if !(1..=4).contains(&pole) {
        return Err(Error::Config(format!("pole must be 1..=4, got {pole}")));
    }
    let norm = p.norm();
    if (norm - 1.0).abs() > SPHERE_TOL {
        return Err(Error::NotOnSphere { norm });
    }
    let x = p.to_array();
    let denom = 1.0 - x[pole - 1];
    if denom.abs() < POLE_TOL {
        return Err(Error::AtPole);
    }
    let mut out = [0.0; 3];
    for (k, i) in (0..4).filter(|&i| i != pole - 1).enumerate() {
        out[k] = x[i] / denom;
    }
    Ok(out)
}

/// Inverse of [`stereographic`].
pub fn inverse_stereographic(y: [f64; 3], pole: usize) -> Result<Vec4> {
    if !(1..=4).contains(&pole) {
        return Err(Error::Config(format!("pole must be 1..=4, got {pole}")));
    }
    let r2 = y.iter().map(|c| c * c).sum::<f64>();
    let mut x = [0.0; 4];
    let mut k = 0;
    for (i, xi) in x.iter_mut().enumerate() {
        if i == pole - 1 {
            *xi = (r2 - 1.0) / (r2 + 1.0);
        } else {
            *xi = 2.0 * y[k] / (r2 + 1.0);
            k += 1;
        }
    }
    Ok(Vec4::from_array(x))
}

/// A projected grid. Vertices that could not be projected are defects and
/// appear in no face.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectedMesh {
    pub nu: usize,
    pub nv: usize,
    /// Row-major, `None` for defects.
    pub vertices: Vec<Option<[f64; 3]>>,
    /// Zero-based indices into `vertices`.
    pub faces: Vec<[usize; 3]>,
    pub defects: Vec<usize>,
}

impl ProjectedMesh {
    /// Projects row-major positions of an `nu × nv` grid.
    pub fn from_positions(positions: &[Vec4], nu: usize, nv: usize, pole: usize) -> Result<Self> {
        if positions.is_empty() || nu * nv == 0 {
            return Err(Error::EmptyGrid);
        }
        if positions.len() != nu * nv {
            return Err(Error::Config(format!("{} positions do not fill a {nu}x{nv} grid", positions.len())));
        }
        let mut vertices = Vec::with_capacity(positions.len());
        let mut defects = Vec::new();
        for (k, p) in positions.iter().enumerate() {
            match stereographic(*p, pole) {
                Ok(y) if y.iter().all(|c| c.is_finite()) => vertices.push(Some(y)),
                Err(e @ Error::Config(_)) => return Err(e),
                _ => {
                    vertices.push(None);
                    defects.push(k);
                }
            }
        }
        let mut faces = Vec::with_capacity(2 * (nu.saturating_sub(1)) * (nv.saturating_sub(1)));
        for i in 0..nu.saturating_sub(1) {
            for j in 0..nv.saturating_sub(1) {
                let a = i * nv + j;
                let (b, c, d) = (a + nv, a + nv + 1, a + 1);
                for tri in [[a, b, c], [a, c, d]] {
                    if tri.iter().all(|&t| vertices[t].is_some()) {
                        faces.push(tri);
                    }
                }
            }
        }
        Ok(Self { nu, nv, vertices, faces, defects })
    }

    pub fn from_grid(grid: &SurfaceGrid, pole: usize) -> Result<Self> {
        let positions: Vec<Vec4> = grid.samples.iter().map(|s| s.position).collect();
        Self::from_positions(&positions, grid.nu, grid.nv, pole)
    }

    /// Axis-aligned bounding-box diagonal of the emitted vertices.
    pub fn bounding_diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for y in self.vertices.iter().flatten() {
            for k in 0..3 {
                lo[k] = lo[k].min(y[k]);
                hi[k] = hi[k].max(y[k]);
            }
        }
        (0..3).map(|k| (hi[k] - lo[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// OBJ text: `v` lines in grid order with 17 significant digits, then
    /// `f` lines with 1-based indices renumbered past defects.
    pub fn to_obj(&self) -> Result<String> {
        if self.vertices.iter().all(Option::is_none) {
            return Err(Error::EmptyGrid);
        }
        let mut index = vec![0usize; self.vertices.len()];
        let mut out = String::with_capacity(self.vertices.len() * 72);
        let mut next = 1;
        for (k, y) in self.vertices.iter().enumerate() {
            if let Some(y) = y {
                index[k] = next;
                next += 1;
                writeln!(out, "v {:.16e} {:.16e} {:.16e}", y[0], y[1], y[2]).expect("string write");
            }
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", index[f[0]], index[f[1]], index[f[2]]).expect("string write");
        }
        Ok(out)
    }
}

/// OBJ text of the stereographic image of a grid.
pub fn export_mesh(grid: &SurfaceGrid, pole: usize) -> Result<String> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    ProjectedMesh::from_grid(grid, pole)?.to_obj()
}

/// One CSV row; normal and angle are empty on singular samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub u: f64,
    pub v: f64,
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    #[serde(rename = "N1")]
    pub n1: Option<f64>,
    #[serde(rename = "N2")]
    pub n2: Option<f64>,
    #[serde(rename = "N3")]
    pub n3: Option<f64>,
    pub angle: Option<f64>,
}

impl CsvRow {
    pub fn position(&self) -> Vec4 {
        Vec4::new(self.x1, self.y1, self.x2, self.y2)
    }
}

pub const CSV_HEADER: [&str; 10] = ["u", "v", "x1", "y1", "x2", "y2", "N1", "N2", "N3", "angle"];

/// CSV with header and one row per sample; `N` is the g_ε-unit normal.
pub fn export_csv(grid: &SurfaceGrid) -> Result<String> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    for s in &grid.samples {
        let n = s.normal.map(|n| {
            let len = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
            [n[0] / len, n[1] / len, n[2] / len]
        });
        let p = s.position;
        w.serialize(CsvRow {
            u: s.u,
            v: s.v,
            x1: p.x1,
            y1: p.y1,
            x2: p.x2,
            y2: p.y2,
            n1: n.map(|n| n[0]),
            n2: n.map(|n| n[1]),
            n3: n.map(|n| n[2]),
            angle: s.angle,
        })
        .map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

/// Parses CSV produced by [`export_csv`]; the header must match exactly.
pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("expected header {}", CSV_HEADER.join(","))));
    }
    r.deserialize().map(|row| row.map_err(|e| Error::Parse(e.to_string()))).collect()
}

/// Grid shape of parsed rows: `nv` is the length of the leading run of equal `u`.
pub fn grid_shape(rows: &[CsvRow]) -> Result<(usize, usize)> {
    let first = rows.first().ok_or(Error::EmptyGrid)?.u;
    let nv = rows.iter().take_while(|r| r.u == first).count();
    if !rows.len().is_multiple_of(nv) {
        return Err(Error::Parse(format!("{} rows are not a multiple of the row length {nv}", rows.len())));
    }
    Ok((rows.len() / nv, nv))
}

/// Output format tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Obj,
    Csv,
    Json,
}

/// Everything a CLI run needs; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub epsilon: f64,
    pub theta: f64,
    pub profile: ProfileConfig,
    /// Defaults to one slow period `[0, 2π/α₂]`.
    pub u_range: Option<(f64, f64)>,
    pub nu: usize,
    pub nv: usize,
    pub fv_mode: FvMode,
    pub pole: usize,
    pub aux: AuxFieldParams,
    pub verify: VerifyConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<String>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0,
            theta: std::f64::consts::FRAC_PI_4,
            profile: ProfileConfig::example(),
            u_range: None,
            nu: 101,
            nv: 101,
            fv_mode: FvMode::Auto,
            pole: 4,
            aux: AuxFieldParams::default(),
            verify: VerifyConfig::default(),
            tolerances: BTreeMap::new(),
            output: None,
            format: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn params(&self) -> Result<BergerParams> {
        BergerParams::new(self.epsilon, self.theta)
    }

    /// Checks every field before any computation.
    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.profile.build()?;
        if self.nu < 2 || self.nv < 2 {
            return Err(Error::Config(format!("grid needs at least 2x2 samples, got {}x{}", self.nu, self.nv)));
        }
        if !(1..=4).contains(&self.pole) {
            return Err(Error::Config(format!("pole must be 1..=4, got {}", self.pole)));
        }
        self.verify_config().validate()
    }

    pub fn surface(&self) -> Result<HelixSurface> {
        let family = OrthoFamily::new(self.profile.build()?);
        let s = HelixSurface::new(self.params()?, family).with_fv_mode(self.fv_mode);
        match self.u_range {
            Some((a, b)) => s.with_u_range(a, b),
            None => Ok(s),
        }
    }

    /// Verification settings with `aux` and tolerance overrides merged in.
    pub fn verify_config(&self) -> VerifyConfig {
        let mut v = self.verify.clone();
        if self.aux != AuxFieldParams::default() {
            v.aux = self.aux.clone();
        }
        v.tolerances.extend(self.tolerances.iter().map(|(k, t)| (k.clone(), *t)));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stereographic_examples() {
        assert_eq!(stereographic(Vec4::new(1.0, 0.0, 0.0, 0.0), 4).unwrap(), [1.0, 0.0, 0.0]);
        assert_eq!(stereographic(Vec4::new(0.0, 0.0, 0.0, -1.0), 4).unwrap(), [0.0, 0.0, 0.0]);
        assert_eq!(stereographic(Vec4::new(0.0, 0.0, 0.0, 1.0), 4), Err(Error::AtPole));
        assert_eq!(stereographic(Vec4::new(0.0, 1.0, 0.0, 0.0), 1).unwrap(), [1.0, 0.0, 0.0]);
        assert!(stereographic(Vec4::new(1.0, 0.0, 0.0, 0.0), 5).is_err());
        assert!(matches!(stereographic(Vec4::new(2.0, 0.0, 0.0, 0.0), 4), Err(Error::NotOnSphere { .. })));
    }

    #[test]
    fn tiny_mesh() {
        let p = [
            Vec4::new(1.0, 0.0, 0.0, 0.0),
            Vec4::new(0.0, 1.0, 0.0, 0.0),
            Vec4::new(0.0, 0.0, 1.0, 0.0),
            Vec4::new(0.0, 0.0, 0.0, -1.0),
        ];
        let m = ProjectedMesh::from_positions(&p, 2, 2, 4).unwrap();
        let obj = m.to_obj().unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 4);
        assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).collect::<Vec<_>>(), vec!["f 1 3 4", "f 1 4 2"]);
        assert!(!obj.contains('\r'));
        assert!(obj.starts_with("v 1.0000000000000000e0 0.0000000000000000e0 0.0000000000000000e0\n"));
    }

    #[test]
    fn pole_samples_are_dropped_from_faces() {
        let p = [
            Vec4::new(1.0, 0.0, 0.0, 0.0),
            Vec4::new(0.0, 0.0, 0.0, 1.0),
            Vec4::new(0.0, 0.0, 1.0, 0.0),
            Vec4::new(0.0, 1.0, 0.0, 0.0),
            Vec4::new(0.0, 0.0, 0.0, -1.0),
            Vec4::new(-1.0, 0.0, 0.0, 0.0),
        ];
        let m = ProjectedMesh::from_positions(&p, 3, 2, 4).unwrap();
        assert_eq!(m.defects, vec![1]);
        assert!(m.faces.iter().all(|f| !f.contains(&1)));
        let obj = m.to_obj().unwrap();
        assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 5);
        // Remaining faces reference renumbered vertices only.
        for line in obj.lines().filter(|l| l.starts_with("f ")) {
            assert!(line[2..].split(' ').all(|t| (1..=5).contains(&t.parse::<usize>().unwrap())));
        }
        let all_pole = [Vec4::new(0.0, 0.0, 0.0, 1.0); 4];
        assert_eq!(ProjectedMesh::from_positions(&all_pole, 2, 2, 4).unwrap().to_obj(), Err(Error::EmptyGrid));
        assert_eq!(ProjectedMesh::from_positions(&[], 0, 0, 4), Err(Error::EmptyGrid));
    }

    #[test]
    fn csv_round_trip() {
        let cfg = RunConfig { nu: 7, nv: 5, ..RunConfig::default() };
        let grid = cfg.surface().unwrap().sample_grid(cfg.nu, cfg.nv).unwrap();
        let text = export_csv(&grid).unwrap();
        assert_eq!(text.lines().next().unwrap(), "u,v,x1,y1,x2,y2,N1,N2,N3,angle");
        assert!(!text.contains('\r'));
        let rows = parse_csv(&text).unwrap();
        assert_eq!(rows.len(), 35);
        assert_eq!(grid_shape(&rows).unwrap(), (7, 5));
        for (row, s) in rows.iter().zip(&grid.samples) {
            assert_eq!(row.position(), s.position);
            assert_eq!(row.angle, s.angle);
            assert_eq!((row.u, row.v), (s.u, s.v));
        }
        // The u = 0 row is singular.
        assert!(rows[0].n1.is_none());
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        c.validate().unwrap();
        let bad = RunConfig::from_json(r#"{"theta": 1.5707963267948966}"#).unwrap();
        assert!(matches!(bad.validate(), Err(Error::InvalidAngle(_))));
        assert!(RunConfig::from_json(r#"{"nope": 1}"#).is_err());
        let c = RunConfig::from_json(r#"{"tolerances": {"unit_norm": 1e-3}, "pole": 3}"#).unwrap();
        assert_eq!(c.verify_config().tolerances["unit_norm"], 1e-3);
        let c = RunConfig { pole: 0, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }

    proptest! {
        #[test]
        fn stereographic_inverts(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, d in -1.0f64..0.9, pole in 1usize..=4) {
            let p = Vec4::new(a, b, c, d);
            prop_assume!(p.norm() > 0.1);
            let p = p.normalized();
            prop_assume!(1.0 - p.to_array()[pole - 1] > 1e-3);
            let y = stereographic(p, pole).unwrap();
            let q = inverse_stereographic(y, pole).unwrap();
            prop_assert!((p - q).max_abs() < 1e-9);
        }
    }
}
