//! Command-line front end.
//!
//! Exit codes: 0 success (or passing verification), 1 failed verification,
//! 2 invalid input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use berger_helix::helix::compute_constants;
use berger_helix::io::{export_csv, export_mesh, grid_shape, parse_csv, Format, ProjectedMesh, RunConfig};
use berger_helix::profile::{CONSTRAINT_TOL, XiProfile};
use berger_helix::verify::run_all;
use berger_helix::{Error, Vec4};

#[derive(Parser)]
#[command(name = "berger-helix", version, about = "Helix surfaces in the Berger sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the closed-form constants as JSON.
    Constants(Common),
    /// Sample the surface and write an OBJ mesh, a CSV table or the JSON grid.
    Generate(Common),
    /// Run every check and write the JSON report.
    Verify(Common),
    /// Stereographic OBJ of a generated CSV, or of the configured surface.
    Project {
        #[command(flatten)]
        common: Common,
        /// CSV written by `generate --format csv`.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long)]
    nv: Option<usize>,
    /// Output file; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Override a check tolerance, e.g. `constant_angle=1e-9`.
    #[arg(long = "tolerance", value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
    /// Coordinate (1-4) used as projection pole.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pole: Option<u8>,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad tolerance value `{value}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

enum Failure {
    Invalid(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl Common {
    fn load(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
                RunConfig::from_json(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(e) = self.epsilon {
            cfg.epsilon = e;
        }
        if let Some(t) = self.theta {
            cfg.theta = t;
        }
        if let Some(n) = self.nu {
            cfg.nu = n;
        }
        if let Some(n) = self.nv {
            cfg.nv = n;
        }
        if let Some(p) = self.pole {
            cfg.pole = p as usize;
        }
        if let Some(f) = self.format {
            cfg.format = Some(f);
        }
        if let Some(o) = &self.output {
            cfg.output = Some(o.display().to_string());
        }
        cfg.tolerances.extend(self.tolerances.iter().cloned());
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Invalid(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Meshes are only built from helix-admissible profiles.
fn require_admissible(profile: &XiProfile) -> Result<(), Failure> {
    let n = 1001;
    let r = profile.max_constraint_residual(n);
    if r.is_nan() || r > CONSTRAINT_TOL {
        return Err(Failure::Invalid(format!(
            "profile violates cos^2(xi1) xi2' = sin^2(xi1) xi3' (residual {r:e} over {n} samples)"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Constants(common) => {
            let cfg = common.load()?;
            let k = compute_constants(&cfg.params()?);
            emit(&cfg, &format!("{}\n", serde_json::to_string_pretty(&k).expect("constants serialize")))
        }
        Command::Generate(common) => {
            let cfg = common.load()?;
            let surface = cfg.surface()?;
            require_admissible(surface.family().profile())?;
            let grid = surface.sample_grid(cfg.nu, cfg.nv)?;
            let text = match cfg.format.unwrap_or(Format::Obj) {
                Format::Obj => export_mesh(&grid, cfg.pole)?,
                Format::Csv => export_csv(&grid)?,
                Format::Json => format!("{}\n", serde_json::to_string(&grid).expect("grid serializes")),
            };
            emit(&cfg, &text)
        }
        Command::Verify(common) => {
            let cfg = common.load()?;
            let report = run_all(&cfg.surface()?, &cfg.verify_config());
            emit(&cfg, &format!("{}\n", report.to_json()))?;
            if report.overall_pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Project { common, input } => {
            let cfg = common.load()?;
            if matches!(cfg.format, Some(f) if f != Format::Obj) {
                return Err(Failure::Invalid("project only writes OBJ".into()));
            }
            let mesh = match input {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Failure::Invalid(format!("cannot read {}: {e}", path.display())))?;
                    let rows = parse_csv(&text)?;
                    let (nu, nv) = grid_shape(&rows)?;
                    let positions: Vec<Vec4> = rows.iter().map(|r| r.position()).collect();
                    ProjectedMesh::from_positions(&positions, nu, nv, cfg.pole)?
                }
                None => {
                    let surface = cfg.surface()?;
                    require_admissible(surface.family().profile())?;
                    ProjectedMesh::from_grid(&surface.sample_grid(cfg.nu, cfg.nv)?, cfg.pole)?
                }
            };
            emit(&cfg, &mesh.to_obj()?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
