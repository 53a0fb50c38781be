//! Command-line front end: scenario generation, surface verification, frame
//! decomposition, and mesh export.
//!
//! Exit codes: 0 when the run completes and every invariant passes, 1 for
//! pipeline failures (a machine readable error document goes to stdout), 2
//! for configuration and input parse problems.  Outputs depend only on the
//! inputs; rerunning a command reproduces its files byte for byte.

mod config;
mod expr;
mod pipeline;
mod report;

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use lorsurf::flat::split_frames;
use lorsurf::grid::GridSpec;
use lorsurf::io::{read_frames, read_immersion, write_curve, write_frames, write_immersion};
use lorsurf::weierstrass::Immersion22;

use config::ScenarioConfig;
use report::{Verification, VerifyDoc, SCHEMA_VERSION};

/// Failures split by the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or unusable input file: exit 2.
    Config(String),
    /// The pipeline itself refused: exit 1, except for i/o and parse
    /// errors, which are input problems and exit 2.
    Pipeline(lorsurf::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Pipeline(lorsurf::Error::Io(_) | lorsurf::Error::Parse(_)) => 2,
            CliError::Pipeline(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        use lorsurf::Error::*;
        let e = match self {
            CliError::Config(_) => return "Config",
            CliError::Pipeline(e) => e,
        };
        match e {
            NullDivisor => "NullDivisor",
            GridTooSmall => "GridTooSmall",
            GridMismatch(_) => "GridMismatch",
            ProfileLength { .. } => "ProfileLength",
            InconsistentInitialData { .. } => "InconsistentInitialData",
            ResidualTooLarge { .. } => "ResidualTooLarge",
            StepTooLarge { .. } => "StepTooLarge",
            PathDependence { .. } => "PathDependence",
            RealityDefect { .. } => "RealityDefect",
            NondegeneracyFailed { .. } => "NondegeneracyFailed",
            DegenerateMetric { .. } => "DegenerateMetric",
            NullChi1 { .. } => "NullChi1",
            NotUnitSpinor { .. } => "NotUnitSpinor",
            NotHermitian { .. } => "NotHermitian",
            DetDrift { .. } => "DetDrift",
            DegenerateImmersion { .. } => "DegenerateImmersion",
            NotSplit { .. } => "NotSplit",
            DegenerateTangent { .. } => "DegenerateTangent",
            NullNormalDirection { .. } => "NullNormalDirection",
            Io(_) => "Io",
            Parse(_) => "Parse",
        }
    }

    fn to_json(&self) -> String {
        let message = match self {
            CliError::Config(m) => m.clone(),
            CliError::Pipeline(e) => e.to_string(),
        };
        serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "error": { "kind": self.kind(), "message": message },
        })
        .to_string()
    }
}

#[derive(Parser)]
#[command(
    name = "lorsurf",
    version,
    about = "Lorentz-surface construction and verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scenario config through its pipeline and write the artifacts.
    Generate {
        /// Scenario JSON.
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Multiplies the defect tolerances.
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Dyadic grid refinements, for convergence studies.
        #[arg(long, default_value_t = 0)]
        refine: u32,
    },
    /// Re-run the geometry checks on an immersion CSV.
    Verify {
        immersion: PathBuf,
        /// Also write the report to DIR/verify.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Split a frame CSV into its two single-variable curves.
    Decompose {
        frames: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a triangulated OBJ mesh of three immersion coordinates.
    ExportMesh {
        immersion: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// The three coordinate indices to keep, e.g. "1,2,3".
        #[arg(long, default_value = "1,2,3")]
        coords: String,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Cmd) -> Result<bool, CliError> {
    match cmd {
        Cmd::Generate {
            config,
            out,
            tol_scale,
            refine,
        } => {
            let cfg = ScenarioConfig::load(&config)?;
            let mut spec = cfg.spec()?;
            for _ in 0..refine {
                spec = spec.refined();
            }
            let tol = cfg.tolerances(tol_scale);
            let art = pipeline::generate(&cfg, spec, &tol)?;

            fs::create_dir_all(&out).map_err(io_err)?;
            let mut w = artifact(&out, "immersion.csv")?;
            write_immersion(&mut w, &art.immersion).map_err(CliError::Pipeline)?;
            w.flush().map_err(io_err)?;
            if let Some(frames) = &art.frames {
                let mut w = artifact(&out, "frames.csv")?;
                write_frames(&mut w, frames).map_err(CliError::Pipeline)?;
                w.flush().map_err(io_err)?;
            }
            let json = pretty(&art.report);
            fs::write(out.join("report.json"), &json).map_err(io_err)?;
            print!("{json}");
            Ok(art.report.pass)
        }

        Cmd::Verify { immersion, out } => {
            let im = load_immersion(&immersion)?;
            let doc = VerifyDoc {
                schema_version: SCHEMA_VERSION,
                verification: Verification::from_immersion(&im)?,
            };
            let json = pretty(&doc);
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(io_err)?;
                fs::write(dir.join("verify.json"), &json).map_err(io_err)?;
            }
            print!("{json}");
            Ok(true)
        }

        Cmd::Decompose { frames, out } => {
            let file = File::open(&frames).map_err(io_err)?;
            let (spec, field) = read_frames(BufReader::new(file)).map_err(CliError::Pipeline)?;
            let pair = split_frames(&field).map_err(CliError::Pipeline)?;
            let recon = pair.reconstruct(spec).map_err(CliError::Pipeline)?;
            let mut err = 0.0f64;
            for (a, b) in recon.values().iter().zip(field.values()) {
                for r in 0..2 {
                    for c in 0..2 {
                        err = err.max((a.0[r][c] - b.0[r][c]).abs_max());
                    }
                }
            }

            fs::create_dir_all(&out).map_err(io_err)?;
            let mut w = artifact(&out, "b1.csv")?;
            write_curve(&mut w, "s", spec.s0, spec.hs(), &pair.b1).map_err(CliError::Pipeline)?;
            w.flush().map_err(io_err)?;
            let mut w = artifact(&out, "b2.csv")?;
            write_curve(&mut w, "t", spec.t0, spec.ht(), &pair.b2).map_err(CliError::Pipeline)?;
            w.flush().map_err(io_err)?;

            #[derive(Serialize)]
            struct DecomposeDoc {
                schema_version: u32,
                grid: GridSpec,
                reconstruction_max_err: f64,
            }
            let json = pretty(&DecomposeDoc {
                schema_version: SCHEMA_VERSION,
                grid: spec,
                reconstruction_max_err: err,
            });
            fs::write(out.join("decompose.json"), &json).map_err(io_err)?;
            print!("{json}");
            Ok(true)
        }

        Cmd::ExportMesh {
            immersion,
            out,
            coords,
        } => {
            let picks = parse_coords(&coords)?;
            let im = load_immersion(&immersion)?;
            fs::create_dir_all(&out).map_err(io_err)?;
            let mut w = artifact(&out, "mesh.obj")?;
            write_mesh(&mut w, &im, picks).map_err(io_err)?;
            w.flush().map_err(io_err)?;
            Ok(true)
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Pipeline(lorsurf::Error::Io(e.to_string()))
}

fn artifact(dir: &Path, name: &str) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn load_immersion(path: &Path) -> Result<Immersion22, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    read_immersion(BufReader::new(file)).map_err(CliError::Pipeline)
}

fn pretty(doc: &impl Serialize) -> String {
    let mut json = serde_json::to_string_pretty(doc).expect("report serializes");
    json.push('\n');
    json
}

fn parse_coords(arg: &str) -> Result<[usize; 3], CliError> {
    let bad = || {
        CliError::Config(format!(
            "--coords needs three distinct indices in 0..=3, got '{arg}'"
        ))
    };
    let parts: Vec<usize> = arg
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [a, b, c] = parts[..] else {
        return Err(bad());
    };
    if a > 3 || b > 3 || c > 3 || a == b || b == c || a == c {
        return Err(bad());
    }
    Ok([a, b, c])
}

/// Two triangles per grid cell, vertices in row-major node order.
fn write_mesh(w: &mut impl Write, im: &Immersion22, picks: [usize; 3]) -> std::io::Result<()> {
    let spec = im.spec();
    writeln!(
        w,
        "# lorsurf mesh v1: coordinates x{} x{} x{}",
        picks[0], picks[1], picks[2]
    )?;
    for i in 0..spec.ns {
        for j in 0..spec.nt {
            let x = im.get(i, j);
            writeln!(w, "v {} {} {}", x.0[picks[0]], x.0[picks[1]], x.0[picks[2]])?;
        }
    }
    let id = |i: usize, j: usize| i * spec.nt + j + 1;
    for i in 0..spec.ns - 1 {
        for j in 0..spec.nt - 1 {
            writeln!(w, "f {} {} {}", id(i, j), id(i + 1, j), id(i + 1, j + 1))?;
            writeln!(w, "f {} {} {}", id(i, j), id(i + 1, j + 1), id(i, j + 1))?;
        }
    }
    Ok(())
}
