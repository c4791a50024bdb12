//! `syzygy`: validate surface documents, compute syzygy-bundle slopes,
//! evaluate the destabilization criterion and search for destabilizing
//! polarizations.
//!
//! Exit codes: 0 success, 1 validation or hypothesis failure, 2 parse or IO
//! error.

mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use syzygy_core::catalog::{load_catalog, load_catalog_dir, CatalogEntry};
use syzygy_core::chern::twist;
use syzygy_core::destabilize::{batch_report, run_pipeline, BatchJob};
use syzygy_core::rational::parse_rational;
use syzygy_core::slopes::{syzygy_slope, SlopeComparison};
use syzygy_core::{validate_surface, DivisorClass, Error, SurfaceData, SurfaceDocument};

/// Environment variable naming a directory of surface documents that
/// replaces the built-in catalog for `batch`.
pub const CATALOG_DIR_ENV: &str = "SYZYGY_CATALOG_DIR";

#[derive(Parser, Debug)]
#[command(name = "syzygy", version, about = "Slope instability of syzygy bundles on surfaces")]
struct Cli {
    /// Also print verdicts from the closed-form coefficients as printed
    /// (non-authoritative).
    #[arg(long, global = true)]
    paper_mode: bool,

    /// Write the machine-readable JSON report to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json_out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a surface document's structure and the construction's hypotheses.
    Validate { path: PathBuf },
    /// Slope of M_{E(d)} with respect to a polarization.
    Slope {
        path: PathBuf,
        #[arg(long)]
        bundle: String,
        /// Comma-separated coordinates, e.g. `3,-1,-1` or `3,-3/2,-1`.
        #[arg(long, allow_hyphen_values = true)]
        polarization: String,
        #[arg(long, short = 'd', default_value_t = 0, allow_negative_numbers = true)]
        twist: i64,
    },
    /// Compare M_{E(d)(-S)} with M_{E(d)} at a polarization.
    Criterion {
        path: PathBuf,
        #[arg(long)]
        bundle: String,
        #[arg(long = "subtract", allow_hyphen_values = true)]
        subtracted: String,
        #[arg(long, allow_hyphen_values = true)]
        polarization: String,
    },
    /// Construct a polarization destabilizing M_{E(d)} for large d.
    Destabilize {
        path: PathBuf,
        #[arg(long)]
        bundle: String,
    },
    /// Run the construction on every bundle of every surface document.
    /// Without paths, uses $SYZYGY_CATALOG_DIR or the built-in catalog.
    Batch { paths: Vec<PathBuf> },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Validate { path } => {
            let doc = SurfaceDocument::read(path)?;
            let surface = doc.surface()?;
            let report = validate_surface(&surface);
            print!("{}", render::validation(&report));
            write_json(cli, &report)?;
            Ok(if report.structural_ok() { 0 } else { 1 })
        }
        Command::Slope {
            path,
            bundle,
            polarization,
            twist: d,
        } => {
            let (doc, surface) = load_valid(path)?;
            let e = doc.bundle(bundle)?;
            let a = parse_class("polarization", polarization, &surface)?;
            let twisted = twist(&e, *d, &e.c1, &surface)?;
            let slope = syzygy_slope(&twisted, &a, &surface).map_err(|err| match err {
                Error::SlopeUndefined { denominator, .. } => Error::SlopeUndefined {
                    bundle: format!("{bundle}({d})"),
                    denominator,
                },
                other => other,
            })?;
            let out = render::SlopeOutput::new(&surface, bundle, *d, &a, &twisted, slope)?;
            print!("{}", out.render());
            write_json(cli, &out)?;
            Ok(0)
        }
        Command::Criterion {
            path,
            bundle,
            subtracted,
            polarization,
        } => {
            let (doc, surface) = load_valid(path)?;
            let e = doc.bundle(bundle)?;
            let s = parse_class("subtract", subtracted, &surface)?;
            let a = parse_class("polarization", polarization, &surface)?;
            let cmp = SlopeComparison::new(&surface, &e, &e.c1, &s, &a)?;
            let out = render::CriterionOutput::new(&surface, bundle, &cmp)?;
            print!("{}", out.render(&surface, cli.paper_mode));
            write_json(cli, &out)?;
            Ok(0)
        }
        Command::Destabilize { path, bundle } => {
            let (doc, surface) = load_valid(path)?;
            let e = doc.bundle(bundle)?;
            let report = run_pipeline(&e, &surface)?;
            print!("{}", render::destabilization(&surface, bundle, &report, cli.paper_mode));
            write_json(cli, &report)?;
            Ok(0)
        }
        Command::Batch { paths } => {
            let jobs = batch_jobs(paths)?;
            let report = batch_report(&jobs);
            print!("{}", render::batch(&report));
            write_json(cli, &report)?;
            Ok(0)
        }
    }
}

/// Reads a document and insists on the structural checks passing.
fn load_valid(path: &Path) -> Result<(SurfaceDocument, SurfaceData), Failure> {
    let doc = SurfaceDocument::read(path)?;
    let surface = doc.surface()?;
    let report = validate_surface(&surface);
    if let Some(failed) = report.structural.iter().find(|c| !c.passed) {
        return Err(Failure {
            code: 1,
            message: format!(
                "{}: {} fails ({})",
                path.display(),
                failed.name,
                failed.detail
            ),
        });
    }
    Ok((doc, surface))
}

fn parse_class(flag: &str, text: &str, surface: &SurfaceData) -> Result<DivisorClass, Failure> {
    let coords = text
        .split(',')
        .map(parse_rational)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure {
            code: 2,
            message: format!("--{flag}: {e}"),
        })?;
    let class = DivisorClass::new(coords);
    surface.check(&format!("--{flag}"), &class).map_err(|e| Failure {
        code: 2,
        message: e.to_string(),
    })?;
    Ok(class)
}

fn batch_jobs(paths: &[PathBuf]) -> Result<Vec<BatchJob>, Failure> {
    if !paths.is_empty() {
        return paths
            .iter()
            .map(|p| {
                let (doc, surface) = load_valid(p)?;
                Ok(BatchJob {
                    surface,
                    bundles: doc.bundles()?,
                })
            })
            .collect();
    }
    // catalog loaders already reject structurally invalid documents
    let entries: Vec<CatalogEntry> = match std::env::var_os(CATALOG_DIR_ENV) {
        Some(dir) => load_catalog_dir(Path::new(&dir))?,
        None => load_catalog()?,
    };
    Ok(entries
        .into_iter()
        .map(|e| BatchJob {
            surface: e.surface,
            bundles: e.sample_bundles,
        })
        .collect())
}

fn write_json<T: Serialize>(cli: &Cli, value: &T) -> Result<(), Failure> {
    let Some(path) = &cli.json_out else {
        return Ok(());
    };
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| {
        Failure::from(Error::Io {
            path: path.display().to_string(),
            source,
        })
    })
}
