//! Command-line driver: runs a convergence study and writes the report.
//!
//! Exit codes: 0 on success, 1 for bad arguments, 2 when the study or the
//! report output fails.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use mixfem::analysis::{
    export_vtu, parse_mesh_list, study_with, to_markdown, write_report, ReportFormat, StudyOptions, TauRule,
};
use mixfem::linalg::SolverConfig;
use mixfem::problem::Example;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mixfem", version, about = "Convergence studies for the Galerkin-mixed miscible displacement scheme")]
pub struct Args {
    /// Test problem: 5.1 (unit square) or 5.2 (unit cube).
    #[arg(long, value_parser = ["5.1", "5.2"])]
    pub example: String,
    /// Concentration degree r (the mixed spaces use r - 1).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,
    /// Comma-separated, strictly doubling mesh divisions.
    #[arg(long, default_value = "8,16,32")]
    pub meshes: String,
    /// Time step rule: table (8/M^2 for r=1, 16/M^3 for r=2) or text (8/M^(r+1)).
    #[arg(long = "tau-rule", value_parser = ["table", "text"], default_value = "table")]
    pub tau_rule: String,
    /// Report path.
    #[arg(long)]
    pub out: PathBuf,
    /// Report format.
    #[arg(long, value_parser = ["csv", "md"], default_value = "csv")]
    pub format: String,
    /// Directory for one .vtu file per mesh with the final fields.
    #[arg(long)]
    pub vtu: Option<PathBuf>,
    /// Relative tolerance of the linear solvers.
    #[arg(long = "solver-tol")]
    pub solver_tol: Option<f64>,
    /// Worker threads for element assembly.
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Leave the seconds column empty so reports are byte-stable.
    #[arg(long = "no-timing")]
    pub no_timing: bool,
}

/// Validated study configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub example: Example,
    pub r: usize,
    pub meshes: Vec<usize>,
    pub tau_rule: TauRule,
    pub out: PathBuf,
    pub format: ReportFormat,
    pub vtu: Option<PathBuf>,
    pub options: StudyOptions,
}

impl Args {
    pub fn validate(&self) -> Result<Config, String> {
        let example = Example::parse(&self.example).ok_or_else(|| format!("unknown example {}", self.example))?;
        let r = self.order as usize;
        if r == 2 && example.dim() == 3 {
            return Err("--order 2 is only available for the two-dimensional example 5.1".into());
        }
        let meshes = parse_mesh_list(&self.meshes).map_err(|e| e.to_string())?;
        let tau_rule = if self.tau_rule == "text" { TauRule::Text } else { TauRule::Table };
        let format = ReportFormat::parse(&self.format).ok_or_else(|| format!("unknown format {}", self.format))?;
        let mut solver = SolverConfig::default();
        if let Some(tol) = self.solver_tol {
            solver.rel_tol = tol;
        }
        solver.validate().map_err(|e| e.to_string())?;
        if self.threads == 0 {
            return Err("--threads must be at least 1".into());
        }
        Ok(Config {
            example,
            r,
            meshes,
            tau_rule,
            out: self.out.clone(),
            format,
            vtu: self.vtu.clone(),
            options: StudyOptions { solver, threads: self.threads, timing: !self.no_timing },
        })
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run_cli<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    let config = match args.validate() {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            return EXIT_USAGE;
        }
    };
    match execute(&config, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

fn in_file<T>(path: &Path, r: mixfem::Result<T>) -> Result<T, String> {
    r.map_err(|e| format!("{}: {e}", path.display()))
}

fn execute(config: &Config, out: &mut impl Write) -> Result<(), String> {
    if let Some(dir) = &config.vtu {
        in_file(dir, std::fs::create_dir_all(dir).map_err(Into::into))?;
    }
    let mut vtu_error = None;
    let report = study_with(
        config.example,
        config.r,
        &config.meshes,
        config.tau_rule,
        &config.options,
        |disc, state, row| {
            if let Some(dir) = &config.vtu {
                let path = dir.join(format!("example{}_r{}_M{}.vtu", config.example.id(), config.r, row.m));
                if let Err(e) = in_file(&path, export_vtu(disc, state, &path)) {
                    vtu_error.get_or_insert(e);
                }
            }
        },
    )
    .map_err(|e| e.to_string())?;
    if let Some(e) = vtu_error {
        return Err(e);
    }
    in_file(&config.out, write_report(&report, config.format, &config.out))?;
    let _ = write!(out, "{}", to_markdown(&report));
    Ok(())
}
