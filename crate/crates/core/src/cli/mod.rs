//! Command-line harness: configuration, commands and reports.
//!
//! Exit codes: 0 when every assertable check passes, 1 when any check fails
//! (or a command aborts), 2 for usage or configuration errors. Checks with
//! status `reported` never affect the exit code.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run_command, CommandKind, GeodesicRun};
pub use config::RunConfig;
pub use report::{CheckRecord, Checks, Report, Status, Summary};

use crate::error::{GeomError, Result};

#[derive(Debug, Parser)]
#[command(name = "dsgeom", version, about = "Numerical checks for de Sitter geometry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Connection coefficients, frame derivatives and accelerations of the static chart.
    VerifyChristoffel,
    /// Ambient generators, Killing equations and the published Killing table.
    VerifyKilling,
    /// Sectional curvature, Ricci tensor and the cosmological constant.
    Curvature,
    /// Laplacian comparison, Bochner identity and the comparison ODE.
    Lct,
    /// Projective lift and projection, Jacobian and metric.
    Beltrami,
    /// Integrate a geodesic, write its CSV and check conserved charges.
    Geodesic,
    /// Embeddings, Jacobians and closed-form metrics of every chart.
    Charts,
    /// Print the effective configuration as TOML.
    PrintConfig,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "R")]
    pub radius: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "N")]
    pub samples: Option<usize>,
    /// Base finite-difference step.
    #[arg(long, global = true, value_name = "H")]
    pub step: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<String>,
    /// Chart used by the geodesic command.
    #[arg(long, global = true, value_name = "NAME")]
    pub chart: Option<String>,
    /// Trajectory CSV written by the geodesic command.
    #[arg(long, global = true, value_name = "PATH")]
    pub csv: Option<String>,
    /// Override any configuration key, e.g. `--set geodesic.dt=1e-4`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl Options {
    /// File (or defaults), then named flags, then `--set` overrides in order.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.radius {
            cfg.general.radius = v;
        }
        if let Some(v) = self.seed {
            cfg.general.seed = v;
        }
        if let Some(v) = self.samples {
            cfg.general.samples = v;
        }
        if let Some(v) = self.step {
            cfg.step.base = v;
        }
        if let Some(v) = &self.out {
            cfg.output.out = Some(v.clone());
        }
        if let Some(v) = &self.chart {
            cfg.geodesic.chart = v.clone();
        }
        if let Some(v) = &self.csv {
            cfg.geodesic.csv = Some(v.clone());
        }
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn kind_of(cmd: &Cmd) -> Option<CommandKind> {
    Some(match cmd {
        Cmd::VerifyChristoffel => CommandKind::VerifyChristoffel,
        Cmd::VerifyKilling => CommandKind::VerifyKilling,
        Cmd::Curvature => CommandKind::Curvature,
        Cmd::Lct => CommandKind::Lct,
        Cmd::Beltrami => CommandKind::Beltrami,
        Cmd::Geodesic => CommandKind::Geodesic,
        Cmd::Charts => CommandKind::Charts,
        Cmd::PrintConfig => return None,
    })
}

fn emit(text: &str, out: Option<&str>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn exit_code_for(e: &GeomError) -> i32 {
    match e {
        GeomError::ConfigInvalid(_) | GeomError::UnknownChart(_) => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = cli.options.resolve().and_then(|cfg| match kind_of(&cli.command) {
        None => emit(&cfg.to_toml_string(), cfg.output.out.as_deref()).map(|_| 0),
        Some(kind) => {
            let report = run_command(kind, &cfg)?;
            emit(&report.to_json(), cfg.output.out.as_deref())?;
            Ok(report.exit_code())
        }
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("dsgeom").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_file_values() {
        let cli = parse(&["curvature", "--radius", "2", "--step", "1e-6", "--set", "general.samples=7"]);
        let cfg = cli.options.resolve().unwrap();
        assert_eq!(cfg.general.radius, 2.0);
        assert_eq!(cfg.step.base, 1e-6);
        assert_eq!(cfg.general.samples, 7);
    }

    #[test]
    fn coarse_step_is_a_config_error() {
        assert_eq!(run(["dsgeom", "verify-christoffel", "--step", "1e-1"]), 2);
        assert_eq!(run(["dsgeom", "geodesic", "--chart", "torus"]), 2);
        assert_eq!(run(["dsgeom", "no-such-command"]), 2);
    }
}
