//! One function per CLI command; each returns a finished [`Report`].
//!
//! Sampling order is fixed: every command seeds one generator from
//! `general.seed` (sub-sweeps derive their own seeds from it) and draws all
//! points before evaluating anything.

mod beltrami;
mod charts;
mod christoffel;
mod curvature;
mod geodesic;
mod killing;
mod lct;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::RunConfig;
use super::report::Report;
use crate::error::{GeomError, Result};
use crate::sampling;

pub use beltrami::cmd_beltrami;
pub use charts::cmd_charts;
pub use christoffel::cmd_verify_christoffel;
pub use curvature::cmd_curvature;
pub use geodesic::{cmd_geodesic, GeodesicRun};
pub use killing::cmd_verify_killing;
pub use lct::cmd_lct;

pub(crate) const STATIC_LABELS: [&str; 4] = ["t", "rho", "theta", "phi"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    VerifyChristoffel,
    VerifyKilling,
    Curvature,
    Lct,
    Beltrami,
    Geodesic,
    Charts,
}

impl CommandKind {
    pub const ALL: [CommandKind; 7] = [
        CommandKind::VerifyChristoffel,
        CommandKind::VerifyKilling,
        CommandKind::Curvature,
        CommandKind::Lct,
        CommandKind::Beltrami,
        CommandKind::Geodesic,
        CommandKind::Charts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::VerifyChristoffel => "verify-christoffel",
            CommandKind::VerifyKilling => "verify-killing",
            CommandKind::Curvature => "curvature",
            CommandKind::Lct => "lct",
            CommandKind::Beltrami => "beltrami",
            CommandKind::Geodesic => "geodesic",
            CommandKind::Charts => "charts",
        }
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CommandKind {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        CommandKind::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| GeomError::ConfigInvalid(format!("unknown command `{s}`")))
    }
}

/// Runs a command. The geodesic trajectory CSV, if configured, is written as
/// a side effect.
pub fn run_command(kind: CommandKind, cfg: &RunConfig) -> Result<Report> {
    match kind {
        CommandKind::VerifyChristoffel => cmd_verify_christoffel(cfg),
        CommandKind::VerifyKilling => cmd_verify_killing(cfg),
        CommandKind::Curvature => cmd_curvature(cfg),
        CommandKind::Lct => cmd_lct(cfg),
        CommandKind::Beltrami => cmd_beltrami(cfg),
        CommandKind::Geodesic => cmd_geodesic(cfg).map(|run| run.report),
        CommandKind::Charts => cmd_charts(cfg),
    }
}

/// Seed for the `index`-th independent sweep of a command.
pub(crate) fn sub_seed(cfg: &RunConfig, index: u64) -> u64 {
    cfg.general
        .seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index)
}

pub(crate) fn static_points(cfg: &RunConfig, seed: u64, count: usize) -> Vec<Vec<f64>> {
    let mut rng = sampling::rng(seed);
    (0..count)
        .map(|_| sampling::static_point(&mut rng, cfg.radius()))
        .collect()
}

pub(crate) fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}
