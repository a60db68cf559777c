use std::f64::consts::{FRAC_PI_2, PI};
use std::fs::File;
use std::io::BufWriter;

use rand::Rng;
use serde::Serialize;

use crate::charts::{Chart, ChartKind};
use crate::cli::config::RunConfig;
use crate::cli::report::{Checks, MaxDev, Report};
use crate::error::{GeomError, Result};
use crate::geodesic::{integrate, relative_drift, GeodesicState, Termination, Trajectory};
use crate::isometry::PulledBackField;
use crate::sampling::{self, SampleRng};
use crate::tensor::ChartMetric;

use super::sub_seed;

/// Output of the geodesic command: the report plus the primary trajectory
/// and its charges, one series per generator.
#[derive(Debug)]
pub struct GeodesicRun {
    pub report: Report,
    pub trajectory: Trajectory,
    pub charges: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    status: Termination,
    span: f64,
    steps: usize,
    norm_drift: f64,
    charge_drift: f64,
}

fn default_state(chart: &Chart) -> GeodesicState {
    let r = chart.radius();
    let (x, v) = match chart.kind() {
        ChartKind::Schrodinger40 | ChartKind::Schrodinger43 => (vec![0.0, 0.3], vec![1.2, 0.1]),
        ChartKind::Static47Printed | ChartKind::Static47Corrected => {
            (vec![0.0, 0.3 * r, FRAC_PI_2, 0.0], vec![1.2, 0.1, 0.05, 0.3])
        }
        ChartKind::SpherePolar => (vec![0.5 * r, FRAC_PI_2, FRAC_PI_2, 0.0], vec![0.1, 0.2, 0.1, 0.3]),
        ChartKind::HyperboloidPolar => {
            (vec![1.5 * r, FRAC_PI_2, FRAC_PI_2, 0.0], vec![0.5, 0.1, 0.05, 0.1])
        }
        ChartKind::Beltrami => (vec![0.0; 4], vec![0.2, 0.3, 0.1, 0.0]),
    };
    GeodesicState::new(x, v)
}

/// Random initial data kept away from the chart boundary.
fn random_state(rng: &mut SampleRng, chart: &Chart) -> GeodesicState {
    let r = chart.radius();
    let mut u = |a: f64, b: f64| rng.random_range(a..b);
    match chart.kind() {
        ChartKind::Static47Printed | ChartKind::Static47Corrected => GeodesicState::new(
            vec![u(-r, r), r * u(0.2, 0.5), FRAC_PI_2 + u(-0.3, 0.3), u(0.0, 2.0 * PI)],
            vec![1.0 + u(0.0, 0.5), u(-0.2, 0.2), u(-0.1, 0.1), u(-0.5, 0.5)],
        ),
        ChartKind::Schrodinger40 => {
            GeodesicState::new(vec![u(-r, r), u(-1.0, 1.0)], vec![1.0 + u(0.0, 0.5), u(-0.2, 0.2)])
        }
        _ => {
            // The geodesic margin is wider than the sampler's fixed ranges.
            let x = loop {
                let x = sampling::chart_point(rng, chart);
                if chart.in_domain(&x) {
                    break x;
                }
            };
            let v = sampling::direction(rng, chart.dim()) * 0.2;
            GeodesicState::new(x, v.iter().copied().collect())
        }
    }
}

fn charge_series(traj: &Trajectory, g: &ChartMetric, fields: &[PulledBackField]) -> Result<Vec<Vec<f64>>> {
    fields.iter().map(|f| traj.charges(g, f)).collect()
}

fn worst_charge_drift(charges: &[Vec<f64>]) -> f64 {
    charges.iter().map(|q| relative_drift(q)).fold(0.0, f64::max)
}

/// Observed convergence order of RK4 from two step sizes against a fine reference.
fn rk4_order(g: &ChartMetric, s0: &GeodesicState, cfg: &RunConfig) -> Result<f64> {
    let (span, h) = (0.5, 0.05);
    let pol = cfg.policy();
    let end = |dt: f64| -> Result<Vec<f64>> {
        let t = integrate(g, s0, span, dt, &pol)?;
        if t.status != Termination::Completed {
            return Err(GeomError::OutsideDomain {
                what: "rk4 order run".into(),
                point: t.last().x.clone(),
            });
        }
        let l = t.last();
        Ok(l.x.iter().chain(&l.v).copied().collect())
    };
    let reference = end(h / 64.0)?;
    let err = |y: Vec<f64>| y.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let e1 = err(end(h)?);
    let e2 = err(end(h / 2.0)?);
    Ok((e1 / e2).log2())
}

pub fn cmd_geodesic(cfg: &RunConfig) -> Result<GeodesicRun> {
    cfg.validate()?;
    let gc = &cfg.geodesic;
    let pol = cfg.policy();
    let tol = cfg.tolerance.integrator;
    let chart = Chart::by_name(&gc.chart, cfg.radius())?.with_margin(gc.margin);
    let g = ChartMetric::new(chart.clone());
    let fields = PulledBackField::all(&chart);
    let mut checks = Checks::new("geodesic");

    let s0 = match (&gc.position, &gc.velocity) {
        (Some(x), Some(v)) => GeodesicState::new(x.clone(), v.clone()),
        _ => default_state(&chart),
    };
    let traj = integrate(&g, &s0, gc.tau_end, gc.dt, &pol)?;
    let charges = charge_series(&traj, &g, &fields)?;
    if let Some(path) = &gc.csv {
        let mut out = BufWriter::new(File::create(path)?);
        traj.write_csv(&mut out, &charges)?;
    }
    let summary = RunSummary {
        status: traj.status,
        span: traj.span(),
        steps: traj.samples.len() - 1,
        norm_drift: traj.norm_drift(),
        charge_drift: worst_charge_drift(&charges),
    };
    let span_note = format!("integrated tau in [0, {:.6}] ({:?})", summary.span, summary.status);
    checks.at_most("trajectory.norm-drift", "Sec3 accelerations", Ok(summary.norm_drift), tol);
    checks.note("trajectory.norm-drift", span_note.clone());
    checks.at_most("trajectory.charge-drift", "Eq(50)", Ok(summary.charge_drift), tol);
    checks.note("trajectory.charge-drift", span_note);
    checks.data("trajectory", &summary);
    checks.data("initial_state", &s0);
    checks.data("charges", fields.iter().map(|f| f.label().to_string()).collect::<Vec<_>>());

    let mut rng = sampling::rng(sub_seed(cfg, 1));
    let mut batch = Vec::with_capacity(gc.count);
    let mut norm_drift = MaxDev::new();
    let mut charge_drift = MaxDev::new();
    let mut first_error = None;
    for _ in 0..gc.count {
        let s = random_state(&mut rng, &chart);
        let run = integrate(&g, &s, gc.tau_end, gc.dt, &pol)
            .and_then(|t| charge_series(&t, &g, &fields).map(|q| (t, q)));
        match run {
            Ok((t, q)) => {
                let row = RunSummary {
                    status: t.status,
                    span: t.span(),
                    steps: t.samples.len() - 1,
                    norm_drift: t.norm_drift(),
                    charge_drift: worst_charge_drift(&q),
                };
                norm_drift.add(Ok(row.norm_drift));
                charge_drift.add(Ok(row.charge_drift));
                batch.push(row);
            }
            Err(e) => {
                first_error.get_or_insert_with(|| e.to_string());
                norm_drift.add(Err(e.clone()));
                charge_drift.add(Err(e));
            }
        }
    }
    let shortest = batch.iter().map(|b| b.span).fold(f64::INFINITY, f64::min);
    let completed = batch.iter().filter(|b| b.status == Termination::Completed).count();
    let mut batch_note = format!(
        "{completed}/{} runs reached tau = {}; shortest span {shortest:.6}",
        gc.count, gc.tau_end
    );
    if let Some(e) = first_error {
        batch_note.push_str(&format!("; {} runs aborted, first: {e}", gc.count - batch.len()));
    }
    checks.at_most("batch.norm-drift", "Sec3 accelerations", norm_drift.value(), tol);
    checks.note("batch.norm-drift", batch_note.clone());
    checks.at_most("batch.charge-drift", "Eq(50)", charge_drift.value(), tol);
    checks.note("batch.charge-drift", batch_note);
    checks.data("batch", &batch);

    let order = rk4_order(&g, &default_state(&chart), cfg);
    checks.at_most("rk4.order", "RK4", order.as_ref().map(|o| (o - 4.0).abs()).map_err(Clone::clone), 0.5);
    if let Ok(o) = order {
        checks.data("rk4_observed_order", o);
    }

    checks.data("chart", chart.name());
    checks.data("radius", cfg.radius());
    Ok(GeodesicRun {
        report: checks.finish(cfg),
        trajectory: traj,
        charges,
    })
}
