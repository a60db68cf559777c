use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use rand::Rng;

use crate::ambient::{plane_boost, plane_rotation};
use crate::charts::robertson_walker::{isotropic_angle_check, rw_spatial_pullback};
use crate::charts::{robertson_walker_metric, Chart, ChartKind, ExpansionProfile, JacobianSource};
use crate::cli::config::RunConfig;
use crate::cli::report::{Checks, MaxDev, Report};
use crate::closed_forms::{
    hyperboloid_radial_exact, printed_hyperboloid_radial, printed_reduced_metric_40,
    printed_reduced_metric_43, printed_reduced_static_metric, reduced_metric_43_in_static_coords,
};
use crate::error::Result;
use crate::linalg::max_abs_diff;
use crate::sampling;

use super::sub_seed;

fn anchor(kind: ChartKind) -> &'static str {
    match kind {
        ChartKind::Schrodinger40 => "Eq(40)",
        ChartKind::Schrodinger43 => "Eq(43)",
        ChartKind::Static47Printed | ChartKind::Static47Corrected => "Eq(47)",
        ChartKind::SpherePolar => "Sec2.1 sphere metric",
        ChartKind::HyperboloidPolar => "Sec2.2 hyperboloid metric",
        ChartKind::Beltrami => "Eq(52)",
    }
}

fn closed_anchor(kind: ChartKind) -> &'static str {
    match kind {
        ChartKind::Static47Corrected => "Eq(48)",
        ChartKind::Beltrami => "Eq(54)",
        other => anchor(other),
    }
}

fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs_diff(a, b) / b.amax().max(1.0)
}

fn both(a: Result<DMatrix<f64>>, b: Result<DMatrix<f64>>) -> Result<f64> {
    Ok(rel_diff(&a?, &b?))
}

pub fn cmd_charts(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let r = cfg.radius();
    let r2 = r * r;
    let pol = cfg.policy();
    // Jacobian oracles use one Richardson level so their own error stays below the tolerance.
    let fd = pol.with_richardson(true);
    let mut checks = Checks::new("charts");
    let mut rng = sampling::rng(cfg.general.seed);
    let mut residual_ranges = Vec::new();

    for chart in Chart::registry(r)? {
        let kind = chart.kind();
        let name = chart.name();
        let points: Vec<Vec<f64>> = (0..cfg.general.samples)
            .map(|_| sampling::chart_point(&mut rng, &chart))
            .collect();
        let mut constraint = MaxDev::new();
        let mut formula = MaxDev::new();
        let mut jac = MaxDev::new();
        let mut pull = MaxDev::new();
        let mut closed = MaxDev::new();
        for p in &points {
            let res = chart.constraint_residual(p);
            if kind == ChartKind::Static47Printed {
                let rho = p[1];
                formula.add(res.clone().map(|v| (v - (2.0 * rho * rho - 2.0 * r2)).abs() / r2));
            }
            constraint.add(res.map(|v| v.abs() / r2));
            jac.add(both(chart.analytic_jacobian(p), chart.jacobian(p, &fd)));
            let g = chart.pullback_metric(p, JacobianSource::Analytic);
            pull.add(both(chart.pullback_metric(p, JacobianSource::FiniteDifference(fd)), g.clone()));
            if let Some(c) = chart.closed_form_metric(p) {
                closed.add(g.map(|g| rel_diff(&c, &g)));
            }
        }
        let id = |what: &str| format!("{what}.{name}");
        if kind.lands_on_quadric() {
            checks.at_most(&id("constraint"), "Eq(46)", constraint.value(), 1e-12);
        } else {
            checks.claim(&id("constraint"), anchor(kind), constraint.value(), 1e-12);
            checks.at_most(&format!("constraint.{name}.formula"), anchor(kind), formula.value(), 1e-12);
            checks.note(&id("constraint"), "residual equals 2 rho^2 - 2 R^2");
            residual_ranges.push((name, constraint.value().unwrap_or(f64::NAN)));
        }
        checks.at_most(&id("jacobian"), anchor(kind), jac.value(), 1e-8);
        checks.at_most(&id("pullback"), anchor(kind), pull.value(), 1e-8);
        if kind != ChartKind::Static47Printed {
            checks.at_most(&id("closed-form"), closed_anchor(kind), closed.value(), 1e-10);
        }
    }
    checks.data("unconstrained_residuals", residual_ranges);

    // Printed reduced metrics against the pullback.
    let c40 = Chart::new(ChartKind::Schrodinger40, r)?;
    let c43 = Chart::new(ChartKind::Schrodinger43, r)?;
    let mut reduced40 = MaxDev::new();
    let mut reduced43 = MaxDev::new();
    let mut reduced_static = MaxDev::new();
    for _ in 0..cfg.general.samples {
        let p40 = sampling::chart_point(&mut rng, &c40);
        reduced40.add(c40.pullback_metric(&p40, JacobianSource::Analytic).map(|g| rel_diff(&printed_reduced_metric_40(r, &p40), &g)));
        let p43 = sampling::chart_point(&mut rng, &c43);
        reduced43.add(c43.pullback_metric(&p43, JacobianSource::Analytic).map(|g| rel_diff(&printed_reduced_metric_43(r, &p43), &g)));
        let eta = rng.random_range(-r..r);
        let rho = r * rng.random_range(0.05..0.95);
        let sub = reduced_metric_43_in_static_coords(r, eta, rho);
        reduced_static.add(Ok(rel_diff(&sub, &printed_reduced_static_metric(r, rho))));
    }
    checks.claim("printed.reduced40", "Eq(41)", reduced40.value(), 1e-10);
    checks.claim("printed.reduced43", "Eq(43)", reduced43.value(), 1e-10);
    checks.claim("printed.eq44-to-reduced_static", "Eq(45)", reduced_static.value(), 1e-10);

    // Hyperboloid radial coefficient: both printed forms against the pullback.
    let hyp = Chart::new(ChartKind::HyperboloidPolar, r)?;
    let mut exact = MaxDev::new();
    let mut mid = MaxDev::new();
    let mut fin = MaxDev::new();
    for _ in 0..cfg.general.samples {
        let p = sampling::chart_point(&mut rng, &hyp);
        let truth = hyperboloid_radial_exact(r, p[0]);
        let (m, f) = printed_hyperboloid_radial(r, p[0]);
        let scale = truth.abs().max(1.0);
        exact.add(hyp.pullback_metric(&p, JacobianSource::Analytic).map(|g| (g[(0, 0)] - truth).abs() / scale));
        mid.add(Ok((m - truth).abs() / scale));
        fin.add(Ok((f - truth).abs() / scale));
    }
    let sec22 = "Sec2.2 hyperboloid metric";
    checks.at_most("hyperboloid.radial", sec22, exact.value(), 1e-10);
    checks.claim("printed.hyperboloid-intermediate", sec22, mid.value(), 1e-10);
    checks.claim("printed.hyperboloid-final", sec22, fin.value(), 1e-10);

    // Robertson-Walker closed forms and slice embeddings.
    let examples = [
        (ExpansionProfile::constant(1.0, 0.0), [0.0, 0.7, FRAC_PI_2, 0.0], [-1.0, 1.0, 0.49, 0.49]),
        (ExpansionProfile::constant(1.0, 1.0), [0.0, 0.5, FRAC_PI_2, 0.0], [-1.0, 4.0 / 3.0, 0.25, 0.25]),
        (ExpansionProfile::constant(2.0, 0.0), [0.0, 1.0, FRAC_PI_2, 0.0], [-1.0, 4.0, 4.0, 4.0]),
    ];
    let mut rw = MaxDev::new();
    for (prof, p, d) in &examples {
        let want = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d));
        rw.add(robertson_walker_metric(prof, p).map(|g| max_abs_diff(&g, &want)));
    }
    checks.at_most("rw.examples", "Eq(34)", rw.value(), 1e-14);

    let mut slice = MaxDev::new();
    let mut srng = sampling::rng(sub_seed(cfg, 1));
    for k in [1.0, 0.0, -1.0] {
        let prof = ExpansionProfile::new(|t: f64| t.exp(), k);
        for _ in 0..10 {
            let t = srng.random_range(-1.0..1.0);
            let q = [
                srng.random_range(0.1..0.9),
                srng.random_range(0.2..PI - 0.2),
                srng.random_range(0.0..2.0 * PI),
            ];
            slice.add(rw_spatial_pullback(&prof, t, &q, &pol).map(|(g, c)| rel_diff(&g, &c)));
        }
    }
    checks.at_most("rw.slice-pullback", "Eq(34)", slice.value(), 1e-8);
    checks.at_most("rw.isotropic-angle", "Eq(36)", isotropic_angle_check(1.0, 2.0, 20_000), 1e-10);

    // Ambient isometries keep embedded points on the quadric.
    let stat = Chart::new(ChartKind::Static47Corrected, r)?;
    let mut inv = MaxDev::new();
    for _ in 0..cfg.general.samples {
        let p = sampling::static_point(&mut rng, r);
        let angle = rng.random_range(0.0..2.0 * PI);
        let rapidity = rng.random_range(-1.0..1.0);
        let m = plane_boost(5, 0, 4, rapidity) * plane_rotation(5, 1, 2, angle);
        inv.add(stat.embed(&p).and_then(|xi| {
            let moved = &m * xi.to_vector();
            let scale = moved.norm_squared().max(r2);
            stat.target().residual(moved.as_slice()).map(|v| v.abs() / scale)
        }));
    }
    checks.at_most("quadric.isometry-invariance", "Eq(46)", inv.value(), 1e-12);

    checks.data("radius", r);
    checks.data("charts", Chart::registry(r)?.iter().map(|c| c.name()).collect::<Vec<_>>());
    Ok(checks.finish(cfg))
}
