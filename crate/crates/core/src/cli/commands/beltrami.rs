use nalgebra::DMatrix;

use crate::ambient::AmbientPoint;
use crate::charts::{beltrami_lift, beltrami_project, Chart, ChartKind, JacobianSource, MinkowskiPoint};
use crate::cli::config::RunConfig;
use crate::cli::report::{Checks, MaxDev, Report};
use crate::closed_forms::{printed_beltrami_jacobian, printed_beltrami_metric};
use crate::error::{GeomError, Result};
use crate::linalg::max_abs_diff;
use crate::sampling;

fn scale(m: &DMatrix<f64>) -> f64 {
    m.amax().max(1.0)
}

pub fn cmd_beltrami(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let r = cfg.radius();
    let pol = cfg.policy();
    // Jacobian oracles use one Richardson level so their own error stays below the tolerance.
    let fd = pol.with_richardson(true);
    let chart = Chart::new(ChartKind::Beltrami, r)?;
    let mut rng = sampling::rng(cfg.general.seed);
    let points: Vec<MinkowskiPoint> = (0..cfg.beltrami.points)
        .map(|_| sampling::minkowski_point(&mut rng, r, cfg.beltrami.min_conformal))
        .collect();
    let mut checks = Checks::new("beltrami");

    let mut round = MaxDev::new();
    let mut constraint = MaxDev::new();
    let mut lower = true;
    let mut jac = MaxDev::new();
    let mut pull = MaxDev::new();
    let mut closed = MaxDev::new();
    let mut printed_jac = MaxDev::new();
    let mut printed_metric = MaxDev::new();
    for x in &points {
        let p = x.0.to_vec();
        match beltrami_lift(x, r) {
            Ok(xi) => {
                lower &= xi[4] < 0.0;
                constraint.add(chart.target().residual(xi.coords()).map(|v| v.abs() / (r * r)));
                round.add(beltrami_project(&xi, r).map(|y| {
                    (0..4).map(|m| (y.0[m] - x.0[m]).abs()).fold(0.0, f64::max)
                }));
            }
            Err(e) => {
                round.add(Err(e.clone()));
                constraint.add(Err(e));
            }
        }
        let analytic = chart.analytic_jacobian(&p);
        let numeric = chart.jacobian(&p, &fd);
        jac.add(match (&analytic, &numeric) {
            (Ok(a), Ok(n)) => Ok(max_abs_diff(a, n) / scale(a)),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        });
        let g_an = chart.pullback_metric(&p, JacobianSource::Analytic);
        let g_fd = chart.pullback_metric(&p, JacobianSource::FiniteDifference(fd));
        pull.add(match (&g_an, &g_fd) {
            (Ok(a), Ok(n)) => Ok(max_abs_diff(a, n) / scale(a)),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        });
        if let Ok(a) = &g_an {
            closed.add(
                chart
                    .closed_form_metric(&p)
                    .map(|c| max_abs_diff(&c, a) / scale(a))
                    .ok_or_else(|| GeomError::OutsideDomain {
                        what: chart.name().into(),
                        point: p.clone(),
                    }),
            );
            printed_metric.add(Ok(max_abs_diff(&printed_beltrami_metric(x, r), a) / scale(a)));
        } else if let Err(e) = &g_an {
            closed.add(Err(e.clone()));
            printed_metric.add(Err(e.clone()));
        }
        printed_jac.add(analytic.map(|a| max_abs_diff(&printed_beltrami_jacobian(x, r), &a) / scale(&a)));
    }

    checks.at_most("roundtrip", "Eq(52)", round.value(), 1e-12);
    checks.at_most("lift.constraint", "Eq(46)", constraint.value(), 1e-12);
    checks.holds("lift.lower-hemisphere", "Eq(52)", Ok(lower));
    checks.at_most("jacobian.analytic-vs-fd", "Eq(53)", jac.value(), 1e-8);
    checks.at_most("pullback.analytic-vs-fd", "Eq(54)", pull.value(), 1e-8);
    checks.at_most("pullback.closed-form", "Eq(54)", closed.value(), 1e-10);
    checks.claim("printed.jacobian", "Eq(53)", printed_jac.value(), 1e-8);
    checks.claim("printed.metric", "Eq(54)", printed_metric.value(), 1e-8);

    let origin = chart
        .pullback_metric(&[0.0; 4], JacobianSource::Analytic)
        .map(|g| max_abs_diff(&g, &DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]))));
    checks.at_most("origin.flat", "Eq(54)", origin, 1e-12);

    let near_equator = AmbientPoint::new(vec![0.0, r, 0.0, 0.0, 1e-13 * r]);
    checks.holds(
        "projection.equatorial-singularity",
        "Sec4 projection",
        Ok(matches!(
            beltrami_project(&near_equator, r),
            Err(GeomError::EquatorialSingularity { .. })
        )),
    );
    let on_cone = MinkowskiPoint([r * (1.0 - 1e-14), 0.0, 0.0, 0.0]);
    checks.holds(
        "lift.projective-cone",
        "Eq(52)",
        Ok(matches!(beltrami_lift(&on_cone, r), Err(GeomError::ProjectiveCone { .. }))),
    );

    checks.data("radius", r);
    checks.data("points", points.len());
    Ok(checks.finish(cfg))
}
