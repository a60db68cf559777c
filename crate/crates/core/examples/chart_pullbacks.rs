//! Every registered chart: embedding, constraint residual, and induced metric
//! from the analytic Jacobian versus finite differences.

use dsgeom::linalg::max_abs_diff;
use dsgeom::{sampling, Chart, JacobianSource, StepPolicy};

fn main() -> dsgeom::Result<()> {
    let r = 1.0;
    let fd = StepPolicy::default().with_richardson(true);
    let mut rng = sampling::rng(7);
    for chart in Chart::registry(r)? {
        let p = sampling::chart_point(&mut rng, &chart);
        let g = chart.pullback_metric(&p, JacobianSource::Analytic)?;
        let g_fd = chart.pullback_metric(&p, JacobianSource::FiniteDifference(fd))?;
        let closed = chart
            .closed_form_metric(&p)
            .map(|c| format!("{:.1e}", max_abs_diff(&c, &g)))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<20} constraint {:+.1e}  fd gap {:.1e}  closed-form gap {closed}",
            chart.name(),
            chart.constraint_residual(&p)?,
            max_abs_diff(&g, &g_fd),
        );
    }
    // The as-printed static chart misses the quadric by 2 rho^2 - 2 R^2.
    let printed = Chart::by_name("static-47-printed", r)?;
    let p = [0.0, 0.6, 1.0, 0.0];
    println!("printed static residual at rho=0.6: {:.6}", printed.constraint_residual(&p)?);
    Ok(())
}
