//! Integrates a static-chart geodesic with RK4 and tracks the ten conserved charges.

use dsgeom::geodesic::{integrate, relative_drift, GeodesicState};
use dsgeom::isometry::PulledBackField;
use dsgeom::tensor::ChartMetric;
use dsgeom::{Chart, ChartKind, StepPolicy};

fn main() -> dsgeom::Result<()> {
    let chart = Chart::new(ChartKind::Static47Corrected, 1.0)?.with_margin(0.1);
    let g = ChartMetric::new(chart.clone());
    let s0 = GeodesicState::new(vec![0.0, 0.3, 1.4, 0.0], vec![1.2, 0.1, 0.05, 0.3]);
    let traj = integrate(&g, &s0, 10.0, 1e-3, &StepPolicy::default())?;
    println!("{:?} after tau = {:.3}, norm drift {:.2e}", traj.status, traj.span(), traj.norm_drift());
    for f in PulledBackField::all(&chart) {
        let q = traj.charges(&g, &f)?;
        println!("{}  Q0 = {:+.6}  drift {:.2e}", f.label(), q[0], relative_drift(&q));
    }

    // Standing still at the centre is a geodesic.
    let rest = GeodesicState::new(vec![0.0, 0.5, 1.0, 0.0], vec![0.0; 4]);
    let still = integrate(&g, &rest, 1.0, 1e-2, &StepPolicy::default())?;
    println!("zero velocity stays at {:?}", still.last().x);
    Ok(())
}
