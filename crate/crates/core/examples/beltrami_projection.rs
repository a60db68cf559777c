//! Projective (Beltrami) coordinates: lift to the quadric, project back, and the induced metric.

use dsgeom::charts::{beltrami_lift, beltrami_project};
use dsgeom::{Chart, ChartKind, JacobianSource, MinkowskiPoint};

fn main() -> dsgeom::Result<()> {
    let r = 1.0;
    let x = MinkowskiPoint([0.3, 0.5, -0.2, 0.1]);
    let xi = beltrami_lift(&x, r)?;
    let back = beltrami_project(&xi, r)?;
    println!("lift      {:?}", xi.coords());
    println!("roundtrip {:?}", back.0);

    let chart = Chart::new(ChartKind::Beltrami, r)?;
    println!("metric at x:\n{}", chart.pullback_metric(&x.0, JacobianSource::Analytic)?);
    println!("metric at origin:\n{}", chart.pullback_metric(&[0.0; 4], JacobianSource::Analytic)?);

    // Points with 1 + sigma^2/R^2 <= 0 have no lift.
    let cone = MinkowskiPoint([1.0, 0.0, 0.0, 0.0]);
    println!("on the cone: {}", beltrami_lift(&cone, r).unwrap_err());
    Ok(())
}
