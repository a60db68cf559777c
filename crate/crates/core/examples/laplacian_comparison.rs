//! Laplacian of the distance function on warped model spaces, the comparison
//! inequality, and the Bochner identity along radial geodesics.

use dsgeom::warped::{bochner_terms, lct_check, radial_profile, GridSpec, WarpedMetric};
use dsgeom::StepPolicy;

fn main() -> dsgeom::Result<()> {
    let pol = StepPolicy::default();
    let hyper = WarpedMetric::new(4, -1.0)?;
    for r in [0.5, 1.0, 2.0] {
        let prof = radial_profile(&hyper, r, &pol)?;
        println!("r={r}: Delta r = {:.8}, 3 coth r = {:.8}", prof.laplacian, 3.0 / r.tanh());
    }

    let sphere = WarpedMetric::new(4, 1.0)?;
    let grid = GridSpec::linear(0.1, 3.0, 8).points();
    let report = lct_check(-1.0, &sphere, &grid, &pol)?;
    for row in &report.rows {
        println!("r={:.3}  sphere {:+.5}  bound {:+.5}  margin {:.5}", row.r, row.numeric, row.model, row.margin);
    }

    for k in [-1.0, 0.0, 1.0] {
        let t = bochner_terms(&WarpedMetric::new(4, k)?, 1.0, &pol)?;
        println!("k={k:+}: |Hr|^2 + (Delta r)' + Ric = {:.2e}", t.residual);
    }
    Ok(())
}
