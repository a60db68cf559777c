//! Connection coefficients and frame accelerations of the static chart.

use dsgeom::closed_forms::static_christoffel_exact;
use dsgeom::geodesic::frame_acceleration;
use dsgeom::tensor::{christoffel, StaticDeSitter};
use dsgeom::StepPolicy;

fn main() -> dsgeom::Result<()> {
    let r = 1.0;
    let g = StaticDeSitter::new(r);
    let p = [0.0, 0.5, 1.2, 0.4];
    let pol = StepPolicy::default();
    let numeric = christoffel(&g, &p, &pol)?;
    let exact = static_christoffel_exact(r, &p);
    let labels = ["t", "rho", "theta", "phi"];
    for a in 0..4 {
        for b in 0..4 {
            for c in b..4 {
                if exact[a][b][c].abs() > 1e-12 {
                    println!(
                        "Gamma^{}_{{{} {}}} = {:+.10}  (fd {:+.10})",
                        labels[a], labels[b], labels[c], exact[a][b][c], numeric.get(a, b, c)
                    );
                }
            }
        }
    }
    for mu in 0..4 {
        let acc = frame_acceleration(&g, mu, &p, &pol)?;
        println!("D_{0} d_{0} = {1:?}", labels[mu], acc.as_slice());
    }
    Ok(())
}
