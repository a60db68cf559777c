//! Sectional curvature and Ricci tensor of the static chart.

use dsgeom::tensor::{riemann, StaticDeSitter};
use dsgeom::{sampling, StepPolicy};

fn main() -> dsgeom::Result<()> {
    let r = 2.0;
    let g = StaticDeSitter::new(r);
    let pol = StepPolicy::default();
    let mut rng = sampling::rng(3);
    for _ in 0..5 {
        let p = sampling::static_point(&mut rng, r);
        let curv = riemann(&g, &p, &pol)?;
        let u = sampling::direction(&mut rng, 4);
        let v = sampling::direction(&mut rng, 4);
        let (lambda, spread) = curv.ricci_ratio();
        println!(
            "rho={:.3}  K R^2={:+.6}  Lambda R^2={:+.6}  Ric-Lambda g={:.1e}  bianchi={:.1e}",
            p[1],
            curv.sectional(&u, &v)? * r * r,
            lambda * r * r,
            spread,
            curv.first_bianchi()
        );
    }
    Ok(())
}
