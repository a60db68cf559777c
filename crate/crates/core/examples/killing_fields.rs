//! Ambient rotation generators pulled back to the static chart as Killing fields,
//! and the audit of a tabulated list of Killing covectors.

use dsgeom::isometry::{audit_table, killing_residual, sample_rank, PulledBackField};
use dsgeom::tensor::StaticDeSitter;
use dsgeom::{sampling, Chart, ChartKind, StepPolicy, VectorField};

fn main() -> dsgeom::Result<()> {
    let r = 1.0;
    let pol = StepPolicy::default();
    let chart = Chart::new(ChartKind::Static47Corrected, r)?;
    let g = StaticDeSitter::new(r);
    let fields = PulledBackField::all(&chart);
    let mut rng = sampling::rng(11);
    let points: Vec<Vec<f64>> = (0..20).map(|_| sampling::static_point(&mut rng, r)).collect();

    for f in &fields {
        let worst = points
            .iter()
            .map(|p| killing_residual(&g, f, p, &pol).map(|k| k.amax()))
            .collect::<dsgeom::Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("{}  max |Killing residual| = {worst:.2e}", f.label());
    }
    let refs: Vec<&dyn VectorField> = fields.iter().map(|f| f as &dyn VectorField).collect();
    println!("rank over samples: {}", sample_rank(&refs, &points, 1e-10)?);

    for row in audit_table(r, &points[..8], &pol, 1e-6)? {
        println!(
            "row {:>2}: nearest {} x {:+.3}, misfit {:.2e}, matched {}",
            row.row, row.best_generator, row.best_scale, row.best_residual, row.matched
        );
    }
    Ok(())
}
