use nalgebra::DVector;

use crate::charts::{Chart, ChartKind};
use crate::cli::config::RunConfig;
use crate::cli::report::{Checks, MaxDev, Report};
use crate::error::{GeomError, Result};
use crate::isometry::equations::{compare_printed_equations, killing_equations, lowered_jet, missing_printed_pairs};
use crate::isometry::{
    audit_table, killing_residual, pullback_field, sample_rank, AmbientGenerator, PulledBackField,
    TANGENCY_TOL,
};
use crate::tensor::{StaticDeSitter, VectorField};

use super::static_points;

const EQUATIONS: &str = "Sec3 Killing equations";

fn tangency(chart: &Chart, gen: &AmbientGenerator, p: &[f64]) -> Result<f64> {
    let xi = chart.embed(p)?;
    let j = chart.analytic_jacobian(p)?;
    let v = pullback_field(chart, gen, p)?;
    let u = gen.apply(xi.coords());
    Ok((j * v - &u).norm() / u.norm().max(1.0))
}

pub fn cmd_verify_killing(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let r = cfg.radius();
    let pol = cfg.policy();
    let tol = cfg.tolerance.first_derivative;
    let chart = Chart::new(ChartKind::Static47Corrected, r)?;
    let g = StaticDeSitter::new(r);
    let points = static_points(cfg, cfg.general.seed, cfg.general.samples);
    let fields = PulledBackField::all(&chart);
    let mut checks = Checks::new("verify-killing");

    let mut residuals = Vec::with_capacity(fields.len());
    for f in &fields {
        let mut m = MaxDev::new();
        for p in &points {
            m.add(killing_residual(&g, f, p, &pol).map(|k| k.amax()));
        }
        checks.at_most(&format!("killing.{}", f.label()), "Eq(50)", m.value(), tol);
        residuals.push((f.label().to_string(), m.value().unwrap_or(f64::NAN)));
    }

    let mut iso = MaxDev::new();
    let mut tang = MaxDev::new();
    for f in &fields {
        iso.add(Ok(f.generator.isometry_defect(chart.target())));
        for p in &points {
            tang.add(tangency(&chart, &f.generator, p));
        }
    }
    checks.at_most("killing.ambient-isometry", "Eq(50)", iso.value(), 0.0);
    checks.at_most("killing.tangency", "Eq(50)", tang.value(), TANGENCY_TOL);

    let refs: Vec<&dyn VectorField> = fields.iter().map(|f| f as &dyn VectorField).collect();
    let rank = sample_rank(&refs, &points, 1e-8);
    checks.at_most(
        "killing.rank",
        "Eq(50)",
        rank.as_ref().map(|&k| (fields.len() as f64 - k as f64).abs()).map_err(Clone::clone),
        0.0,
    );
    if let Ok(k) = rank {
        checks.data("sample_rank", k);
    }

    let mut e1 = DVector::zeros(chart.ambient_dim());
    e1[1] = 1.0;
    let translation = AmbientGenerator::translation(e1);
    checks.holds(
        "killing.translation-rejected",
        "Eq(50)",
        Ok(matches!(
            pullback_field(&chart, &translation, &points[0]),
            Err(GeomError::NonTangentField { .. })
        )),
    );

    let mut generated = MaxDev::new();
    for p in &points {
        let eqs = match killing_equations(&g, p, &pol) {
            Ok(e) => e,
            Err(e) => {
                generated.add(Err(e));
                continue;
            }
        };
        for f in &fields {
            generated.add(lowered_jet(&g, f, p, &pol).map(|(u, du)| {
                eqs.iter().map(|eq| eq.evaluate(&u, &du).abs()).fold(0.0, f64::max)
            }));
        }
    }
    checks.at_most("killing-equations.generated", EQUATIONS, generated.value(), tol);

    let diffs = compare_printed_equations(&g, r, &points, &pol, tol)?;
    for d in &diffs {
        let id = format!("killing-equations.printed.{}{}", d.pair.0, d.pair.1);
        checks.claim(&id, EQUATIONS, Ok(d.coefficient_gap), tol);
    }
    let missing = missing_printed_pairs(4);
    checks.claim("killing-equations.unlisted-pairs", EQUATIONS, Ok(missing.len() as f64), 0.0);
    if !missing.is_empty() {
        let pairs: Vec<String> = missing.iter().map(|(a, b)| format!("({a},{b})")).collect();
        checks.note("killing-equations.unlisted-pairs", format!("pairs without a printed equation: {}", pairs.join(" ")));
    }
    checks.data("printed_equations", &diffs);

    let audit = audit_table(r, &points, &pol, tol)?;
    for a in &audit {
        let id = format!("table1.row{:02}", a.row);
        checks.claim(&id, &format!("Table 1 row {}", a.row), Ok(a.span_residual), tol);
        if !a.matched {
            checks.note(
                &id,
                format!(
                    "nearest generator {} (scale {:.6}, misfit {:.3e}); Killing residual {:.3e}",
                    a.best_generator, a.best_scale, a.best_residual, a.killing_residual
                ),
            );
        }
    }
    checks.data("table1", &audit);
    checks.data("killing_residuals", residuals);
    checks.data("radius", r);
    checks.data("points", points.len());
    Ok(checks.finish(cfg))
}
