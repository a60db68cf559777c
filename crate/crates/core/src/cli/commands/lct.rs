use std::f64::consts::PI;

use nalgebra::DVector;

use crate::cli::config::RunConfig;
use crate::cli::report::{Checks, MaxDev, Report};
use crate::closed_forms::printed_comparison_normalizations;
use crate::error::Result;
use crate::tensor;
use crate::warped::{
    bochner_terms, comparison_ode_witness, comparison_solution, hessian_identity_defect, lct_check,
    ode_residual, psi, radial_profile, GridSpec, WarpedMetric,
};

/// Radii per curvature sign in the Bochner sweep.
pub const BOCHNER_RADII: usize = 20;

pub fn cmd_lct(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let pol = cfg.policy();
    let tol1 = cfg.tolerance.first_derivative;
    let tol2 = cfg.tolerance.second_derivative;
    let grid = cfg.grid.points();
    let n = 4;
    let mut checks = Checks::new("lct");

    let hyper = WarpedMetric::new(n, -1.0)?;
    let mut lap = MaxDev::new();
    let mut ident = MaxDev::new();
    let mut radial = MaxDev::new();
    let mut bound = MaxDev::new();
    let mut tight = MaxDev::new();
    for &r in &grid {
        match radial_profile(&hyper, r, &pol) {
            Ok(prof) => {
                lap.add(Ok((prof.laplacian - 3.0 / r.tanh()).abs()));
                ident.add(hessian_identity_defect(&hyper, &prof));
                radial.add(Ok(prof.hessian[(0, 0)].abs()));
                // (Delta r)^2 / (n-1) <= |Hr|^2, with equality in the model space.
                let gap = prof.laplacian.powi(2) / (n as f64 - 1.0) - prof.hessian_norm_sq;
                bound.add(Ok(gap.max(0.0)));
                tight.add(Ok(gap.abs()));
            }
            Err(e) => {
                for m in [&mut lap, &mut ident, &mut radial, &mut bound, &mut tight] {
                    m.add(Err(e.clone()));
                }
            }
        }
    }
    checks.at_most("prop1.laplacian", "Eq(16)", lap.value(), tol2);
    checks.at_most("hessian.identity", "Eq(10)", ident.value(), tol2);
    checks.at_most("hessian.radial", "Eq(10)", radial.value(), tol1);
    checks.at_most("hessian.eigenvalue-bound", "Eq(23)", bound.value(), tol1);
    checks.at_most("hessian.eigenvalue-equality", "Eq(23)", tight.value(), tol1);

    let eq = lct_check(-1.0, &hyper, &grid, &pol)?;
    checks.at_most("theorem1.equality", "Theorem 1", Ok(eq.max_gap), tol2);
    // Ricci is a second-derivative quantity; its defect is judged accordingly.
    checks.at_most("theorem1.equality-hypothesis", "Theorem 1", Ok((-eq.hypothesis_min).max(0.0)), tol2);

    let sphere_grid = GridSpec::linear(cfg.grid.min.min(0.1), PI - 0.1, cfg.grid.count).points();
    let sphere = lct_check(-1.0, &WarpedMetric::new(n, 1.0)?, &sphere_grid, &pol)?;
    checks.above("theorem1.sphere-margin", "Theorem 1", Ok(sphere.min_margin), 0.0);
    checks.at_most("theorem1.sphere-hypothesis", "Theorem 1", Ok((-sphere.hypothesis_min).max(0.0)), tol2);

    let flat = lct_check(-1.0, &WarpedMetric::new(n, 0.0)?, &grid, &pol)?;
    checks.above("theorem1.flat-margin", "Theorem 1", Ok(flat.min_margin), 0.0);

    // The comparison must detect a violated hypothesis.
    let wrong = lct_check(1.0, &hyper, &grid[..1], &pol)?;
    checks.holds("theorem1.hypothesis-violation-detected", "Theorem 1", Ok(!wrong.hypothesis_holds));

    let mut sect = MaxDev::new();
    for &r in grid.iter().step_by((grid.len() / 10).max(1)) {
        let p = hyper.point_at(r);
        let e0 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let e1 = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        sect.add(tensor::sectional_curvature(&hyper, &p, &e0, &e1, &pol).map(|k| (k + 1.0).abs()));
    }
    checks.at_most("theorem1.equality-sectional", "Theorem 1", sect.value(), tol2);

    let spans = [(-1.0, 0.2, 3.0), (0.0, 0.2, 3.0), (1.0, 0.2, PI - 0.2)];
    let mut bochner_rows = Vec::new();
    for (k, lo, hi) in spans {
        let g = WarpedMetric::new(n, k)?;
        let mut m = MaxDev::new();
        for r in GridSpec::linear(lo, hi, BOCHNER_RADII).points() {
            let terms = bochner_terms(&g, r, &pol);
            if let Ok(t) = &terms {
                bochner_rows.push((k, *t));
            }
            m.add(terms.map(|t| t.residual.abs()));
        }
        let tag = match k {
            k if k < 0.0 => "k-1",
            k if k > 0.0 => "k+1",
            _ => "k0",
        };
        checks.at_most(&format!("bochner.{tag}"), "Eq(22)", m.value(), 1e-3);
    }
    checks.data("bochner", bochner_rows);

    let witness_grid: Vec<f64> = grid.iter().copied().filter(|&r| r > 0.0).collect();
    checks.at_most("ode.witness", "Eq(26)", comparison_ode_witness(-1.0, n, &witness_grid), 1e-10);
    let off = ode_residual(|r| comparison_solution(-1.0, n, r), -4.0, n, &witness_grid);
    checks.above("ode.negative-control", "Eq(26)", Ok(off), 1e-3);

    let mut norm_gap = MaxDev::new();
    for k in [-0.25, -1.0, -4.0] {
        for &r in &witness_grid {
            let (ode, model) = printed_comparison_normalizations(k, n, r);
            norm_gap.add(Ok((ode - model).abs() / ode.abs().max(1.0)));
        }
    }
    checks.claim("normalizations.consistent", "Eq(16)", norm_gap.value(), 1e-10);
    checks.note(
        "normalizations.consistent",
        "model Laplacian uses 1/sqrt(-k), the comparison ODE sqrt|k|; equal only for |k| = 1",
    );

    let mut cont = MaxDev::new();
    for &r in &[0.5, 1.0, 2.0] {
        let at0 = psi(0.0, r);
        for k in [-1e-9, 1e-9] {
            cont.add(psi(k, r).and_then(|v| at0.clone().map(|z| (v - z).abs())));
        }
    }
    checks.at_most("warp.continuity", "Eq(13)", cont.value(), 1e-8);

    checks.data("equality_rows", &eq.rows);
    checks.data("sphere_min_margin", sphere.min_margin);
    checks.data("flat_min_margin", flat.min_margin);
    checks.data("equality_hypothesis_min", eq.hypothesis_min);
    checks.data("sphere_hypothesis_min", sphere.hypothesis_min);
    Ok(checks.finish(cfg))
}
