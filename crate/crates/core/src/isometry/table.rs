//! Audit of the published table of static-frame Killing covectors against the
//! span of the pulled-back ambient generators.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{killing_residual, PulledBackField};
use crate::charts::{static_metric, Chart, ChartKind};
use crate::closed_forms::printed_killing_table_row;
use crate::diff::StepPolicy;
use crate::error::{GeomError, Result};
use crate::linalg;
use crate::tensor::{FieldFn, StaticDeSitter, VectorField};

pub const TABLE_ROWS: usize = 10;

/// Row `row` (1-based) of the table read as covector components and raised
/// with the static metric.
pub fn table1_field(row: usize, radius: f64) -> Result<FieldFn> {
    if !(1..=TABLE_ROWS).contains(&row) {
        return Err(GeomError::RowOutOfRange(row));
    }
    Ok(FieldFn::from_fn(4, move |p| {
        let low = printed_killing_table_row(row, radius, p).expect("row checked");
        let g = static_metric(radius, p);
        DVector::from_fn(4, |a, _| low[a] / g[(a, a)])
    }))
}

/// Outcome of matching one table row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRowAudit {
    pub row: usize,
    /// Least-squares coefficients on the ten generators.
    pub coefficients: Vec<f64>,
    /// `|A c - b| / |b|` over all sample points.
    pub span_residual: f64,
    /// Single generator with the smallest proportional misfit.
    pub best_generator: String,
    pub best_scale: f64,
    pub best_residual: f64,
    /// Largest entry of the Killing residual of the row itself.
    pub killing_residual: f64,
    pub matched: bool,
}

/// Matches every table row against the generators at `points` (static chart).
pub fn audit_table(
    radius: f64,
    points: &[Vec<f64>],
    policy: &StepPolicy,
    tol: f64,
) -> Result<Vec<TableRowAudit>> {
    let chart = Chart::new(ChartKind::Static47Corrected, radius)?;
    let gens = PulledBackField::all(&chart);
    let metric = StaticDeSitter::new(radius);
    let rows_per = 4 * points.len();
    let mut a = DMatrix::zeros(rows_per, gens.len());
    for (j, gen) in gens.iter().enumerate() {
        for (k, p) in points.iter().enumerate() {
            let v = gen.components(p)?;
            a.view_mut((4 * k, j), (4, 1)).copy_from(&v);
        }
    }
    let mut out = Vec::with_capacity(TABLE_ROWS);
    for row in 1..=TABLE_ROWS {
        let field = table1_field(row, radius)?;
        let mut b = DVector::zeros(rows_per);
        let mut kres: f64 = 0.0;
        for (k, p) in points.iter().enumerate() {
            b.rows_mut(4 * k, 4).copy_from(&field.components(p)?);
            kres = kres.max(killing_residual(&metric, &field, p, policy)?.amax());
        }
        let bn = b.norm().max(f64::MIN_POSITIVE);
        let c = linalg::least_squares(&a, &b).ok_or(GeomError::RankDeficientJacobian {
            min_singular: 0.0,
        })?;
        let span_residual = (&a * &c - &b).norm() / bn;
        let (mut best, mut best_scale, mut best_res) = (0, 0.0, f64::INFINITY);
        for j in 0..gens.len() {
            let col = a.column(j);
            let s = col.dot(&b) / col.norm_squared();
            let res = (col * s - &b).norm() / bn;
            if res < best_res {
                (best, best_scale, best_res) = (j, s, res);
            }
        }
        out.push(TableRowAudit {
            row,
            coefficients: c.iter().copied().collect(),
            span_residual,
            best_generator: gens[best].label().to_string(),
            best_scale,
            best_residual: best_res,
            killing_residual: kres,
            matched: span_residual <= tol,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn rows_are_finite_at_reference_point() {
        let p = [0.0, 0.5, FRAC_PI_2, 0.0];
        for row in 1..=10 {
            let v = table1_field(row, 1.0).unwrap().components(&p).unwrap();
            assert!(v.iter().all(|x| x.is_finite()), "row {row}");
        }
        assert!(matches!(table1_field(11, 1.0), Err(GeomError::RowOutOfRange(11))));
    }

    #[test]
    fn row_five_is_rotation_about_the_axis() {
        let v = table1_field(5, 1.0).unwrap().components(&[0.3, 0.5, 1.0, 0.2]).unwrap();
        assert_eq!(v.as_slice(), &[0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn audit_covers_every_row() {
        let mut rng = sampling::rng(11);
        let pts: Vec<_> = (0..8).map(|_| sampling::static_point(&mut rng, 1.0)).collect();
        let audit = audit_table(1.0, &pts, &StepPolicy::default(), 1e-6).unwrap();
        assert_eq!(audit.len(), 10);
        let five = &audit[4];
        assert!(five.matched && five.best_generator == "u12", "{five:?}");
        assert!((five.best_scale.abs() - 1.0).abs() < 1e-9);
        assert!(!audit[3].matched);
    }
}
