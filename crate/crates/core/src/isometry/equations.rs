//! Component form of Killing's equation, generated from the connection, and
//! a coefficient-level comparison with the published list for the static frame.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::closed_forms::{printed_killing_lhs, PRINTED_KILLING_EQUATIONS};
use crate::diff::StepPolicy;
use crate::error::Result;
use crate::tensor::{self, MetricField, VectorField};

/// `sum D[c][d] d_c u_d + sum w[c] u_c = 0` for the index pair `(a, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KillingEquation {
    pub pair: (usize, usize),
    pub derivative: DMatrix<f64>,
    pub value: Vec<f64>,
}

impl KillingEquation {
    pub fn evaluate(&self, u: &[f64], du: &DMatrix<f64>) -> f64 {
        let d: f64 = self.derivative.component_mul(du).sum();
        d + self.value.iter().zip(u).map(|(w, x)| w * x).sum::<f64>()
    }
}

/// The `n(n+1)/2` equations `d_a u_b + d_b u_a - 2 Gamma^c_ab u_c = 0` at `p`.
pub fn killing_equations(g: &dyn MetricField, p: &[f64], policy: &StepPolicy) -> Result<Vec<KillingEquation>> {
    let gamma = tensor::connection(g, p, policy)?;
    let n = g.dim();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            let mut d = DMatrix::zeros(n, n);
            d[(a, b)] += 1.0;
            d[(b, a)] += 1.0;
            let value = (0..n).map(|c| -2.0 * gamma.get(c, a, b)).collect();
            out.push(KillingEquation {
                pair: (a, b),
                derivative: d,
                value,
            });
        }
    }
    Ok(out)
}

/// Lowered components `u_b` and `du[(a, b)] = d_a u_b` of a vector field.
pub fn lowered_jet(
    g: &dyn MetricField,
    u: &dyn VectorField,
    p: &[f64],
    policy: &StepPolicy,
) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let m = tensor::metric_at(g, p)?;
    let dg = match g.derivatives(p) {
        Some(d) => d,
        None => tensor::metric_derivatives(g, p, policy)?,
    };
    let up = u.components(p)?;
    let dup = tensor::field_partials(u, p, policy)?;
    let n = g.dim();
    let low = (&m * &up).iter().copied().collect();
    let dlow = DMatrix::from_fn(n, n, |a, b| (dg[a].row(b) * &up)[0] + (m.row(b) * dup.column(a))[0]);
    Ok((low, dlow))
}

/// How one published equation compares with its generated counterpart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrintedEquationDiff {
    pub label: String,
    pub pair: (usize, usize),
    /// Best multiple of the generated equation.
    pub scale: f64,
    /// Largest coefficient gap after scaling, over the sample points.
    pub coefficient_gap: f64,
    pub matches: bool,
}

fn printed_coefficients(radius: f64, p: &[f64], i: usize) -> (DMatrix<f64>, Vec<f64>) {
    let zero_u = [0.0; 4];
    let zero_du = [[0.0; 4]; 4];
    let value = (0..4)
        .map(|c| {
            let mut u = zero_u;
            u[c] = 1.0;
            printed_killing_lhs(radius, p, &u, &zero_du)[i]
        })
        .collect();
    let derivative = DMatrix::from_fn(4, 4, |a, b| {
        let mut du = zero_du;
        du[a][b] = 1.0;
        printed_killing_lhs(radius, p, &zero_u, &du)[i]
    });
    (derivative, value)
}

/// Compares each published static-frame equation with the generated one for
/// the same index pair. The caller supplies the static metric of radius `radius`.
pub fn compare_printed_equations(
    g: &dyn MetricField,
    radius: f64,
    points: &[Vec<f64>],
    policy: &StepPolicy,
    tol: f64,
) -> Result<Vec<PrintedEquationDiff>> {
    let mut gaps = vec![0.0f64; PRINTED_KILLING_EQUATIONS.len()];
    let mut scales = vec![0.0; PRINTED_KILLING_EQUATIONS.len()];
    for p in points {
        let generated = killing_equations(g, p, policy)?;
        for (i, eq) in PRINTED_KILLING_EQUATIONS.iter().enumerate() {
            let gen = generated
                .iter()
                .find(|e| e.pair == eq.pair)
                .expect("every pair is generated");
            let (pd, pv) = printed_coefficients(radius, p, i);
            let scale = pd.dot(&gen.derivative) / gen.derivative.norm_squared();
            let dgap = (&pd - &gen.derivative * scale).amax();
            let vgap = pv
                .iter()
                .zip(&gen.value)
                .map(|(x, y)| (x - scale * y).abs())
                .fold(0.0, f64::max);
            gaps[i] = gaps[i].max(dgap.max(vgap));
            scales[i] = scale;
        }
    }
    Ok(PRINTED_KILLING_EQUATIONS
        .iter()
        .enumerate()
        .map(|(i, eq)| PrintedEquationDiff {
            label: eq.label.to_string(),
            pair: eq.pair,
            scale: scales[i],
            coefficient_gap: gaps[i],
            matches: gaps[i] <= tol,
        })
        .collect())
}

/// Index pairs generated here but absent from the published list.
pub fn missing_printed_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            if !PRINTED_KILLING_EQUATIONS.iter().any(|e| e.pair == (a, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{Chart, ChartKind};
    use crate::isometry::PulledBackField;
    use crate::sampling;
    use crate::tensor::StaticDeSitter;

    #[test]
    fn generated_equations_annihilate_generators() {
        let g = StaticDeSitter::new(1.0);
        let chart = Chart::new(ChartKind::Static47Corrected, 1.0).unwrap();
        let pol = StepPolicy::default();
        let p = [0.1, 0.4, 1.3, 0.7];
        let eqs = killing_equations(&g, &p, &pol).unwrap();
        assert_eq!(eqs.len(), 10);
        for f in PulledBackField::all(&chart) {
            let (u, du) = lowered_jet(&g, &f, &p, &pol).unwrap();
            for eq in &eqs {
                assert!(eq.evaluate(&u, &du).abs() < 1e-6, "{} {:?}", f.label(), eq.pair);
            }
        }
    }

    #[test]
    fn printed_list_diff() {
        let g = StaticDeSitter::new(1.0);
        let mut rng = sampling::rng(5);
        let pts: Vec<_> = (0..5).map(|_| sampling::static_point(&mut rng, 1.0)).collect();
        let diffs = compare_printed_equations(&g, 1.0, &pts, &StepPolicy::default(), 1e-6).unwrap();
        let ok: Vec<_> = diffs.iter().filter(|d| d.matches).map(|d| d.pair).collect();
        assert_eq!(ok, vec![(2, 2), (1, 2), (1, 3), (0, 3), (0, 2), (0, 0)]);
        assert_eq!(missing_printed_pairs(4), vec![(2, 3), (3, 3)]);
    }
}
