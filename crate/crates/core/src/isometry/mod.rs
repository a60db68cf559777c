//! Killing fields: the residual `nabla_a u_b + nabla_b u_a`, the ambient
//! rotation and boost generators, their pullback to chart coordinates and the
//! charges they conserve along geodesics.

pub mod equations;
pub mod table;

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::ambient::Quadric;
use crate::charts::Chart;
use crate::diff::StepPolicy;
use crate::error::{GeomError, Result};
use crate::geodesic::GeodesicState;
use crate::linalg;
use crate::tensor::{self, MetricField, VectorField};

pub use equations::{compare_printed_equations, killing_equations, lowered_jet, KillingEquation};
pub use table::{audit_table, table1_field, TableRowAudit};

/// Smallest admissible singular value of a chart Jacobian.
pub const MIN_SINGULAR: f64 = 1e-8;
/// Largest admissible `|J v - U| / max(1, |U|)` for a tangent field.
pub const TANGENCY_TOL: f64 = 1e-8;

/// Symmetrized covariant derivative of the lowered field, `nabla_a u_b + nabla_b u_a`.
pub fn killing_residual(
    g: &dyn MetricField,
    u: &dyn VectorField,
    p: &[f64],
    policy: &StepPolicy,
) -> Result<DMatrix<f64>> {
    let gamma = tensor::connection(g, p, policy)?;
    let (low, dlow) = equations::lowered_jet(g, u, p, policy)?;
    let n = g.dim();
    Ok(DMatrix::from_fn(n, n, |a, b| {
        let mut v = dlow[(a, b)] + dlow[(b, a)];
        for c in 0..n {
            v -= 2.0 * gamma.get(c, a, b) * low[c];
        }
        v
    }))
}

/// Affine field `U(xi) = M xi + sigma` on the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientGenerator {
    pub matrix: DMatrix<f64>,
    pub translation: DVector<f64>,
    pub label: String,
}

impl AmbientGenerator {
    /// `u_AB = xi_B e_A - xi_A e_B` with `xi_A = eta_AA xi^A`.
    pub fn plane(a: usize, b: usize, q: &Quadric) -> Result<Self> {
        let n = q.dim();
        if a == b {
            return Err(GeomError::IdenticalIndices(a));
        }
        for i in [a, b] {
            if i >= n {
                return Err(GeomError::IndexOutOfRange { index: i, len: n });
            }
        }
        let sig = q.signature();
        let mut m = DMatrix::zeros(n, n);
        m[(a, b)] = sig.sign(b);
        m[(b, a)] = -sig.sign(a);
        Ok(AmbientGenerator {
            matrix: m,
            translation: DVector::zeros(n),
            label: format!("u{a}{b}"),
        })
    }

    pub fn translation(sigma: DVector<f64>) -> Self {
        let n = sigma.len();
        AmbientGenerator {
            matrix: DMatrix::zeros(n, n),
            translation: sigma,
            label: "translation".into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, xi: &[f64]) -> DVector<f64> {
        &self.matrix * DVector::from_column_slice(xi) + &self.translation
    }

    /// `max |eta M + M^T eta|`; zero for an infinitesimal isometry.
    pub fn isometry_defect(&self, q: &Quadric) -> f64 {
        let eta = q.signature().matrix();
        let s = &eta * &self.matrix + self.matrix.transpose() * &eta;
        s.amax()
    }
}

impl fmt::Display for AmbientGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

pub fn ambient_generator(a: usize, b: usize, q: &Quadric) -> Result<AmbientGenerator> {
    AmbientGenerator::plane(a, b, q)
}

/// One generator per unordered coordinate plane, in lexicographic order.
pub fn all_generators(q: &Quadric) -> Vec<AmbientGenerator> {
    let n = q.dim();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            out.push(AmbientGenerator::plane(a, b, q).expect("valid pair"));
        }
    }
    out
}

/// Solves `J v = U(embed(p))` in the least-squares sense.
pub fn pullback_field(chart: &Chart, gen: &AmbientGenerator, p: &[f64]) -> Result<DVector<f64>> {
    let xi = chart.embed(p)?;
    if gen.dim() != xi.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: xi.dim(),
            found: gen.dim(),
        });
    }
    let j = chart.analytic_jacobian(p)?;
    let sv = linalg::singular_values(&j);
    let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smin > MIN_SINGULAR) {
        return Err(GeomError::RankDeficientJacobian { min_singular: smin });
    }
    let target = gen.apply(xi.coords());
    let v = linalg::least_squares(&j, &target).ok_or(GeomError::RankDeficientJacobian {
        min_singular: smin,
    })?;
    let residual = (&j * &v - &target).norm() / target.norm().max(1.0);
    if residual > TANGENCY_TOL {
        return Err(GeomError::NonTangentField { residual });
    }
    Ok(v)
}

/// An ambient generator seen as a chart vector field.
#[derive(Debug, Clone)]
pub struct PulledBackField {
    pub chart: Chart,
    pub generator: AmbientGenerator,
}

impl PulledBackField {
    pub fn new(chart: Chart, generator: AmbientGenerator) -> Self {
        PulledBackField { chart, generator }
    }

    /// All generators of the chart's target quadric, pulled back.
    pub fn all(chart: &Chart) -> Vec<PulledBackField> {
        all_generators(chart.target())
            .into_iter()
            .map(|g| PulledBackField::new(chart.clone(), g))
            .collect()
    }

    pub fn label(&self) -> &str {
        &self.generator.label
    }
}

impl VectorField for PulledBackField {
    fn dim(&self) -> usize {
        self.chart.dim()
    }
    fn components(&self, p: &[f64]) -> Result<DVector<f64>> {
        pullback_field(&self.chart, &self.generator, p)
    }
}

/// `Q = g_ab u^a v^b` at the state's position.
pub fn conserved_charge(g: &dyn MetricField, u: &dyn VectorField, s: &GeodesicState) -> Result<f64> {
    let m = tensor::metric_at(g, &s.x)?;
    let uv = u.components(&s.x)?;
    let v = DVector::from_column_slice(&s.v);
    Ok((uv.transpose() * m * v)[0])
}

/// Rank of the matrix whose rows are the fields' components stacked over `points`.
pub fn sample_rank(fields: &[&dyn VectorField], points: &[Vec<f64>], rel_tol: f64) -> Result<usize> {
    let m = sample_matrix(fields, points)?;
    Ok(linalg::rank(&m, rel_tol))
}

pub fn sample_matrix(fields: &[&dyn VectorField], points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let dim = fields.first().map(|f| f.dim()).unwrap_or(0);
    let mut m = DMatrix::zeros(fields.len(), dim * points.len());
    for (i, f) in fields.iter().enumerate() {
        for (k, p) in points.iter().enumerate() {
            let v = f.components(p)?;
            for a in 0..dim {
                m[(i, k * dim + a)] = v[a];
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::flat_inner;
    use crate::charts::ChartKind;
    use crate::sampling;
    use crate::tensor::{FieldFn, StaticDeSitter};
    use std::f64::consts::FRAC_PI_2;

    fn pol() -> StepPolicy {
        StepPolicy::default()
    }

    #[test]
    fn rotation_generator_example() {
        let q = Quadric::hyperboloid(5, 1.0).unwrap();
        let u = ambient_generator(1, 2, &q).unwrap();
        let v = u.apply(&[0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(v.as_slice(), &[0.0, 0.0, -1.0, 0.0, 0.0]);
        assert!(matches!(ambient_generator(3, 3, &q), Err(GeomError::IdenticalIndices(3))));
        assert_eq!(all_generators(&q).len(), 10);
    }

    #[test]
    fn generators_are_isometries_and_tangent() {
        let q = Quadric::hyperboloid(5, 1.5).unwrap();
        let chart = Chart::new(ChartKind::Static47Corrected, 1.5).unwrap();
        let mut rng = sampling::rng(3);
        for gen in all_generators(&q) {
            assert_eq!(gen.isometry_defect(&q), 0.0);
            for _ in 0..20 {
                let xi = chart.embed(&sampling::static_point(&mut rng, 1.5)).unwrap();
                let u = gen.apply(xi.coords());
                let t = flat_inner(q.signature(), u.as_slice(), xi.coords()).unwrap();
                assert!(t.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn translations_are_not_tangent() {
        let chart = Chart::new(ChartKind::Static47Corrected, 1.0).unwrap();
        let gen = AmbientGenerator::translation(DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0, 0.0]));
        let r = pullback_field(&chart, &gen, &[0.1, 0.5, 1.0, 0.3]);
        assert!(matches!(r, Err(GeomError::NonTangentField { .. })));
    }

    #[test]
    fn boost_pulls_back_to_time_translation() {
        let r = 2.0;
        let chart = Chart::new(ChartKind::Static47Corrected, r).unwrap();
        let gen = ambient_generator(0, 4, chart.target()).unwrap();
        let v = pullback_field(&chart, &gen, &[0.3, 0.7, 1.2, 2.0]).unwrap();
        assert!(v[1].abs() < 1e-12 && v[2].abs() < 1e-12 && v[3].abs() < 1e-12);
        assert!((v[0].abs() - r).abs() < 1e-12);
    }

    #[test]
    fn killing_residual_examples() {
        let g = StaticDeSitter::new(1.0);
        let p = [0.2, 0.5, 1.0, 0.4];
        for axis in [0, 3] {
            let u = FieldFn::coordinate(4, axis);
            assert!(killing_residual(&g, &u, &p, &pol()).unwrap().amax() < 1e-8);
        }
        let dilation = FieldFn::from_fn(4, |p| DVector::from_vec(vec![0.0, p[1], 0.0, 0.0]));
        assert!(killing_residual(&g, &dilation, &p, &pol()).unwrap().amax() > 0.1);
    }

    #[test]
    fn pulled_back_rotation_is_killing() {
        let chart = Chart::new(ChartKind::Static47Corrected, 1.0).unwrap();
        let g = StaticDeSitter::new(1.0);
        let u = PulledBackField::new(chart.clone(), ambient_generator(1, 2, chart.target()).unwrap());
        let res = killing_residual(&g, &u, &[0.0, 0.5, FRAC_PI_2, 0.0], &pol()).unwrap();
        assert!(res.amax() < 1e-6);
    }

    #[test]
    fn charge_of_time_translation() {
        let g = StaticDeSitter::new(1.0);
        let s = GeodesicState::new(vec![0.0, 0.5, FRAC_PI_2, 0.0], vec![1.0, 0.0, 0.0, 0.0]);
        let q = conserved_charge(&g, &FieldFn::coordinate(4, 0), &s).unwrap();
        assert!((q - 0.75).abs() < 1e-15);
    }
}
