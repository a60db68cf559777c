//! Finite-difference tensor calculus on coordinate metric fields.
//!
//! Everything is built from central differences of the metric components:
//! Christoffel symbols from first differences, curvature from differences of
//! the Christoffel symbols. First-derivative objects are accurate to roughly
//! `1e-9`, curvature to roughly `1e-6`, at the default step.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::charts::{static_metric, static_metric_derivatives, Chart, ChartKind, JacobianSource};
use crate::diff::{self, StepPolicy};
use crate::error::{GeomError, Result};
use crate::linalg::{self, Inverse};

/// Metrics with `|det g|` at or below this are treated as degenerate.
pub const DET_FLOOR: f64 = 1e-12;

/// A symmetric nondegenerate bilinear form on chart coordinates.
pub trait MetricField: Send + Sync {
    fn dim(&self) -> usize;
    /// Components `g_ab(p)`; only called on points inside the domain.
    fn components(&self, p: &[f64]) -> DMatrix<f64>;
    fn in_domain(&self, p: &[f64]) -> bool;
    /// Expected `(positive, negative)` eigenvalue counts, when declared.
    fn signature(&self) -> Option<(usize, usize)> {
        None
    }
    fn label(&self) -> String;
    /// Exact partials `d_c g_ab` (entry `c` of the result), when known.
    fn derivatives(&self, _p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        None
    }
}

impl fmt::Debug for dyn MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MetricField({})", self.label())
    }
}

/// Constant diagonal metric.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMetric {
    diagonal: Vec<f64>,
}

impl FlatMetric {
    pub fn new(diagonal: Vec<f64>) -> Self {
        FlatMetric { diagonal }
    }

    pub fn euclidean(n: usize) -> Self {
        FlatMetric::new(vec![1.0; n])
    }

    pub fn minkowski() -> Self {
        FlatMetric::new(vec![-1.0, 1.0, 1.0, 1.0])
    }
}

impl MetricField for FlatMetric {
    fn dim(&self) -> usize {
        self.diagonal.len()
    }
    fn components(&self, _p: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.diagonal))
    }
    fn in_domain(&self, p: &[f64]) -> bool {
        p.iter().all(|x| x.is_finite())
    }
    fn signature(&self) -> Option<(usize, usize)> {
        let pos = self.diagonal.iter().filter(|&&d| d > 0.0).count();
        Some((pos, self.diagonal.len() - pos))
    }
    fn label(&self) -> String {
        format!("flat{:?}", self.diagonal)
    }
    fn derivatives(&self, _p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let n = self.diagonal.len();
        Some(vec![DMatrix::zeros(n, n); n])
    }
}

/// Static de Sitter metric `(t, rho, theta, phi)` in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticDeSitter {
    pub radius: f64,
    /// Relative margin kept from `rho = 0`, `rho = R` and the polar axis.
    pub margin: f64,
}

impl StaticDeSitter {
    pub fn new(radius: f64) -> Self {
        StaticDeSitter {
            radius,
            margin: crate::charts::DEFAULT_MARGIN,
        }
    }

    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }
}

impl MetricField for StaticDeSitter {
    fn dim(&self) -> usize {
        4
    }
    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        static_metric(self.radius, p)
    }
    fn in_domain(&self, p: &[f64]) -> bool {
        let r = self.radius;
        let d = self.margin;
        p.len() == 4
            && p.iter().all(|x| x.is_finite())
            && p[1] > d * r
            && p[1] < r * (1.0 - d)
            && p[2] > d
            && p[2] < std::f64::consts::PI - d
    }
    fn signature(&self) -> Option<(usize, usize)> {
        Some((1, 3))
    }
    fn label(&self) -> String {
        format!("static-de-sitter(R={})", self.radius)
    }
    fn derivatives(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        Some(static_metric_derivatives(self.radius, p))
    }
}

/// Intrinsic metric of a chart: the registered closed form where there is
/// one, the pullback through the analytic Jacobian otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartMetric {
    pub chart: Chart,
}

impl ChartMetric {
    pub fn new(chart: Chart) -> Self {
        ChartMetric { chart }
    }
}

impl MetricField for ChartMetric {
    fn dim(&self) -> usize {
        self.chart.dim()
    }
    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        self.chart.closed_form_metric(p).unwrap_or_else(|| {
            self.chart
                .pullback_metric(p, JacobianSource::Analytic)
                .expect("components are only requested inside the domain")
        })
    }
    fn in_domain(&self, p: &[f64]) -> bool {
        self.chart.in_domain(p)
    }
    fn signature(&self) -> Option<(usize, usize)> {
        match self.chart.kind() {
            ChartKind::Schrodinger40 | ChartKind::Schrodinger43 => Some((1, 1)),
            ChartKind::Static47Corrected => Some((1, 3)),
            ChartKind::SpherePolar => Some((4, 0)),
            ChartKind::HyperboloidPolar | ChartKind::Beltrami => Some((3, 1)),
            ChartKind::Static47Printed => None,
        }
    }
    fn label(&self) -> String {
        format!("pullback:{}(R={})", self.chart.name(), self.chart.radius())
    }
    fn derivatives(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        self.chart.closed_form_derivatives(p)
    }
}

/// Vector field given by chart components, with optional analytic partials.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;
    fn components(&self, p: &[f64]) -> Result<DVector<f64>>;
    /// `J[(a, b)] = d_b Y^a`, when known in closed form.
    fn partials(&self, _p: &[f64]) -> Option<DMatrix<f64>> {
        None
    }
}

type VecFn = dyn Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync;
type MatFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// Closure-backed [`VectorField`].
#[derive(Clone)]
pub struct FieldFn {
    dim: usize,
    eval: Arc<VecFn>,
    partials: Option<Arc<MatFn>>,
}

impl FieldFn {
    pub fn new(
        dim: usize,
        eval: impl Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync + 'static,
    ) -> Self {
        FieldFn {
            dim,
            eval: Arc::new(eval),
            partials: None,
        }
    }

    /// Convenience constructor for infallible component maps.
    pub fn from_fn(dim: usize, eval: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static) -> Self {
        FieldFn::new(dim, move |p| Ok(eval(p)))
    }

    pub fn with_partials(
        mut self,
        partials: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    ) -> Self {
        self.partials = Some(Arc::new(partials));
        self
    }

    /// The coordinate frame field `d_axis`.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        FieldFn::from_fn(dim, move |_| {
            let mut v = DVector::zeros(dim);
            v[axis] = 1.0;
            v
        })
        .with_partials(move |_| DMatrix::zeros(dim, dim))
    }
}

impl fmt::Debug for FieldFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldFn").field("dim", &self.dim).finish()
    }
}

impl VectorField for FieldFn {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components(&self, p: &[f64]) -> Result<DVector<f64>> {
        (self.eval)(p)
    }
    fn partials(&self, p: &[f64]) -> Option<DMatrix<f64>> {
        self.partials.as_ref().map(|f| f(p))
    }
}

/// Scalar field with an optional analytic gradient.
#[derive(Clone)]
pub struct ScalarField {
    value: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    gradient: Option<Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new(value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            value: Arc::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64]) -> DVector<f64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// The coordinate function `u^axis`, exact gradient attached.
    pub fn coordinate(dim: usize, axis: usize) -> Self {
        ScalarField::new(move |p| p[axis]).with_gradient(move |_| {
            let mut g = DVector::zeros(dim);
            g[axis] = 1.0;
            g
        })
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        (self.value)(p)
    }

    pub fn gradient(&self, p: &[f64], policy: &StepPolicy) -> DVector<f64> {
        match &self.gradient {
            Some(g) => g(p),
            None => DVector::from_vec(diff::gradient(&|q: &[f64]| (self.value)(q), p, policy)),
        }
    }
}

fn check_dim(g: &dyn MetricField, p: &[f64]) -> Result<()> {
    if p.len() != g.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: g.dim(),
            found: p.len(),
        });
    }
    Ok(())
}

/// `g_ab(p)` with dimension and domain checks.
pub fn metric_at(g: &dyn MetricField, p: &[f64]) -> Result<DMatrix<f64>> {
    check_dim(g, p)?;
    if !g.in_domain(p) {
        return Err(GeomError::OutsideDomain {
            what: g.label(),
            point: p.to_vec(),
        });
    }
    Ok(g.components(p))
}

pub fn inverse_metric(g: &dyn MetricField, p: &[f64]) -> Result<Inverse> {
    let m = metric_at(g, p)?;
    linalg::invert(&m, DET_FLOOR).ok_or_else(|| GeomError::DegenerateMetric {
        point: p.to_vec(),
        det: m.determinant(),
    })
}

/// Checks symmetry, nondegeneracy and the declared signature at `p`.
pub fn validate_metric(g: &dyn MetricField, p: &[f64]) -> Result<Inverse> {
    let m = metric_at(g, p)?;
    let asym = (&m - m.transpose()).amax();
    if asym > 1e-14 * m.amax().max(1.0) {
        return Err(GeomError::DegenerateMetric {
            point: p.to_vec(),
            det: f64::NAN,
        });
    }
    let inv = inverse_metric(g, p)?;
    if let Some(expected) = g.signature() {
        let found = linalg::inertia(&m);
        if found != expected {
            return Err(GeomError::DegenerateMetric {
                point: p.to_vec(),
                det: inv.determinant,
            });
        }
    }
    Ok(inv)
}

fn check_stencil(g: &dyn MetricField, p: &[f64], policy: &StepPolicy, depth: usize) -> Result<()> {
    for a in 0..p.len() {
        let h = policy.reach(p[a]) * depth as f64;
        for s in [-1.0, 1.0] {
            let mut q = p.to_vec();
            q[a] += s * h;
            if !g.in_domain(&q) {
                return Err(GeomError::StepTooLarge {
                    what: g.label(),
                    step: h,
                });
            }
        }
    }
    Ok(())
}

/// `d_c g_ab` for every `c`.
pub fn metric_derivatives(
    g: &dyn MetricField,
    p: &[f64],
    policy: &StepPolicy,
) -> Result<Vec<DMatrix<f64>>> {
    check_dim(g, p)?;
    check_stencil(g, p, policy, 1)?;
    Ok(diff::gradient(&|q: &[f64]| g.components(q), p, policy))
}

/// Levi-Civita connection coefficients `Gamma^a_{bc}` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(dim: usize) -> Self {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dim + b) * self.dim + c
    }

    /// `Gamma^a_{bc}`.
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[self.idx(a, b, c)]
    }

    /// Sets both `Gamma^a_{bc}` and `Gamma^a_{cb}`.
    pub fn set_sym(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let i = self.idx(a, b, c);
        let j = self.idx(a, c, b);
        self.data[i] = v;
        self.data[j] = v;
    }

    /// `Gamma^a_{bc} x^b y^c`.
    pub fn contract(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |a, _| {
            let mut s = 0.0;
            for b in 0..n {
                for c in 0..n {
                    s += self.get(a, b, c) * x[b] * y[c];
                }
            }
            s
        })
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn assemble_christoffel(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let n = ginv.nrows();
    let mut gamma = Christoffel::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += ginv[(a, d)] * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)]);
                }
                gamma.set_sym(a, b, c, 0.5 * s);
            }
        }
    }
    gamma
}

/// `Gamma^a_{bc} = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc)` from central differences.
pub fn christoffel(g: &dyn MetricField, p: &[f64], policy: &StepPolicy) -> Result<Christoffel> {
    let inv = inverse_metric(g, p)?;
    let dg = metric_derivatives(g, p, policy)?;
    Ok(assemble_christoffel(&inv.inverse, &dg))
}

/// Connection coefficients from exact metric derivatives when the metric
/// provides them, from [`christoffel`] otherwise.
pub fn connection(g: &dyn MetricField, p: &[f64], policy: &StepPolicy) -> Result<Christoffel> {
    check_dim(g, p)?;
    match g.derivatives(p) {
        Some(dg) => {
            let inv = inverse_metric(g, p)?;
            Ok(assemble_christoffel(&inv.inverse, &dg))
        }
        None => christoffel(g, p, policy),
    }
}

/// `nabla_a g_bc`; identically zero for the Levi-Civita connection.
pub fn metric_compatibility(g: &dyn MetricField, p: &[f64], policy: &StepPolicy) -> Result<f64> {
    let m = metric_at(g, p)?;
    let dg = metric_derivatives(g, p, policy)?;
    let gamma = assemble_christoffel(&inverse_metric(g, p)?.inverse, &dg);
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut v = dg[a][(b, c)];
                for d in 0..n {
                    v -= gamma.get(d, a, b) * m[(d, c)] + gamma.get(d, a, c) * m[(b, d)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

pub(crate) fn field_partials(y: &dyn VectorField, p: &[f64], policy: &StepPolicy) -> Result<DMatrix<f64>> {
    if let Some(j) = y.partials(p) {
        return Ok(j);
    }
    y.components(p)?;
    let cols = diff::gradient(
        &|q: &[f64]| y.components(q).unwrap_or_else(|_| DVector::from_element(y.dim(), f64::NAN)),
        p,
        policy,
    );
    let j = DMatrix::from_columns(&cols);
    if j.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::StepTooLarge {
            what: "vector field".into(),
            step: policy.base,
        });
    }
    Ok(j)
}

/// `(D_X Y)^a = X^b d_b Y^a + Gamma^a_{bc} X^b Y^c`.
pub fn covariant_derivative(
    g: &dyn MetricField,
    x: &dyn VectorField,
    y: &dyn VectorField,
    p: &[f64],
    policy: &StepPolicy,
) -> Result<DVector<f64>> {
    let gamma = christoffel(g, p, policy)?;
    let xv = x.components(p)?;
    let yv = y.components(p)?;
    let dy = field_partials(y, p, policy)?;
    Ok(&dy * &xv + gamma.contract(&xv, &yv))
}

/// Riemann and Ricci tensors at a point.
#[derive(Debug, Clone)]
pub struct CurvatureReport {
    pub point: Vec<f64>,
    pub step: StepPolicy,
    pub metric: DMatrix<f64>,
    dim: usize,
    /// `R^a_{bcd}`, row-major in `(a, b, c, d)`.
    riemann: Vec<f64>,
    /// `R_bd = R^a_{bad}`.
    pub ricci: DMatrix<f64>,
}

impl CurvatureReport {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `R^a_{bcd}`.
    pub fn riemann(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let n = self.dim;
        self.riemann[((a * n + b) * n + c) * n + d]
    }

    /// `R_{abcd} = g_ae R^e_{bcd}`.
    pub fn riemann_lowered(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        (0..self.dim)
            .map(|e| self.metric[(a, e)] * self.riemann(e, b, c, d))
            .sum()
    }

    /// `Rm(u, v, u, v) / (g(u,u) g(v,v) - g(u,v)^2)`.
    pub fn sectional(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let g = &self.metric;
        let guu = (u.transpose() * g * u)[0];
        let gvv = (v.transpose() * g * v)[0];
        let guv = (u.transpose() * g * v)[0];
        let gram = guu * gvv - guv * guv;
        let scale = u.norm_squared() * v.norm_squared();
        if !(gram.abs() > 1e-8 * scale) {
            return Err(GeomError::DegeneratePlane {
                gram: gram / scale.max(f64::MIN_POSITIVE),
            });
        }
        let n = self.dim;
        let mut num = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        num += self.riemann_lowered(a, b, c, d) * u[a] * v[b] * u[c] * v[d];
                    }
                }
            }
        }
        Ok(num / gram)
    }

    /// `max |R^a_{bcd} + R^a_{cdb} + R^a_{dbc}|`.
    pub fn first_bianchi(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let s = self.riemann(a, b, c, d)
                            + self.riemann(a, c, d, b)
                            + self.riemann(a, d, b, c);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// `max |R^a_{bcd} + R^a_{bdc}|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        worst = worst.max((self.riemann(a, b, c, d) + self.riemann(a, b, d, c)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Least-squares ratio `lambda` in `Ric = lambda g` and the component-wise residual.
    pub fn ricci_ratio(&self) -> (f64, f64) {
        let g = &self.metric;
        let num: f64 = self.ricci.iter().zip(g.iter()).map(|(r, g)| r * g).sum();
        let den: f64 = g.iter().map(|g| g * g).sum();
        let lambda = num / den;
        let resid = (&self.ricci - g * lambda).amax();
        (lambda, resid)
    }
}

/// `R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb} + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}`.
pub fn riemann(g: &dyn MetricField, p: &[f64], policy: &StepPolicy) -> Result<CurvatureReport> {
    check_dim(g, p)?;
    check_stencil(g, p, policy, 2)?;
    let metric = metric_at(g, p)?;
    let n = g.dim();
    let gamma = christoffel(g, p, policy)?;
    // dgamma[c] = d_c Gamma
    let mut dgamma = Vec::with_capacity(n);
    for c in 0..n {
        let h = policy.step_at(p[c]);
        let at = |delta: f64| -> Result<Christoffel> {
            let mut q = p.to_vec();
            q[c] += delta;
            christoffel(g, &q, policy)
        };
        let mut d = {
            let (plus, minus) = (at(h)?, at(-h)?);
            central(&plus, &minus, h)
        };
        if policy.richardson {
            let (plus, minus) = (at(0.5 * h)?, at(-0.5 * h)?);
            let fine = central(&plus, &minus, 0.5 * h);
            for (dv, fv) in d.data.iter_mut().zip(&fine.data) {
                *dv = (4.0 * fv - *dv) / 3.0;
            }
        }
        dgamma.push(d);
    }
    let mut riem = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgamma[c].get(a, d, b) - dgamma[d].get(a, c, b);
                    for e in 0..n {
                        v += gamma.get(a, c, e) * gamma.get(e, d, b)
                            - gamma.get(a, d, e) * gamma.get(e, c, b);
                    }
                    riem[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    let mut ricci = DMatrix::zeros(n, n);
    for b in 0..n {
        for d in 0..n {
            ricci[(b, d)] = (0..n).map(|a| riem[((a * n + b) * n + a) * n + d]).sum();
        }
    }
    Ok(CurvatureReport {
        point: p.to_vec(),
        step: *policy,
        metric,
        dim: n,
        riemann: riem,
        ricci,
    })
}

fn central(plus: &Christoffel, minus: &Christoffel, h: f64) -> Christoffel {
    Christoffel {
        dim: plus.dim,
        data: plus
            .data
            .iter()
            .zip(&minus.data)
            .map(|(a, b)| (a - b) / (2.0 * h))
            .collect(),
    }
}

pub fn ricci(g: &dyn MetricField, p: &[f64], policy: &StepPolicy) -> Result<DMatrix<f64>> {
    Ok(riemann(g, p, policy)?.ricci)
}

pub fn sectional_curvature(
    g: &dyn MetricField,
    p: &[f64],
    u: &DVector<f64>,
    v: &DVector<f64>,
    policy: &StepPolicy,
) -> Result<f64> {
    riemann(g, p, policy)?.sectional(u, v)
}

/// `(Hf)_ab = d_a d_b f - Gamma^c_{ab} d_c f`.
pub fn hessian_scalar(
    g: &dyn MetricField,
    f: &ScalarField,
    p: &[f64],
    policy: &StepPolicy,
) -> Result<DMatrix<f64>> {
    let gamma = christoffel(g, p, policy)?;
    let n = g.dim();
    let grad = f.gradient(p, policy);
    let second = if f.gradient.is_some() {
        DMatrix::from_columns(&diff::gradient(&|q: &[f64]| f.gradient(q, policy), p, policy))
    } else {
        let cols: Vec<DVector<f64>> = diff::gradient(
            &|q: &[f64]| {
                DVector::from_vec(diff::gradient(&|r: &[f64]| f.value(r), q, policy))
            },
            p,
            policy,
        );
        DMatrix::from_columns(&cols)
    };
    let mut h = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut v = 0.5 * (second[(a, b)] + second[(b, a)]);
            for c in 0..n {
                v -= gamma.get(c, a, b) * grad[c];
            }
            h[(a, b)] = v;
        }
    }
    Ok(h)
}

/// `Delta f = g^{ab} (Hf)_ab`.
pub fn laplacian_scalar(
    g: &dyn MetricField,
    f: &ScalarField,
    p: &[f64],
    policy: &StepPolicy,
) -> Result<f64> {
    let h = hessian_scalar(g, f, p, policy)?;
    let ginv = inverse_metric(g, p)?.inverse;
    Ok(ginv.component_mul(&h).sum())
}

/// `|A|^2 = g^{ac} g^{bd} A_ab A_cd` for a symmetric 2-tensor.
pub fn norm_squared_2tensor(ginv: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    let raised = ginv * a * ginv;
    raised.component_mul(a).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pol() -> StepPolicy {
        StepPolicy::default()
    }

    #[test]
    fn exact_derivatives_match_differences() {
        let metrics: Vec<(Box<dyn MetricField>, Vec<f64>)> = vec![
            (Box::new(StaticDeSitter::new(1.5)), vec![0.2, 0.7, 1.1, 0.4]),
            (
                Box::new(ChartMetric::new(Chart::new(ChartKind::Schrodinger40, 2.0).unwrap())),
                vec![0.9, 0.3],
            ),
            (
                Box::new(ChartMetric::new(Chart::new(ChartKind::Static47Corrected, 0.5).unwrap())),
                vec![-0.3, 0.2, 2.0, 5.0],
            ),
            (Box::new(FlatMetric::minkowski()), vec![1.0, 2.0, 3.0, 4.0]),
        ];
        let pol = pol().with_richardson(true);
        for (g, p) in metrics {
            let exact = g.derivatives(&p).unwrap();
            let fd = metric_derivatives(g.as_ref(), &p, &pol).unwrap();
            for (a, b) in exact.iter().zip(&fd) {
                assert!((a - b).amax() < 1e-8, "{}", g.label());
            }
            let c1 = connection(g.as_ref(), &p, &pol).unwrap();
            let c2 = christoffel(g.as_ref(), &p, &pol).unwrap();
            assert!(c1.max_abs_diff(&c2) < 1e-8);
        }
    }

    #[test]
    fn flat_christoffel_vanishes() {
        let g = FlatMetric::minkowski();
        let gam = christoffel(&g, &[0.3, 1.0, -2.0, 5.0], &pol()).unwrap();
        assert!(gam.max_abs_diff(&Christoffel::zeros(4)) == 0.0);
    }

    #[test]
    fn static_christoffel_examples() {
        let g = StaticDeSitter::new(1.0);
        let gam = christoffel(&g, &[0.0, 0.5, 1.1, 0.0], &pol()).unwrap();
        // hand-derived: Gamma^rho_tt = -rho (1 - rho^2)/R^2
        assert!((gam.get(1, 0, 0) + 0.375).abs() < 1e-8);
        assert!((gam.get(2, 1, 2) - 2.0).abs() < 1e-8);
        assert!((gam.get(1, 2, 2) + 0.375).abs() < 1e-8);
        let gam = christoffel(&g, &[0.0, 0.5, FRAC_PI_2, 0.0], &pol()).unwrap();
        assert!(gam.get(2, 3, 3).abs() < 1e-9);
    }

    #[test]
    fn covariant_derivative_of_frames() {
        let g = StaticDeSitter::new(1.0);
        let p = [0.0, 0.5, FRAC_PI_2, 0.0];
        let th = FieldFn::coordinate(4, 2);
        let t = FieldFn::coordinate(4, 0);
        let a_th = covariant_derivative(&g, &th, &th, &p, &pol()).unwrap();
        assert!((a_th[1] + 0.375).abs() < 1e-8);
        let a_t = covariant_derivative(&g, &t, &t, &p, &pol()).unwrap();
        assert!((a_t[1] + 0.375).abs() < 1e-8);
        let flat = FlatMetric::euclidean(3);
        let c = FieldFn::coordinate(3, 1);
        let z = covariant_derivative(&flat, &c, &c, &[1.0, 2.0, 3.0], &pol()).unwrap();
        assert_eq!(z.amax(), 0.0);
    }

    #[test]
    fn numeric_field_partials_match_analytic() {
        let g = FlatMetric::euclidean(2);
        let analytic = FieldFn::from_fn(2, |p| DVector::from_vec(vec![p[0] * p[1], p[1]]))
            .with_partials(|p| DMatrix::from_row_slice(2, 2, &[p[1], p[0], 0.0, 1.0]));
        let numeric = FieldFn::from_fn(2, |p| DVector::from_vec(vec![p[0] * p[1], p[1]]));
        let x = FieldFn::from_fn(2, |_| DVector::from_vec(vec![1.0, 2.0]));
        let p = [0.7, -1.2];
        let a = covariant_derivative(&g, &x, &analytic, &p, &pol()).unwrap();
        let b = covariant_derivative(&g, &x, &numeric, &p, &pol()).unwrap();
        assert!((a - b).amax() < 1e-9);
    }

    #[test]
    fn flat_curvature_vanishes() {
        let g = FlatMetric::minkowski();
        let rep = riemann(&g, &[0.0, 1.0, 2.0, 3.0], &pol()).unwrap();
        assert!(rep.ricci.amax() < 1e-8);
        let u = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        assert!(rep.sectional(&u, &v).unwrap().abs() < 1e-8);
    }

    #[test]
    fn flat_hessian_and_laplacian() {
        let g = FlatMetric::euclidean(3);
        let f = ScalarField::new(|p: &[f64]| p.iter().map(|x| x * x).sum());
        let p = [0.3, -0.2, 1.5];
        let h = hessian_scalar(&g, &f, &p, &StepPolicy::new(1e-4)).unwrap();
        assert!((h - DMatrix::identity(3, 3) * 2.0).amax() < 1e-6);
        let lap = laplacian_scalar(&g, &f, &p, &StepPolicy::new(1e-4)).unwrap();
        assert!((lap - 6.0).abs() < 1e-6);
    }

    #[test]
    fn static_curvature_is_constant() {
        let g = StaticDeSitter::new(1.0);
        let rep = riemann(&g, &[0.1, 0.4, 1.0, 0.3], &pol()).unwrap();
        let (lambda, resid) = rep.ricci_ratio();
        assert!((lambda.abs() - 3.0).abs() < 1e-4, "{lambda}");
        assert!(resid < 1e-4);
        assert!(rep.first_bianchi() < 1e-6);
        assert!(rep.antisymmetry_defect() < 1e-6);
    }

    #[test]
    fn degenerate_plane_rejected() {
        let g = FlatMetric::minkowski();
        let rep = riemann(&g, &[0.0; 4], &pol()).unwrap();
        let u = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(rep.sectional(&u, &v), Err(GeomError::DegeneratePlane { .. })));
        // null plane spanned by a null vector and an orthogonal spacelike one
        let w = DVector::from_vec(vec![0.0, 0.0, 1.0, 0.0]);
        let n = DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(rep.sectional(&n, &w), Err(GeomError::DegeneratePlane { .. })));
    }

    #[test]
    fn errors_propagate() {
        let g = StaticDeSitter::new(1.0);
        assert!(matches!(
            christoffel(&g, &[0.0, 1.5, 1.0, 0.0], &pol()),
            Err(GeomError::OutsideDomain { .. })
        ));
        assert!(matches!(
            christoffel(&g, &[0.0, 1.0 - 2e-6, 1.0, 0.0], &pol()),
            Err(GeomError::StepTooLarge { .. })
        ));
        let degenerate = FlatMetric::new(vec![1.0, 0.0]);
        assert!(matches!(
            christoffel(&degenerate, &[0.0, 0.0], &pol()),
            Err(GeomError::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn chart_metric_matches_closed_form_static() {
        let chart = Chart::new(ChartKind::Static47Corrected, 2.0).unwrap();
        let cm = ChartMetric::new(chart);
        let sm = StaticDeSitter::new(2.0);
        let p = [0.3, 0.9, 1.2, 2.0];
        assert!((metric_at(&cm, &p).unwrap() - metric_at(&sm, &p).unwrap()).amax() < 1e-12);
        validate_metric(&cm, &p).unwrap();
    }
}
