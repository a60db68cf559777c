//! Coordinate charts on the de Sitter hyperboloid, its Wick-rotated sphere and
//! the reduced two-dimensional models, with embedding Jacobians and induced
//! (pullback) metrics.
//!
//! Every chart carries an analytic Jacobian so that its finite-difference
//! Jacobian always has an independent partner to be checked against.
//!
//! Metric conventions: the reduced and static charts are read in the
//! "timelike positive" convention `(+, -, -, -)`, which is the negative of
//! the ambient `(-, +, +, +, +)` pullback; the polar and projective charts
//! use the ambient signs unchanged. [`Chart::metric_sign`] records which.

pub mod beltrami;
pub mod robertson_walker;

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::ambient::{AmbientPoint, Quadric};
use crate::diff::{self, StepPolicy};
use crate::error::{GeomError, Result};

pub use beltrami::{beltrami_lift, beltrami_project, MinkowskiPoint};
pub use robertson_walker::{robertson_walker_metric, ExpansionProfile};

/// Default relative domain margin: `delta = 1e-6 * R` for lengths, `1e-6` for angles.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// The registered parametrizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKind {
    /// Reduced model, `(t, chi)`, nowhere-singular pseudospherical angles.
    Schrodinger40,
    /// Reduced model, `(t, chi)` with `sin chi = xi1 / R`.
    Schrodinger43,
    /// Static frame `(t, rho, theta, phi)` exactly as printed; misses the quadric.
    Static47Printed,
    /// Static frame with `sinh`/`cosh` exchanged between `xi0` and `xi4`.
    Static47Corrected,
    /// Upper hemisphere of the 4-sphere, `(r, zeta, theta, phi)`.
    SpherePolar,
    /// Outer region `r > R` of the 4-hyperboloid, `(r, zeta, theta, phi)`.
    HyperboloidPolar,
    /// Projective coordinates `x^mu` on the lower half `xi4 < 0`.
    Beltrami,
}

impl ChartKind {
    pub const ALL: [ChartKind; 7] = [
        ChartKind::Schrodinger40,
        ChartKind::Schrodinger43,
        ChartKind::Static47Printed,
        ChartKind::Static47Corrected,
        ChartKind::SpherePolar,
        ChartKind::HyperboloidPolar,
        ChartKind::Beltrami,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ChartKind::Schrodinger40 => "schrodinger-40",
            ChartKind::Schrodinger43 => "schrodinger-43",
            ChartKind::Static47Printed => "static-47-printed",
            ChartKind::Static47Corrected => "static-47-corrected",
            ChartKind::SpherePolar => "sphere-polar",
            ChartKind::HyperboloidPolar => "hyperboloid-polar",
            ChartKind::Beltrami => "beltrami",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ChartKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| GeomError::UnknownChart(name.to_string()))
    }

    /// Charts whose embedding is asserted to land on the target quadric.
    pub fn lands_on_quadric(self) -> bool {
        self != ChartKind::Static47Printed
    }
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A chart of a given radius; immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    kind: ChartKind,
    radius: f64,
    margin: f64,
    target: Quadric,
}

/// Which Jacobian a pullback should use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JacobianSource {
    Analytic,
    FiniteDifference(StepPolicy),
}

impl Chart {
    pub fn new(kind: ChartKind, radius: f64) -> Result<Self> {
        let target = match kind {
            ChartKind::Schrodinger40 | ChartKind::Schrodinger43 => {
                Quadric::hyperboloid(3, radius)?
            }
            ChartKind::SpherePolar => Quadric::sphere(5, radius)?,
            _ => Quadric::hyperboloid(5, radius)?,
        };
        Ok(Chart {
            kind,
            radius,
            margin: DEFAULT_MARGIN,
            target,
        })
    }

    pub fn by_name(name: &str, radius: f64) -> Result<Self> {
        Chart::new(ChartKind::from_name(name)?, radius)
    }

    /// Every registered chart at radius `radius`.
    pub fn registry(radius: f64) -> Result<Vec<Chart>> {
        ChartKind::ALL
            .into_iter()
            .map(|k| Chart::new(k, radius))
            .collect()
    }

    /// Replace the relative domain margin.
    pub fn with_margin(mut self, margin: f64) -> Self {
        self.margin = margin;
        self
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn target(&self) -> &Quadric {
        &self.target
    }

    /// Number of chart coordinates.
    pub fn dim(&self) -> usize {
        match self.kind {
            ChartKind::Schrodinger40 | ChartKind::Schrodinger43 => 2,
            _ => 4,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.target.dim()
    }

    pub fn coordinate_labels(&self) -> &'static [&'static str] {
        match self.kind {
            ChartKind::Schrodinger40 | ChartKind::Schrodinger43 => &["t", "chi"],
            ChartKind::Static47Printed | ChartKind::Static47Corrected => {
                &["t", "rho", "theta", "phi"]
            }
            ChartKind::SpherePolar | ChartKind::HyperboloidPolar => &["r", "zeta", "theta", "phi"],
            ChartKind::Beltrami => &["x0", "x1", "x2", "x3"],
        }
    }

    /// Overall sign applied to `J^T eta J`.
    pub fn metric_sign(&self) -> f64 {
        match self.kind {
            ChartKind::Schrodinger40
            | ChartKind::Schrodinger43
            | ChartKind::Static47Printed
            | ChartKind::Static47Corrected => -1.0,
            _ => 1.0,
        }
    }

    /// Open-domain predicate including the configured margin.
    pub fn in_domain(&self, p: &[f64]) -> bool {
        if p.len() != self.dim() || p.iter().any(|x| !x.is_finite()) {
            return false;
        }
        let r = self.radius;
        let d_len = self.margin * r;
        let d_ang = self.margin;
        let open = |x: f64, lo: f64, hi: f64| x > lo && x < hi;
        match self.kind {
            ChartKind::Schrodinger40 => true,
            ChartKind::Schrodinger43 => open(p[1], -PI / 2.0 + d_ang, PI / 2.0 - d_ang),
            ChartKind::Static47Printed | ChartKind::Static47Corrected => {
                open(p[1], d_len, r - d_len) && open(p[2], d_ang, PI - d_ang)
            }
            ChartKind::SpherePolar => {
                open(p[0], d_len, r - d_len)
                    && open(p[1], d_ang, PI - d_ang)
                    && open(p[2], d_ang, PI - d_ang)
            }
            ChartKind::HyperboloidPolar => {
                p[0] > r + d_len && open(p[1], d_ang, PI - d_ang) && open(p[2], d_ang, PI - d_ang)
            }
            ChartKind::Beltrami => {
                let x = MinkowskiPoint([p[0], p[1], p[2], p[3]]);
                // c > 0 keeps off the projective cone; |xi_4| = R / sqrt(c) > margin R keeps off the equator.
                let c = 1.0 + x.interval() / (r * r);
                c > self.margin && c * self.margin * self.margin < 1.0
            }
        }
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        if !self.in_domain(p) {
            return Err(GeomError::OutsideDomain {
                what: self.name().to_string(),
                point: p.to_vec(),
            });
        }
        Ok(())
    }

    /// Embedding formula without the domain check.
    pub fn embed_raw(&self, p: &[f64]) -> Vec<f64> {
        let r = self.radius;
        match self.kind {
            ChartKind::Schrodinger40 => {
                let (t, chi) = (p[0], p[1]);
                let (sh, ch) = ((t / r).sinh(), (t / r).cosh());
                vec![r * sh, r * chi.cos() * ch, r * chi.sin() * ch]
            }
            ChartKind::Schrodinger43 => {
                let (t, chi) = (p[0], p[1]);
                let (sh, ch) = ((t / r).sinh(), (t / r).cosh());
                vec![r * chi.cos() * sh, r * chi.sin(), r * chi.cos() * ch]
            }
            ChartKind::Static47Printed | ChartKind::Static47Corrected => {
                let (t, rho, th, ph) = (p[0], p[1], p[2], p[3]);
                let f = (1.0 - rho * rho / (r * r)).sqrt();
                let (sh, ch) = ((t / r).sinh(), (t / r).cosh());
                let (x0, x4) = if self.kind == ChartKind::Static47Printed {
                    (-r * f * ch, r * f * sh)
                } else {
                    (-r * f * sh, r * f * ch)
                };
                vec![
                    x0,
                    rho * th.sin() * ph.cos(),
                    rho * th.sin() * ph.sin(),
                    rho * th.cos(),
                    x4,
                ]
            }
            ChartKind::SpherePolar | ChartKind::HyperboloidPolar => {
                let rad = p[0];
                let n = polar_direction(p[1], p[2], p[3]);
                let x0 = if self.kind == ChartKind::SpherePolar {
                    (r * r - rad * rad).sqrt()
                } else {
                    (rad * rad - r * r).sqrt()
                };
                vec![x0, rad * n[0], rad * n[1], rad * n[2], rad * n[3]]
            }
            ChartKind::Beltrami => {
                beltrami::lift_raw(&MinkowskiPoint([p[0], p[1], p[2], p[3]]), r).0
            }
        }
    }

    /// Ambient image of a chart point.
    pub fn embed(&self, p: &[f64]) -> Result<AmbientPoint> {
        self.check_point(p)?;
        Ok(AmbientPoint::new(self.embed_raw(p)))
    }

    /// `d xi^A / d u^a` from differentiating the embedding formulas by hand.
    pub fn analytic_jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        let r = self.radius;
        let j = match self.kind {
            ChartKind::Schrodinger40 => {
                let (t, chi) = (p[0], p[1]);
                let (sh, ch) = ((t / r).sinh(), (t / r).cosh());
                let (s, c) = chi.sin_cos();
                DMatrix::from_row_slice(
                    3,
                    2,
                    &[ch, 0.0, c * sh, -r * s * ch, s * sh, r * c * ch],
                )
            }
            ChartKind::Schrodinger43 => {
                let (t, chi) = (p[0], p[1]);
                let (sh, ch) = ((t / r).sinh(), (t / r).cosh());
                let (s, c) = chi.sin_cos();
                DMatrix::from_row_slice(
                    3,
                    2,
                    &[c * ch, -r * s * sh, 0.0, r * c, c * sh, -r * s * ch],
                )
            }
            ChartKind::Static47Printed | ChartKind::Static47Corrected => {
                let (t, rho, th, ph) = (p[0], p[1], p[2], p[3]);
                let f = (1.0 - rho * rho / (r * r)).sqrt();
                let (sh, ch) = ((t / r).sinh(), (t / r).cosh());
                let (st, ct) = th.sin_cos();
                let (sp, cp) = ph.sin_cos();
                let q = rho / (r * f);
                // rows for xi0 and xi4: (d/dt, d/drho)
                let (x0, x4) = if self.kind == ChartKind::Static47Printed {
                    ([-f * sh, q * ch], [f * ch, -q * sh])
                } else {
                    ([-f * ch, q * sh], [f * sh, -q * ch])
                };
                DMatrix::from_row_slice(
                    5,
                    4,
                    &[
                        x0[0], x0[1], 0.0, 0.0,
                        0.0, st * cp, rho * ct * cp, -rho * st * sp,
                        0.0, st * sp, rho * ct * sp, rho * st * cp,
                        0.0, ct, -rho * st, 0.0,
                        x4[0], x4[1], 0.0, 0.0,
                    ],
                )
            }
            ChartKind::SpherePolar | ChartKind::HyperboloidPolar => {
                let (rad, ze, th, ph) = (p[0], p[1], p[2], p[3]);
                let (sz, cz) = ze.sin_cos();
                let (st, ct) = th.sin_cos();
                let (sp, cp) = ph.sin_cos();
                let d0 = if self.kind == ChartKind::SpherePolar {
                    -rad / (r * r - rad * rad).sqrt()
                } else {
                    rad / (rad * rad - r * r).sqrt()
                };
                // axes: xi1 = r sz st sp, xi2 = r sz st cp, xi3 = r sz ct, xi4 = r cz
                DMatrix::from_row_slice(
                    5,
                    4,
                    &[
                        d0, 0.0, 0.0, 0.0,
                        sz * st * sp, rad * cz * st * sp, rad * sz * ct * sp, rad * sz * st * cp,
                        sz * st * cp, rad * cz * st * cp, rad * sz * ct * cp, -rad * sz * st * sp,
                        sz * ct, rad * cz * ct, -rad * sz * st, 0.0,
                        cz, -rad * sz, 0.0, 0.0,
                    ],
                )
            }
            ChartKind::Beltrami => {
                beltrami::lift_jacobian(&MinkowskiPoint([p[0], p[1], p[2], p[3]]), r)
            }
        };
        Ok(j)
    }

    /// Central-difference Jacobian; every stencil point must stay in the domain.
    pub fn jacobian(&self, p: &[f64], policy: &StepPolicy) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        for a in 0..p.len() {
            let h = policy.reach(p[a]);
            for sign in [-1.0, 1.0] {
                let mut q = p.to_vec();
                q[a] += sign * h;
                if !self.in_domain(&q) {
                    return Err(GeomError::StepTooLarge {
                        what: self.name().to_string(),
                        step: h,
                    });
                }
            }
        }
        let f = |q: &[f64]| nalgebra::DVector::from_vec(self.embed_raw(q));
        let cols = diff::gradient(&f, p, policy);
        Ok(DMatrix::from_columns(&cols))
    }

    pub fn jacobian_from(&self, p: &[f64], source: JacobianSource) -> Result<DMatrix<f64>> {
        match source {
            JacobianSource::Analytic => self.analytic_jacobian(p),
            JacobianSource::FiniteDifference(policy) => self.jacobian(p, &policy),
        }
    }

    /// Induced metric `sign * J^T eta J`.
    pub fn pullback_metric(&self, p: &[f64], source: JacobianSource) -> Result<DMatrix<f64>> {
        let j = self.jacobian_from(p, source)?;
        let eta = self.target.signature().matrix();
        let g = j.transpose() * eta * &j * self.metric_sign();
        Ok((&g + g.transpose()) * 0.5)
    }

    /// Closed-form intrinsic metric, registered only where it is known to be
    /// right (each one is pinned to the Jacobian pullback by tests).
    pub fn closed_form_metric(&self, p: &[f64]) -> Option<DMatrix<f64>> {
        if !self.in_domain(p) {
            return None;
        }
        let r = self.radius;
        match self.kind {
            ChartKind::Schrodinger40 => {
                Some(diag(&[1.0, -r * r * (p[0] / r).cosh().powi(2)]))
            }
            ChartKind::Schrodinger43 => Some(diag(&[p[1].cos().powi(2), -r * r])),
            ChartKind::Static47Corrected => Some(static_metric(r, p)),
            ChartKind::SpherePolar | ChartKind::HyperboloidPolar => {
                let (rad, ze, th) = (p[0], p[1], p[2]);
                let a = rad * rad;
                let b = a * ze.sin().powi(2);
                Some(diag(&[1.0 / (1.0 - a / (r * r)), a, b, b * th.sin().powi(2)]))
            }
            ChartKind::Beltrami => Some(beltrami::closed_form_metric(
                &MinkowskiPoint([p[0], p[1], p[2], p[3]]),
                r,
            )),
            ChartKind::Static47Printed => None,
        }
    }

    /// Exact partials `d_c g_ab` of [`Chart::closed_form_metric`].
    pub fn closed_form_derivatives(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        if !self.in_domain(p) {
            return None;
        }
        let r = self.radius;
        let zero = |n: usize| vec![DMatrix::zeros(n, n); n];
        match self.kind {
            ChartKind::Schrodinger40 => {
                let u = p[0] / r;
                let mut d = zero(2);
                d[0][(1, 1)] = -2.0 * r * u.cosh() * u.sinh();
                Some(d)
            }
            ChartKind::Schrodinger43 => {
                let mut d = zero(2);
                d[1][(0, 0)] = -2.0 * p[1].cos() * p[1].sin();
                Some(d)
            }
            ChartKind::Static47Corrected => Some(static_metric_derivatives(r, p)),
            ChartKind::SpherePolar | ChartKind::HyperboloidPolar => {
                let (rad, ze, th) = (p[0], p[1], p[2]);
                let (sz, cz) = ze.sin_cos();
                let (st, ct) = th.sin_cos();
                let w = 1.0 - rad * rad / (r * r);
                let mut d = zero(4);
                d[0][(0, 0)] = 2.0 * rad / (r * r * w * w);
                d[0][(1, 1)] = 2.0 * rad;
                d[0][(2, 2)] = 2.0 * rad * sz * sz;
                d[0][(3, 3)] = 2.0 * rad * sz * sz * st * st;
                d[1][(2, 2)] = 2.0 * rad * rad * sz * cz;
                d[1][(3, 3)] = 2.0 * rad * rad * sz * cz * st * st;
                d[2][(3, 3)] = 2.0 * rad * rad * sz * sz * st * ct;
                Some(d)
            }
            ChartKind::Beltrami => Some(beltrami::closed_form_derivatives(
                &MinkowskiPoint([p[0], p[1], p[2], p[3]]),
                r,
            )),
            ChartKind::Static47Printed => None,
        }
    }

    /// Quadric residual of the embedded point.
    pub fn constraint_residual(&self, p: &[f64]) -> Result<f64> {
        let xi = self.embed(p)?;
        self.target.residual(xi.coords())
    }
}

/// Unit direction on the 3-sphere in the `(xi1, xi2, xi3, xi4)` slots.
fn polar_direction(zeta: f64, theta: f64, phi: f64) -> [f64; 4] {
    let (sz, cz) = zeta.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [sz * st * sp, sz * st * cp, sz * ct, cz]
}

pub(crate) fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
}

/// Exact `d_c g_ab` of [`static_metric`].
pub fn static_metric_derivatives(radius: f64, p: &[f64]) -> Vec<DMatrix<f64>> {
    let (rho, th) = (p[1], p[2]);
    let r2 = radius * radius;
    let f2 = 1.0 - rho * rho / r2;
    let (s, c) = th.sin_cos();
    let mut d = vec![DMatrix::zeros(4, 4); 4];
    d[1][(0, 0)] = -2.0 * rho / r2;
    d[1][(1, 1)] = -2.0 * rho / (r2 * f2 * f2);
    d[1][(2, 2)] = -2.0 * rho;
    d[1][(3, 3)] = -2.0 * rho * s * s;
    d[2][(3, 3)] = -2.0 * rho * rho * s * c;
    d
}

/// Static de Sitter metric in `(t, rho, theta, phi)`:
/// `(1 - rho^2/R^2) dt^2 - (1 - rho^2/R^2)^-1 drho^2 - rho^2 dOmega^2`.
pub fn static_metric(radius: f64, p: &[f64]) -> DMatrix<f64> {
    let (rho, th) = (p[1], p[2]);
    let f2 = 1.0 - rho * rho / (radius * radius);
    let r2 = rho * rho;
    diag(&[f2, -1.0 / f2, -r2, -r2 * th.sin().powi(2)])
}
