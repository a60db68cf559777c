//! Warped-product model spaces `g = dr^2 + psi_k(r)^2 dOmega^2` of constant
//! sectional curvature `k`, the closed-form Hessian and Laplacian of the
//! radial distance, the Laplacian comparison check and the Bochner identity.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diff::StepPolicy;
use crate::error::{GeomError, Result};
use crate::linalg;
use crate::tensor::{self, MetricField, ScalarField};

/// Below this radius the closed forms switch to their Taylor series.
pub const SERIES_CUTOFF: f64 = 1e-4;

/// Curvature-`k` warp function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarpFunction {
    pub k: f64,
}

impl WarpFunction {
    pub fn new(k: f64) -> Self {
        WarpFunction { k }
    }

    /// First zero of `psi` beyond the origin, `pi/sqrt k` for `k > 0`.
    pub fn r_max(&self) -> f64 {
        if self.k > 0.0 {
            PI / self.k.sqrt()
        } else {
            f64::INFINITY
        }
    }

    fn check(&self, r: f64) -> Result<()> {
        if !(r >= 0.0) || (self.k > 0.0 && r >= self.r_max()) {
            return Err(GeomError::WarpRange {
                r,
                r_max: self.r_max(),
            });
        }
        Ok(())
    }

    pub fn psi(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(psi_unchecked(self.k, r))
    }

    pub fn dpsi(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        Ok(dpsi_unchecked(self.k, r))
    }

    /// `psi'/psi`, the coefficient of `g - dr (x) dr` in the Hessian of `r`.
    pub fn log_derivative(&self, r: f64) -> Result<f64> {
        self.check(r)?;
        if r == 0.0 {
            return Err(GeomError::Pole(r));
        }
        let k = self.k;
        if r < SERIES_CUTOFF {
            return Ok(1.0 / r - k * r / 3.0 - k * k * r.powi(3) / 45.0);
        }
        Ok(if k > 0.0 {
            let s = k.sqrt();
            s / (s * r).tan()
        } else if k < 0.0 {
            let s = (-k).sqrt();
            s / (s * r).tanh()
        } else {
            1.0 / r
        })
    }
}

fn psi_unchecked(k: f64, r: f64) -> f64 {
    if k > 0.0 {
        let s = k.sqrt();
        (s * r).sin() / s
    } else if k < 0.0 {
        let s = (-k).sqrt();
        (s * r).sinh() / s
    } else {
        r
    }
}

fn dpsi_unchecked(k: f64, r: f64) -> f64 {
    if k > 0.0 {
        (k.sqrt() * r).cos()
    } else if k < 0.0 {
        ((-k).sqrt() * r).cosh()
    } else {
        1.0
    }
}

pub fn psi(k: f64, r: f64) -> Result<f64> {
    WarpFunction::new(k).psi(r)
}

pub fn dpsi(k: f64, r: f64) -> Result<f64> {
    WarpFunction::new(k).dpsi(r)
}

/// `psi'/psi`.
pub fn hessian_r_coeff(k: f64, r: f64) -> Result<f64> {
    WarpFunction::new(k).log_derivative(r)
}

/// `(n - 1) psi'/psi`, the Laplacian of the distance in the model space.
pub fn laplacian_r_closed(k: f64, r: f64, n: usize) -> Result<f64> {
    Ok((n as f64 - 1.0) * hessian_r_coeff(k, r)?)
}

/// `dr^2 + psi_k(r)^2 (dth_1^2 + sin^2 th_1 dth_2^2 + ...)` in `(r, th_1, ..., th_{n-1})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpedMetric {
    n: usize,
    warp: WarpFunction,
    margin: f64,
}

impl WarpedMetric {
    pub fn new(n: usize, k: f64) -> Result<Self> {
        if n < 2 {
            return Err(GeomError::DimensionMismatch {
                expected: 2,
                found: n,
            });
        }
        Ok(WarpedMetric {
            n,
            warp: WarpFunction::new(k),
            margin: 1e-6,
        })
    }

    pub fn k(&self) -> f64 {
        self.warp.k
    }

    pub fn warp(&self) -> WarpFunction {
        self.warp
    }

    /// A point at radius `r` with fixed generic angles away from the poles.
    pub fn point_at(&self, r: f64) -> Vec<f64> {
        let mut p = vec![r];
        for i in 1..self.n {
            if i + 1 == self.n && self.n > 2 {
                p.push(0.4);
            } else {
                p.push(1.1 + 0.1 * i as f64);
            }
        }
        p
    }
}

impl MetricField for WarpedMetric {
    fn dim(&self) -> usize {
        self.n
    }

    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        let psi = psi_unchecked(self.warp.k, p[0]);
        let mut d = vec![1.0; self.n];
        let mut sphere = 1.0;
        for i in 1..self.n {
            d[i] = psi * psi * sphere;
            sphere *= p[i].sin().powi(2);
        }
        DMatrix::from_diagonal(&DVector::from_vec(d))
    }

    fn in_domain(&self, p: &[f64]) -> bool {
        let d = self.margin;
        p.len() == self.n
            && p.iter().all(|x| x.is_finite())
            && p[0] > d
            && p[0] < self.warp.r_max() - d
            && p[1..self.n - 1].iter().all(|&th| th > d && th < PI - d)
    }

    fn signature(&self) -> Option<(usize, usize)> {
        Some((self.n, 0))
    }

    fn label(&self) -> String {
        format!("warped(n={}, k={})", self.n, self.warp.k)
    }

    fn derivatives(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let n = self.n;
        let psi = psi_unchecked(self.warp.k, p[0]);
        let dpsi = dpsi_unchecked(self.warp.k, p[0]);
        let mut d = vec![DMatrix::zeros(n, n); n];
        let mut sphere = 1.0;
        for i in 1..n {
            d[0][(i, i)] = 2.0 * psi * dpsi * sphere;
            for j in 1..i {
                let (s, c) = p[j].sin_cos();
                d[j][(i, i)] = 2.0 * psi * psi * sphere * c / s;
            }
            sphere *= p[i].sin().powi(2);
        }
        Some(d)
    }
}

/// The radial distance function with its exact gradient.
pub fn distance_function(n: usize) -> ScalarField {
    ScalarField::coordinate(n, 0)
}

/// Hessian, Laplacian and Ricci data of the distance function at one radius.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub r: f64,
    pub point: Vec<f64>,
    pub metric: DMatrix<f64>,
    pub hessian: DMatrix<f64>,
    pub laplacian: f64,
    /// `|Hr|^2`.
    pub hessian_norm_sq: f64,
}

pub fn radial_profile(g: &WarpedMetric, r: f64, policy: &StepPolicy) -> Result<RadialProfile> {
    let point = g.point_at(r);
    let metric = tensor::metric_at(g, &point)?;
    let hessian = tensor::hessian_scalar(g, &distance_function(g.n), &point, policy)?;
    let ginv = tensor::inverse_metric(g, &point)?.inverse;
    let laplacian = ginv.component_mul(&hessian).sum();
    let hessian_norm_sq = tensor::norm_squared_2tensor(&ginv, &hessian);
    Ok(RadialProfile {
        r,
        point,
        metric,
        hessian,
        laplacian,
        hessian_norm_sq,
    })
}

/// `max |Hr - (psi'/psi)(g - dr (x) dr)|`.
pub fn hessian_identity_defect(g: &WarpedMetric, prof: &RadialProfile) -> Result<f64> {
    let coeff = g.warp.log_derivative(prof.r)?;
    let mut model = prof.metric.clone() * coeff;
    model[(0, 0)] -= coeff;
    Ok(linalg::max_abs_diff(&prof.hessian, &model))
}

/// Radial grid specification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::linear(0.1, 5.0, 50)
    }
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            min,
            max,
            count,
            spacing: Spacing::Linear,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min.is_finite()
            && self.max.is_finite()
            && self.min < self.max
            && self.count >= 2
            && (self.spacing == Spacing::Linear || self.min > 0.0);
        if ok {
            Ok(())
        } else {
            Err(GeomError::ConfigInvalid(format!("bad grid {self:?}")))
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let m = (self.count.max(2) - 1) as f64;
        (0..self.count)
            .map(|i| {
                let s = i as f64 / m;
                match self.spacing {
                    Spacing::Linear => self.min + s * (self.max - self.min),
                    Spacing::Log => (self.min.ln() + s * (self.max.ln() - self.min.ln())).exp(),
                }
            })
            .collect()
    }
}

/// One grid point of the comparison check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LctRow {
    pub r: f64,
    pub numeric: f64,
    pub model: f64,
    /// `model - numeric`; non-negative when the comparison holds.
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LctReport {
    pub k_bound: f64,
    pub k_test: f64,
    pub n: usize,
    /// Smallest eigenvalue of `Ric - (n-1) k_bound g` relative to `g` over the grid.
    pub hypothesis_min: f64,
    pub hypothesis_holds: bool,
    pub rows: Vec<LctRow>,
    /// `max |numeric - model|`.
    pub max_gap: f64,
    /// Smallest `model - numeric`.
    pub min_margin: f64,
}

impl LctReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn equality_within(&self, tol: f64) -> bool {
        self.max_gap <= tol
    }
}

/// Tolerance on the Ricci lower-bound hypothesis.
pub const HYPOTHESIS_TOL: f64 = 1e-6;
/// Slack on the comparison inequality itself, covering finite-difference error.
pub const COMPARISON_SLACK: f64 = 1e-8;

/// Compares the Laplacian of the distance on `g_test` with the model value
/// for curvature `k_bound` on every grid radius. A violated hypothesis is
/// recorded in the report, not raised.
pub fn lct_check(
    k_bound: f64,
    g_test: &WarpedMetric,
    r_grid: &[f64],
    policy: &StepPolicy,
) -> Result<LctReport> {
    let n = g_test.n;
    let nf = n as f64 - 1.0;
    let mut rows = Vec::with_capacity(r_grid.len());
    let mut hyp_min = f64::INFINITY;
    for &r in r_grid {
        let prof = radial_profile(g_test, r, policy)?;
        let curv = tensor::riemann(g_test, &prof.point, policy)?;
        let shifted = &curv.ricci - &prof.metric * (nf * k_bound);
        let ev = linalg::min_relative_eigenvalue(&shifted, &prof.metric).ok_or_else(|| {
            GeomError::DegenerateMetric {
                point: prof.point.clone(),
                det: prof.metric.determinant(),
            }
        })?;
        hyp_min = hyp_min.min(ev);
        let model = laplacian_r_closed(k_bound, r, n)?;
        let margin = model - prof.laplacian;
        rows.push(LctRow {
            r,
            numeric: prof.laplacian,
            model,
            margin,
            holds: margin >= -COMPARISON_SLACK,
        });
    }
    let max_gap = rows.iter().map(|r| r.margin.abs()).fold(0.0, f64::max);
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    Ok(LctReport {
        k_bound,
        k_test: g_test.k(),
        n,
        hypothesis_min: hyp_min,
        hypothesis_holds: hyp_min >= -HYPOTHESIS_TOL,
        rows,
        max_gap,
        min_margin,
    })
}

/// Terms of `|Hr|^2 + (Delta r)' + Ric(d_r, d_r)` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BochnerTerms {
    pub r: f64,
    pub hessian_norm_sq: f64,
    pub laplacian_derivative: f64,
    pub ricci_rr: f64,
    pub residual: f64,
}

/// Evaluates the Bochner identity along the distance function; `(Delta r)'`
/// is a central difference of the numeric Laplacian with step `1e-4 max(1, r)`.
pub fn bochner_terms(g: &WarpedMetric, r: f64, policy: &StepPolicy) -> Result<BochnerTerms> {
    let prof = radial_profile(g, r, policy)?;
    let h = 1e-4 * r.abs().max(1.0);
    let lap = |rr: f64| radial_profile(g, rr, policy).map(|p| p.laplacian);
    let laplacian_derivative = (lap(r + h)? - lap(r - h)?) / (2.0 * h);
    let curv = tensor::riemann(g, &prof.point, policy)?;
    let ricci_rr = curv.ricci[(0, 0)];
    let residual = prof.hessian_norm_sq + laplacian_derivative + ricci_rr;
    Ok(BochnerTerms {
        r,
        hessian_norm_sq: prof.hessian_norm_sq,
        laplacian_derivative,
        ricci_rr,
        residual,
    })
}

pub fn bochner_residual(g: &WarpedMetric, r: f64, policy: &StepPolicy) -> Result<f64> {
    Ok(bochner_terms(g, r, policy)?.residual.abs())
}

/// `max |phi' + phi^2/(n-1) + k(n-1)|` over `grid` for a trial `r -> (phi, phi')`.
pub fn ode_residual(trial: impl Fn(f64) -> (f64, f64), k: f64, n: usize, grid: &[f64]) -> f64 {
    let nf = n as f64 - 1.0;
    grid.iter()
        .map(|&r| {
            let (phi, dphi) = trial(r);
            (dphi + phi * phi / nf + k * nf).abs()
        })
        .fold(0.0, f64::max)
}

/// The model solution `phi = (n-1) sqrt|k| coth(sqrt(-k) r)` and its derivative, `k < 0`.
pub fn comparison_solution(k: f64, n: usize, r: f64) -> (f64, f64) {
    let nf = n as f64 - 1.0;
    let s = (-k).sqrt();
    let coth = 1.0 / (s * r).tanh();
    let csch2 = 1.0 / (s * r).sinh().powi(2);
    (nf * s * coth, -nf * s * s * csch2)
}

/// ODE witness residual of [`comparison_solution`]; requires `k < 0`.
pub fn comparison_ode_witness(k: f64, n: usize, grid: &[f64]) -> Result<f64> {
    if !(k < 0.0) || n < 2 || grid.iter().any(|&r| !(r > 0.0)) {
        return Err(GeomError::ConfigInvalid(format!(
            "ODE witness needs k < 0, n >= 2 and a positive grid (k={k}, n={n})"
        )));
    }
    Ok(ode_residual(|r| comparison_solution(k, n, r), k, n, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pol() -> StepPolicy {
        StepPolicy::default()
    }

    #[test]
    fn warp_examples() {
        assert_eq!(psi(0.0, 2.5).unwrap(), 2.5);
        assert!((psi(-1.0, 2.0).unwrap() - 3.626860407847019).abs() < 1e-12);
        assert!((psi(1.0, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!(dpsi(1.0, FRAC_PI_2).unwrap().abs() < 1e-15);
        assert!(matches!(psi(1.0, 3.2), Err(GeomError::WarpRange { .. })));
        assert!(psi(-1.0, -0.1).is_err());
    }

    #[test]
    fn warp_continuous_in_k() {
        for r in [0.1, 1.0, 3.0] {
            for k in [1e-8, -1e-8] {
                assert!((psi(k, r).unwrap() - r).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn laplacian_examples() {
        assert!((laplacian_r_closed(0.0, 2.0, 4).unwrap() - 1.5).abs() < 1e-15);
        assert!((laplacian_r_closed(-1.0, 40.0, 4).unwrap() - 3.0).abs() < 1e-12);
        assert!(laplacian_r_closed(1.0, FRAC_PI_2, 4).unwrap().abs() < 1e-15);
        assert!(matches!(hessian_r_coeff(-1.0, 0.0), Err(GeomError::Pole(_))));
    }

    #[test]
    fn series_matches_closed_form_at_cutoff() {
        for k in [-2.0, -1.0, 0.5, 1.0] {
            let r = SERIES_CUTOFF;
            let below = hessian_r_coeff(k, r * (1.0 - 1e-9)).unwrap();
            let above = hessian_r_coeff(k, r * (1.0 + 1e-9)).unwrap();
            assert!(((below - above) / above).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn numeric_laplacian_matches_model() {
        let g = WarpedMetric::new(4, -1.0).unwrap();
        for r in [0.1, 1.0, 5.0] {
            let prof = radial_profile(&g, r, &pol()).unwrap();
            assert!((prof.laplacian - 3.0 / r.tanh()).abs() < 1e-6, "r={r}");
            assert!(prof.hessian[(0, 0)].abs() < 1e-6);
            assert!(hessian_identity_defect(&g, &prof).unwrap() < 1e-4);
        }
    }

    #[test]
    fn eigenvalue_bound_is_tight_in_model_space() {
        for k in [-1.0, 0.0, 1.0] {
            let g = WarpedMetric::new(4, k).unwrap();
            let prof = radial_profile(&g, 0.9, &pol()).unwrap();
            let lhs = prof.laplacian.powi(2) / 3.0;
            assert!(lhs <= prof.hessian_norm_sq + 1e-6);
            assert!((lhs - prof.hessian_norm_sq).abs() < 1e-6);
        }
    }

    #[test]
    fn radial_sectional_curvature() {
        for k in [-1.0, 1.0] {
            let g = WarpedMetric::new(4, k).unwrap();
            let p = g.point_at(0.8);
            let u = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
            let v = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
            let kk = tensor::sectional_curvature(&g, &p, &u, &v, &pol()).unwrap();
            assert!((kk - k).abs() < 1e-4, "k={k}: {kk}");
        }
    }

    #[test]
    fn lct_equality_and_inequality() {
        let grid = GridSpec::linear(0.1, 5.0, 6).points();
        let rep = lct_check(-1.0, &WarpedMetric::new(4, -1.0).unwrap(), &grid, &pol()).unwrap();
        assert!(rep.hypothesis_holds && rep.all_hold() && rep.equality_within(1e-4));

        let grid = GridSpec::linear(0.05, PI - 0.1, 6).points();
        let rep = lct_check(-1.0, &WarpedMetric::new(4, 1.0).unwrap(), &grid, &pol()).unwrap();
        assert!(rep.hypothesis_holds && rep.min_margin > 0.0, "{rep:?}");

        let rep = lct_check(1.0, &WarpedMetric::new(4, -1.0).unwrap(), &[1.0], &pol()).unwrap();
        assert!(!rep.hypothesis_holds);
    }

    #[test]
    fn bochner_all_signs() {
        for (k, r) in [(-1.0, 1.0), (0.0, 2.0), (1.0, PI / 4.0)] {
            let g = WarpedMetric::new(4, k).unwrap();
            let res = bochner_residual(&g, r, &pol()).unwrap();
            assert!(res < 1e-3, "k={k}: {res}");
        }
    }

    #[test]
    fn ode_witness() {
        let grid = GridSpec::linear(0.1, 5.0, 50).points();
        assert!(comparison_ode_witness(-1.0, 4, &grid).unwrap() < 1e-10);
        assert!(comparison_ode_witness(-4.0, 2, &grid).unwrap() < 1e-10);
        assert!(ode_residual(|r| (r, 1.0), -1.0, 4, &[1.0]) >= 1.0);
        assert!(comparison_ode_witness(1.0, 4, &grid).is_err());
    }

    #[test]
    fn exact_derivatives_match_differences() {
        let pol = pol().with_richardson(true);
        for (n, k) in [(2, 1.0), (4, -1.0), (5, 0.5)] {
            let g = WarpedMetric::new(n, k).unwrap();
            let p = g.point_at(0.9);
            let exact = g.derivatives(&p).unwrap();
            let fd = tensor::metric_derivatives(&g, &p, &pol).unwrap();
            for (a, b) in exact.iter().zip(&fd) {
                assert!((a - b).amax() < 1e-8, "n={n}, k={k}");
            }
        }
    }

    #[test]
    fn log_grid() {
        let g = GridSpec {
            min: 0.1,
            max: 10.0,
            count: 3,
            spacing: Spacing::Log,
        };
        let pts = g.points();
        assert!((pts[1] - 1.0).abs() < 1e-12);
        assert!(GridSpec::linear(1.0, 0.5, 3).validate().is_err());
    }
}
