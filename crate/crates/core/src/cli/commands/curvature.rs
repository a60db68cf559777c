use std::f64::consts::PI;

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::cli::config::RunConfig;
use crate::cli::report::{Checks, MaxDev, Report};
use crate::error::Result;
use crate::sampling::{self, SampleRng};
use crate::tensor::{self, CurvatureReport, FlatMetric, MetricField, StaticDeSitter};
use crate::warped::WarpedMetric;

use super::{max_abs, sub_seed};

/// Random planes sampled on the static chart.
pub const STATIC_PLANES: usize = 200;
/// Random planes sampled per warped model.
pub const WARPED_PLANES: usize = 50;
/// Planes whose normalized Gram determinant falls below this are redrawn.
pub const MIN_GRAM: f64 = 1e-2;

fn plane(rng: &mut SampleRng, metric: &nalgebra::DMatrix<f64>) -> (DVector<f64>, DVector<f64>) {
    let n = metric.nrows();
    loop {
        let u = sampling::direction(rng, n);
        let v = sampling::direction(rng, n);
        let guu = (u.transpose() * metric * &u)[0];
        let gvv = (v.transpose() * metric * &v)[0];
        let guv = (u.transpose() * metric * &v)[0];
        let scale = u.norm_squared() * v.norm_squared() * metric.amax().powi(2);
        if (guu * gvv - guv * guv).abs() >= MIN_GRAM * scale {
            return (u, v);
        }
    }
}

#[derive(Debug, Default, Serialize)]
struct Sweep {
    k_min: f64,
    k_max: f64,
    lambda_min: f64,
    lambda_max: f64,
}

struct Tally {
    sectional: Vec<f64>,
    lambdas: Vec<f64>,
    ricci_resid: MaxDev,
    bianchi: MaxDev,
    antisym: MaxDev,
    errors: MaxDev,
}

impl Tally {
    fn new() -> Self {
        Tally {
            sectional: Vec::new(),
            lambdas: Vec::new(),
            ricci_resid: MaxDev::new(),
            bianchi: MaxDev::new(),
            antisym: MaxDev::new(),
            errors: MaxDev::new(),
        }
    }

    fn add(&mut self, rep: Result<CurvatureReport>, rng: &mut SampleRng) {
        let rep = match rep {
            Ok(r) => r,
            Err(e) => {
                self.errors.add(Err(e));
                return;
            }
        };
        let (u, v) = plane(rng, &rep.metric);
        match rep.sectional(&u, &v) {
            Ok(k) => self.sectional.push(k),
            Err(e) => self.errors.add(Err(e)),
        }
        let (lambda, resid) = rep.ricci_ratio();
        self.lambdas.push(lambda);
        self.ricci_resid.add(Ok(resid));
        self.bianchi.add(Ok(rep.first_bianchi()));
        self.antisym.add(Ok(rep.antisymmetry_defect()));
    }

    /// Fails with the first error seen, otherwise yields `f(self)`.
    fn measure(&self, f: impl Fn(&Tally) -> f64) -> Result<f64> {
        self.errors.value().map(|_| f(self))
    }

    fn sweep(&self) -> Sweep {
        let lo = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Sweep {
            k_min: lo(&self.sectional),
            k_max: hi(&self.sectional),
            lambda_min: lo(&self.lambdas),
            lambda_max: hi(&self.lambdas),
        }
    }
}

fn spread(v: &[f64]) -> f64 {
    let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if v.is_empty() {
        f64::NAN
    } else {
        hi - lo
    }
}

fn warped_point(rng: &mut SampleRng, k: f64) -> Vec<f64> {
    let r = if k > 0.0 {
        rng.random_range(0.2..PI / k.sqrt() - 0.2)
    } else {
        rng.random_range(0.2..3.0)
    };
    vec![
        r,
        rng.random_range(0.3..PI - 0.3),
        rng.random_range(0.3..PI - 0.3),
        rng.random_range(0.0..2.0 * PI),
    ]
}

pub fn cmd_curvature(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    let r = cfg.radius();
    let pol = cfg.policy();
    let tol2 = cfg.tolerance.second_derivative;
    let mut checks = Checks::new("curvature");

    let g = StaticDeSitter::new(r);
    let mut rng = sampling::rng(cfg.general.seed);
    let points: Vec<Vec<f64>> = (0..STATIC_PLANES)
        .map(|_| sampling::static_point(&mut rng, r))
        .collect();
    let mut tally = Tally::new();
    for p in &points {
        tally.add(tensor::riemann(&g, p, &pol), &mut rng);
    }
    let r2 = r * r;
    let scaled: Vec<f64> = tally.sectional.iter().map(|k| k * r2).collect();
    checks.at_most("static.sectional-spread", "Eq(31)", tally.measure(|_| spread(&scaled)), tol2);
    checks.at_most("static.ricci-proportional", "Intro Ricci = Lambda g", tally.measure(|t| t.ricci_resid.value().unwrap_or(f64::NAN)), tol2);
    let lambda_r2: Vec<f64> = tally.lambdas.iter().map(|l| l * r2).collect();
    checks.at_most(
        "static.lambda-magnitude",
        "Intro Lambda = +-3/R^2",
        tally.measure(|_| max_abs(lambda_r2.iter().map(|l| l.abs() - 3.0))),
        1e-3,
    );
    checks.at_most("static.first-bianchi", "Eq(31)", tally.measure(|t| t.bianchi.value().unwrap_or(f64::NAN)), tol2);
    checks.at_most("static.antisymmetry", "Eq(31)", tally.measure(|t| t.antisym.value().unwrap_or(f64::NAN)), tol2);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    checks.data("static_lambda_r2", mean(&lambda_r2));
    checks.data("static_lambda_sign", mean(&lambda_r2).signum());
    checks.data("static_sectional_r2", mean(&scaled));
    checks.data("static_sweep", tally.sweep());

    for (i, k) in [-1.0, 1.0].into_iter().enumerate() {
        let gw = WarpedMetric::new(4, k)?;
        let mut rng = sampling::rng(sub_seed(cfg, 1 + i as u64));
        let mut t = Tally::new();
        for _ in 0..WARPED_PLANES {
            let p = warped_point(&mut rng, k);
            t.add(tensor::riemann(&gw, &p, &pol), &mut rng);
        }
        let tag = if k < 0.0 { "k-1" } else { "k+1" };
        checks.at_most(
            &format!("warped.{tag}.sectional"),
            "Sec1 warped model",
            t.measure(|t| max_abs(t.sectional.iter().map(|s| s - k))),
            tol2,
        );
        checks.at_most(
            &format!("warped.{tag}.ricci"),
            "Sec1 warped model",
            t.measure(|t| max_abs(t.lambdas.iter().map(|l| l - 3.0 * k)).max(t.ricci_resid.value().unwrap_or(f64::NAN))),
            tol2,
        );
        checks.data(&format!("warped_{tag}_sweep"), t.sweep());
    }

    let flat = FlatMetric::minkowski();
    let mut rng = sampling::rng(sub_seed(cfg, 3));
    let mut worst = MaxDev::new();
    for _ in 0..10 {
        let p: Vec<f64> = sampling::direction(&mut rng, flat.dim()).iter().map(|x| 5.0 * x).collect();
        worst.add(tensor::riemann(&flat, &p, &pol).map(|rep| {
            let n = rep.dim();
            let mut m: f64 = 0.0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            m = m.max(rep.riemann(a, b, c, d).abs());
                        }
                    }
                }
            }
            m.max(rep.ricci.amax())
        }));
    }
    checks.at_most("flat.riemann", "Minkowski", worst.value(), 1e-8);
    checks.data("radius", r);
    Ok(checks.finish(cfg))
}
