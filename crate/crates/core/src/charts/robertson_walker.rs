//! Robertson-Walker metric in polar coordinates and the two spatial
//! reparametrizations that relate it to embedded 3-spheres.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::diag;
use crate::diff::{self, StepPolicy};
use crate::error::{GeomError, Result};

/// Scale factor `a(t) > 0` and curvature parameter `k` (1/length^2).
#[derive(Clone)]
pub struct ExpansionProfile {
    scale: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub k: f64,
}

impl fmt::Debug for ExpansionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExpansionProfile").field("k", &self.k).finish()
    }
}

impl ExpansionProfile {
    pub fn new(scale: impl Fn(f64) -> f64 + Send + Sync + 'static, k: f64) -> Self {
        ExpansionProfile {
            scale: Arc::new(scale),
            k,
        }
    }

    pub fn constant(a: f64, k: f64) -> Self {
        ExpansionProfile::new(move |_| a, k)
    }

    pub fn scale(&self, t: f64) -> f64 {
        (self.scale)(t)
    }
}

/// `diag(-1, a^2/(1 - k r^2), a^2 r^2, a^2 r^2 sin^2 theta)` in `(t, r, theta, phi)`.
pub fn robertson_walker_metric(prof: &ExpansionProfile, p: &[f64]) -> Result<DMatrix<f64>> {
    if p.len() != 4 {
        return Err(GeomError::DimensionMismatch {
            expected: 4,
            found: p.len(),
        });
    }
    let (t, r, th) = (p[0], p[1], p[2]);
    let a = prof.scale(t);
    let lapse = 1.0 - prof.k * r * r;
    if !(r > 0.0 && lapse > 0.0 && th > 0.0 && th < PI && a > 0.0) {
        return Err(GeomError::OutsideDomain {
            what: "robertson-walker".into(),
            point: p.to_vec(),
        });
    }
    let a2 = a * a;
    Ok(diag(&[
        -1.0,
        a2 / lapse,
        a2 * r * r,
        a2 * r * r * th.sin().powi(2),
    ]))
}

/// Embedding of the constant-`t` slice as a 3-sphere (`k > 0`), flat space
/// (`k = 0`) or hyperboloid (`k < 0`) of curvature radius `a/sqrt|k|`, in
/// coordinates `(r, theta, phi)` with `r = sin(zeta)/sqrt k` (resp. `sinh`).
/// Returns the ambient point and the ambient signs.
fn spatial_slice_embedding(a: f64, k: f64, q: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (r, th, ph) = (q[0], q[1], q[2]);
    let (st, ct) = th.sin_cos();
    let (sp, cp) = ph.sin_cos();
    let dir = [st * sp, st * cp, ct];
    if k > 0.0 {
        let big = a / k.sqrt();
        let zeta = (k.sqrt() * r).asin();
        let (sz, cz) = zeta.sin_cos();
        (
            vec![big * cz, big * sz * dir[0], big * sz * dir[1], big * sz * dir[2]],
            vec![1.0; 4],
        )
    } else if k < 0.0 {
        let big = a / (-k).sqrt();
        let zeta = ((-k).sqrt() * r).asinh();
        let (sz, cz) = (zeta.sinh(), zeta.cosh());
        (
            vec![big * cz, big * sz * dir[0], big * sz * dir[1], big * sz * dir[2]],
            vec![-1.0, 1.0, 1.0, 1.0],
        )
    } else {
        (
            vec![0.0, a * r * dir[0], a * r * dir[1], a * r * dir[2]],
            vec![0.0, 1.0, 1.0, 1.0],
        )
    }
}

/// Spatial block of the metric at time `t` computed two ways: by
/// finite-difference pullback of the embedded slice, and from the closed form.
/// Returns `(pullback, closed_form)`, both 3x3 in `(r, theta, phi)`.
pub fn rw_spatial_pullback(
    prof: &ExpansionProfile,
    t: f64,
    q: &[f64],
    policy: &StepPolicy,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let full = robertson_walker_metric(prof, &[t, q[0], q[1], q[2]])?;
    let closed = full.view((1, 1), (3, 3)).into_owned();
    let a = prof.scale(t);
    let k = prof.k;
    let f = |u: &[f64]| DVector::from_vec(spatial_slice_embedding(a, k, u).0);
    let cols = diff::gradient(&f, q, policy);
    let j = DMatrix::from_columns(&cols);
    let signs = spatial_slice_embedding(a, k, q).1;
    let eta = diag(&signs);
    let g = j.transpose() * eta * &j;
    Ok((g, closed))
}

/// Integrates `d zeta / dr = sin(zeta) / r` with classical RK4 in `s = ln r`
/// (where it reads `d zeta / ds = sin zeta`) from a small radius with a series
/// start, and compares `cos zeta` with `(1 - k r^2)/(1 + k r^2)` along the way.
/// Returns the largest deviation.
pub fn isotropic_angle_check(k: f64, r_end: f64, steps: usize) -> Result<f64> {
    if !(k > 0.0 && r_end > 0.0 && steps > 0) {
        return Err(GeomError::ConfigInvalid(format!(
            "isotropic angle check needs k > 0, r_end > 0, steps > 0 (k={k}, r_end={r_end})"
        )));
    }
    let r0 = 1e-4 * r_end.min(1.0 / k.sqrt());
    let u0 = k.sqrt() * r0;
    let mut z = 2.0 * u0 - 2.0 / 3.0 * u0.powi(3);
    let mut s = r0.ln();
    let ds = (r_end.ln() - s) / steps as f64;
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        let k1 = z.sin();
        let k2 = (z + 0.5 * ds * k1).sin();
        let k3 = (z + 0.5 * ds * k2).sin();
        let k4 = (z + ds * k3).sin();
        z += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += ds;
        let kr2 = k * (2.0 * s).exp();
        worst = worst.max((z.cos() - (1.0 - kr2) / (1.0 + kr2)).abs());
    }
    Ok(worst)
}
