//! Projective (geodesic) coordinates on the lower half `xi4 < 0` of the
//! de Sitter hyperboloid, centred on the point `(0, 0, 0, 0, -R)`.

use nalgebra::DMatrix;

use crate::ambient::AmbientPoint;
use crate::error::{GeomError, Result};

/// Threshold below which `|xi4|` or `1 + sigma^2/R^2` count as zero.
pub const PROJECTION_EPS: f64 = 1e-12;

/// Minkowski coordinates `(x0, x1, x2, x3)` with metric `diag(-1, 1, 1, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkowskiPoint(pub [f64; 4]);

impl MinkowskiPoint {
    /// `sigma^2 = -x0^2 + x1^2 + x2^2 + x3^2`.
    pub fn interval(&self) -> f64 {
        let x = &self.0;
        -x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]
    }

    /// Covector components `x_mu = eta_{mu nu} x^nu`.
    pub fn lowered(&self) -> [f64; 4] {
        let x = &self.0;
        [-x[0], x[1], x[2], x[3]]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// `x^mu = -R xi^mu / xi^4`.
pub fn beltrami_project(p: &AmbientPoint, radius: f64) -> Result<MinkowskiPoint> {
    if p.dim() != 5 {
        return Err(GeomError::DimensionMismatch {
            expected: 5,
            found: p.dim(),
        });
    }
    let xi4 = p[4];
    if xi4.abs() <= PROJECTION_EPS {
        return Err(GeomError::EquatorialSingularity { xi4: xi4.abs() });
    }
    let s = -radius / xi4;
    Ok(MinkowskiPoint([s * p[0], s * p[1], s * p[2], s * p[3]]))
}

pub(crate) fn lift_raw(x: &MinkowskiPoint, radius: f64) -> AmbientPoint {
    let a = 1.0 + x.interval() / (radius * radius);
    let inv = 1.0 / a.sqrt();
    AmbientPoint::new(vec![
        x.0[0] * inv,
        x.0[1] * inv,
        x.0[2] * inv,
        x.0[3] * inv,
        -radius * inv,
    ])
}

/// Inverse of [`beltrami_project`] on the lower branch.
pub fn beltrami_lift(x: &MinkowskiPoint, radius: f64) -> Result<AmbientPoint> {
    let a = 1.0 + x.interval() / (radius * radius);
    if !(a > PROJECTION_EPS) {
        return Err(GeomError::ProjectiveCone { value: a });
    }
    Ok(lift_raw(x, radius))
}

/// Exact differential of the lift:
/// `d xi^mu = A^{-1/2} dx^mu - x^mu (x_nu dx^nu) / (R^2 A^{3/2})`,
/// `d xi^4 = (x_nu dx^nu) / (R A^{3/2})`, with `A = 1 + sigma^2/R^2`.
pub(crate) fn lift_jacobian(x: &MinkowskiPoint, radius: f64) -> DMatrix<f64> {
    let r2 = radius * radius;
    let a = 1.0 + x.interval() / r2;
    let a_half = a.sqrt();
    let a_32 = a * a_half;
    let low = x.lowered();
    let mut j = DMatrix::zeros(5, 4);
    for mu in 0..4 {
        for nu in 0..4 {
            let delta = if mu == nu { 1.0 / a_half } else { 0.0 };
            j[(mu, nu)] = delta - x.0[mu] * low[nu] / (r2 * a_32);
        }
    }
    for nu in 0..4 {
        j[(4, nu)] = low[nu] / (radius * a_32);
    }
    j
}

/// `g = A^{-1} eta - R^{-2} A^{-2} (x_mu dx^mu)^2`.
pub(crate) fn closed_form_metric(x: &MinkowskiPoint, radius: f64) -> DMatrix<f64> {
    let r2 = radius * radius;
    let a = 1.0 + x.interval() / r2;
    let low = x.lowered();
    let eta = [-1.0, 1.0, 1.0, 1.0];
    DMatrix::from_fn(4, 4, |m, n| {
        let flat = if m == n { eta[m] / a } else { 0.0 };
        flat - low[m] * low[n] / (r2 * a * a)
    })
}

/// Exact `d_c g_mn` of [`closed_form_metric`], with `d_c A = 2 x_c / R^2`.
pub(crate) fn closed_form_derivatives(x: &MinkowskiPoint, radius: f64) -> Vec<DMatrix<f64>> {
    let r2 = radius * radius;
    let a = 1.0 + x.interval() / r2;
    let low = x.lowered();
    let eta = [-1.0, 1.0, 1.0, 1.0];
    (0..4)
        .map(|c| {
            let da = 2.0 * low[c] / r2;
            DMatrix::from_fn(4, 4, |m, n| {
                let flat = if m == n { -eta[m] * da / (a * a) } else { 0.0 };
                let dm = if m == c { eta[m] } else { 0.0 };
                let dn = if n == c { eta[n] } else { 0.0 };
                flat - (dm * low[n] + low[m] * dn) / (r2 * a * a)
                    + 2.0 * low[m] * low[n] * da / (r2 * a * a * a)
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::Quadric;

    #[test]
    fn south_pole_projects_to_origin() {
        let x = beltrami_project(&AmbientPoint::new(vec![0.0, 0.0, 0.0, 0.0, -2.0]), 2.0).unwrap();
        assert_eq!(x.0, [0.0; 4]);
    }

    #[test]
    fn equator_is_singular() {
        let p = AmbientPoint::new(vec![0.0, 1.0, 0.0, 0.0, 1e-13]);
        assert!(matches!(
            beltrami_project(&p, 1.0),
            Err(GeomError::EquatorialSingularity { .. })
        ));
    }

    #[test]
    fn lift_examples() {
        let xi = beltrami_lift(&MinkowskiPoint([0.0; 4]), 1.0).unwrap();
        assert_eq!(xi.coords(), &[0.0, 0.0, 0.0, 0.0, -1.0]);

        let xi = beltrami_lift(&MinkowskiPoint([0.0, 1.0, 0.0, 0.0]), 1.0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((xi[1] - s).abs() < 1e-15 && (xi[4] + s).abs() < 1e-15);
        let q = Quadric::hyperboloid(5, 1.0).unwrap();
        assert!(q.residual(xi.coords()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn lift_fails_on_cone() {
        let x = MinkowskiPoint([1.0 - 1e-14, 0.0, 0.0, 0.0]);
        assert!(matches!(
            beltrami_lift(&x, 1.0),
            Err(GeomError::ProjectiveCone { .. })
        ));
    }
}
