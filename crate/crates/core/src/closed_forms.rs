//! Closed-form expressions from the literature on these spaces, kept apart
//! from the numerical machinery.
//!
//! Two families live here:
//! * `printed_*`: expressions transcribed as published. They are claims; the
//!   verification harness compares them with first-principles oracles and
//!   reports any disagreement rather than trusting them.
//! * `static_*_exact`: the same objects recomputed by hand from the static
//!   metric. These serve as oracles for the finite-difference code.
//!
//! Index convention for the static frame: `t -> 0, rho -> 1, theta -> 2, phi -> 3`.

use nalgebra::DMatrix;

use crate::charts::{diag, MinkowskiPoint};
use crate::diff::{self, StepPolicy};

/// `Gamma[a][b][c] = Gamma^a_{bc}`.
pub type Connection4 = [[[f64; 4]; 4]; 4];

fn lapse(radius: f64, rho: f64) -> f64 {
    1.0 - rho * rho / (radius * radius)
}

fn set_sym(g: &mut Connection4, a: usize, b: usize, c: usize, v: f64) {
    g[a][b][c] = v;
    g[a][c][b] = v;
}

/// Connection coefficients of the static metric as published.
pub fn printed_static_christoffel(radius: f64, p: &[f64]) -> Connection4 {
    let (rho, th) = (p[1], p[2]);
    let r2 = radius * radius;
    let f2 = lapse(radius, rho);
    let mut g = [[[0.0; 4]; 4]; 4];
    set_sym(&mut g, 0, 0, 1, -rho / (r2 * f2));
    g[1][1][1] = rho / (r2 * f2);
    g[1][0][0] = rho * f2 / r2;
    g[1][2][2] = -rho * f2;
    g[1][3][3] = -rho * f2 * th.sin();
    g[2][3][3] = -th.sin() * th.cos();
    set_sym(&mut g, 2, 1, 2, 1.0 / rho);
    set_sym(&mut g, 3, 1, 3, 1.0 / rho);
    set_sym(&mut g, 3, 2, 3, th.cos() / th.sin());
    g
}

/// Index triples `(a, b, c)` with `b <= c` that appear in the published list.
pub const PRINTED_STATIC_CHRISTOFFEL_ENTRIES: [(usize, usize, usize); 9] = [
    (0, 0, 1),
    (1, 1, 1),
    (1, 0, 0),
    (1, 2, 2),
    (1, 3, 3),
    (2, 3, 3),
    (2, 1, 2),
    (3, 1, 3),
    (3, 2, 3),
];

/// Connection coefficients of the static metric derived by hand.
pub fn static_christoffel_exact(radius: f64, p: &[f64]) -> Connection4 {
    let (rho, th) = (p[1], p[2]);
    let mut g = printed_static_christoffel(radius, p);
    let f2 = lapse(radius, rho);
    g[1][0][0] = -rho * f2 / (radius * radius);
    g[1][3][3] = -rho * f2 * th.sin().powi(2);
    g
}

/// `D_{d_mu} d_mu` for `mu = t, rho, theta, phi`, as published.
pub fn printed_static_accelerations(radius: f64, p: &[f64]) -> [[f64; 4]; 4] {
    let (rho, th) = (p[1], p[2]);
    let r2 = radius * radius;
    let f2 = lapse(radius, rho);
    [
        [0.0, -rho * f2 / r2, 0.0, 0.0],
        [0.0, rho / (r2 * f2), 0.0, 0.0],
        [0.0, -rho * f2, 0.0, 0.0],
        [0.0, -rho * f2 * th.sin().powi(2), -th.sin() * th.cos(), 0.0],
    ]
}

/// Published covariant derivatives of the coordinate frame:
/// `table[mu][nu]` is the vector `D_{d_nu} d_mu`.
pub fn printed_static_frame_derivatives(radius: f64, p: &[f64]) -> [[[f64; 4]; 4]; 4] {
    let (rho, th) = (p[1], p[2]);
    let r2 = radius * radius;
    let f2 = lapse(radius, rho);
    let cot = th.cos() / th.sin();
    let mut d = [[[0.0; 4]; 4]; 4];
    // D(d_t)
    d[0][1][0] = -rho / (r2 * f2);
    d[0][0][1] = -rho * f2 / r2;
    // D(d_rho)
    d[1][0][0] = -rho / (r2 * f2);
    d[1][1][1] = rho / (r2 * f2);
    d[1][2][2] = 1.0 / rho;
    d[1][3][3] = 1.0 / rho;
    // D(d_theta)
    d[2][2][1] = -rho * f2;
    d[2][3][3] = cot;
    d[2][1][2] = 1.0 / rho;
    // D(d_phi)
    d[3][2][3] = cot;
    d[3][3][2] = -th.sin() * th.cos();
    d[3][3][1] = -rho * f2 * th.sin().powi(2);
    d[3][1][3] = 1.0 / rho;
    d
}

/// One published Killing equation, evaluated on a covector field.
#[derive(Debug, Clone, Copy)]
pub struct PrintedKillingEquation {
    pub label: &'static str,
    /// Index pair `(a, b)` of the symmetric residual this equation claims to be.
    pub pair: (usize, usize),
}

pub const PRINTED_KILLING_EQUATIONS: [PrintedKillingEquation; 8] = [
    PrintedKillingEquation { label: "d_th u_th + W u_rho", pair: (2, 2) },
    PrintedKillingEquation { label: "d_rho u_th + d_th u_rho - 2/rho u_th", pair: (1, 2) },
    PrintedKillingEquation { label: "d_rho u_ph + d_ph u_rho - 2/rho u_ph", pair: (1, 3) },
    PrintedKillingEquation { label: "d_t u_ph + d_ph u_t", pair: (0, 3) },
    PrintedKillingEquation { label: "d_t u_th + d_th u_t", pair: (0, 2) },
    PrintedKillingEquation { label: "d_t u_rho + d_rho u_t + 2 W/R^2 u_t", pair: (0, 1) },
    PrintedKillingEquation { label: "d_rho u_rho - u_t/(R^2 W)", pair: (1, 1) },
    PrintedKillingEquation { label: "d_t u_t + W/R^2 u_rho", pair: (0, 0) },
];

/// Left-hand sides of the published Killing equations with `W = rho (1 - rho^2/R^2)`.
/// `u` holds covector components, `du[a][b] = d_a u_b`.
pub fn printed_killing_lhs(radius: f64, p: &[f64], u: &[f64; 4], du: &[[f64; 4]; 4]) -> [f64; 8] {
    let rho = p[1];
    let r2 = radius * radius;
    let w = rho * lapse(radius, rho);
    [
        du[2][2] + w * u[1],
        du[1][2] + du[2][1] - 2.0 / rho * u[2],
        du[1][3] + du[3][1] - 2.0 / rho * u[3],
        du[0][3] + du[3][0],
        du[0][2] + du[2][0],
        du[0][1] + du[1][0] + 2.0 * w / r2 * u[0],
        du[1][1] - u[0] / (r2 * w),
        du[0][0] + w / r2 * u[1],
    ]
}

/// Published Killing table: lowered components `(u_t, u_rho, u_theta, u_phi)`
/// of row `row` (1-based), with `W = rho (1 - rho^2/R^2)`, `c = cosh(t/R)`, `s = sinh(t/R)`.
pub fn printed_killing_table_row(row: usize, radius: f64, p: &[f64]) -> Option<[f64; 4]> {
    let (t, rho, th, ph) = (p[0], p[1], p[2], p[3]);
    let r = radius;
    let w = rho * lapse(r, rho);
    let (c, s) = ((t / r).cosh(), (t / r).sinh());
    let (st, ct) = th.sin_cos();
    let (sp, cp) = ph.sin_cos();
    let v = match row {
        1 => [rho * w * st * cp * s, -r / w * st * cp * c, -rho * r * w * ct * cp * c, rho * r * w * st * sp * c],
        2 => [-rho * w * st * sp * s, -r / w * st * sp * c, -rho * r * w * ct * sp * c, rho * r * w * st * cp * c],
        3 => [rho * w * ct * c, -r / w * ct * c, rho * r * w * st * c, 0.0],
        4 => [r * w * w, 0.0, 0.0, 0.0],
        5 => [0.0, 0.0, 0.0, -rho * rho * st * st],
        6 => [0.0, 0.0, rho * rho * cp, -rho * rho * st * st * ct * sp],
        7 => [-rho * w * st * cp * c, r / w * st * cp * s, rho * r * w * ct * cp * s, rho * r * w * st * sp * s],
        8 => [0.0, 0.0, rho * rho * sp, rho * rho * st * st * ct * cp],
        9 => [-rho * w * st * sp * c, r / w * st * sp * s, rho * r * w * ct * sp * s, rho * r * w * st * cp * s],
        10 => [-rho * w * ct * s, r / w * ct * s, -rho * r * w * st * s, 0.0],
        _ => return None,
    };
    Some(v)
}

/// Reduced metric of the nowhere-singular chart, as published, in `(t, chi)`,
/// reading the bare `cosh^2` as `cosh^2(t/R)`.
pub fn printed_reduced_metric_40(radius: f64, p: &[f64]) -> DMatrix<f64> {
    let r2 = radius * radius;
    diag(&[r2, -r2 * (p[0] / radius).cosh().powi(2)])
}

/// Reduced metric of the `sin chi = xi1/R` chart, as published, in `(t, chi)`.
pub fn printed_reduced_metric_43(radius: f64, p: &[f64]) -> DMatrix<f64> {
    let r2 = radius * radius;
    diag(&[r2 * p[1].cos().powi(2), -r2])
}

/// Reduced static metric as published, in `(eta, rho)`.
pub fn printed_reduced_static_metric(radius: f64, rho: f64) -> DMatrix<f64> {
    let f2 = lapse(radius, rho);
    diag(&[f2, -1.0 / f2])
}

/// The published `(t, chi)` reduced metric rewritten in `(eta, rho)` through
/// `rho = R sin chi`, `eta = R t`, using a finite-difference Jacobian of the
/// inverse substitution (Richardson-extrapolated).
pub fn reduced_metric_43_in_static_coords(radius: f64, eta: f64, rho: f64) -> DMatrix<f64> {
    let to_tchi = |q: &[f64]| nalgebra::DVector::from_vec(vec![q[0] / radius, (q[1] / radius).asin()]);
    let at = [eta, rho];
    let cols = diff::gradient(&to_tchi, &at, &StepPolicy::default().with_richardson(true));
    let j = DMatrix::from_columns(&cols);
    let tchi = to_tchi(&at);
    let g = printed_reduced_metric_43(radius, &[tchi[0], tchi[1]]);
    j.transpose() * g * j
}

/// The two published radial coefficients of the hyperboloid polar metric:
/// the intermediate `1 + 1/(1 - R^2/r^2)` and the final `(2 - 1/(k r^2))/(1 - k r^2)`, `k = 1/R^2`.
pub fn printed_hyperboloid_radial(radius: f64, r: f64) -> (f64, f64) {
    let k = 1.0 / (radius * radius);
    let mid = 1.0 + 1.0 / (1.0 - radius * radius / (r * r));
    let fin = (2.0 - 1.0 / (k * r * r)) / (1.0 - k * r * r);
    (mid, fin)
}

/// First-principles radial coefficient of the hyperboloid polar pullback.
pub fn hyperboloid_radial_exact(radius: f64, r: f64) -> f64 {
    1.0 / (1.0 - r * r / (radius * radius))
}

/// The published differential of the projective lift, with its `+` sign on
/// the `(x_mu dx^mu) x^nu` term. Rows are ambient axes, columns `dx^nu`.
pub fn printed_beltrami_jacobian(x: &MinkowskiPoint, radius: f64) -> DMatrix<f64> {
    let r2 = radius * radius;
    let sigma2 = x.interval();
    let a = 1.0 + sigma2 / r2;
    let denom = r2 * a.powf(1.5);
    let low = x.lowered();
    let mut j = DMatrix::zeros(5, 4);
    for nu in 0..4 {
        for mu in 0..4 {
            let delta = if mu == nu { r2 + sigma2 } else { 0.0 };
            j[(nu, mu)] = (delta + low[mu] * x.0[nu]) / denom;
        }
        j[(4, nu)] = low[nu] / (radius * a.powf(1.5));
    }
    j
}

/// The published projective metric. The bracket
/// `x_mu dx_mu (x) x^mu dx^mu + 2 x^nu x^mu dx_nu (x) dx_mu` is read as
/// `3 (x_mu dx^mu)^2`, which is what the published differential produces.
pub fn printed_beltrami_metric(x: &MinkowskiPoint, radius: f64) -> DMatrix<f64> {
    let r2 = radius * radius;
    let a = 1.0 + x.interval() / r2;
    let low = x.lowered();
    let eta = [-1.0, 1.0, 1.0, 1.0];
    DMatrix::from_fn(4, 4, |m, n| {
        let flat = if m == n { eta[m] / a } else { 0.0 };
        flat + 3.0 * low[m] * low[n] / (r2 * a * a)
    })
}

/// Comparison-function normalizations: `(n-1) sqrt|k| coth(sqrt(-k) r)` as
/// used in the comparison ODE, and `(n-1)/sqrt(-k) coth(sqrt(-k) r)` as
/// printed for the model Laplacian. They agree only when `|k| = 1`.
pub fn printed_comparison_normalizations(k: f64, n: usize, r: f64) -> (f64, f64) {
    let s = (-k).sqrt();
    let coth = 1.0 / (s * r).tanh();
    let m = (n - 1) as f64;
    (m * s * coth, m / s * coth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_and_exact_differ_only_in_two_entries() {
        let p = [0.0, 0.5, 0.9, 0.0];
        let a = printed_static_christoffel(1.0, &p);
        let b = static_christoffel_exact(1.0, &p);
        let mut differing = vec![];
        for i in 0..4 {
            for j in 0..4 {
                for k in j..4 {
                    if (a[i][j][k] - b[i][j][k]).abs() > 1e-12 {
                        differing.push((i, j, k));
                    }
                }
            }
        }
        assert_eq!(differing, vec![(1, 0, 0), (1, 3, 3)]);
    }

    #[test]
    fn table_row_bounds() {
        assert!(printed_killing_table_row(0, 1.0, &[0.0, 0.5, 1.0, 0.0]).is_none());
        assert!(printed_killing_table_row(11, 1.0, &[0.0, 0.5, 1.0, 0.0]).is_none());
        assert_eq!(
            printed_killing_table_row(4, 1.0, &[0.0, 0.5, 1.0, 0.0]).unwrap(),
            [0.5f64 * 0.75 * 0.5 * 0.75, 0.0, 0.0, 0.0]
        );
    }

    #[test]
    fn substitution_reproduces_static_reduced_metric() {
        for r in [0.5, 1.0, 2.0] {
            let rho = 0.3 * r;
            let g = reduced_metric_43_in_static_coords(r, 0.4, rho);
            let want = printed_reduced_static_metric(r, rho);
            assert!((g - want).amax() < 1e-10);
        }
    }

    #[test]
    fn normalizations_agree_at_unit_curvature() {
        let (a, b) = printed_comparison_normalizations(-1.0, 4, 0.7);
        assert!((a - b).abs() < 1e-15);
        let (a, b) = printed_comparison_normalizations(-4.0, 4, 0.7);
        assert!((a - 4.0 * b).abs() < 1e-12);
    }
}
