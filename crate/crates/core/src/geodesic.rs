//! Geodesic integration with fixed-step RK4, frame accelerations and
//! trajectory export.
//!
//! Velocities are never renormalized; the drift of `g(v, v)` and of Killing
//! charges is what the callers measure.

use std::io::Write;

use nalgebra::DVector;
use serde::Serialize;

use crate::diff::StepPolicy;
use crate::error::{GeomError, Result};
use crate::isometry::conserved_charge;
use crate::tensor::{self, FieldFn, MetricField, VectorField};

/// Position, velocity and affine parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub tau: f64,
}

impl GeodesicState {
    pub fn new(x: Vec<f64>, v: Vec<f64>) -> Self {
        GeodesicState { x, v, tau: 0.0 }
    }

    pub fn at(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }
}

/// `g(v, v)` at the state's position.
pub fn norm(g: &dyn MetricField, s: &GeodesicState) -> Result<f64> {
    let m = tensor::metric_at(g, &s.x)?;
    let v = DVector::from_column_slice(&s.v);
    Ok((v.transpose() * m * &v)[0])
}

/// `dx = v`, `dv^a = -Gamma^a_bc v^b v^c`, using exact metric derivatives
/// where the metric provides them.
pub fn geodesic_rhs(
    g: &dyn MetricField,
    s: &GeodesicState,
    policy: &StepPolicy,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if s.x.len() != g.dim() || s.v.len() != g.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: g.dim(),
            found: s.x.len().max(s.v.len()),
        });
    }
    let gamma = tensor::connection(g, &s.x, policy)?;
    let v = DVector::from_column_slice(&s.v);
    let acc = gamma.contract(&v, &v);
    Ok((s.v.clone(), acc.iter().map(|a| -a).collect()))
}

/// `D_{d_mu} d_mu`.
pub fn frame_acceleration(
    g: &dyn MetricField,
    mu: usize,
    p: &[f64],
    policy: &StepPolicy,
) -> Result<DVector<f64>> {
    if mu >= g.dim() {
        return Err(GeomError::IndexOutOfRange {
            index: mu,
            len: g.dim(),
        });
    }
    let e = FieldFn::coordinate(g.dim(), mu);
    tensor::covariant_derivative(g, &e, &e, p, policy)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    /// The next step would have left the metric's domain; the last sample is
    /// the last valid state.
    BoundaryHit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<GeodesicState>,
    pub dt: f64,
    pub status: Termination,
    pub norms: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &GeodesicState {
        self.samples.last().expect("a trajectory holds its initial state")
    }

    pub fn span(&self) -> f64 {
        self.last().tau - self.samples[0].tau
    }

    /// `max |N(tau) - N(0)| / max(1, |N(0)|)` for the norm `N = g(v, v)`.
    pub fn norm_drift(&self) -> f64 {
        relative_drift(&self.norms)
    }

    /// Charge of `u` at every sample.
    pub fn charges(&self, g: &dyn MetricField, u: &dyn VectorField) -> Result<Vec<f64>> {
        self.samples.iter().map(|s| conserved_charge(g, u, s)).collect()
    }

    /// CSV with columns `tau, x.., v.., norm, Q1..Qk`, one row per sample.
    pub fn write_csv(&self, out: &mut impl Write, charges: &[Vec<f64>]) -> Result<()> {
        let m = self.samples[0].x.len();
        let mut header = vec!["tau".to_string()];
        header.extend((0..m).map(|i| format!("x{i}")));
        header.extend((0..m).map(|i| format!("v{i}")));
        header.push("norm".into());
        header.extend((1..=charges.len()).map(|i| format!("Q{i}")));
        writeln!(out, "{}", header.join(","))?;
        for (i, s) in self.samples.iter().enumerate() {
            let mut row = vec![fmt_num(s.tau)];
            row.extend(s.x.iter().chain(&s.v).map(|v| fmt_num(*v)));
            row.push(fmt_num(self.norms[i]));
            row.extend(charges.iter().map(|q| fmt_num(q[i])));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn relative_drift(series: &[f64]) -> f64 {
    let Some(&q0) = series.first() else {
        return 0.0;
    };
    let scale = q0.abs().max(1.0);
    series
        .iter()
        .map(|q| (q - q0).abs() / scale)
        .fold(0.0, f64::max)
}

fn is_boundary(e: &GeomError) -> bool {
    matches!(e, GeomError::OutsideDomain { .. } | GeomError::StepTooLarge { .. })
}

fn axpy(s: &GeodesicState, h: f64, k: &(Vec<f64>, Vec<f64>)) -> GeodesicState {
    GeodesicState {
        x: s.x.iter().zip(&k.0).map(|(a, b)| a + h * b).collect(),
        v: s.v.iter().zip(&k.1).map(|(a, b)| a + h * b).collect(),
        tau: s.tau + h,
    }
}

/// One classical RK4 step.
pub fn rk4_step(
    g: &dyn MetricField,
    s: &GeodesicState,
    dt: f64,
    policy: &StepPolicy,
) -> Result<GeodesicState> {
    let k1 = geodesic_rhs(g, s, policy)?;
    let k2 = geodesic_rhs(g, &axpy(s, 0.5 * dt, &k1), policy)?;
    let k3 = geodesic_rhs(g, &axpy(s, 0.5 * dt, &k2), policy)?;
    let k4 = geodesic_rhs(g, &axpy(s, dt, &k3), policy)?;
    let comb = |i: usize, which: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| {
        which(&k1)[i] + 2.0 * which(&k2)[i] + 2.0 * which(&k3)[i] + which(&k4)[i]
    };
    let n = s.x.len();
    Ok(GeodesicState {
        x: (0..n).map(|i| s.x[i] + dt / 6.0 * comb(i, |k| &k.0)).collect(),
        v: (0..n).map(|i| s.v[i] + dt / 6.0 * comb(i, |k| &k.1)).collect(),
        tau: s.tau + dt,
    })
}

/// Integrates from `s0` to `tau_end` with fixed step `dt` (the last step is
/// shortened to land on `tau_end`).
pub fn integrate(
    g: &dyn MetricField,
    s0: &GeodesicState,
    tau_end: f64,
    dt: f64,
    policy: &StepPolicy,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(GeomError::StepUnderflow { tau: s0.tau, dt });
    }
    let n0 = norm(g, s0)?;
    geodesic_rhs(g, s0, policy)?;
    let steps = ((tau_end - s0.tau) / dt).ceil().max(0.0) as usize;
    let mut samples = Vec::with_capacity(steps + 1);
    let mut norms = Vec::with_capacity(steps + 1);
    samples.push(s0.clone());
    norms.push(n0);
    let mut status = Termination::Completed;
    let mut cur = s0.clone();
    for i in 0..steps {
        let h = if i + 1 == steps { tau_end - cur.tau } else { dt };
        if !(h > 0.0) || cur.tau + h == cur.tau {
            if i + 1 == steps {
                break;
            }
            return Err(GeomError::StepUnderflow { tau: cur.tau, dt: h });
        }
        let next = match rk4_step(g, &cur, h, policy) {
            Ok(s) => s,
            Err(e) if is_boundary(&e) => {
                status = Termination::BoundaryHit;
                break;
            }
            Err(e) => return Err(e),
        };
        let nn = match norm(g, &next) {
            Ok(v) => v,
            Err(e) if is_boundary(&e) => {
                status = Termination::BoundaryHit;
                break;
            }
            Err(e) => return Err(e),
        };
        norms.push(nn);
        samples.push(next.clone());
        cur = next;
    }
    Ok(Trajectory {
        samples,
        dt,
        status,
        norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{FlatMetric, StaticDeSitter};
    use crate::warped::WarpedMetric;
    use std::f64::consts::FRAC_PI_2;

    fn pol() -> StepPolicy {
        StepPolicy::default()
    }

    #[test]
    fn flat_lines_are_straight() {
        let g = FlatMetric::minkowski();
        let s0 = GeodesicState::new(vec![1.0, -2.0, 0.5, 3.0], vec![1.0, 0.3, -0.2, 0.1]);
        let tr = integrate(&g, &s0, 2.0, 1e-2, &pol()).unwrap();
        let end = tr.last();
        for i in 0..4 {
            assert!((end.x[i] - (s0.x[i] + 2.0 * s0.v[i])).abs() < 1e-10);
        }
        assert_eq!(tr.status, Termination::Completed);
        assert!((end.tau - 2.0).abs() < 1e-12);
    }

    #[test]
    fn static_rhs_example() {
        let g = StaticDeSitter::new(1.0);
        let s = GeodesicState::new(vec![0.0, 0.5, FRAC_PI_2, 0.0], vec![1.0, 0.0, 0.0, 0.0]);
        let (dx, dv) = geodesic_rhs(&g, &s, &pol()).unwrap();
        assert_eq!(dx, s.v);
        assert!((dv[1] - 0.375).abs() < 1e-8, "{dv:?}");
    }

    #[test]
    fn frame_accelerations() {
        let g = StaticDeSitter::new(1.0);
        let p = [0.0, 0.5, FRAC_PI_2, 0.0];
        let a_rho = frame_acceleration(&g, 1, &p, &pol()).unwrap();
        assert!((a_rho[1] - 2.0 / 3.0).abs() < 1e-8);
        let a_phi = frame_acceleration(&g, 3, &p, &pol()).unwrap();
        assert!((a_phi[1] + 0.375).abs() < 1e-8 && a_phi[2].abs() < 1e-8);
        assert!(frame_acceleration(&FlatMetric::euclidean(3), 2, &[0.0; 3], &pol())
            .unwrap()
            .amax()
            .eq(&0.0));
    }

    #[test]
    fn radial_null_ray_hits_horizon() {
        let g = StaticDeSitter::new(1.0).with_margin(1e-3);
        let f2 = 0.75;
        let s0 = GeodesicState::new(vec![0.0, 0.5, FRAC_PI_2, 0.0], vec![1.0 / f2, 1.0, 0.0, 0.0]);
        let tr = integrate(&g, &s0, 10.0, 1e-3, &pol()).unwrap();
        assert_eq!(tr.status, Termination::BoundaryHit);
        assert!(tr.last().x[1] > 0.99);
        assert!(tr.samples.windows(2).all(|w| w[1].x[1] > w[0].x[1]));
    }

    #[test]
    fn radial_warped_geodesic_stays_radial() {
        let g = WarpedMetric::new(4, -1.0).unwrap();
        let s0 = GeodesicState::new(g.point_at(0.5), vec![1.0, 0.0, 0.0, 0.0]);
        let tr = integrate(&g, &s0, 2.0, 1e-3, &pol()).unwrap();
        for s in &tr.samples {
            assert!(s.v[1..].iter().all(|w| w.abs() <= 1e-10));
        }
        assert!((tr.last().x[0] - 2.5).abs() < 1e-9);
    }

    #[test]
    fn stationary_state() {
        let g = StaticDeSitter::new(1.0);
        let s0 = GeodesicState::new(vec![0.0, 0.5, 1.0, 0.0], vec![0.0; 4]);
        let tr = integrate(&g, &s0, 1.0, 0.1, &pol()).unwrap();
        assert!(tr.samples.iter().all(|s| s.x == s0.x));
        assert!(tr.norms.iter().all(|&n| n == 0.0));
    }

    #[test]
    fn rk4_convergence_order() {
        let g = WarpedMetric::new(3, 1.0).unwrap();
        let s0 = GeodesicState::new(vec![0.8, 1.2, 0.3], vec![0.3, 0.4, 0.5]);
        let end = |dt: f64| integrate(&g, &s0, 1.0, dt, &pol()).unwrap().last().x.clone();
        let reference = end(0.1 / 64.0);
        let err = |x: Vec<f64>| x.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let ratio = err(end(0.1)) / err(end(0.05));
        assert!(ratio > 12.0 && ratio < 20.0, "{ratio}");
    }

    #[test]
    fn invalid_step() {
        let g = FlatMetric::euclidean(2);
        let s0 = GeodesicState::new(vec![0.0, 0.0], vec![1.0, 0.0]);
        assert!(matches!(
            integrate(&g, &s0, 1.0, 0.0, &pol()),
            Err(GeomError::StepUnderflow { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let g = FlatMetric::euclidean(2);
        let s0 = GeodesicState::new(vec![0.0, 0.0], vec![1.0, 0.0]);
        let tr = integrate(&g, &s0, 0.2, 0.1, &pol()).unwrap();
        let q = tr.charges(&g, &FieldFn::coordinate(2, 0)).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &[q]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "tau,x0,x1,v0,v1,norm,Q1");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0.0000000000000000e0,"));
    }
}
