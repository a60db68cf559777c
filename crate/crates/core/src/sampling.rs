//! Seeded sampling of chart points, tangent planes and projective points.
//!
//! Every command owns one generator; draws happen in a fixed order so equal
//! seeds give equal samples.

use std::f64::consts::PI;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::charts::{Chart, ChartKind, MinkowskiPoint};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Interior point of the static chart: `t in [-R, R]`, `rho in [0.05R, 0.95R]`,
/// `theta in [0.2, pi - 0.2]`, `phi in [0, 2 pi)`.
pub fn static_point(rng: &mut SampleRng, radius: f64) -> Vec<f64> {
    vec![
        rng.random_range(-radius..radius),
        radius * rng.random_range(0.05..0.95),
        rng.random_range(0.2..PI - 0.2),
        rng.random_range(0.0..2.0 * PI),
    ]
}

/// Interior point of any registered chart, kept well away from its boundary.
pub fn chart_point(rng: &mut SampleRng, chart: &Chart) -> Vec<f64> {
    let r = chart.radius();
    match chart.kind() {
        ChartKind::Schrodinger40 => vec![rng.random_range(-r..r), rng.random_range(-PI..PI)],
        ChartKind::Schrodinger43 => vec![
            rng.random_range(-r..r),
            rng.random_range(-PI / 2.0 + 0.1..PI / 2.0 - 0.1),
        ],
        ChartKind::Static47Printed | ChartKind::Static47Corrected => static_point(rng, r),
        ChartKind::SpherePolar => vec![
            r * rng.random_range(0.05..0.95),
            rng.random_range(0.2..PI - 0.2),
            rng.random_range(0.2..PI - 0.2),
            rng.random_range(0.0..2.0 * PI),
        ],
        ChartKind::HyperboloidPolar => vec![
            r * rng.random_range(1.05..3.0),
            rng.random_range(0.2..PI - 0.2),
            rng.random_range(0.2..PI - 0.2),
            rng.random_range(0.0..2.0 * PI),
        ],
        ChartKind::Beltrami => minkowski_point(rng, r, 0.1).0.to_vec(),
    }
}

/// Projective point with `1 + sigma^2/R^2 > min_a`, components in `[-2R, 2R]`.
pub fn minkowski_point(rng: &mut SampleRng, radius: f64, min_a: f64) -> MinkowskiPoint {
    loop {
        let x = MinkowskiPoint(std::array::from_fn(|_| rng.random_range(-2.0 * radius..2.0 * radius)));
        if 1.0 + x.interval() / (radius * radius) > min_a {
            return x;
        }
    }
}

/// Vector with independent components uniform in `[-1, 1]`.
pub fn direction(rng: &mut SampleRng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
}
