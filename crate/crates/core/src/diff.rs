//! Central finite differences shared by every derivative in the crate.

use std::ops::{Mul, Sub};

use serde::{Deserialize, Serialize};

/// Step-size policy: `h_i = base * max(1, |x_i|)`, optionally with one level
/// of Richardson extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepPolicy {
    pub base: f64,
    pub richardson: bool,
}

impl Default for StepPolicy {
    fn default() -> Self {
        StepPolicy {
            base: 1e-5,
            richardson: false,
        }
    }
}

impl StepPolicy {
    pub fn new(base: f64) -> Self {
        StepPolicy {
            base,
            richardson: false,
        }
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    /// Step used along a coordinate currently at `x`.
    pub fn step_at(&self, x: f64) -> f64 {
        self.base * x.abs().max(1.0)
    }

    /// Largest offset the policy will ever evaluate away from `x`.
    pub fn reach(&self, x: f64) -> f64 {
        self.step_at(x)
    }
}

/// Values that can be combined by finite-difference stencils.
pub trait Stencil: Clone + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Stencil for T where T: Clone + Sub<Output = T> + Mul<f64, Output = T> {}

fn shifted(p: &[f64], axis: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[axis] += delta;
    q
}

fn central_once<T, F>(f: &F, p: &[f64], axis: usize, h: f64) -> T
where
    T: Stencil,
    F: Fn(&[f64]) -> T,
{
    let plus = f(&shifted(p, axis, h));
    let minus = f(&shifted(p, axis, -h));
    (plus - minus) * (0.5 / h)
}

/// `d f / d x_axis` at `p` by central differences.
pub fn partial<T, F>(f: &F, p: &[f64], axis: usize, policy: &StepPolicy) -> T
where
    T: Stencil,
    F: Fn(&[f64]) -> T,
{
    let h = policy.step_at(p[axis]);
    let coarse = central_once(f, p, axis, h);
    if !policy.richardson {
        return coarse;
    }
    let fine = central_once(f, p, axis, 0.5 * h);
    (fine * 4.0 - coarse) * (1.0 / 3.0)
}

/// All first partials of `f` at `p`, indexed by axis.
pub fn gradient<T, F>(f: &F, p: &[f64], policy: &StepPolicy) -> Vec<T>
where
    T: Stencil,
    F: Fn(&[f64]) -> T,
{
    (0..p.len()).map(|a| partial(f, p, a, policy)).collect()
}

/// Derivative of a function of one variable.
pub fn derivative<F>(f: F, x: f64, policy: &StepPolicy) -> f64
where
    F: Fn(f64) -> f64,
{
    partial(&|p: &[f64]| f(p[0]), &[x], 0, policy)
}
