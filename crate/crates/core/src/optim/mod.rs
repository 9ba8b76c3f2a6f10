//! Convex minimization engine shared by the Cox fitters.
//!
//! * [`minimize_smooth`]: limited-memory quasi-Newton (memory 10) with Armijo
//!   backtracking.
//! * [`minimize_composite`]: proximal gradient for `f(x) + ε‖x‖_q` with
//!   spectral (Barzilai–Borwein) step sizes and a sufficient-decrease
//!   backtracking test, so every accepted step decreases the composite
//!   objective.
//! * [`prox`]: closed-form proximal operators of `ε‖·‖_q` for q ∈ {1, 2, ∞}.

mod composite;
mod lbfgs;
pub mod prox;

use std::time::Duration;

use serde::{Deserialize, Serialize};

pub use composite::{minimize_composite, CompositeOptions, StopRule};
pub use lbfgs::{minimize_smooth, SmoothOptions};

/// Armijo sufficient-decrease constant.
pub const ARMIJO_C: f64 = 1e-4;
/// Step shrink factor used by every backtracking loop.
pub const BACKTRACK: f64 = 0.5;
/// Quasi-Newton memory.
pub const LBFGS_MEMORY: usize = 10;
/// Steps below this length count as a line-search stall.
pub const MIN_STEP: f64 = 1e-16;
/// Relative rounding error tolerated in objective values.
pub const ROUNDING: f64 = 1e-14;

/// Line-search acceptance for a step of length `step` along a descent
/// direction with initial slope `slope < 0`; `slope_new` is the directional
/// derivative at the trial point.
///
/// The Armijo test is used as long as the objective can resolve it. Close to
/// a minimizer the predicted decrease drops below the rounding error of `f`,
/// and a step is then accepted if `f` stays within that error while the slope
/// has not turned sharply positive.
pub(crate) fn accept_step(f: f64, f_new: f64, step: f64, slope: f64, slope_new: f64) -> bool {
    f_new <= f + ARMIJO_C * step * slope
        || (f_new <= f + ROUNDING * f.abs() && slope_new <= -(1.0 - 2.0 * ARMIJO_C) * slope)
}

/// A differentiable objective.
pub trait SmoothProblem {
    fn dim(&self) -> usize;

    /// Returns `f(x)` and writes `∇f(x)` into `grad`. A non-finite return
    /// value signals an evaluation failure.
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64;
}

/// Adapts a closure into a [`SmoothProblem`].
pub struct FnProblem<F> {
    dim: usize,
    f: F,
}

impl<F> FnProblem<F>
where
    F: Fn(&[f64], &mut [f64]) -> f64,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> SmoothProblem for FnProblem<F>
where
    F: Fn(&[f64], &mut [f64]) -> f64,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        (self.f)(x, grad)
    }
}

/// Outcome of a solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct SolveReport {
    pub iterations: usize,
    /// Value of the stopping criterion at exit: gradient ∞-norm, prox-residual
    /// ∞-norm or relative objective change depending on the solver.
    pub final_criterion: f64,
    pub objective: f64,
    pub converged: bool,
    /// Set when the line search could not find an acceptable step.
    pub stalled: bool,
    #[serde(skip)]
    pub trace: Vec<f64>,
    #[serde(with = "duration_secs")]
    pub wall_time: Duration,
}

pub(crate) mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(secs.max(0.0)))
    }
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
