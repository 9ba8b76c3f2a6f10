//! Distributionally robust Cox regression.
//!
//! The worst-case expected modified Cox loss over a Wasserstein ball of radius
//! `ε` (ℓp ground metric) is bounded above by the convex program
//!
//! ```text
//! min_{β, α}  ε‖(β, α)‖_q + (1/N) Σ_i ζ_i s_i
//! s_i = max_{k ∈ W(i)} g_ik(β, α)
//! g_ik = log(exp(β'x_i) + S_k) − β'x_i − α (y_i − y_k)
//! ```
//!
//! with `q` the Hölder conjugate of `p`, subjects in decreasing-duration order,
//! `S_k` the risk-set sum `Σ_{m: y_m ≥ y_k} exp(β'x_m)` and the window
//! `W(i) = {i, …, min(i + γ − 1, N)}`. The `k = i` term is the modified
//! individual loss, so the objective always dominates its regularized
//! empirical risk.

mod cv;
mod fit;
mod objective;
mod radius;

use serde::{Deserialize, Serialize};

use crate::error::FitError;
use crate::norm::NormOrder;
use crate::optim::SolveReport;

pub use cv::{cross_validate_epsilon, EpsilonCv};
pub use fit::{fit_drl_cox, fit_drl_cox_from, tau_schedule};
pub use objective::{
    drl_objective, drl_objective_smoothed, mean_modified_loss, modified_individual_loss,
    SmoothedObjective,
};
pub use radius::{epsilon_grid, suggest_radius, RadiusSuggestion};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DrlConfig {
    /// Wasserstein radius ε.
    pub epsilon: f64,
    /// Regularizer norm order; the ground metric uses its conjugate.
    pub q: NormOrder,
    /// Constraint window γ.
    pub gamma: usize,
    /// Final soft-max temperature of the continuation schedule.
    pub tau: f64,
    pub tol: f64,
    /// Iteration budget shared by all continuation stages.
    pub max_iter: usize,
}

impl Default for DrlConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            q: NormOrder::Two,
            gamma: 3,
            tau: 0.01,
            tol: 1e-8,
            max_iter: 5000,
        }
    }
}

impl DrlConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        let bad = |m: String| Err(FitError::InvalidConfig(m));
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon must be >= 0, got {}", self.epsilon));
        }
        if self.gamma < 1 {
            return bad("gamma must be >= 1".into());
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        Ok(())
    }

    /// Ground-metric order `p` with 1/p + 1/q = 1.
    pub fn p(&self) -> NormOrder {
        self.q.conjugate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrlModel {
    pub beta: Vec<f64>,
    pub alpha: f64,
    /// Hard (unsmoothed) objective at `(beta, alpha)`.
    pub objective_at_solution: f64,
    pub config: DrlConfig,
    pub solver_report: SolveReport,
    /// Set when the training data had no events and the fit returned the origin.
    pub degenerate: bool,
}

impl DrlModel {
    pub fn risk_scores(&self, ds: &crate::data::SurvivalDataset) -> Result<Vec<f64>, FitError> {
        crate::cox::linear_risk_scores(&self.beta, ds)
    }

    /// `(β, α)` as one vector.
    pub fn params(&self) -> Vec<f64> {
        let mut v = self.beta.clone();
        v.push(self.alpha);
        v
    }
}
