use drl_cox::benchmark::Method;
use drl_cox::data::Standardization;
use drl_cox::NormOrder;
use serde::{Deserialize, Serialize};

/// A fitted model as written by `drlcox fit`.
///
/// `beta` acts on standardized covariates when `standardization` is present;
/// `evaluate` applies the stored map to raw input before scoring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub method: Method,
    pub feature_names: Vec<String>,
    pub standardization: Option<Standardization>,
    /// Durations were divided by this before fitting (1 when unscaled).
    pub duration_scale: f64,
    pub beta: Vec<f64>,
    /// Time-slope multiplier of the robust model.
    pub alpha: Option<f64>,
    pub epsilon: Option<f64>,
    pub q: Option<NormOrder>,
    pub gamma: Option<usize>,
    pub tau: Option<f64>,
    pub lambda: Option<f64>,
    pub l1_ratio: Option<f64>,
    /// Set when the hyperparameter was chosen by cross-validation.
    pub selected_by_cv: bool,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n: usize,
    pub n_events: usize,
}
