//! Classical Cox regression: the negative log partial likelihood with Breslow
//! risk sets, plus ridge, lasso and elastic-net penalized fits.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::FitError;
use crate::norm::NormOrder;
use crate::optim::{
    self, minimize_composite, minimize_smooth, CompositeOptions, FnProblem, SmoothOptions,
    SolveReport, StopRule, BACKTRACK,
};

/// Coefficients beyond this magnitude are treated as divergence from a
/// monotone likelihood.
pub const SEPARATION_LIMIT: f64 = 1e3;
/// Newton's method is used up to this many covariates, L-BFGS above.
pub const NEWTON_MAX_DIM: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    None,
    Ridge,
    Lasso,
    ElasticNet,
}

/// Penalty added to the summed loss:
///
/// * ridge: `λ‖β‖₂²`
/// * lasso: `λ‖β‖₁`
/// * elastic net: `λ(ρ‖β‖₁ + (1 − ρ)‖β‖₂²)` with `ρ = l1_ratio`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub kind: PenaltyKind,
    pub lambda: f64,
    pub l1_ratio: f64,
}

impl PenaltySpec {
    pub const NONE: PenaltySpec = PenaltySpec {
        kind: PenaltyKind::None,
        lambda: 0.0,
        l1_ratio: 0.0,
    };

    pub fn ridge(lambda: f64) -> Self {
        Self {
            kind: PenaltyKind::Ridge,
            lambda,
            l1_ratio: 0.0,
        }
    }

    pub fn lasso(lambda: f64) -> Self {
        Self {
            kind: PenaltyKind::Lasso,
            lambda,
            l1_ratio: 1.0,
        }
    }

    pub fn elastic_net(lambda: f64, l1_ratio: f64) -> Self {
        Self {
            kind: PenaltyKind::ElasticNet,
            lambda,
            l1_ratio,
        }
    }

    /// (ℓ1 weight, squared-ℓ2 weight)
    fn weights(&self) -> (f64, f64) {
        match self.kind {
            PenaltyKind::None => (0.0, 0.0),
            PenaltyKind::Ridge => (0.0, self.lambda),
            PenaltyKind::Lasso => (self.lambda, 0.0),
            PenaltyKind::ElasticNet => (
                self.lambda * self.l1_ratio,
                self.lambda * (1.0 - self.l1_ratio),
            ),
        }
    }

    pub fn value(&self, beta: &[f64]) -> f64 {
        let (l1, l2) = self.weights();
        l1 * NormOrder::One.norm(beta) + l2 * beta.iter().map(|b| b * b).sum::<f64>()
    }

    fn validate(&self) -> Result<(), FitError> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(FitError::InvalidConfig(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if self.kind == PenaltyKind::ElasticNet && !(0.0..=1.0).contains(&self.l1_ratio) {
            return Err(FitError::InvalidConfig(format!(
                "l1_ratio must lie in [0, 1], got {}",
                self.l1_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoxModel {
    pub beta: Vec<f64>,
    pub objective_at_solution: f64,
    pub solver_report: SolveReport,
    pub penalty: PenaltySpec,
}

impl CoxModel {
    pub fn risk_scores(&self, ds: &SurvivalDataset) -> Result<Vec<f64>, FitError> {
        linear_risk_scores(&self.beta, ds)
    }
}

/// `β'x_k` for every subject, in canonical order.
pub fn linear_risk_scores(beta: &[f64], ds: &SurvivalDataset) -> Result<Vec<f64>, FitError> {
    check_dim(beta, ds)?;
    Ok(ds
        .subjects()
        .iter()
        .map(|s| optim::dot(beta, &s.covariates))
        .collect())
}

fn check_dim(beta: &[f64], ds: &SurvivalDataset) -> Result<(), FitError> {
    if beta.len() != ds.n_features() {
        return Err(FitError::DimensionMismatch {
            expected: ds.n_features(),
            found: beta.len(),
        });
    }
    Ok(())
}

/// `Σ_{i: ζ_i = 1} [ log Σ_{j: y_j ≥ y_i} exp(β'x_j) − β'x_i ]`.
pub fn negative_log_partial_likelihood(
    ds: &SurvivalDataset,
    beta: &[f64],
) -> Result<f64, FitError> {
    Ok(evaluate(ds, beta, Derivs::Value)?.value)
}

/// Loss and gradient in one pass.
pub fn negative_log_partial_likelihood_grad(
    ds: &SurvivalDataset,
    beta: &[f64],
) -> Result<(f64, Vec<f64>), FitError> {
    let e = evaluate(ds, beta, Derivs::Gradient)?;
    Ok((e.value, e.grad))
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Derivs {
    Value,
    Gradient,
    Hessian,
}

struct Evaluation {
    value: f64,
    grad: Vec<f64>,
    /// row-major d×d
    hess: Vec<f64>,
}

/// Single reverse-cumulative pass over the canonical order. Running sums are
/// kept relative to the running maximum of the linear predictor and rescaled
/// whenever the maximum moves.
fn evaluate(ds: &SurvivalDataset, beta: &[f64], want: Derivs) -> Result<Evaluation, FitError> {
    check_dim(beta, ds)?;
    let d = ds.n_features();
    let grad_on = want >= Derivs::Gradient;
    let hess_on = want >= Derivs::Hessian;

    let mut value = 0.0;
    let mut grad = vec![0.0; if grad_on { d } else { 0 }];
    let mut hess = vec![0.0; if hess_on { d * d } else { 0 }];

    let mut m = f64::NEG_INFINITY;
    let mut s = 0.0;
    let mut gsum = vec![0.0; grad.len()];
    let mut hsum = vec![0.0; hess.len()];
    let mut group_start = 0;
    let mut mu = vec![0.0; grad.len()];

    for k in 0..ds.len() {
        let x = ds.covariates(k);
        let eta = optim::dot(beta, x);
        if !eta.is_finite() {
            return Err(FitError::NonFinite);
        }
        if eta > m {
            let r = (m - eta).exp();
            s *= r;
            gsum.iter_mut().for_each(|v| *v *= r);
            hsum.iter_mut().for_each(|v| *v *= r);
            m = eta;
        }
        let w = (eta - m).exp();
        s += w;
        if grad_on {
            for a in 0..d {
                gsum[a] += w * x[a];
            }
        }
        if hess_on {
            for a in 0..d {
                for b in 0..d {
                    hsum[a * d + b] += w * x[a] * x[b];
                }
            }
        }

        if ds.risk_end(k) != k {
            continue;
        }
        let log_risk = m + s.ln();
        let mut n_events = 0.0;
        for i in group_start..=k {
            if !ds.event(i) {
                continue;
            }
            n_events += 1.0;
            let xi = ds.covariates(i);
            value += log_risk - optim::dot(beta, xi);
            if grad_on {
                for a in 0..d {
                    grad[a] -= xi[a];
                }
            }
        }
        if n_events > 0.0 && grad_on {
            for a in 0..d {
                mu[a] = gsum[a] / s;
                grad[a] += n_events * mu[a];
            }
            if hess_on {
                for a in 0..d {
                    for b in 0..d {
                        hess[a * d + b] += n_events * (hsum[a * d + b] / s - mu[a] * mu[b]);
                    }
                }
            }
        }
        group_start = k + 1;
    }
    if !value.is_finite() {
        return Err(FitError::NonFinite);
    }
    Ok(Evaluation { value, grad, hess })
}

/// Fits a (penalized) Cox model.
///
/// Unpenalized and ridge fits use damped Newton steps (L-BFGS above
/// [`NEWTON_MAX_DIM`] covariates) until `‖∇‖_∞ < tol`. Lasso and elastic-net
/// fits use proximal gradient with soft-thresholding until the relative
/// objective change drops below `tol`. When the iteration budget runs out the
/// best iterate is returned with `converged = false`.
pub fn fit_cox(
    ds: &SurvivalDataset,
    penalty: &PenaltySpec,
    tol: f64,
    max_iter: usize,
) -> Result<CoxModel, FitError> {
    penalty.validate()?;
    if ds.n_events() == 0 {
        return Err(FitError::NoEvents);
    }
    if !(tol > 0.0) {
        return Err(FitError::InvalidConfig(format!(
            "tol must be positive, got {tol}"
        )));
    }
    let d = ds.n_features();
    let (l1, l2) = penalty.weights();

    let (beta, report) = if l1 == 0.0 {
        if d <= NEWTON_MAX_DIM {
            newton(ds, l2, tol, max_iter)?
        } else {
            let problem = smooth_problem(ds, l2);
            minimize_smooth(&problem, &vec![0.0; d], SmoothOptions { tol, max_iter })?
        }
    } else {
        let problem = smooth_problem(ds, l2);
        minimize_composite(
            &problem,
            &vec![0.0; d],
            NormOrder::One,
            l1,
            CompositeOptions {
                tol,
                max_iter,
                stop: StopRule::RelativeObjective,
            },
        )?
    };
    let biggest = optim::inf_norm(&beta);
    if biggest > SEPARATION_LIMIT {
        return Err(FitError::Separation(biggest));
    }
    let loss = negative_log_partial_likelihood(ds, &beta)?;
    if penalty.kind == PenaltyKind::None && biggest > 0.0 {
        // a finite minimizer of a convex loss has loss(2β) > loss(β); a
        // likelihood that keeps improving along the ray means the optimum
        // lies at infinity and the solver only stopped because the gradient
        // decays exponentially there
        let doubled: Vec<f64> = beta.iter().map(|b| 2.0 * b).collect();
        let far = negative_log_partial_likelihood(ds, &doubled)?;
        if far <= loss + 1e-12 * (1.0 + loss.abs()) {
            return Err(FitError::Separation(biggest));
        }
    }
    let objective_at_solution = loss + penalty.value(&beta);
    Ok(CoxModel {
        beta,
        objective_at_solution,
        solver_report: report,
        penalty: *penalty,
    })
}

/// Loss plus `l2·‖β‖²`; non-finite evaluations surface as NaN for the solvers.
fn smooth_problem(
    ds: &SurvivalDataset,
    l2: f64,
) -> FnProblem<impl Fn(&[f64], &mut [f64]) -> f64 + '_> {
    FnProblem::new(ds.n_features(), move |beta: &[f64], g: &mut [f64]| {
        if optim::inf_norm(beta) > SEPARATION_LIMIT {
            return f64::NAN;
        }
        match evaluate(ds, beta, Derivs::Gradient) {
            Ok(e) => {
                for (gi, (ei, bi)) in g.iter_mut().zip(e.grad.iter().zip(beta)) {
                    *gi = ei + 2.0 * l2 * bi;
                }
                e.value + l2 * beta.iter().map(|b| b * b).sum::<f64>()
            }
            Err(_) => f64::NAN,
        }
    })
}

fn newton(
    ds: &SurvivalDataset,
    l2: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport), FitError> {
    let start = std::time::Instant::now();
    let d = ds.n_features();
    let penalized = |beta: &[f64], want: Derivs| -> Result<Evaluation, FitError> {
        let mut e = evaluate(ds, beta, want)?;
        e.value += l2 * beta.iter().map(|b| b * b).sum::<f64>();
        for (g, b) in e.grad.iter_mut().zip(beta) {
            *g += 2.0 * l2 * b;
        }
        if !e.hess.is_empty() {
            for a in 0..d {
                e.hess[a * d + a] += 2.0 * l2;
            }
        }
        Ok(e)
    };

    let mut beta = vec![0.0; d];
    let mut cur = penalized(&beta, Derivs::Hessian)?;
    let mut trace = vec![cur.value];
    let mut iterations = 0;
    let mut stalled = false;
    let mut gnorm = optim::inf_norm(&cur.grad);

    while gnorm >= tol && iterations < max_iter {
        let dir = newton_direction(&cur.hess, &cur.grad, d);
        let slope = optim::dot(&cur.grad, &dir);
        let mut step = 1.0;
        let next = loop {
            let trial: Vec<f64> = beta.iter().zip(&dir).map(|(b, p)| b + step * p).collect();
            if optim::inf_norm(&trial) > SEPARATION_LIMIT {
                return Err(FitError::Separation(optim::inf_norm(&trial)));
            }
            if let Ok(e) = penalized(&trial, Derivs::Hessian) {
                if optim::accept_step(cur.value, e.value, step, slope, optim::dot(&e.grad, &dir)) {
                    break Some((trial, e));
                }
            }
            step *= BACKTRACK;
            if step < optim::MIN_STEP {
                break None;
            }
        };
        let Some((b, e)) = next else {
            stalled = true;
            break;
        };
        beta = b;
        cur = e;
        gnorm = optim::inf_norm(&cur.grad);
        trace.push(cur.value);
        iterations += 1;
    }

    let report = SolveReport {
        iterations,
        final_criterion: gnorm,
        objective: cur.value,
        converged: gnorm < tol,
        stalled,
        trace,
        wall_time: start.elapsed(),
    };
    Ok((beta, report))
}

/// Solves `H p = −g` by Cholesky, adding diagonal jitter if `H` is not
/// numerically positive definite; falls back to steepest descent.
fn newton_direction(hess: &[f64], grad: &[f64], d: usize) -> Vec<f64> {
    let g = DVector::from_column_slice(grad);
    let scale = (0..d)
        .map(|a| hess[a * d + a].abs())
        .fold(0.0, f64::max)
        .max(1e-12);
    let mut jitter = 0.0;
    for _ in 0..12 {
        let mut h = DMatrix::from_row_slice(d, d, hess);
        for a in 0..d {
            h[(a, a)] += jitter;
        }
        if let Some(ch) = h.cholesky() {
            let p = ch.solve(&(-&g));
            if p.iter().all(|v| v.is_finite()) {
                return p.iter().copied().collect();
            }
        }
        jitter = if jitter == 0.0 {
            1e-10 * scale
        } else {
            jitter * 10.0
        };
    }
    grad.iter().map(|v| -v).collect()
}

/// Smallest lasso weight for which `β = 0` solves the penalized problem:
/// `‖∇ loss(0)‖_∞`.
pub fn lasso_lambda_max(ds: &SurvivalDataset) -> Result<f64, FitError> {
    let (_, g) = negative_log_partial_likelihood_grad(ds, &vec![0.0; ds.n_features()])?;
    Ok(optim::inf_norm(&g))
}
