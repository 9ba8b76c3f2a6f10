use std::time::Instant;

use super::objective::{drl_objective, smoothed_into};
use super::{DrlConfig, DrlModel};
use crate::data::SurvivalDataset;
use crate::error::{FitError, OptimError};
use crate::optim::{minimize_composite, CompositeOptions, FnProblem, SolveReport, StopRule};

/// Tolerance of the intermediate continuation stages; they only provide warm
/// starts, so only the last stage is solved to `cfg.tol`.
const STAGE_TOL: f64 = 1e-6;

/// Temperatures `1, 0.1, 0.01, …` down to `final_tau`, which always closes the
/// schedule.
pub fn tau_schedule(final_tau: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut t = 1.0;
    while t > final_tau * (1.0 + 1e-9) {
        out.push(t);
        t /= 10.0;
    }
    out.push(final_tau);
    out
}

/// Fits the robust model from the origin. See [`fit_drl_cox_from`].
pub fn fit_drl_cox(ds: &SurvivalDataset, cfg: &DrlConfig) -> Result<DrlModel, FitError> {
    fit_drl_cox_from(ds, cfg, None)
}

/// Minimizes the smoothed objective jointly over `(β, α)` with continuation
/// on the temperature (see [`tau_schedule`]), warm-starting each stage.
///
/// Each stage runs spectral proximal gradient: the smoothed loss is the
/// differentiable part and `ε‖(β, α)‖_q` enters through its proximal
/// operator, so the kink of the norm at the origin is handled exactly for
/// every q. Intermediate stages stop at a looser tolerance and may use at
/// most half of the remaining iteration budget each. The continuation stops
/// early once a stage solved to `cfg.tol` changes the objective by less than
/// `cfg.tol` relative.
/// The reported objective is always the exact (hard-max) value.
pub fn fit_drl_cox_from(
    ds: &SurvivalDataset,
    cfg: &DrlConfig,
    init: Option<&[f64]>,
) -> Result<DrlModel, FitError> {
    let start = Instant::now();
    cfg.validate()?;
    let d = ds.n_features();
    let mut theta = match init {
        Some(v) if v.len() != d + 1 => {
            return Err(FitError::DimensionMismatch {
                expected: d + 1,
                found: v.len(),
            })
        }
        Some(v) => v.to_vec(),
        None => vec![0.0; d + 1],
    };

    if ds.n_events() == 0 {
        let theta = vec![0.0; d + 1];
        let objective = drl_objective(ds, &theta[..d], 0.0, cfg)?;
        return Ok(DrlModel {
            beta: theta[..d].to_vec(),
            alpha: 0.0,
            objective_at_solution: objective,
            config: *cfg,
            solver_report: SolveReport {
                objective,
                converged: true,
                ..Default::default()
            },
            degenerate: true,
        });
    }

    let mut remaining = cfg.max_iter;
    let mut iterations = 0;
    let mut trace = Vec::new();
    let mut previous: Option<f64> = None;
    let mut last = SolveReport::default();

    let schedule = tau_schedule(cfg.tau);
    let stages = schedule.len();
    for (stage, tau) in schedule.into_iter().enumerate() {
        let last_stage = stage + 1 == stages;
        let stage_tol = if last_stage {
            cfg.tol
        } else {
            cfg.tol.max(STAGE_TOL)
        };
        let problem = FnProblem::new(d + 1, |x: &[f64], g: &mut [f64]| {
            match smoothed_into(ds, x, cfg, tau, false, g) {
                Ok((_, smooth)) => smooth,
                Err(_) => f64::NAN,
            }
        });
        let solved = minimize_composite(
            &problem,
            &theta,
            cfg.q,
            cfg.epsilon,
            CompositeOptions {
                tol: stage_tol,
                max_iter: if last_stage {
                    remaining
                } else {
                    remaining.div_ceil(2)
                },
                stop: StopRule::ProxResidual,
            },
        );
        let (x, report) = solved.map_err(|e| match e {
            OptimError::NonFiniteStart => FitError::NonFinite,
            other => FitError::Optim(other),
        })?;
        theta = x;
        iterations += report.iterations;
        remaining = remaining.saturating_sub(report.iterations);
        trace.extend_from_slice(&report.trace);
        let stage_value = report.objective;
        last = report;
        if let Some(prev) = previous {
            if last.converged
                && stage_tol <= cfg.tol
                && (stage_value - prev).abs() / prev.abs().max(1.0) < cfg.tol
            {
                break;
            }
        }
        previous = Some(stage_value);
        if remaining == 0 {
            break;
        }
    }

    let objective = drl_objective(ds, &theta[..d], theta[d], cfg)?;
    let report = SolveReport {
        iterations,
        final_criterion: last.final_criterion,
        objective,
        converged: last.converged,
        stalled: last.stalled,
        trace,
        wall_time: start.elapsed(),
    };
    Ok(DrlModel {
        beta: theta[..d].to_vec(),
        alpha: theta[d],
        objective_at_solution: objective,
        config: *cfg,
        solver_report: report,
        degenerate: false,
    })
}
