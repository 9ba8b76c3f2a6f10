use std::time::Instant;

use super::prox::prox_norm;
use super::{dot, inf_norm, SmoothProblem, SolveReport, BACKTRACK};
use crate::error::OptimError;
use crate::norm::NormOrder;

/// Stopping rule for [`minimize_composite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// `‖x_k − x_{k+1}‖_∞ / t_k < tol` (gradient-mapping norm).
    ProxResidual,
    /// `|F_{k+1} − F_k| / max(|F_k|, 1) < tol`.
    RelativeObjective,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositeOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub stop: StopRule,
}

impl Default for CompositeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            stop: StopRule::ProxResidual,
        }
    }
}

const MIN_STEP_SIZE: f64 = 1e-20;
const MAX_STEP_SIZE: f64 = 1e12;

/// Minimizes `f(x) + weight·‖x‖_q` where `f` is the smooth problem.
///
/// Step sizes start from the Barzilai–Borwein estimate and are halved until
/// `f(x⁺) ≤ f(x) + ∇f(x)'(x⁺ − x) + ‖x⁺ − x‖²/(2t)`, which guarantees the
/// composite objective never increases.
pub fn minimize_composite<P: SmoothProblem + ?Sized>(
    problem: &P,
    x0: &[f64],
    q: NormOrder,
    weight: f64,
    opts: CompositeOptions,
) -> Result<(Vec<f64>, SolveReport), OptimError> {
    let start = Instant::now();
    let n = problem.dim();
    if x0.len() != n {
        return Err(OptimError::DimensionMismatch {
            expected: n,
            found: x0.len(),
        });
    }
    if !(opts.tol > 0.0) {
        return Err(OptimError::InvalidTolerance(opts.tol));
    }
    if !(weight >= 0.0) || !weight.is_finite() {
        return Err(OptimError::InvalidWeight(weight));
    }

    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = problem.value_grad(&x, &mut g);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(OptimError::NonFiniteStart);
    }
    let mut big_f = f + weight * q.norm(&x);
    let mut trace = vec![big_f];
    let mut g_new = vec![0.0; n];
    let mut t = {
        let gn = inf_norm(&g);
        if gn > 0.0 {
            (1.0 / gn).min(1.0)
        } else {
            1.0
        }
    };
    let mut iterations = 0;
    let mut criterion = f64::INFINITY;
    let mut converged = false;
    let mut stalled = false;

    while iterations < opts.max_iter {
        let accepted = loop {
            let v: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - t * gi).collect();
            let x_new = prox_norm(q, t * weight, &v);
            let f_new = problem.value_grad(&x_new, &mut g_new);
            let diff: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
            let bound = f + dot(&g, &diff) + dot(&diff, &diff) / (2.0 * t);
            if f_new.is_finite()
                && g_new.iter().all(|v| v.is_finite())
                && f_new <= bound + 1e-15 * f.abs().max(1.0)
            {
                break Some((x_new, f_new, diff));
            }
            t *= BACKTRACK;
            if t < MIN_STEP_SIZE {
                break None;
            }
        };
        let Some((x_new, f_new, diff)) = accepted else {
            stalled = true;
            break;
        };
        let big_f_new = f_new + weight * q.norm(&x_new);
        criterion = match opts.stop {
            StopRule::ProxResidual => inf_norm(&diff) / t,
            StopRule::RelativeObjective => (big_f - big_f_new).abs() / big_f.abs().max(1.0),
        };

        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&diff, &y);
        let ss = dot(&diff, &diff);
        t = if sy > 0.0 && ss > 0.0 {
            (ss / sy).clamp(MIN_STEP_SIZE, MAX_STEP_SIZE)
        } else {
            (t * 2.0).min(MAX_STEP_SIZE)
        };

        x = x_new;
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        big_f = big_f_new;
        trace.push(big_f);
        iterations += 1;
        if criterion < opts.tol {
            converged = true;
            break;
        }
    }

    let report = SolveReport {
        iterations,
        final_criterion: criterion,
        objective: big_f,
        converged,
        stalled,
        trace,
        wall_time: start.elapsed(),
    };
    Ok((x, report))
}
