use std::collections::VecDeque;
use std::time::Instant;

use super::{
    accept_step, dot, inf_norm, SmoothProblem, SolveReport, BACKTRACK, LBFGS_MEMORY, MIN_STEP,
};
use crate::error::OptimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothOptions {
    /// Converged once `‖∇f‖_∞ < tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SmoothOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 1000,
        }
    }
}

/// L-BFGS with Armijo backtracking. Returns the best iterate found; the report
/// says whether the gradient criterion held there.
pub fn minimize_smooth<P: SmoothProblem + ?Sized>(
    problem: &P,
    x0: &[f64],
    opts: SmoothOptions,
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

    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    let mut f = problem.value_grad(&x, &mut g);
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(OptimError::NonFiniteStart);
    }

    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(LBFGS_MEMORY);
    let mut trace = vec![f];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut dir = vec![0.0; n];
    let mut alpha_buf = vec![0.0; LBFGS_MEMORY];
    let mut iterations = 0;
    let mut stalled = false;
    let mut gnorm = inf_norm(&g);

    while gnorm >= opts.tol && iterations < opts.max_iter {
        two_loop(&g, &mem, &mut dir, &mut alpha_buf);
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            mem.clear();
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            slope = -dot(&g, &g);
        }
        let mut step = if mem.is_empty() {
            (1.0 / inf_norm(&dir)).min(1.0)
        } else {
            1.0
        };

        let f_new = loop {
            for i in 0..n {
                x_new[i] = x[i] + step * dir[i];
            }
            let fv = problem.value_grad(&x_new, &mut g_new);
            if fv.is_finite()
                && g_new.iter().all(|v| v.is_finite())
                && accept_step(f, fv, step, slope, dot(&g_new, &dir))
            {
                break Some(fv);
            }
            step *= BACKTRACK;
            if step * inf_norm(&dir) < MIN_STEP * (1.0 + inf_norm(&x)) || step < MIN_STEP {
                break None;
            }
        };
        let Some(f_new) = f_new else {
            stalled = true;
            break;
        };

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if mem.len() == LBFGS_MEMORY {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut x, &mut x_new);
        std::mem::swap(&mut g, &mut g_new);
        f = f_new;
        gnorm = inf_norm(&g);
        trace.push(f);
        iterations += 1;
    }

    let report = SolveReport {
        iterations,
        final_criterion: gnorm,
        objective: f,
        converged: gnorm < opts.tol,
        stalled,
        trace,
        wall_time: start.elapsed(),
    };
    Ok((x, report))
}

fn two_loop(
    g: &[f64],
    mem: &VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    dir: &mut [f64],
    alpha: &mut [f64],
) {
    dir.iter_mut().zip(g).for_each(|(d, gi)| *d = -gi);
    for (k, (s, y, rho)) in mem.iter().enumerate().rev() {
        let a = rho * dot(s, dir);
        alpha[k] = a;
        dir.iter_mut().zip(y).for_each(|(d, yi)| *d -= a * yi);
    }
    if let Some((s, y, _)) = mem.back() {
        let gamma = dot(s, y) / dot(y, y);
        dir.iter_mut().for_each(|d| *d *= gamma);
    }
    for (k, (s, y, rho)) in mem.iter().enumerate() {
        let b = rho * dot(y, dir);
        let a = alpha[k];
        dir.iter_mut().zip(s).for_each(|(d, si)| *d += (a - b) * si);
    }
}
