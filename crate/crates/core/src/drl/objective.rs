use crate::data::SurvivalDataset;
use crate::drl::DrlConfig;
use crate::error::FitError;
use crate::norm::NormOrder;
use crate::optim::dot;

/// Per-subject risk-set quantities for a fixed `β`.
pub(crate) struct RiskSets {
    /// `β'x_k`
    pub eta: Vec<f64>,
    /// `log Σ_{m: y_m ≥ y_k} exp(β'x_m)`
    pub log_risk: Vec<f64>,
    /// exp(β'x)-weighted covariate mean over the risk set of `k`, row-major N×d
    pub mean_x: Vec<f64>,
}

impl RiskSets {
    /// One pass over the canonical order with sums kept relative to the running
    /// maximum of `β'x`.
    pub fn new(ds: &SurvivalDataset, beta: &[f64], with_means: bool) -> Result<Self, FitError> {
        let n = ds.len();
        let d = ds.n_features();
        if beta.len() != d {
            return Err(FitError::DimensionMismatch {
                expected: d,
                found: beta.len(),
            });
        }
        let mut eta = Vec::with_capacity(n);
        let mut prefix_log = Vec::with_capacity(n);
        let mut prefix_mean = vec![0.0; if with_means { n * d } else { 0 }];
        let mut m = f64::NEG_INFINITY;
        let mut s = 0.0;
        let mut gsum = vec![0.0; if with_means { d } else { 0 }];
        for k in 0..n {
            let x = ds.covariates(k);
            let e = dot(beta, x);
            if !e.is_finite() {
                return Err(FitError::NonFinite);
            }
            if e > m {
                let r = (m - e).exp();
                s *= r;
                gsum.iter_mut().for_each(|v| *v *= r);
                m = e;
            }
            let w = (e - m).exp();
            s += w;
            if with_means {
                for a in 0..d {
                    gsum[a] += w * x[a];
                    prefix_mean[k * d + a] = gsum[a] / s;
                }
            }
            eta.push(e);
            prefix_log.push(m + s.ln());
        }
        let log_risk = (0..n).map(|k| prefix_log[ds.risk_end(k)]).collect();
        let mean_x = if with_means {
            let mut out = vec![0.0; n * d];
            for k in 0..n {
                let e = ds.risk_end(k);
                out[k * d..(k + 1) * d].copy_from_slice(&prefix_mean[e * d..(e + 1) * d]);
            }
            out
        } else {
            Vec::new()
        };
        Ok(Self {
            eta,
            log_risk,
            mean_x,
        })
    }

    /// `g_ik` without the α term: `log(exp(η_i) + S_k) − η_i`.
    #[inline]
    pub fn base_loss(&self, i: usize, k: usize) -> f64 {
        softplus(self.log_risk[k] - self.eta[i])
    }
}

#[inline]
pub(crate) fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ζ_i [ log(exp(β'x_i) + Σ_{j: y_j ≥ y_i} exp(β'x_j)) − β'x_i ]` for the
/// canonical (0-based) index `i`. The subject appears once inside the sum and
/// once more as the extra self term.
pub fn modified_individual_loss(
    ds: &SurvivalDataset,
    beta: &[f64],
    i: usize,
) -> Result<f64, FitError> {
    if i >= ds.len() {
        return Err(FitError::IndexOutOfRange {
            index: i,
            len: ds.len(),
        });
    }
    let rs = RiskSets::new(ds, beta, false)?;
    Ok(if ds.event(i) { rs.base_loss(i, i) } else { 0.0 })
}

/// `(1/N) Σ_i` of [`modified_individual_loss`].
pub fn mean_modified_loss(ds: &SurvivalDataset, beta: &[f64]) -> Result<f64, FitError> {
    let rs = RiskSets::new(ds, beta, false)?;
    let total: f64 = (0..ds.len())
        .filter(|&i| ds.event(i))
        .map(|i| rs.base_loss(i, i))
        .sum();
    Ok(total / ds.len() as f64)
}

pub(crate) fn window_end(i: usize, gamma: usize, n: usize) -> usize {
    (i + gamma).min(n)
}

/// Exact objective `ε‖(β, α)‖_q + (1/N) Σ_i ζ_i max_{k ∈ W(i)} g_ik`.
pub fn drl_objective(
    ds: &SurvivalDataset,
    beta: &[f64],
    alpha: f64,
    cfg: &DrlConfig,
) -> Result<f64, FitError> {
    cfg.validate()?;
    if !alpha.is_finite() {
        return Err(FitError::NonFinite);
    }
    let rs = RiskSets::new(ds, beta, false)?;
    let n = ds.len();
    let mut total = 0.0;
    for i in (0..n).filter(|&i| ds.event(i)) {
        let yi = ds.duration(i);
        let s = (i..window_end(i, cfg.gamma, n))
            .map(|k| rs.base_loss(i, k) - alpha * (yi - ds.duration(k)))
            .fold(f64::NEG_INFINITY, f64::max);
        total += s;
    }
    let value = cfg.epsilon * params_norm(cfg.q, beta, alpha) + total / n as f64;
    if !value.is_finite() {
        return Err(FitError::NonFinite);
    }
    Ok(value)
}

fn params_norm(q: NormOrder, beta: &[f64], alpha: f64) -> f64 {
    let mut v = beta.to_vec();
    v.push(alpha);
    q.norm(&v)
}

/// Smoothed objective and its gradient with respect to `(β, α)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedObjective {
    /// Full smoothed value, norm term included.
    pub value: f64,
    /// The part of `value` that `gradient` differentiates. For q = 2 this
    /// equals `value` (the norm's gradient is used away from the origin and
    /// zero at it); for q ∈ {1, ∞} the norm term is left to a proximal step
    /// and is excluded here.
    pub smooth_value: f64,
    /// Length d + 1, α last.
    pub gradient: Vec<f64>,
}

impl SmoothedObjective {
    pub fn gradient_includes_norm(q: NormOrder) -> bool {
        q == NormOrder::Two
    }
}

/// Replaces each `max_k g_ik` by `τ log Σ_k exp(g_ik / τ)`, which lies in
/// `[max, max + τ log |W(i)|]`.
pub fn drl_objective_smoothed(
    ds: &SurvivalDataset,
    beta: &[f64],
    alpha: f64,
    cfg: &DrlConfig,
) -> Result<SmoothedObjective, FitError> {
    cfg.validate()?;
    let mut theta = beta.to_vec();
    theta.push(alpha);
    let mut gradient = vec![0.0; theta.len()];
    let with_norm = SmoothedObjective::gradient_includes_norm(cfg.q);
    let (value, smooth_value) = smoothed_into(ds, &theta, cfg, cfg.tau, with_norm, &mut gradient)?;
    Ok(SmoothedObjective {
        value,
        smooth_value,
        gradient,
    })
}

/// Core of the smoothed evaluation; `theta = (β, α)`. Returns
/// `(value, smooth_value)` and writes the gradient of `smooth_value`, which
/// is the loss alone unless `with_norm` is set.
pub(crate) fn smoothed_into(
    ds: &SurvivalDataset,
    theta: &[f64],
    cfg: &DrlConfig,
    tau: f64,
    with_norm: bool,
    grad: &mut [f64],
) -> Result<(f64, f64), FitError> {
    let n = ds.len();
    let d = ds.n_features();
    if theta.len() != d + 1 {
        return Err(FitError::DimensionMismatch {
            expected: d + 1,
            found: theta.len(),
        });
    }
    let (beta, alpha) = (&theta[..d], theta[d]);
    if !alpha.is_finite() {
        return Err(FitError::NonFinite);
    }
    let rs = RiskSets::new(ds, beta, true)?;
    grad.iter_mut().for_each(|g| *g = 0.0);
    let inv_n = 1.0 / n as f64;

    let mut g_ik = Vec::with_capacity(cfg.gamma);
    let mut total = 0.0;
    for i in (0..n).filter(|&i| ds.event(i)) {
        let yi = ds.duration(i);
        let end = window_end(i, cfg.gamma, n);
        g_ik.clear();
        g_ik.extend((i..end).map(|k| rs.base_loss(i, k) - alpha * (yi - ds.duration(k))));
        let top = g_ik.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = g_ik.iter().map(|g| ((g - top) / tau).exp()).sum();
        total += top + tau * z.ln();

        let xi = ds.covariates(i);
        for (off, k) in (i..end).enumerate() {
            let pi = ((g_ik[off] - top) / tau).exp() / z * inv_n;
            let sig = sigmoid(rs.log_risk[k] - rs.eta[i]);
            let mk = &rs.mean_x[k * d..(k + 1) * d];
            for a in 0..d {
                grad[a] += pi * sig * (mk[a] - xi[a]);
            }
            grad[d] -= pi * (yi - ds.duration(k));
        }
    }
    let loss = total * inv_n;
    let norm = cfg.q.norm(theta);
    let value = cfg.epsilon * norm + loss;
    let smooth_value = if with_norm {
        if norm > 0.0 {
            for (g, t) in grad.iter_mut().zip(theta) {
                *g += cfg.epsilon * t / norm;
            }
        }
        value
    } else {
        loss
    };
    if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(FitError::NonFinite);
    }
    Ok((value, smooth_value))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> SurvivalDataset {
        // canonical order y = (3, 2, 1), events (1, 0, 1)
        SurvivalDataset::from_rows(
            vec![vec![0.5], vec![-1.0], vec![2.0]],
            vec![3.0, 2.0, 1.0],
            vec![true, false, true],
        )
        .unwrap()
    }

    fn cfg(epsilon: f64, gamma: usize) -> DrlConfig {
        DrlConfig {
            epsilon,
            gamma,
            ..DrlConfig::default()
        }
    }

    #[test]
    fn modified_loss_examples() {
        let ds = tiny();
        // longest duration: risk set is itself, log(1 + 1)
        assert!((modified_individual_loss(&ds, &[0.0], 0).unwrap() - 2f64.ln()).abs() < 1e-12);
        // censored subject contributes nothing
        assert_eq!(modified_individual_loss(&ds, &[1.3], 1).unwrap(), 0.0);
        // shortest duration: risk set of size 3, log(1 + 3)
        assert!((modified_individual_loss(&ds, &[0.0], 2).unwrap() - 4f64.ln()).abs() < 1e-12);
        assert!((4f64.ln() - 1.3863).abs() < 1e-4);
        assert!(matches!(
            modified_individual_loss(&ds, &[0.0], 3),
            Err(FitError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn window_three_hand_value() {
        let ds = tiny();
        let v = drl_objective(&ds, &[0.0], 0.0, &cfg(0.0, 3)).unwrap();
        assert!((v - 2.0 * 4f64.ln() / 3.0).abs() < 1e-12);
        assert!((v - 0.9242).abs() < 1e-4);
    }

    #[test]
    fn gamma_one_ignores_alpha() {
        let ds = tiny();
        let base = mean_modified_loss(&ds, &[0.7]).unwrap();
        for alpha in [-5.0, 0.0, 2.5] {
            let v = drl_objective(&ds, &[0.7], alpha, &cfg(0.0, 1)).unwrap();
            assert!((v - base).abs() < 1e-15);
        }
    }

    #[test]
    fn only_norm_survives_without_events() {
        let ds = SurvivalDataset::from_rows(vec![vec![1.0]], vec![1.0], vec![false]).unwrap();
        let v = drl_objective(&ds, &[0.0], 3.0, &cfg(1.0, 3)).unwrap();
        assert_eq!(v, 3.0);
    }

    #[test]
    fn smoothing_is_exact_for_single_term_windows() {
        let ds = tiny();
        for tau in [1.0, 0.1, 1e-3] {
            let c = DrlConfig { tau, ..cfg(0.2, 1) };
            let s = drl_objective_smoothed(&ds, &[0.4], 0.3, &c).unwrap();
            let h = drl_objective(&ds, &[0.4], 0.3, &c).unwrap();
            assert!((s.value - h).abs() < 1e-14);
        }
    }

    #[test]
    fn smoothing_gap_at_tiny_temperature() {
        let ds = tiny();
        let c = DrlConfig {
            tau: 1e-6,
            ..cfg(0.0, 3)
        };
        let s = drl_objective_smoothed(&ds, &[0.0], 0.0, &c).unwrap();
        let h = drl_objective(&ds, &[0.0], 0.0, &c).unwrap();
        assert!(s.value >= h - 1e-14);
        assert!(s.value - h <= 1.1e-6);
    }

    #[test]
    fn dimension_mismatch() {
        let ds = tiny();
        assert!(matches!(
            drl_objective(&ds, &[0.0, 0.0], 0.0, &cfg(0.0, 3)),
            Err(FitError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn stable_for_large_linear_predictors() {
        let ds = tiny();
        let v = drl_objective(&ds, &[400.0], 0.0, &cfg(0.0, 3)).unwrap();
        assert!(v.is_finite());
        let s = drl_objective_smoothed(&ds, &[-400.0], 1.0, &cfg(0.0, 3)).unwrap();
        assert!(s.value.is_finite() && s.gradient.iter().all(|g| g.is_finite()));
    }
}
