//! Synthetic proportional-hazards data.
//!
//! Covariates are independent standard normals. Event times follow an
//! exponential proportional-hazards model, `T = −ln U / exp(β'x)`, and
//! censoring times are exponential with a rate chosen by bisection so that the
//! expected censoring fraction of the drawn sample, `mean_i c/(c + exp(β'x_i))`,
//! matches the requested rate.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{Subject, SurvivalDataset};
use crate::error::DataError;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n: usize,
    pub d: usize,
    /// Target censoring fraction in [0, 1).
    pub censoring: f64,
    pub seed: u64,
    /// True coefficients; when absent, [`default_beta`] is used.
    pub beta: Option<Vec<f64>>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 600,
            d: 10,
            censoring: 0.6,
            seed: 0,
            beta: None,
        }
    }
}

/// Alternating-sign coefficients of slowly decaying size:
/// `β_j = (−1)^j · 1/(1 + j/2)`, j = 0, 1, …
pub fn default_beta(d: usize) -> Vec<f64> {
    (0..d)
        .map(|j| {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            sign / (1.0 + j as f64 / 2.0)
        })
        .collect()
}

pub fn generate(spec: &SyntheticSpec) -> Result<SurvivalDataset, DataError> {
    if spec.n == 0 {
        return Err(DataError::Empty);
    }
    if !(0.0..1.0).contains(&spec.censoring) {
        return Err(DataError::InvalidFraction(spec.censoring));
    }
    let beta = spec.beta.clone().unwrap_or_else(|| default_beta(spec.d));
    if beta.len() != spec.d {
        return Err(DataError::DimensionMismatch {
            expected: spec.d,
            found: beta.len(),
        });
    }
    let mut r = rng::seeded(spec.seed);
    let xs: Vec<Vec<f64>> = (0..spec.n)
        .map(|_| (0..spec.d).map(|_| StandardNormal.sample(&mut r)).collect())
        .collect();
    let hazards: Vec<f64> = xs
        .iter()
        .map(|x| x.iter().zip(&beta).map(|(a, b)| a * b).sum::<f64>().exp())
        .collect();
    let rate = censoring_rate_for(&hazards, spec.censoring);

    let subjects = xs
        .into_iter()
        .zip(&hazards)
        .map(|(covariates, &h)| {
            let t = exp_draw(&mut r, h);
            let (duration, event) = if rate > 0.0 {
                let c = exp_draw(&mut r, rate);
                if c < t {
                    (c, false)
                } else {
                    (t, true)
                }
            } else {
                (t, true)
            };
            Subject {
                covariates,
                duration,
                event,
            }
        })
        .collect();
    let names = (1..=spec.d).map(|j| format!("x{j}")).collect();
    SurvivalDataset::new(names, subjects)
}

fn exp_draw(r: &mut rng::Rng, rate: f64) -> f64 {
    // 1 - U lies in (0, 1], so the draw is finite; clamp away from zero duration
    let u: f64 = r.random();
    (-(1.0 - u).ln() / rate).max(f64::MIN_POSITIVE)
}

fn censoring_rate_for(hazards: &[f64], target: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    let expected = |c: f64| hazards.iter().map(|h| c / (c + h)).sum::<f64>() / hazards.len() as f64;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while expected(hi) < target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expected(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
