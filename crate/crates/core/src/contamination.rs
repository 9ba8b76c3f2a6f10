//! Seeded corruption of covariates: distributional shift and outlier noise.
//!
//! Both generators are pure functions of `(dataset, spec)`. They never touch
//! durations, event flags or the shape of the table, and they operate on the
//! canonical row order, so the same seed always corrupts the same subjects.

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::ContaminationError;
use crate::rng;

/// Which part of a train/test split a shift is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftTarget {
    #[default]
    Train,
    Test,
    Both,
}

impl ShiftTarget {
    pub fn affects_train(self) -> bool {
        matches!(self, ShiftTarget::Train | ShiftTarget::Both)
    }

    pub fn affects_test(self) -> bool {
        matches!(self, ShiftTarget::Test | ShiftTarget::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftSpec {
    /// Number of feature columns replaced.
    pub intensity: usize,
    pub seed: u64,
    #[serde(default)]
    pub target: ShiftTarget,
}

pub const DEFAULT_FEATURE_FRACTION: f64 = 0.3;

fn default_feature_fraction() -> f64 {
    DEFAULT_FEATURE_FRACTION
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutlierSpec {
    /// Fraction of rows perturbed.
    pub ratio: f64,
    /// Noise standard deviation in units of the column standard deviation.
    pub severity: u32,
    /// Fraction of columns perturbed within each selected row.
    #[serde(default = "default_feature_fraction")]
    pub feature_fraction: f64,
    pub seed: u64,
}

/// Replaces `intensity` randomly chosen columns by independent standard-normal
/// draws. Columns are drawn first, then the noise, from one stream seeded by
/// `spec.seed`.
pub fn apply_shift(
    ds: &SurvivalDataset,
    spec: &ShiftSpec,
) -> Result<SurvivalDataset, ContaminationError> {
    let d = ds.n_features();
    check_intensity(spec.intensity, d)?;
    let mut r = rng::seeded(spec.seed);
    let columns = sample_columns(&mut r, d, spec.intensity);
    Ok(replace_with_noise(ds, &columns, &mut r))
}

/// The column set [`apply_shift`] would replace for this spec on `d` features.
pub fn shift_columns(d: usize, spec: &ShiftSpec) -> Result<Vec<usize>, ContaminationError> {
    check_intensity(spec.intensity, d)?;
    Ok(sample_columns(
        &mut rng::seeded(spec.seed),
        d,
        spec.intensity,
    ))
}

/// Replaces the given columns by standard-normal draws seeded by `seed`.
/// Used to shift the same features in several parts of a split with
/// independent noise.
pub fn replace_columns(
    ds: &SurvivalDataset,
    columns: &[usize],
    seed: u64,
) -> Result<SurvivalDataset, ContaminationError> {
    let d = ds.n_features();
    if let Some(&j) = columns.iter().find(|&&j| j >= d) {
        return Err(ContaminationError::InvalidIntensity {
            intensity: j + 1,
            features: d,
        });
    }
    Ok(replace_with_noise(ds, columns, &mut rng::seeded(seed)))
}

fn check_intensity(intensity: usize, d: usize) -> Result<(), ContaminationError> {
    if intensity == 0 || intensity > d {
        return Err(ContaminationError::InvalidIntensity {
            intensity,
            features: d,
        });
    }
    Ok(())
}

fn sample_columns(r: &mut rng::Rng, d: usize, k: usize) -> Vec<usize> {
    let mut columns = index::sample(r, d, k).into_vec();
    columns.sort_unstable();
    columns
}

fn replace_with_noise(
    ds: &SurvivalDataset,
    columns: &[usize],
    r: &mut rng::Rng,
) -> SurvivalDataset {
    ds.map_covariates(|_, x| {
        let mut x = x.to_vec();
        for &j in columns {
            x[j] = StandardNormal.sample(&mut *r);
        }
        x
    })
}

/// `⌈ratio·N⌉`, guarded against representation error in `ratio·N`.
pub fn outlier_count(ratio: f64, n: usize) -> usize {
    ceil_guarded(ratio * n as f64)
}

fn ceil_guarded(v: f64) -> usize {
    (v - 1e-9).ceil().max(0.0) as usize
}

/// Adds Gaussian noise with standard deviation `severity × column std` to a
/// random subset of the columns of `⌈ratio·N⌉` random rows.
///
/// The noise is generated as a unit-variance draw times the scale, so specs
/// that differ only in severity perturb the same cells with proportional
/// noise. Returns the corrupted copy and a canonical-order row mask.
pub fn inject_outliers(
    ds: &SurvivalDataset,
    spec: &OutlierSpec,
) -> Result<(SurvivalDataset, Vec<bool>), ContaminationError> {
    if !(spec.ratio > 0.0 && spec.ratio < 1.0) {
        return Err(ContaminationError::InvalidRatio(spec.ratio));
    }
    if !(1..=5).contains(&spec.severity) {
        return Err(ContaminationError::InvalidSeverity(spec.severity));
    }
    if !(spec.feature_fraction > 0.0 && spec.feature_fraction <= 1.0) {
        return Err(ContaminationError::InvalidFeatureFraction(
            spec.feature_fraction,
        ));
    }
    let (n, d) = (ds.len(), ds.n_features());
    let rows = outlier_count(spec.ratio, n);
    if rows == 0 || d == 0 {
        return Err(ContaminationError::NoRowsSelected);
    }
    let per_row = ceil_guarded(spec.feature_fraction * d as f64).clamp(1, d);
    let scale: Vec<f64> = (0..d)
        .map(|j| spec.severity as f64 * ds.column_stats(j).1)
        .collect();

    let mut r = rng::seeded(spec.seed);
    let mut mask = vec![false; n];
    for k in index::sample(&mut r, n, rows) {
        mask[k] = true;
    }
    // noise for flagged rows is drawn in canonical order after the row choice
    Ok((
        ds.map_covariates(|k, x| {
            let mut x = x.to_vec();
            if mask[k] {
                let mut cols = index::sample(&mut r, d, per_row).into_vec();
                cols.sort_unstable();
                for j in cols {
                    let z: f64 = StandardNormal.sample(&mut r);
                    x[j] += scale[j] * z;
                }
            }
            x
        }),
        mask,
    ))
}
