//! K-fold selection of a scalar hyperparameter by held-out concordance.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cox::linear_risk_scores;
use crate::data::SurvivalDataset;
use crate::error::{CvError, FitError};
use crate::metrics::c_index;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub value: f64,
    pub mean_c_index: f64,
    /// Held-out C-index per fold; `None` where it is undefined.
    pub fold_c_index: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub best: f64,
    pub table: Vec<CvRow>,
}

/// Assigns canonical row indices to `k` folds. Events and censored rows are
/// shuffled separately and dealt round-robin, so every fold receives events
/// whenever there are at least `k` of them.
pub fn stratified_folds(
    ds: &SurvivalDataset,
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, CvError> {
    if k < 2 || k > ds.len() {
        return Err(CvError::TooFewFolds(k));
    }
    let mut r = rng::seeded(seed);
    let mut events: Vec<usize> = (0..ds.len()).filter(|&i| ds.event(i)).collect();
    let mut censored: Vec<usize> = (0..ds.len()).filter(|&i| !ds.event(i)).collect();
    events.shuffle(&mut r);
    censored.shuffle(&mut r);
    let mut folds = vec![Vec::new(); k];
    for (pos, &row) in events.iter().chain(&censored).enumerate() {
        folds[pos % k].push(row);
    }
    for (fold, rows) in folds.iter_mut().enumerate() {
        rows.sort_unstable();
        if !rows.iter().any(|&i| ds.event(i)) {
            return Err(CvError::FoldWithoutEvents { fold });
        }
    }
    Ok(folds)
}

/// Scores every grid value on every fold and returns the value with the
/// highest mean held-out C-index, preferring the larger value on ties.
///
/// `fit` maps a training set and a grid value to a coefficient vector whose
/// first `d` entries are used as linear risk weights. Fits are independent
/// cold starts, so repeated grid values produce identical rows. Folds where
/// the held-out C-index is undefined are left out of the mean.
pub fn cross_validate<F>(
    ds: &SurvivalDataset,
    grid: &[f64],
    folds: usize,
    seed: u64,
    fit: F,
) -> Result<CvOutcome, CvError>
where
    F: Fn(&SurvivalDataset, f64) -> Result<Vec<f64>, FitError> + Sync,
{
    if grid.is_empty() {
        return Err(CvError::EmptyGrid);
    }
    if let Some(&v) = grid.iter().find(|v| !v.is_finite()) {
        return Err(CvError::InvalidGridValue(v));
    }
    let assignment = stratified_folds(ds, folds, seed)?;
    let d = ds.n_features();
    let parts: Vec<(SurvivalDataset, SurvivalDataset)> = assignment
        .iter()
        .enumerate()
        .map(|(f, held)| {
            let train: Vec<usize> = assignment
                .iter()
                .enumerate()
                .filter(|&(g, _)| g != f)
                .flat_map(|(_, rows)| rows.iter().copied())
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect();
            let train = ds.subset(&train).expect("fold indices are in range");
            let valid = ds.subset(held).expect("fold indices are in range");
            (train, valid)
        })
        .collect();

    let jobs: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|g| (0..folds).map(move |f| (g, f)))
        .collect();
    let scores: Vec<Option<f64>> = jobs
        .par_iter()
        .map(|&(g, f)| {
            let (train, valid) = &parts[f];
            let coef = fit(train, grid[g])?;
            let risk = linear_risk_scores(&coef[..d], valid)?;
            Ok(c_index(valid, &risk).ok().map(|c| c.c_index))
        })
        .collect::<Result<_, CvError>>()?;

    let mut table = Vec::with_capacity(grid.len());
    for (g, &value) in grid.iter().enumerate() {
        let fold_c_index = scores[g * folds..(g + 1) * folds].to_vec();
        let defined: Vec<f64> = fold_c_index.iter().flatten().copied().collect();
        if defined.is_empty() {
            return Err(CvError::Undefined(value));
        }
        let mean_c_index = defined.iter().sum::<f64>() / defined.len() as f64;
        table.push(CvRow {
            value,
            mean_c_index,
            fold_c_index,
        });
    }
    let best = table
        .iter()
        .fold(None::<&CvRow>, |best, row| match best {
            Some(b) if b.mean_c_index > row.mean_c_index => Some(b),
            Some(b) if b.mean_c_index == row.mean_c_index && b.value >= row.value => Some(b),
            _ => Some(row),
        })
        .map(|r| r.value)
        .expect("grid is non-empty");
    Ok(CvOutcome { best, table })
}
