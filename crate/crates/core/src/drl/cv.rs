use serde::{Deserialize, Serialize};

use super::{fit_drl_cox, DrlConfig};
use crate::cv::{cross_validate, CvRow};
use crate::data::SurvivalDataset;
use crate::error::CvError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCv {
    pub best_epsilon: f64,
    pub table: Vec<CvRow>,
}

/// k-fold selection of ε by mean held-out concordance. Ties go to the larger
/// radius.
pub fn cross_validate_epsilon(
    ds: &SurvivalDataset,
    grid: &[f64],
    folds: usize,
    template: &DrlConfig,
    seed: u64,
) -> Result<EpsilonCv, CvError> {
    template.validate()?;
    let outcome = cross_validate(ds, grid, folds, seed, |train, epsilon| {
        let cfg = DrlConfig {
            epsilon,
            ..*template
        };
        Ok(fit_drl_cox(train, &cfg)?.beta)
    })?;
    Ok(EpsilonCv {
        best_epsilon: outcome.best,
        table: outcome.table,
    })
}
