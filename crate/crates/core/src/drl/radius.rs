use serde::{Deserialize, Serialize};

use crate::data::{DataDiameter, SurvivalDataset};
use crate::error::FitError;
use crate::norm::NormOrder;

/// Radius above which the robust optimum bounds the true expected loss with
/// probability at least `1 − significance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSuggestion {
    pub b_alpha: f64,
    pub significance: f64,
    pub n: usize,
    pub diameter_used: DataDiameter,
    pub approximate: bool,
}

/// `B(α) = diam_p(data) · sqrt(log(1/α) / N)`.
pub fn suggest_radius(
    ds: &SurvivalDataset,
    significance: f64,
    p: NormOrder,
) -> Result<RadiusSuggestion, FitError> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(FitError::InvalidConfig(format!(
            "significance must lie in (0, 1), got {significance}"
        )));
    }
    let diameter = ds.diameter(p);
    Ok(RadiusSuggestion {
        b_alpha: threshold(diameter.value, ds.len(), significance),
        significance,
        n: ds.len(),
        diameter_used: diameter,
        approximate: diameter.approximate,
    })
}

pub fn threshold(diameter: f64, n: usize, significance: f64) -> f64 {
    diameter * ((1.0 / significance).ln() / n as f64).sqrt()
}

/// Log-spaced grid of `points` radii spanning `[b/100, 10·b]`.
pub fn epsilon_grid(b: f64, points: usize) -> Vec<f64> {
    if !(b > 0.0) || points == 0 {
        return vec![0.0];
    }
    if points == 1 {
        return vec![b];
    }
    let (lo, hi) = ((b / 100.0).ln(), (10.0 * b).ln());
    (0..points)
        .map(|k| (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_arithmetic() {
        assert!((threshold(2.0, 50, 0.1) - 0.42919).abs() < 1e-5);
        assert!((threshold(1.0, 100, 0.05) - 0.17309).abs() < 1e-5);
    }

    #[test]
    fn grid_endpoints() {
        let g = epsilon_grid(0.5, 7);
        assert_eq!(g.len(), 7);
        assert!((g[0] - 0.005).abs() < 1e-15);
        assert!((g[6] - 5.0).abs() < 1e-12);
        for w in g.windows(2) {
            assert!((w[1] / w[0] - 10f64.powf(0.5)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_significance() {
        let ds = SurvivalDataset::from_rows(vec![vec![0.0]], vec![1.0], vec![true]).unwrap();
        assert!(suggest_radius(&ds, 1.0, NormOrder::Two).is_err());
        assert!(suggest_radius(&ds, 0.0, NormOrder::Two).is_err());
        assert_eq!(
            suggest_radius(&ds, 0.5, NormOrder::Two).unwrap().b_alpha,
            0.0
        );
    }
}
