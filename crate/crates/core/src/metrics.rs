//! Discrimination metrics for survival predictions.
//!
//! Scores are risk scores: a higher score predicts an earlier event. All
//! functions take scores aligned with the canonical (decreasing-duration)
//! order of the dataset they are evaluated on.

use serde::{Deserialize, Serialize};

use crate::data::SurvivalDataset;
use crate::error::MetricError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcordanceResult {
    pub c_index: f64,
    pub concordant: u64,
    pub discordant: u64,
    pub tied_risk: u64,
    pub comparable: u64,
}

fn check_len(ds: &SurvivalDataset, scores: &[f64]) -> Result<(), MetricError> {
    if scores.len() != ds.len() {
        return Err(MetricError::LengthMismatch {
            scores: scores.len(),
            subjects: ds.len(),
        });
    }
    if let Some(&s) = scores.iter().find(|s| !s.is_finite()) {
        return Err(MetricError::NonFiniteScore(s));
    }
    Ok(())
}

/// Harrell's concordance index.
///
/// A pair is comparable when the shorter duration ends in an event; pairs with
/// equal durations are never comparable. Tied scores count one half.
///
/// Runs in O(N log N): subjects are visited in canonical order one tie group
/// at a time, and each event queries a Fenwick tree holding the score ranks of
/// all strictly longer durations.
pub fn c_index(ds: &SurvivalDataset, scores: &[f64]) -> Result<ConcordanceResult, MetricError> {
    check_len(ds, scores)?;
    let n = scores.len();
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rank = |s: f64| sorted.partition_point(|&v| v < s);

    let mut tree = Fenwick::new(sorted.len());
    let (mut concordant, mut discordant, mut tied) = (0u64, 0u64, 0u64);
    let mut start = 0;
    while start < n {
        let end = ds.risk_end(start);
        let inserted = start as u64;
        for k in start..=end {
            if !ds.event(k) {
                continue;
            }
            let r = rank(scores[k]);
            let below = tree.prefix(r);
            let equal = tree.prefix(r + 1) - below;
            concordant += below;
            tied += equal;
            discordant += inserted - below - equal;
        }
        for &s in &scores[start..=end] {
            tree.add(rank(s));
        }
        start = end + 1;
    }
    let comparable = concordant + discordant + tied;
    if comparable == 0 {
        return Err(MetricError::NoComparablePairs);
    }
    Ok(ConcordanceResult {
        c_index: (concordant as f64 + 0.5 * tied as f64) / comparable as f64,
        concordant,
        discordant,
        tied_risk: tied,
        comparable,
    })
}

struct Fenwick {
    tree: Vec<u64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, i: usize) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Count of inserted ranks `< i`.
    fn prefix(&self, i: usize) -> u64 {
        let mut i = i;
        let mut sum = 0;
        while i > 0 {
            sum += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        sum
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KmTarget {
    Event,
    Censoring,
}

/// Right-continuous step function from the product-limit estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaplanMeierCurve {
    pub times: Vec<f64>,
    pub survival: Vec<f64>,
}

impl KaplanMeierCurve {
    /// `S(t)`.
    pub fn at(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&u| u <= t);
        if k == 0 {
            1.0
        } else {
            self.survival[k - 1]
        }
    }

    /// `S(t⁻)`, the value just before `t`.
    pub fn left_limit(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&u| u < t);
        if k == 0 {
            1.0
        } else {
            self.survival[k - 1]
        }
    }
}

/// Product-limit estimate of the event (or, with [`KmTarget::Censoring`], the
/// censoring) survival function. At-risk counts use `y ≥ t`.
pub fn kaplan_meier(ds: &SurvivalDataset, target: KmTarget) -> KaplanMeierCurve {
    let n = ds.len();
    let hit = |k: usize| match target {
        KmTarget::Event => ds.event(k),
        KmTarget::Censoring => !ds.event(k),
    };
    // canonical order is decreasing; walk tie groups from the shortest duration
    let mut groups = Vec::new();
    let mut start = 0;
    while start < n {
        let end = ds.risk_end(start);
        groups.push((start, end));
        start = end + 1;
    }
    let mut times = Vec::new();
    let mut survival = Vec::new();
    let mut s = 1.0;
    for &(start, end) in groups.iter().rev() {
        let at_risk = (end + 1) as f64;
        let hits = (start..=end).filter(|&k| hit(k)).count();
        if hits > 0 {
            s *= 1.0 - hits as f64 / at_risk;
            times.push(ds.duration(start));
            survival.push(s);
        }
    }
    KaplanMeierCurve { times, survival }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IaucResult {
    pub iauc: f64,
    pub time_grid: Vec<f64>,
    pub auc_at_time: Vec<f64>,
    /// Upper end of the admissible time range (90th percentile of test durations).
    pub horizon: f64,
    /// Set when the censoring survival estimate reached zero and the grid was
    /// cut short.
    pub truncated: bool,
}

/// Integrated cumulative/dynamic AUC.
///
/// At each grid time `t`, cases are test subjects with an event at or before
/// `t` and controls are those still at risk after `t`. Each case carries the
/// inverse-probability-of-censoring weight `1/Ĝ(y_i⁻)`, with `Ĝ` the censoring
/// Kaplan–Meier curve of `train`. The control weight `1/Ĝ(t)` is shared by
/// every control and cancels. `AUC(t)` is the weighted fraction of
/// (case, control) pairs in which the case scores higher, ties counting one
/// half.
///
/// The grid holds the distinct test event times no later than the 90th
/// percentile of test durations that still leave at least one control. The
/// curve is integrated with trapezoids against the decrease of the test-event
/// Kaplan–Meier curve and normalized by the total decrease over the grid.
pub fn iauc(
    test: &SurvivalDataset,
    scores: &[f64],
    train: &SurvivalDataset,
) -> Result<IaucResult, MetricError> {
    check_len(test, scores)?;
    let censoring = kaplan_meier(train, KmTarget::Censoring);
    let event_km = kaplan_meier(test, KmTarget::Event);
    let n = test.len();
    let horizon = quantile(&test.durations(), 0.9);
    let max_duration = test.duration(0);

    let mut grid: Vec<f64> = event_km
        .times
        .iter()
        .copied()
        .filter(|&t| t <= horizon && t < max_duration)
        .collect();

    let weights: Vec<f64> = (0..n)
        .map(|k| {
            let g = censoring.left_limit(test.duration(k));
            if g > 0.0 {
                1.0 / g
            } else {
                f64::INFINITY
            }
        })
        .collect();

    let mut truncated = false;
    if let Some(cut) = (0..n)
        .filter(|&k| test.event(k) && weights[k].is_infinite())
        .map(|k| test.duration(k))
        .min_by(f64::total_cmp)
    {
        let before = grid.len();
        grid.retain(|&t| t < cut);
        truncated = grid.len() < before;
    }
    if grid.len() < 2 {
        return Err(MetricError::InsufficientGrid(grid.len()));
    }

    // subjects sorted by increasing duration so cases at t form a prefix
    let by_time: Vec<usize> = (0..n).rev().collect();
    let auc: Vec<f64> = grid
        .iter()
        .map(|&t| {
            let split = by_time.partition_point(|&k| test.duration(k) <= t);
            let (early, late) = by_time.split_at(split);
            let controls = ScoreCounter::new(late.iter().map(|&k| scores[k]).collect());
            let mut num = 0.0;
            let mut den = 0.0;
            for &i in early.iter().filter(|&&i| test.event(i)) {
                let (below, equal) = controls.counts(scores[i]);
                num += weights[i] * (below as f64 + 0.5 * equal as f64);
                den += weights[i] * controls.len() as f64;
            }
            num / den
        })
        .collect();

    let surv: Vec<f64> = grid.iter().map(|&t| event_km.at(t)).collect();
    let mut integral = 0.0;
    for k in 0..grid.len() - 1 {
        integral += 0.5 * (auc[k] + auc[k + 1]) * (surv[k] - surv[k + 1]);
    }
    let mass = surv[0] - surv[grid.len() - 1];
    Ok(IaucResult {
        iauc: integral / mass,
        time_grid: grid,
        auc_at_time: auc,
        horizon,
        truncated,
    })
}

struct ScoreCounter {
    sorted: Vec<f64>,
}

impl ScoreCounter {
    fn new(mut scores: Vec<f64>) -> Self {
        scores.sort_by(f64::total_cmp);
        Self { sorted: scores }
    }

    fn len(&self) -> usize {
        self.sorted.len()
    }

    /// Number of stored scores strictly below and equal to `s`.
    fn counts(&self, s: f64) -> (usize, usize) {
        let lo = self.sorted.partition_point(|&v| v < s);
        let hi = self.sorted.partition_point(|&v| v <= s);
        (lo, hi - lo)
    }
}

/// Linear-interpolation quantile of unsorted data.
fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}
