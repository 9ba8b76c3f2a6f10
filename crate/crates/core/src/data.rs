//! Survival datasets: ingestion, canonical ordering, standardization and
//! splitting.
//!
//! A [`SurvivalDataset`] always stores its subjects in canonical order:
//! durations non-increasing, ties broken by the original row index. Every
//! risk-set computation in the crate relies on that ordering, so the only way
//! to build a dataset is through constructors that establish it.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::DataError;
use crate::norm::NormOrder;
use crate::rng;

/// Above this many rows [`SurvivalDataset::diameter`] switches from the exact
/// pairwise scan to the coordinate-range bound.
pub const EXACT_DIAMETER_MAX_ROWS: usize = 20_000;

/// One observation `(x, y, ζ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subject {
    pub covariates: Vec<f64>,
    pub duration: f64,
    pub event: bool,
}

/// Per-column affine map from the raw scale to the current scale:
/// `current = (raw - mean) / std`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// The ℓp diameter of the observed `(x, y)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DataDiameter {
    pub value: f64,
    pub p: NormOrder,
    /// Set when the value is the coordinate-range over-approximation.
    pub approximate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalDataset {
    subjects: Vec<Subject>,
    /// `order[k]` is the source row of canonical row `k`.
    order: Vec<usize>,
    /// `risk_end[k]` is the last canonical index whose duration equals that of `k`;
    /// the risk set `{j : y_j >= y_k}` is exactly `0..=risk_end[k]`.
    risk_end: Vec<usize>,
    feature_names: Vec<String>,
    standardization: Option<Standardization>,
}

impl SurvivalDataset {
    /// Builds a dataset from rows in source order.
    pub fn new(feature_names: Vec<String>, subjects: Vec<Subject>) -> Result<Self, DataError> {
        let order = (0..subjects.len()).collect();
        Self::from_parts(feature_names, subjects, order, None)
    }

    /// Builds a dataset from a row-major covariate matrix.
    pub fn from_rows(
        covariates: Vec<Vec<f64>>,
        durations: Vec<f64>,
        events: Vec<bool>,
    ) -> Result<Self, DataError> {
        if covariates.len() != durations.len() || events.len() != durations.len() {
            return Err(DataError::DimensionMismatch {
                expected: durations.len(),
                found: covariates.len().min(events.len()),
            });
        }
        let d = covariates.first().map_or(0, Vec::len);
        let names = (1..=d).map(|j| format!("x{j}")).collect();
        let subjects = covariates
            .into_iter()
            .zip(durations)
            .zip(events)
            .map(|((covariates, duration), event)| Subject {
                covariates,
                duration,
                event,
            })
            .collect();
        Self::new(names, subjects)
    }

    fn from_parts(
        feature_names: Vec<String>,
        subjects: Vec<Subject>,
        order: Vec<usize>,
        standardization: Option<Standardization>,
    ) -> Result<Self, DataError> {
        if subjects.is_empty() {
            return Err(DataError::Empty);
        }
        let d = feature_names.len();
        for (row, s) in subjects.iter().enumerate() {
            if s.covariates.len() != d {
                return Err(DataError::DimensionMismatch {
                    expected: d,
                    found: s.covariates.len(),
                });
            }
            if !(s.duration.is_finite() && s.duration > 0.0) {
                return Err(DataError::NonPositiveDuration {
                    row: row + 1,
                    value: s.duration,
                });
            }
            if let Some(j) = s.covariates.iter().position(|v| !v.is_finite()) {
                return Err(DataError::NonNumeric {
                    row: row + 1,
                    column: feature_names[j].clone(),
                    value: s.covariates[j].to_string(),
                });
            }
        }

        let mut idx: Vec<usize> = (0..subjects.len()).collect();
        idx.sort_by(|&a, &b| {
            subjects[b]
                .duration
                .total_cmp(&subjects[a].duration)
                .then(order[a].cmp(&order[b]))
        });
        let mut slots: Vec<Option<Subject>> = subjects.into_iter().map(Some).collect();
        let subjects: Vec<Subject> = idx.iter().map(|&i| slots[i].take().unwrap()).collect();
        let order: Vec<usize> = idx.iter().map(|&i| order[i]).collect();
        let risk_end = risk_set_ends(&subjects);

        Ok(Self {
            subjects,
            order,
            risk_end,
            feature_names,
            standardization,
        })
    }

    pub fn len(&self) -> usize {
        self.subjects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subjects.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Subjects in canonical (decreasing-duration) order.
    pub fn subjects(&self) -> &[Subject] {
        &self.subjects
    }

    pub fn subject(&self, k: usize) -> &Subject {
        &self.subjects[k]
    }

    pub fn covariates(&self, k: usize) -> &[f64] {
        &self.subjects[k].covariates
    }

    pub fn duration(&self, k: usize) -> f64 {
        self.subjects[k].duration
    }

    pub fn event(&self, k: usize) -> bool {
        self.subjects[k].event
    }

    pub fn durations(&self) -> Vec<f64> {
        self.subjects.iter().map(|s| s.duration).collect()
    }

    pub fn events(&self) -> Vec<bool> {
        self.subjects.iter().map(|s| s.event).collect()
    }

    /// Source row of each canonical row.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Last canonical index of the duration tie group containing `k`.
    pub fn risk_end(&self, k: usize) -> usize {
        self.risk_end[k]
    }

    pub fn standardization(&self) -> Option<&Standardization> {
        self.standardization.as_ref()
    }

    pub fn n_events(&self) -> usize {
        self.subjects.iter().filter(|s| s.event).count()
    }

    pub fn event_rate(&self) -> f64 {
        self.n_events() as f64 / self.len() as f64
    }

    pub fn censoring_rate(&self) -> f64 {
        1.0 - self.event_rate()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.subjects.iter().map(|s| s.covariates[j]).collect()
    }

    /// Population mean and standard deviation of covariate `j`.
    pub fn column_stats(&self, j: usize) -> (f64, f64) {
        mean_std(self.subjects.iter().map(|s| s.covariates[j]), self.len())
    }

    /// Centers every column and scales it to unit population standard deviation.
    ///
    /// The recorded [`Standardization`] composes with any previous one so it
    /// always maps the raw source scale to the current scale.
    pub fn standardize(&self) -> Result<Self, DataError> {
        let d = self.n_features();
        let mut means = Vec::with_capacity(d);
        let mut stds = Vec::with_capacity(d);
        for j in 0..d {
            let (m, s) = self.column_stats(j);
            if !(s > 1e-12 * m.abs().max(1.0)) {
                return Err(DataError::ZeroVariance(self.feature_names[j].clone()));
            }
            means.push(m);
            stds.push(s);
        }
        let mut out = self.map_covariates(|_, x| {
            x.iter()
                .zip(means.iter().zip(&stds))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        });
        out.standardization = Some(match &self.standardization {
            None => Standardization { means, stds },
            Some(prev) => Standardization {
                means: (0..d)
                    .map(|j| prev.means[j] + prev.stds[j] * means[j])
                    .collect(),
                stds: (0..d).map(|j| prev.stds[j] * stds[j]).collect(),
            },
        });
        Ok(out)
    }

    /// Applies a previously fitted raw-to-standard map, e.g. a training set's
    /// statistics to a new file on the raw scale.
    pub fn standardize_with(&self, st: &Standardization) -> Result<Self, DataError> {
        let d = self.n_features();
        if st.means.len() != d || st.stds.len() != d {
            return Err(DataError::DimensionMismatch {
                expected: d,
                found: st.means.len(),
            });
        }
        let mut out = self.map_covariates(|_, x| {
            x.iter()
                .zip(st.means.iter().zip(&st.stds))
                .map(|(v, (m, s))| (v - m) / s)
                .collect()
        });
        out.standardization = Some(st.clone());
        Ok(out)
    }

    /// Returns a copy whose covariates are replaced row by row; durations,
    /// events and ordering are kept.
    pub fn map_covariates<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, &[f64]) -> Vec<f64>,
    {
        let subjects = self
            .subjects
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let covariates = f(k, &s.covariates);
                assert_eq!(
                    covariates.len(),
                    s.covariates.len(),
                    "covariate width changed"
                );
                Subject {
                    covariates,
                    duration: s.duration,
                    event: s.event,
                }
            })
            .collect();
        Self {
            subjects,
            order: self.order.clone(),
            risk_end: self.risk_end.clone(),
            feature_names: self.feature_names.clone(),
            standardization: self.standardization.clone(),
        }
    }

    /// Divides every duration by `scale`. Rankings of durations, and hence
    /// risk sets, are unchanged; the unit of time is not.
    pub fn rescale_durations(&self, scale: f64) -> Result<Self, DataError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(DataError::InvalidScale(scale));
        }
        let subjects = self
            .subjects
            .iter()
            .map(|s| Subject {
                covariates: s.covariates.clone(),
                duration: s.duration / scale,
                event: s.event,
            })
            .collect();
        Self::from_parts(
            self.feature_names.clone(),
            subjects,
            self.order.clone(),
            self.standardization.clone(),
        )
    }

    /// Population standard deviation of the durations.
    pub fn duration_std(&self) -> f64 {
        mean_std(self.subjects.iter().map(|s| s.duration), self.len()).1
    }

    /// The sub-dataset made of the given canonical rows, re-sorted canonically.
    pub fn subset(&self, rows: &[usize]) -> Result<Self, DataError> {
        let subjects = rows.iter().map(|&k| self.subjects[k].clone()).collect();
        let order = rows.iter().map(|&k| self.order[k]).collect();
        Self::from_parts(
            self.feature_names.clone(),
            subjects,
            order,
            self.standardization.clone(),
        )
    }

    /// Seeded train/test partition. The test part has `round(test_fraction * N)`
    /// rows, clamped so that both parts are non-empty.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<(Self, Self), DataError> {
        if !(test_fraction > 0.0 && test_fraction < 1.0) {
            return Err(DataError::InvalidFraction(test_fraction));
        }
        let n = self.len();
        if n < 2 {
            return Err(DataError::TooSmall(n));
        }
        let n_test = ((test_fraction * n as f64).round() as usize).clamp(1, n - 1);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng::seeded(seed));
        let (test_idx, train_idx) = idx.split_at(n_test);
        let mut test_idx = test_idx.to_vec();
        let mut train_idx = train_idx.to_vec();
        test_idx.sort_unstable();
        train_idx.sort_unstable();
        let train = self.subset(&train_idx)?;
        let test = self.subset(&test_idx)?;
        if train.n_events() == 0 {
            return Err(DataError::SplitWithoutEvents { side: "train" });
        }
        if test.n_events() == 0 {
            return Err(DataError::SplitWithoutEvents { side: "test" });
        }
        Ok((train, test))
    }

    /// `sup ‖z_a − z_b‖_p` over observed `z = (x, y)`.
    ///
    /// Exact pairwise scan up to [`EXACT_DIAMETER_MAX_ROWS`] rows; beyond that the
    /// ℓp norm of the per-coordinate range vector, which bounds the diameter
    /// from above, flagged as approximate.
    pub fn diameter(&self, p: NormOrder) -> DataDiameter {
        if self.len() <= EXACT_DIAMETER_MAX_ROWS {
            self.exact_diameter(p)
        } else {
            self.range_diameter(p)
        }
    }

    pub fn exact_diameter(&self, p: NormOrder) -> DataDiameter {
        let d = self.n_features();
        let mut diff = vec![0.0; d + 1];
        let mut best: f64 = 0.0;
        for a in 0..self.len() {
            let za = &self.subjects[a];
            for zb in &self.subjects[a + 1..] {
                for j in 0..d {
                    diff[j] = za.covariates[j] - zb.covariates[j];
                }
                diff[d] = za.duration - zb.duration;
                best = best.max(p.norm(&diff));
            }
        }
        DataDiameter {
            value: best,
            p,
            approximate: false,
        }
    }

    pub fn range_diameter(&self, p: NormOrder) -> DataDiameter {
        let d = self.n_features();
        let mut lo = vec![f64::INFINITY; d + 1];
        let mut hi = vec![f64::NEG_INFINITY; d + 1];
        for s in &self.subjects {
            for (j, v) in s
                .covariates
                .iter()
                .chain(std::iter::once(&s.duration))
                .enumerate()
            {
                lo[j] = lo[j].min(*v);
                hi[j] = hi[j].max(*v);
            }
        }
        let range: Vec<f64> = hi.iter().zip(&lo).map(|(h, l)| h - l).collect();
        DataDiameter {
            value: p.norm(&range),
            p,
            approximate: true,
        }
    }

    /// Writes the dataset as CSV in canonical order, covariates on the current scale.
    pub fn to_csv(&self, duration_col: &str, event_col: &str) -> String {
        let mut out = String::new();
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push(duration_col);
        header.push(event_col);
        out.push_str(&header.join(","));
        out.push('\n');
        for s in &self.subjects {
            for v in &s.covariates {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{},{}\n", s.duration, u8::from(s.event)));
        }
        out
    }
}

fn risk_set_ends(subjects: &[Subject]) -> Vec<usize> {
    let n = subjects.len();
    let mut ends = vec![0; n];
    let mut k = n;
    while k > 0 {
        let end = k - 1;
        let y = subjects[end].duration;
        let mut start = end;
        while start > 0 && subjects[start - 1].duration == y {
            start -= 1;
        }
        ends[start..=end].fill(end);
        k = start;
    }
    ends
}

fn mean_std(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / nf;
    (mean, var.sqrt())
}

/// Reads a comma-separated file with a header row. Every column other than
/// the duration and event columns is a covariate. Row numbers in errors count
/// data rows from 1, excluding the header.
pub fn load_csv(
    path: impl AsRef<Path>,
    duration_col: &str,
    event_col: &str,
) -> Result<SurvivalDataset, DataError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_csv(&text, duration_col, event_col)
}

pub fn parse_csv(
    text: &str,
    duration_col: &str,
    event_col: &str,
) -> Result<SurvivalDataset, DataError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or(DataError::MissingHeader)?
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    for (i, h) in header.iter().enumerate() {
        if header[..i].contains(h) {
            return Err(DataError::DuplicateColumn(h.clone()));
        }
    }
    let find = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let y_col = find(duration_col)?;
    let e_col = find(event_col)?;
    let x_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != y_col && c != e_col)
        .collect();
    let names: Vec<String> = x_cols.iter().map(|&c| header[c].clone()).collect();

    let mut subjects = Vec::new();
    for (r, line) in lines.enumerate() {
        let row = r + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(DataError::RaggedRow {
                row,
                expected: header.len(),
                found: fields.len(),
            });
        }
        let num = |c: usize| -> Result<f64, DataError> {
            fields[c]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| DataError::NonNumeric {
                    row,
                    column: header[c].clone(),
                    value: fields[c].to_string(),
                })
        };
        let event = match num(e_col) {
            Ok(v) if v == 0.0 => false,
            Ok(v) if v == 1.0 => true,
            _ => {
                return Err(DataError::InvalidEvent {
                    row,
                    value: fields[e_col].to_string(),
                })
            }
        };
        let duration = num(y_col)?;
        if duration <= 0.0 {
            return Err(DataError::NonPositiveDuration {
                row,
                value: duration,
            });
        }
        let covariates = x_cols
            .iter()
            .map(|&c| num(c))
            .collect::<Result<Vec<_>, _>>()?;
        subjects.push(Subject {
            covariates,
            duration,
            event,
        });
    }
    SurvivalDataset::new(names, subjects)
}
