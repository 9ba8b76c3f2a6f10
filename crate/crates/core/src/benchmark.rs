//! Contamination benchmark runner.
//!
//! A run is described by a TOML [`BenchmarkConfig`]. For every contamination
//! cell and trial the dataset is split, the configured part is corrupted, each
//! method is fitted on the training part (hyperparameters chosen by k-fold
//! cross-validation) and scored by C-index and iAUC on the test part.
//!
//! Every random choice is driven by a seed derived from the master seed:
//!
//! * split: `derive_seed(master, ["split", trial])`
//! * contamination: `derive_seed(master, ["contaminate", cell, trial])`
//! * method (CV folds): `derive_seed(master, [method, cell, trial])`
//!
//! so every method sees the same split and corruption in a given trial, and
//! adding a method leaves the others untouched. Jobs run in parallel and rows
//! are emitted in (cell, trial, method) order.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contamination::{
    inject_outliers, replace_columns, shift_columns, OutlierSpec, ShiftSpec, ShiftTarget,
};
use crate::cox::{fit_cox, lasso_lambda_max, linear_risk_scores, PenaltySpec};
use crate::cv::cross_validate;
use crate::data::{load_csv, SurvivalDataset};
use crate::drl::{epsilon_grid, fit_drl_cox, suggest_radius, DrlConfig};
use crate::error::{Error, FitError, Result};
use crate::metrics::{c_index, iauc};
use crate::rng::{derive_seed, SeedPart};
use crate::synthetic::{generate, SyntheticSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Cox,
    RidgeCox,
    LassoCox,
    ElasticNetCox,
    DrlCox,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Cox,
        Method::RidgeCox,
        Method::LassoCox,
        Method::ElasticNetCox,
        Method::DrlCox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cox => "cox",
            Method::RidgeCox => "ridge_cox",
            Method::LassoCox => "lasso_cox",
            Method::ElasticNetCox => "elastic_net_cox",
            Method::DrlCox => "drl_cox",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected one of cox, ridge_cox, lasso_cox, elastic_net_cox, drl_cox)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        #[serde(default = "default_duration_col")]
        duration_col: String,
        #[serde(default = "default_event_col")]
        event_col: String,
    },
    Synthetic(SyntheticSpec),
}

fn default_duration_col() -> String {
    "duration".into()
}

fn default_event_col() -> String {
    "event".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContaminationGrid {
    None,
    Shift {
        intensities: Vec<usize>,
        #[serde(default)]
        target: ShiftTarget,
    },
    Outlier {
        ratios: Vec<f64>,
        severities: Vec<u32>,
        #[serde(default = "default_feature_fraction")]
        feature_fraction: f64,
        #[serde(default)]
        target: ShiftTarget,
    },
}

fn default_feature_fraction() -> f64 {
    crate::contamination::DEFAULT_FEATURE_FRACTION
}

/// One point of the contamination grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cell {
    None,
    Shift { intensity: usize },
    Outlier { ratio: f64, severity: u32 },
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::None => f.write_str("none"),
            Cell::Shift { intensity } => write!(f, "shift:intensity={intensity}"),
            Cell::Outlier { ratio, severity } => {
                write!(f, "outlier:ratio={ratio};severity={severity}")
            }
        }
    }
}

impl ContaminationGrid {
    pub fn cells(&self) -> Vec<Cell> {
        match self {
            ContaminationGrid::None => vec![Cell::None],
            ContaminationGrid::Shift { intensities, .. } => intensities
                .iter()
                .map(|&intensity| Cell::Shift { intensity })
                .collect(),
            ContaminationGrid::Outlier {
                ratios, severities, ..
            } => ratios
                .iter()
                .flat_map(|&ratio| {
                    severities
                        .iter()
                        .map(move |&severity| Cell::Outlier { ratio, severity })
                })
                .collect(),
        }
    }

    pub fn target(&self) -> ShiftTarget {
        match self {
            ContaminationGrid::None => ShiftTarget::Train,
            ContaminationGrid::Shift { target, .. } | ContaminationGrid::Outlier { target, .. } => {
                *target
            }
        }
    }
}

/// Hyperparameter search settings shared by all methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tuning {
    pub folds: usize,
    /// Explicit ε grid. When absent the grid is derived from the radius
    /// threshold of the (contaminated) training split.
    pub epsilon_grid: Option<Vec<f64>>,
    pub significance: f64,
    pub epsilon_points: usize,
    /// Explicit λ grid for the penalized baselines. When absent ridge uses
    /// `ridge_lambdas` and the ℓ1 penalties use `l1_fractions × λ_max`.
    pub lambda_grid: Option<Vec<f64>>,
    pub ridge_lambdas: Vec<f64>,
    pub l1_fractions: Vec<f64>,
    pub l1_ratio: f64,
    pub cox_tol: f64,
    pub cox_max_iter: usize,
}

impl Default for Tuning {
    fn default() -> Self {
        Self {
            folds: 5,
            epsilon_grid: None,
            significance: 0.05,
            epsilon_points: 7,
            lambda_grid: None,
            ridge_lambdas: vec![0.1, 1.0, 10.0, 100.0],
            l1_fractions: vec![0.3, 0.1, 0.03, 0.01],
            l1_ratio: 0.5,
            cox_tol: 1e-8,
            cox_max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkConfig {
    pub dataset: DatasetSource,
    #[serde(default = "default_standardize")]
    pub standardize: bool,
    /// Divide durations by their standard deviation before splitting. Only
    /// the robust model depends on the unit of time (through `α` and the
    /// radius threshold); the other methods and both metrics are invariant.
    #[serde(default = "default_standardize")]
    pub unit_durations: bool,
    pub methods: Vec<Method>,
    pub contamination: ContaminationGrid,
    pub trials: usize,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    pub seed: u64,
    #[serde(default)]
    pub drl: DrlConfig,
    #[serde(default)]
    pub tuning: Tuning,
    /// Output directory for `rows.csv`, `summary.json` and `plot.csv`.
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_standardize() -> bool {
    true
}

fn default_test_fraction() -> f64 {
    0.3
}

impl BenchmarkConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. A relative CSV dataset path is taken relative to
    /// the directory holding the config.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        if let DatasetSource::Csv { path: data, .. } = &mut cfg.dataset {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.methods.is_empty() {
            return bad("methods must not be empty");
        }
        if self.contamination.cells().is_empty() {
            return bad("contamination grid must not be empty");
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return bad("test_fraction must lie in (0, 1)");
        }
        if self.tuning.folds < 2 {
            return bad("tuning.folds must be at least 2");
        }
        if matches!(&self.tuning.epsilon_grid, Some(g) if g.is_empty()) {
            return bad("tuning.epsilon_grid must not be empty");
        }
        if matches!(&self.tuning.lambda_grid, Some(g) if g.is_empty()) {
            return bad("tuning.lambda_grid must not be empty");
        }
        self.drl.validate()?;
        Ok(())
    }

    /// Loads (or generates) the dataset and applies the configured rescaling.
    pub fn dataset(&self) -> Result<SurvivalDataset> {
        let ds = match &self.dataset {
            DatasetSource::Csv {
                path,
                duration_col,
                event_col,
            } => load_csv(path, duration_col, event_col)?,
            DatasetSource::Synthetic(spec) => generate(spec)?,
        };
        let ds = if self.standardize {
            ds.standardize()?
        } else {
            ds
        };
        Ok(if self.unit_durations {
            ds.rescale_durations(ds.duration_std())?
        } else {
            ds
        })
    }
}

/// One (cell, trial, method) record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub method: Method,
    pub cell: usize,
    pub contamination: Cell,
    pub trial: usize,
    pub seed: u64,
    pub c_index: Option<f64>,
    pub iauc: Option<f64>,
    /// Hyperparameter picked by cross-validation (ε or λ).
    pub selected: Option<f64>,
    pub converged: bool,
    /// `ok`, or a failure message.
    pub status: String,
    #[serde(with = "crate::optim::duration_secs")]
    pub fit_time: std::time::Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: Method,
    pub cell: usize,
    pub contamination: Cell,
    pub trials: usize,
    pub failures: usize,
    pub mean_c_index: Option<f64>,
    pub std_c_index: Option<f64>,
    pub n_c_index: usize,
    pub mean_iauc: Option<f64>,
    pub std_iauc: Option<f64>,
    pub n_iauc: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub rows: Vec<BenchmarkRow>,
    pub summary: Vec<SummaryRow>,
}

/// Model produced by [`fit_method`].
#[derive(Debug, Clone, PartialEq)]
pub struct FittedMethod {
    pub beta: Vec<f64>,
    pub alpha: Option<f64>,
    pub selected: Option<f64>,
    pub converged: bool,
    /// Training objective at the solution (penalty included).
    pub objective: f64,
    pub iterations: usize,
}

/// Fits one method on `train`, selecting its hyperparameter by CV with the
/// given fold seed when the method has one.
pub fn fit_method(
    method: Method,
    train: &SurvivalDataset,
    drl: &DrlConfig,
    tuning: &Tuning,
    seed: u64,
) -> Result<FittedMethod> {
    let (tol, max_iter) = (tuning.cox_tol, tuning.cox_max_iter);
    let penalty = |lambda: f64| match method {
        Method::RidgeCox => PenaltySpec::ridge(lambda),
        Method::LassoCox => PenaltySpec::lasso(lambda),
        Method::ElasticNetCox => PenaltySpec::elastic_net(lambda, tuning.l1_ratio),
        _ => PenaltySpec::NONE,
    };
    match method {
        Method::Cox => {
            let m = fit_cox(train, &PenaltySpec::NONE, tol, max_iter)?;
            Ok(FittedMethod {
                converged: m.solver_report.converged,
                objective: m.objective_at_solution,
                iterations: m.solver_report.iterations,
                beta: m.beta,
                alpha: None,
                selected: None,
            })
        }
        Method::RidgeCox | Method::LassoCox | Method::ElasticNetCox => {
            let grid = match (&tuning.lambda_grid, method) {
                (Some(g), _) => g.clone(),
                (None, Method::RidgeCox) => tuning.ridge_lambdas.clone(),
                (None, _) => {
                    let lmax = lasso_lambda_max(train)?;
                    let scale = if method == Method::ElasticNetCox {
                        lmax / tuning.l1_ratio.max(1e-12)
                    } else {
                        lmax
                    };
                    tuning.l1_fractions.iter().map(|f| f * scale).collect()
                }
            };
            let lambda = select(train, &grid, tuning.folds, seed, |tr, v| {
                Ok(fit_cox(tr, &penalty(v), tol, max_iter)?.beta)
            })?;
            let m = fit_cox(train, &penalty(lambda), tol, max_iter)?;
            Ok(FittedMethod {
                converged: m.solver_report.converged,
                objective: m.objective_at_solution,
                iterations: m.solver_report.iterations,
                beta: m.beta,
                alpha: None,
                selected: Some(lambda),
            })
        }
        Method::DrlCox => {
            let grid = match &tuning.epsilon_grid {
                Some(g) => g.clone(),
                None => {
                    let b = suggest_radius(train, tuning.significance, drl.p())?.b_alpha;
                    epsilon_grid(b, tuning.epsilon_points)
                }
            };
            let epsilon = select(train, &grid, tuning.folds, seed, |tr, eps| {
                Ok(fit_drl_cox(
                    tr,
                    &DrlConfig {
                        epsilon: eps,
                        ..*drl
                    },
                )?
                .beta)
            })?;
            let m = fit_drl_cox(train, &DrlConfig { epsilon, ..*drl })?;
            Ok(FittedMethod {
                converged: m.solver_report.converged,
                objective: m.objective_at_solution,
                iterations: m.solver_report.iterations,
                beta: m.beta,
                alpha: Some(m.alpha),
                selected: Some(epsilon),
            })
        }
    }
}

fn select<F>(train: &SurvivalDataset, grid: &[f64], folds: usize, seed: u64, fit: F) -> Result<f64>
where
    F: Fn(&SurvivalDataset, f64) -> std::result::Result<Vec<f64>, FitError> + Sync,
{
    if grid.len() == 1 {
        return Ok(grid[0]);
    }
    Ok(cross_validate(train, grid, folds, seed, fit)?.best)
}

/// Split and corruption for one (cell, trial).
fn prepare(
    cfg: &BenchmarkConfig,
    ds: &SurvivalDataset,
    cell_index: usize,
    cell: Cell,
    trial: usize,
) -> Result<(SurvivalDataset, SurvivalDataset)> {
    let master = cfg.seed;
    let split_seed = derive_seed(master, &[SeedPart::from("split"), SeedPart::from(trial)]);
    let (train, test) = ds.split(cfg.test_fraction, split_seed)?;
    let seed = derive_seed(
        master,
        &[
            SeedPart::from("contaminate"),
            SeedPart::from(cell_index),
            SeedPart::from(trial),
        ],
    );
    let target = cfg.contamination.target();
    // each part gets its own noise stream; a shift replaces the same
    // features in every targeted part
    let part_seed = |part: &str| derive_seed(seed, &[SeedPart::from(part)]);
    let corrupt = |part: &SurvivalDataset, name: &str| -> Result<SurvivalDataset> {
        let s = part_seed(name);
        Ok(match cell {
            Cell::None => part.clone(),
            Cell::Shift { intensity } => {
                let spec = ShiftSpec {
                    intensity,
                    seed,
                    target,
                };
                replace_columns(part, &shift_columns(part.n_features(), &spec)?, s)?
            }
            Cell::Outlier { ratio, severity } => {
                let feature_fraction = match &cfg.contamination {
                    ContaminationGrid::Outlier {
                        feature_fraction, ..
                    } => *feature_fraction,
                    _ => unreachable!("outlier cell from a non-outlier grid"),
                };
                let spec = OutlierSpec {
                    ratio,
                    severity,
                    feature_fraction,
                    seed: s,
                };
                inject_outliers(part, &spec)?.0
            }
        })
    };
    let train = if target.affects_train() {
        corrupt(&train, "train")?
    } else {
        train
    };
    let test = if target.affects_test() {
        corrupt(&test, "test")?
    } else {
        test
    };
    Ok((train, test))
}

fn method_seed(master: u64, method: Method, cell: usize, trial: usize) -> u64 {
    derive_seed(
        master,
        &[
            SeedPart::from(method.name()),
            SeedPart::from(cell),
            SeedPart::from(trial),
        ],
    )
}

fn run_job(
    cfg: &BenchmarkConfig,
    ds: &SurvivalDataset,
    cell_index: usize,
    cell: Cell,
    trial: usize,
    method: Method,
) -> BenchmarkRow {
    let seed = method_seed(cfg.seed, method, cell_index, trial);
    let mut row = BenchmarkRow {
        method,
        cell: cell_index,
        contamination: cell,
        trial,
        seed,
        c_index: None,
        iauc: None,
        selected: None,
        converged: false,
        status: "ok".into(),
        fit_time: Default::default(),
    };
    let (train, test) = match prepare(cfg, ds, cell_index, cell, trial) {
        Ok(parts) => parts,
        Err(e) => {
            row.status = format!("failed: {e}");
            return row;
        }
    };
    let start = Instant::now();
    let fitted = fit_method(method, &train, &cfg.drl, &cfg.tuning, seed);
    row.fit_time = start.elapsed();
    let fitted = match fitted {
        Ok(f) => f,
        Err(e) => {
            row.status = format!("failed: {e}");
            return row;
        }
    };
    row.selected = fitted.selected;
    row.converged = fitted.converged;
    let scores = linear_risk_scores(&fitted.beta, &test).expect("model width matches data");
    let mut problems = Vec::new();
    match c_index(&test, &scores) {
        Ok(c) => row.c_index = Some(c.c_index),
        Err(e) => problems.push(format!("c_index: {e}")),
    }
    match iauc(&test, &scores, &train) {
        Ok(r) => row.iauc = Some(r.iauc),
        Err(e) => problems.push(format!("iauc: {e}")),
    }
    if !problems.is_empty() {
        row.status = format!("partial: {}", problems.join("; "));
    }
    row
}

/// Runs the full grid. Rows come back in (cell, trial, method) order whatever
/// the degree of parallelism.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkResult> {
    cfg.validate()?;
    let ds = cfg.dataset()?;
    let cells = cfg.contamination.cells();
    let jobs: Vec<(usize, Cell, usize, Method)> = cells
        .iter()
        .enumerate()
        .flat_map(|(c, &cell)| {
            (0..cfg.trials).flat_map(move |t| cfg.methods.iter().map(move |&m| (c, cell, t, m)))
        })
        .collect();
    let rows: Vec<BenchmarkRow> = jobs
        .par_iter()
        .map(|&(c, cell, t, m)| run_job(cfg, &ds, c, cell, t, m))
        .collect();
    let summary = summarize(&rows);
    Ok(BenchmarkResult { rows, summary })
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        Some((values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt())
    } else {
        None
    };
    (Some(mean), std)
}

/// Per-(method, cell) means over the trials with a defined metric, in the
/// order the pairs first appear in `rows`.
pub fn summarize(rows: &[BenchmarkRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, usize)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.method, r.cell)) {
            keys.push((r.method, r.cell));
        }
    }
    keys.into_iter()
        .map(|(method, cell)| {
            let group: Vec<&BenchmarkRow> = rows
                .iter()
                .filter(|r| r.method == method && r.cell == cell)
                .collect();
            let c: Vec<f64> = group.iter().filter_map(|r| r.c_index).collect();
            let a: Vec<f64> = group.iter().filter_map(|r| r.iauc).collect();
            let (mean_c_index, std_c_index) = mean_std(&c);
            let (mean_iauc, std_iauc) = mean_std(&a);
            SummaryRow {
                method,
                cell,
                contamination: group[0].contamination,
                trials: group.len(),
                failures: group
                    .iter()
                    .filter(|r| r.status.starts_with("failed"))
                    .count(),
                mean_c_index,
                std_c_index,
                n_c_index: c.len(),
                mean_iauc,
                std_iauc,
                n_iauc: a.len(),
            }
        })
        .collect()
}

/// Column order of the rows CSV.
pub const ROW_COLUMNS: &[&str] = &[
    "method",
    "cell",
    "contamination",
    "trial",
    "seed",
    "c_index",
    "iauc",
    "selected",
    "converged",
    "status",
    "fit_seconds",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Rows as CSV. Floats use the shortest round-trip representation so the
/// file can be re-read exactly. With `include_timing = false` the wall-time
/// column is dropped, which makes the output a pure function of the config.
pub fn rows_csv(rows: &[BenchmarkRow], include_timing: bool) -> String {
    let cols = if include_timing {
        ROW_COLUMNS
    } else {
        &ROW_COLUMNS[..ROW_COLUMNS.len() - 1]
    };
    let mut out = cols.join(",");
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.cell,
            csv_field(&r.contamination.to_string()),
            r.trial,
            r.seed,
            opt(r.c_index),
            opt(r.iauc),
            opt(r.selected),
            r.converged,
            csv_field(&r.status),
        );
        if include_timing {
            let _ = write!(out, ",{}", r.fit_time.as_secs_f64());
        }
        out.push('\n');
    }
    out
}

/// Long-format table for plotting: one line per (method, cell, metric).
pub fn plot_csv(summary: &[SummaryRow]) -> String {
    let mut out = String::from("method,kind,intensity,ratio,severity,metric,mean,std,n\n");
    for s in summary {
        let (kind, intensity, ratio, severity) = match s.contamination {
            Cell::None => ("none", String::new(), String::new(), String::new()),
            Cell::Shift { intensity } => {
                ("shift", intensity.to_string(), String::new(), String::new())
            }
            Cell::Outlier { ratio, severity } => (
                "outlier",
                String::new(),
                ratio.to_string(),
                severity.to_string(),
            ),
        };
        for (metric, mean, std, n) in [
            ("c_index", s.mean_c_index, s.std_c_index, s.n_c_index),
            ("iauc", s.mean_iauc, s.std_iauc, s.n_iauc),
        ] {
            let _ = writeln!(
                out,
                "{},{kind},{intensity},{ratio},{severity},{metric},{},{},{n}",
                s.method,
                opt(mean),
                opt(std)
            );
        }
    }
    out
}

/// Writes `rows.csv`, `summary.json` and `plot.csv` into `dir`.
pub fn write_outputs(result: &BenchmarkResult, dir: &Path, include_timing: bool) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("rows.csv"), rows_csv(&result.rows, include_timing))?;
    std::fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&result.summary)?,
    )?;
    std::fs::write(dir.join("plot.csv"), plot_csv(&result.summary))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
methods = ["cox"]
trials = 3
seed = 5

[dataset]
kind = "synthetic"
n = 80
d = 3
censoring = 0.4
seed = 1

[contamination]
kind = "shift"
intensities = [1, 2]
"#;

    #[test]
    fn parses_and_counts_rows() {
        let cfg = BenchmarkConfig::from_toml(SMALL).unwrap();
        assert_eq!(cfg.contamination.cells().len(), 2);
        let res = run_benchmark(&cfg).unwrap();
        assert_eq!(res.rows.len(), 6);
        assert_eq!(res.summary.len(), 2);
        assert!(res.rows.iter().all(|r| r.status == "ok"), "{:?}", res.rows);
    }

    #[test]
    fn rejects_empty_method_list() {
        let text = SMALL.replace(r#"methods = ["cox"]"#, "methods = []");
        assert!(BenchmarkConfig::from_toml(&text).is_err());
        let text = SMALL.replace("trials = 3", "trials = 0");
        assert!(BenchmarkConfig::from_toml(&text).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("svm".parse::<Method>().is_err());
    }

    #[test]
    fn cell_descriptors() {
        assert_eq!(
            Cell::Shift { intensity: 2 }.to_string(),
            "shift:intensity=2"
        );
        assert_eq!(
            Cell::Outlier {
                ratio: 0.3,
                severity: 5
            }
            .to_string(),
            "outlier:ratio=0.3;severity=5"
        );
    }
}
