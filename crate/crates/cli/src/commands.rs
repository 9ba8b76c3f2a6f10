use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::Path;

use drl_cox::benchmark::{
    fit_method, rows_csv, run_benchmark, write_outputs, BenchmarkConfig, BenchmarkResult, Method,
    Tuning,
};
use drl_cox::contamination::{apply_shift, inject_outliers, OutlierSpec, ShiftSpec, ShiftTarget};
use drl_cox::data::load_csv;
use drl_cox::drl::{self, cross_validate_epsilon, epsilon_grid};
use drl_cox::metrics::{c_index, iauc};
use drl_cox::{DrlConfig, SurvivalDataset};
use serde_json::json;

use crate::model::ModelFile;
use crate::{
    BenchmarkArgs, CliError, ContaminateArgs, CvArgs, DataArgs, EvaluateArgs, FitArgs, FitSettings,
    RadiusArgs,
};

type Result<T> = std::result::Result<T, CliError>;

/// Writes to stdout; a closed pipe (e.g. `| head`) ends output quietly.
fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

macro_rules! out {
    ($($arg:tt)*) => { emit(&format!($($arg)*))? };
}

macro_rules! outln {
    ($($arg:tt)*) => { emit(&format!("{}\n", format_args!($($arg)*)))? };
}

pub const BENCHMARK_HELP: &str = "\
Outputs (written to the output directory):
  rows.csv      one line per (method, cell, trial) with columns
                method, cell, contamination, trial, seed, c_index, iauc,
                selected, converged, status, fit_seconds
                (fit_seconds is omitted with --no-timings)
  summary.json  per (method, cell) mean, standard deviation and count of
                each metric
  plot.csv      long format: method, kind, intensity, ratio, severity,
                metric, mean, std, n

Without an output directory rows.csv is printed to stdout.";

/// Loads a CSV and applies the requested rescaling. Returns the dataset and
/// the duration divisor.
fn load(args: &DataArgs) -> Result<(SurvivalDataset, f64)> {
    let ds = load_csv(&args.data, &args.duration_col, &args.event_col)?;
    let ds = if args.raw { ds } else { ds.standardize()? };
    if args.unit_durations {
        let scale = ds.duration_std();
        Ok((ds.rescale_durations(scale)?, scale))
    } else {
        Ok((ds, 1.0))
    }
}

fn drl_config(s: &FitSettings) -> DrlConfig {
    let d = DrlConfig::default();
    DrlConfig {
        epsilon: s.epsilon.unwrap_or(d.epsilon),
        q: s.q.unwrap_or(d.q),
        gamma: s.gamma.unwrap_or(d.gamma),
        tau: s.tau.unwrap_or(d.tau),
        tol: s.tol.unwrap_or(d.tol),
        max_iter: s.max_iter.unwrap_or(d.max_iter),
    }
}

/// Search settings for `fit_method`. An explicit hyperparameter becomes a
/// one-point grid, which skips cross-validation.
fn tuning(s: &FitSettings) -> Tuning {
    let d = Tuning::default();
    Tuning {
        folds: s.folds.unwrap_or(d.folds),
        epsilon_grid: s.epsilon.map(|e| vec![e]).or(s.epsilon_grid.clone()),
        significance: s.significance.unwrap_or(d.significance),
        lambda_grid: s.lambda.map(|l| vec![l]).or(s.lambda_grid.clone()),
        l1_ratio: s.l1_ratio.unwrap_or(d.l1_ratio),
        cox_tol: s.tol.unwrap_or(d.cox_tol),
        cox_max_iter: s.max_iter.unwrap_or(d.cox_max_iter),
        ..d
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(fs::write(p, text)?),
        None => emit(text),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn fit(args: FitArgs) -> Result<()> {
    let settings = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            let base: FitSettings = toml::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            args.settings.or(base)
        }
        None => args.settings,
    };
    let method = settings
        .method
        .ok_or_else(|| CliError::Usage("--method is required".into()))?;
    let (ds, duration_scale) = load(&args.data)?;
    let drl = drl_config(&settings);
    drl.validate()?;
    let tuning = tuning(&settings);
    let fitted = fit_method(method, &ds, &drl, &tuning, settings.seed.unwrap_or(0))?;

    let is_drl = method == Method::DrlCox;
    let penalized = matches!(
        method,
        Method::RidgeCox | Method::LassoCox | Method::ElasticNetCox
    );
    let model = ModelFile {
        method,
        feature_names: ds.feature_names().to_vec(),
        standardization: ds.standardization().cloned(),
        duration_scale,
        beta: fitted.beta,
        alpha: fitted.alpha,
        epsilon: is_drl.then(|| fitted.selected.unwrap_or(drl.epsilon)),
        q: is_drl.then_some(drl.q),
        gamma: is_drl.then_some(drl.gamma),
        tau: is_drl.then_some(drl.tau),
        lambda: if penalized { fitted.selected } else { None },
        l1_ratio: (method == Method::ElasticNetCox).then_some(tuning.l1_ratio),
        selected_by_cv: (is_drl && settings.epsilon.is_none())
            || (penalized && settings.lambda.is_none()),
        objective: fitted.objective,
        converged: fitted.converged,
        iterations: fitted.iterations,
        n: ds.len(),
        n_events: ds.n_events(),
    };
    let json = to_json(&model)?;
    let text = report(&model);
    match &args.output {
        Some(p) => {
            fs::write(p, json)?;
            out!("{text}");
            outln!("model written to {}", p.display());
        }
        None => {
            eprint!("{text}");
            out!("{json}");
        }
    }
    Ok(())
}

fn report(m: &ModelFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "method: {}", m.method);
    let _ = writeln!(
        out,
        "N={} events={} censoring={:.1}%",
        m.n,
        m.n_events,
        100.0 * (1.0 - m.n_events as f64 / m.n as f64)
    );
    let how = if m.selected_by_cv {
        " (selected by cross-validation)"
    } else {
        ""
    };
    if let Some(e) = m.epsilon {
        let _ = writeln!(
            out,
            "epsilon={e}{how} q={} gamma={}",
            m.q.map(|q| q.to_string()).unwrap_or_default(),
            m.gamma.unwrap_or_default()
        );
    }
    if let Some(l) = m.lambda {
        let _ = writeln!(out, "lambda={l}{how}");
    }
    let _ = writeln!(out, "objective={:.10}", m.objective);
    let _ = writeln!(out, "converged={} iterations={}", m.converged, m.iterations);
    if let Some(a) = m.alpha {
        let _ = writeln!(out, "alpha={a:.6}");
    }
    let width = m.feature_names.iter().map(String::len).max().unwrap_or(0);
    let _ = writeln!(out, "coefficients:");
    for (name, b) in m.feature_names.iter().zip(&m.beta) {
        let _ = writeln!(out, "  {name:<width$}  {b:>12.6}");
    }
    out
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.model)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", args.model.display())))?;
    let model: ModelFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.model.display())))?;
    let prepare = |path: &Path| -> Result<SurvivalDataset> {
        let ds = load_csv(path, &args.duration_col, &args.event_col)?;
        if ds.feature_names() != model.feature_names.as_slice() {
            return Err(CliError::Usage(format!(
                "{} has covariates [{}], the model expects [{}]",
                path.display(),
                ds.feature_names().join(", "),
                model.feature_names.join(", ")
            )));
        }
        Ok(match &model.standardization {
            Some(st) => ds.standardize_with(st)?,
            None => ds,
        })
    };
    let test = prepare(&args.data)?;
    let train = match &args.train {
        Some(p) => prepare(p)?,
        None => test.clone(),
    };
    let scores = drl_cox::cox::linear_risk_scores(&model.beta, &test)?;
    let conc = c_index(&test, &scores).ok();
    let auc = iauc(&test, &scores, &train);

    outln!("N={} events={}", test.len(), test.n_events());
    match &conc {
        Some(c) => outln!(
            "c_index={:.6} (comparable pairs {})",
            c.c_index,
            c.comparable
        ),
        None => outln!("c_index=undefined (no comparable pairs)"),
    }
    match &auc {
        Ok(a) => outln!(
            "iauc={:.6} over {} time points up to {}{}",
            a.iauc,
            a.time_grid.len(),
            a.horizon,
            if a.truncated { " (truncated)" } else { "" }
        ),
        Err(e) => outln!("iauc=undefined ({e})"),
    }
    if let Some(p) = &args.output {
        let out = json!({
            "n": test.len(),
            "n_events": test.n_events(),
            "concordance": conc,
            "iauc": auc.ok(),
        });
        fs::write(p, to_json(&out)?)?;
    }
    Ok(())
}

pub fn benchmark(args: BenchmarkArgs) -> Result<()> {
    let mut cfg = BenchmarkConfig::load(&args.config)?;
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(f) = args.test_fraction {
        cfg.test_fraction = f;
    }
    if let Some(m) = args.methods {
        cfg.methods = m;
    }
    if let Some(g) = args.epsilon_grid {
        cfg.tuning.epsilon_grid = Some(g);
    }
    if args.output.is_some() {
        cfg.output = args.output;
    }
    cfg.validate()?;
    let result = run_benchmark(&cfg)?;
    let timings = !args.no_timings;
    match &cfg.output {
        Some(dir) => {
            write_outputs(&result, dir, timings)?;
            out!("{}", summary_table(&result));
            outln!("{} rows written to {}", result.rows.len(), dir.display());
        }
        None => {
            out!("{}", rows_csv(&result.rows, timings));
            eprint!("{}", summary_table(&result));
        }
    }
    Ok(())
}

fn summary_table(result: &BenchmarkResult) -> String {
    let fmt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
    let mut out = format!(
        "{:<16} {:<32} {:>8} {:>8} {:>8}\n",
        "method", "contamination", "c_index", "iauc", "failed"
    );
    for s in &result.summary {
        let _ = writeln!(
            out,
            "{:<16} {:<32} {:>8} {:>8} {:>8}",
            s.method.to_string(),
            s.contamination.to_string(),
            fmt(s.mean_c_index),
            fmt(s.mean_iauc),
            s.failures
        );
    }
    out
}

pub fn contaminate(args: ContaminateArgs) -> Result<()> {
    let (ds, _) = load(&args.data)?;
    let (out, mask) = match (args.shift, args.outliers) {
        (Some(intensity), _) => {
            let spec = ShiftSpec {
                intensity,
                seed: args.seed,
                target: ShiftTarget::Both,
            };
            (apply_shift(&ds, &spec)?, None)
        }
        (None, Some(ratio)) => {
            let spec = OutlierSpec {
                ratio,
                severity: args.severity,
                feature_fraction: args.feature_fraction,
                seed: args.seed,
            };
            let (out, mask) = inject_outliers(&ds, &spec)?;
            (out, Some(mask))
        }
        (None, None) => return Err(CliError::Usage("give --shift or --outliers".into())),
    };
    let csv = out.to_csv(&args.data.duration_col, &args.data.event_col);
    write_or_print(args.output.as_deref(), &csv)?;
    if let Some(p) = &args.mask {
        let mask = mask.ok_or_else(|| CliError::Usage("--mask needs --outliers".into()))?;
        let text: String = mask
            .iter()
            .map(|&m| if m { "1\n" } else { "0\n" })
            .collect();
        fs::write(p, text)?;
    }
    Ok(())
}

pub fn suggest_radius(args: RadiusArgs) -> Result<()> {
    let (ds, _) = load(&args.data)?;
    let s = drl::suggest_radius(&ds, args.significance, args.q.conjugate())?;
    let grid = epsilon_grid(s.b_alpha, args.points);
    if args.json {
        out!("{}", to_json(&json!({ "suggestion": s, "grid": grid }))?);
    } else {
        outln!("N={} significance={}", s.n, s.significance);
        outln!(
            "diameter={:.6} (p={}{})",
            s.diameter_used.value,
            s.diameter_used.p,
            if s.approximate { ", range bound" } else { "" }
        );
        outln!("B(alpha)={:.6}", s.b_alpha);
        let g: Vec<String> = grid.iter().map(|e| format!("{e:.6}")).collect();
        outln!("epsilon grid: {}", g.join(","));
    }
    Ok(())
}

pub fn cv_epsilon(args: CvArgs) -> Result<()> {
    let (ds, _) = load(&args.data)?;
    let s = &args.settings;
    let template = drl_config(s);
    let t = tuning(s);
    let grid = match &s.epsilon_grid {
        Some(g) => g.clone(),
        None => {
            let b = drl::suggest_radius(&ds, t.significance, template.p())?.b_alpha;
            epsilon_grid(b, t.epsilon_points)
        }
    };
    let cv = cross_validate_epsilon(&ds, &grid, t.folds, &template, s.seed.unwrap_or(0))?;
    if args.json {
        out!("{}", to_json(&cv)?);
    } else {
        outln!("{:>14} {:>10}", "epsilon", "c_index");
        for row in &cv.table {
            outln!("{:>14.6} {:>10.6}", row.value, row.mean_c_index);
        }
        outln!("best epsilon={}", cv.best_epsilon);
    }
    Ok(())
}
