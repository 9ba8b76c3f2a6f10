use std::collections::HashSet;

use drl_cox::benchmark::{
    rows_csv, run_benchmark, summarize, write_outputs, BenchmarkConfig, Method,
};

const CONFIG: &str = r#"
methods = ["cox", "ridge_cox", "drl_cox"]
trials = 2
seed = 5

[dataset]
kind = "synthetic"
n = 150
d = 4
censoring = 0.5
seed = 8

[contamination]
kind = "outlier"
ratios = [0.1, 0.2]
severities = [2, 4]

[tuning]
folds = 3
epsilon_grid = [0.0, 0.01, 0.05]
lambda_grid = [0.1, 10.0]
"#;

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

#[test]
fn rows_cover_the_grid_and_the_summary_recomputes() {
    let cfg = BenchmarkConfig::from_toml(CONFIG).unwrap();
    let result = run_benchmark(&cfg).unwrap();
    assert_eq!(result.rows.len(), 3 * 4 * 2);
    let triples: HashSet<(Method, usize, usize)> = result
        .rows
        .iter()
        .map(|r| (r.method, r.cell, r.trial))
        .collect();
    assert_eq!(triples.len(), result.rows.len());
    assert!(
        result.rows.iter().all(|r| r.status == "ok"),
        "{:?}",
        result.rows
    );
    assert_eq!(result.summary, summarize(&result.rows));
    assert_eq!(result.summary.len(), 3 * 4);

    for s in &result.summary {
        let group: Vec<_> = result
            .rows
            .iter()
            .filter(|r| r.method == s.method && r.cell == s.cell)
            .collect();
        assert_eq!(s.trials, group.len());
        let c: Vec<f64> = group.iter().filter_map(|r| r.c_index).collect();
        let a: Vec<f64> = group.iter().filter_map(|r| r.iauc).collect();
        for (got, want) in [(s.mean_c_index, mean(&c)), (s.mean_iauc, mean(&a))] {
            match (got, want) {
                (Some(g), Some(w)) => assert!((g - w).abs() <= 1e-12),
                (g, w) => assert_eq!(g, w),
            }
        }
    }

    // the penalized methods report the value chosen from their grids
    for r in &result.rows {
        match r.method {
            Method::Cox => assert_eq!(r.selected, None),
            Method::RidgeCox => assert!([0.1, 10.0].contains(&r.selected.unwrap())),
            Method::DrlCox => assert!([0.0, 0.01, 0.05].contains(&r.selected.unwrap())),
            _ => unreachable!(),
        }
    }

    let again = run_benchmark(&cfg).unwrap();
    assert_eq!(rows_csv(&result.rows, false), rows_csv(&again.rows, false));

    let dir = tempfile::tempdir().unwrap();
    write_outputs(&result, dir.path(), false).unwrap();
    let rows = std::fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    assert_eq!(rows, rows_csv(&result.rows, false));
    assert!(dir.path().join("summary.json").exists());
    assert!(dir.path().join("plot.csv").exists());
}

#[test]
fn invalid_configs_are_rejected() {
    for (from, to) in [
        ("trials = 2", "trials = 0"),
        (
            r#"methods = ["cox", "ridge_cox", "drl_cox"]"#,
            "methods = []",
        ),
        ("ratios = [0.1, 0.2]", "ratios = []"),
        ("folds = 3", "folds = 1"),
        ("seed = 5", "seed = 5\nunknown = 1"),
    ] {
        let text = CONFIG.replacen(from, to, 1);
        assert!(BenchmarkConfig::from_toml(&text).is_err(), "{to}");
    }
}

#[test]
fn shipped_configs_load_and_find_their_data() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let cfg = BenchmarkConfig::load(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
            if let drl_cox::benchmark::DatasetSource::Csv { path: data, .. } = &cfg.dataset {
                assert!(data.is_file(), "{data:?}");
            }
            seen += 1;
        }
    }
    assert!(seen >= 3);
}
