mod common;

use drl_cox::cox::{negative_log_partial_likelihood, negative_log_partial_likelihood_grad};
use drl_cox::synthetic::{generate, SyntheticSpec};
use drl_cox::{fit_cox, PenaltySpec, SurvivalDataset};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

/// Breslow negative log partial likelihood by scanning every risk set.
fn brute_loss(ds: &SurvivalDataset, beta: &[f64]) -> f64 {
    let (x, y, e) = columns(ds);
    (0..y.len())
        .filter(|&i| e[i])
        .map(|i| {
            let risk: f64 = (0..y.len())
                .filter(|&j| y[j] >= y[i])
                .map(|j| dot(beta, &x[j]).exp())
                .sum();
            risk.ln() - dot(beta, &x[i])
        })
        .sum()
}

fn vec_in(r: &mut ChaCha8Rng, d: usize, scale: f64) -> Vec<f64> {
    (0..d).map(|_| r.random_range(-scale..scale)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn loss_matches_risk_set_scan(ds in arb_dataset(12, 3), seed in any::<u64>()) {
        let beta = vec_in(&mut ChaCha8Rng::seed_from_u64(seed), ds.n_features(), 1.5);
        let got = negative_log_partial_likelihood(&ds, &beta).unwrap();
        let want = brute_loss(&ds, &beta);
        prop_assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0), "{} vs {}", got, want);
    }
}

#[test]
fn loss_is_midpoint_convex() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    for pair in 0..200 {
        let ds = random_dataset(pair, 15, 3, 0.3, pair % 2 == 0);
        let a = vec_in(&mut r, 3, 2.0);
        let b = vec_in(&mut r, 3, 2.0);
        let mid: Vec<f64> = a.iter().zip(&b).map(|(u, v)| 0.5 * (u + v)).collect();
        let f = |beta: &[f64]| negative_log_partial_likelihood(&ds, beta).unwrap();
        assert!(f(&mid) <= 0.5 * (f(&a) + f(&b)) + 1e-9, "pair {pair}");
    }
}

#[test]
fn gradient_matches_central_differences() {
    let mut r = ChaCha8Rng::seed_from_u64(6);
    let h = 1e-6;
    for point in 0..50 {
        let ds = random_dataset(100 + point, 20, 4, 0.3, point % 3 == 0);
        let beta = vec_in(&mut r, 4, 1.0);
        let (_, g) = negative_log_partial_likelihood_grad(&ds, &beta).unwrap();
        let scale = g.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for j in 0..4 {
            let mut up = beta.clone();
            let mut down = beta.clone();
            up[j] += h;
            down[j] -= h;
            let fd = (negative_log_partial_likelihood(&ds, &up).unwrap()
                - negative_log_partial_likelihood(&ds, &down).unwrap())
                / (2.0 * h);
            assert!(
                (fd - g[j]).abs() / scale < 1e-5,
                "point {point}, coordinate {j}: {fd} vs {}",
                g[j]
            );
        }
    }
}

fn synthetic(n: usize, d: usize, seed: u64) -> SurvivalDataset {
    generate(&SyntheticSpec {
        n,
        d,
        censoring: 0.4,
        seed,
        beta: None,
    })
    .unwrap()
    .standardize()
    .unwrap()
}

#[test]
fn unpenalized_fit_reaches_a_stationary_point() {
    for seed in 0..5 {
        let ds = synthetic(300, 6, seed);
        let model = fit_cox(&ds, &PenaltySpec::NONE, 1e-8, 200).unwrap();
        assert!(model.solver_report.converged);
        let (_, g) = negative_log_partial_likelihood_grad(&ds, &model.beta).unwrap();
        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(gmax < 1e-6, "seed {seed}: {gmax}");
    }
}

#[test]
fn pure_noise_gives_small_coefficients() {
    let mut r = ChaCha8Rng::seed_from_u64(42);
    let n = 200;
    let x: Vec<Vec<f64>> = (0..n).map(|_| vec_in(&mut r, 3, 1.0)).collect();
    let y: Vec<f64> = (0..n).map(|_| r.random_range(0.1..10.0)).collect();
    let e: Vec<bool> = (0..n).map(|_| r.random::<f64>() < 0.7).collect();
    let ds = SurvivalDataset::from_rows(x, y, e).unwrap();
    let model = fit_cox(&ds, &PenaltySpec::NONE, 1e-8, 200).unwrap();
    assert!(model.solver_report.converged);
    assert!(model.beta.iter().all(|b| b.abs() < 0.5), "{:?}", model.beta);
}

#[test]
fn ridge_path_shrinks_monotonically() {
    let ds = synthetic(250, 5, 9);
    let norms: Vec<f64> = [0.0, 0.1, 1.0, 10.0, 100.0]
        .iter()
        .map(|&lambda| {
            let m = fit_cox(&ds, &PenaltySpec::ridge(lambda), 1e-9, 500).unwrap();
            assert!(m.solver_report.converged, "lambda {lambda}");
            m.beta.iter().map(|b| b * b).sum::<f64>().sqrt()
        })
        .collect();
    for w in norms.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{norms:?}");
    }
    assert!(norms[4] < 0.5 * norms[0], "{norms:?}");
}
