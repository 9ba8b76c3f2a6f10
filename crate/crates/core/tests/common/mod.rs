//! Shared helpers for the integration tests: dataset strategies and
//! brute-force reference implementations written straight from the
//! definitions, without reusing any library internals.

#![allow(dead_code)]

use drl_cox::SurvivalDataset;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn whas_path() -> std::path::PathBuf {
    std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/whas500.csv")
}

/// Small datasets with tied durations (drawn from 1..=6), mixed censoring and
/// at least one event.
pub fn arb_dataset(max_n: usize, max_d: usize) -> impl Strategy<Value = SurvivalDataset> {
    (2..=max_n, 1..=max_d)
        .prop_flat_map(|(n, d)| {
            (
                prop::collection::vec(prop::collection::vec(-2.0..2.0f64, d), n),
                prop::collection::vec(1..=6u8, n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(x, y, mut e)| {
            e[0] = true;
            SurvivalDataset::from_rows(x, y.into_iter().map(f64::from).collect(), e).unwrap()
        })
}

/// Random dataset with continuous durations; `ties` rounds durations to
/// integers in 1..=8 so that tie groups appear.
pub fn random_dataset(
    seed: u64,
    n: usize,
    d: usize,
    censoring: f64,
    ties: bool,
) -> SurvivalDataset {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect())
        .collect();
    let y: Vec<f64> = (0..n)
        .map(|_| {
            if ties {
                r.random_range(1..=8) as f64
            } else {
                r.random_range(0.1..10.0)
            }
        })
        .collect();
    let mut e: Vec<bool> = (0..n).map(|_| r.random::<f64>() >= censoring).collect();
    e[0] = true;
    SurvivalDataset::from_rows(x, y, e).unwrap()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Canonical-order arrays `(x, y, ζ)` of a dataset.
pub fn columns(ds: &SurvivalDataset) -> (Vec<Vec<f64>>, Vec<f64>, Vec<bool>) {
    (
        (0..ds.len()).map(|k| ds.covariates(k).to_vec()).collect(),
        ds.durations(),
        ds.events(),
    )
}

/// Data term of the hard robust objective, from its definition:
/// `(1/N) Σ_i ζ_i s_i` with
/// `s_i = max_{i ≤ k < i+γ} log(exp(β'x_i) + S_k) − β'x_i − α(y_i − y_k)`
/// and `S_k = Σ_{m ≤ k} exp(β'x_m)`. Rows must be sorted by strictly
/// decreasing duration.
pub fn oracle_loss(
    x: &[Vec<f64>],
    y: &[f64],
    e: &[bool],
    beta: &[f64],
    alpha: f64,
    gamma: usize,
) -> f64 {
    let n = y.len();
    assert!(y.windows(2).all(|w| w[0] > w[1]), "rows must be sorted");
    let mut prefix = Vec::with_capacity(n);
    let mut acc = 0.0;
    for xk in x {
        acc += dot(beta, xk).exp();
        prefix.push(acc);
    }
    let mut total = 0.0;
    for i in (0..n).filter(|&i| e[i]) {
        let eta = dot(beta, &x[i]);
        let mut best = f64::NEG_INFINITY;
        for k in i..(i + gamma).min(n) {
            let g = (eta.exp() + prefix[k]).ln() - eta - alpha * (y[i] - y[k]);
            best = best.max(g);
        }
        total += best;
    }
    total / n as f64
}

/// Harrell's C by enumerating every ordered pair.
pub fn brute_c_index(y: &[f64], e: &[bool], s: &[f64]) -> Option<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..y.len() {
        for j in 0..y.len() {
            if e[i] && y[i] < y[j] {
                den += 1.0;
                if s[i] > s[j] {
                    num += 1.0;
                } else if s[i] == s[j] {
                    num += 0.5;
                }
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

/// Product-limit survival evaluated by scanning all distinct times `u ≤ t`
/// (or `u < t` when `left` is set). `hit` marks the subjects whose time counts
/// as a failure.
pub fn brute_km(y: &[f64], hit: &[bool], t: f64, left: bool) -> f64 {
    let mut times: Vec<f64> = y
        .iter()
        .zip(hit)
        .filter(|(_, &h)| h)
        .map(|(&v, _)| v)
        .collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut s = 1.0;
    for u in times {
        if (left && u >= t) || (!left && u > t) {
            break;
        }
        let at_risk = y.iter().filter(|&&v| v >= u).count() as f64;
        let d = y.iter().zip(hit).filter(|(&v, &h)| h && v == u).count() as f64;
        s *= 1.0 - d / at_risk;
    }
    s
}

fn linear_quantile(v: &[f64], q: f64) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

/// Cumulative/dynamic iAUC by double loops over (case, control) pairs.
///
/// Grid: distinct test event times `t ≤ q_0.9(test durations)` with
/// `t < max duration`, cut before the first case whose censoring weight
/// `1/Ĝ(y⁻)` is infinite. Cases `y_i ≤ t, ζ_i = 1` weigh `1/Ĝ(y_i⁻)` with
/// `Ĝ` the training censoring curve; controls are `y_j > t`. The AUC curve
/// is averaged with trapezoids against the drops of the test event curve.
pub fn brute_iauc(
    y: &[f64],
    e: &[bool],
    s: &[f64],
    train_y: &[f64],
    train_e: &[bool],
) -> Option<f64> {
    let n = y.len();
    let train_c: Vec<bool> = train_e.iter().map(|v| !v).collect();
    let w: Vec<f64> = (0..n)
        .map(|i| 1.0 / brute_km(train_y, &train_c, y[i], true))
        .collect();
    let horizon = linear_quantile(y, 0.9);
    let ymax = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cut = (0..n)
        .filter(|&i| e[i] && w[i].is_infinite())
        .map(|i| y[i])
        .fold(f64::INFINITY, f64::min);
    let mut grid: Vec<f64> = (0..n)
        .filter(|&i| e[i] && y[i] <= horizon && y[i] < ymax && y[i] < cut)
        .map(|i| y[i])
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if grid.len() < 2 {
        return None;
    }
    let auc: Vec<f64> = grid
        .iter()
        .map(|&t| {
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..n {
                if !(e[i] && y[i] <= t) {
                    continue;
                }
                for j in 0..n {
                    if y[j] > t {
                        den += w[i];
                        if s[i] > s[j] {
                            num += w[i];
                        } else if s[i] == s[j] {
                            num += 0.5 * w[i];
                        }
                    }
                }
            }
            num / den
        })
        .collect();
    let surv: Vec<f64> = grid.iter().map(|&t| brute_km(y, e, t, false)).collect();
    let mut integral = 0.0;
    for k in 0..grid.len() - 1 {
        integral += 0.5 * (auc[k] + auc[k + 1]) * (surv[k] - surv[k + 1]);
    }
    Some(integral / (surv[0] - surv[grid.len() - 1]))
}

/// Mean modified loss `(1/N) Σ ζ_i [log(exp(η_i) + Σ_{y_j ≥ y_i} exp(η_j)) − η_i]`
/// with its gradient and Hessian, by explicit loops.
pub fn modified_loss_derivs(
    x: &[Vec<f64>],
    y: &[f64],
    e: &[bool],
    beta: &[f64],
) -> (f64, Vec<f64>, Vec<Vec<f64>>) {
    let n = y.len();
    let d = beta.len();
    let w: Vec<f64> = x.iter().map(|xi| dot(beta, xi).exp()).collect();
    let mut f = 0.0;
    let mut g = vec![0.0; d];
    let mut h = vec![vec![0.0; d]; d];
    for i in 0..n {
        if !e[i] {
            continue;
        }
        // weights of the log-sum: subject i once more plus its risk set
        let mut members: Vec<(f64, &[f64])> = vec![(w[i], &x[i])];
        for j in 0..n {
            if y[j] >= y[i] {
                members.push((w[j], &x[j]));
            }
        }
        let z: f64 = members.iter().map(|m| m.0).sum();
        f += z.ln() - dot(beta, &x[i]);
        let mut mean = vec![0.0; d];
        for (wj, xj) in &members {
            for a in 0..d {
                mean[a] += wj * xj[a] / z;
            }
        }
        for a in 0..d {
            g[a] += mean[a] - x[i][a];
        }
        for (wj, xj) in &members {
            for a in 0..d {
                for b in 0..d {
                    h[a][b] += wj / z * (xj[a] - mean[a]) * (xj[b] - mean[b]);
                }
            }
        }
    }
    let inv = 1.0 / n as f64;
    (
        f * inv,
        g.iter().map(|v| v * inv).collect(),
        h.iter()
            .map(|row| row.iter().map(|v| v * inv).collect())
            .collect(),
    )
}

/// Damped Newton on the mean modified loss, solving the Newton system by
/// Gaussian elimination. Returns the minimum value.
pub fn minimize_modified_loss(x: &[Vec<f64>], y: &[f64], e: &[bool]) -> f64 {
    let d = x[0].len();
    let mut beta = vec![0.0; d];
    let (mut f, mut g, mut h) = modified_loss_derivs(x, y, e, &beta);
    for _ in 0..200 {
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < 1e-12 {
            break;
        }
        let step = solve(h.clone(), g.iter().map(|v| -v).collect());
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            let (fc, gc, hc) = modified_loss_derivs(x, y, e, &cand);
            if fc <= f || t < 1e-12 {
                beta = cand;
                f = fc;
                g = gc;
                h = hc;
                break;
            }
            t *= 0.5;
        }
    }
    f
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))
            .unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let m = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= m * a[c][k];
            }
            b[r] -= m * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}
