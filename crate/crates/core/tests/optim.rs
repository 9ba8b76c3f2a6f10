use drl_cox::optim::{
    minimize_composite, minimize_smooth, CompositeOptions, FnProblem, SmoothOptions, SmoothProblem,
};
use drl_cox::NormOrder;
use proptest::prelude::*;

/// `A = BᵀB + I` and a right-hand side, from flat random entries.
fn quadratic(d: usize, entries: &[f64]) -> (Vec<Vec<f64>>, Vec<f64>) {
    let b: Vec<&[f64]> = entries[..d * d].chunks(d).collect();
    let a = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    (0..d).map(|k| b[k][i] * b[k][j]).sum::<f64>() + f64::from(u8::from(i == j))
                })
                .collect()
        })
        .collect();
    (a, entries[d * d..d * d + d].to_vec())
}

/// Solves `A x = c` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut c: Vec<f64>) -> Vec<f64> {
    let n = c.len();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, p);
        c.swap(col, p);
        for r in col + 1..n {
            let m = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= m * a[col][k];
            }
            c[r] -= m * c[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (c[r] - s) / a[r][r];
    }
    x
}

fn problem(a: Vec<Vec<f64>>, c: Vec<f64>) -> FnProblem<impl Fn(&[f64], &mut [f64]) -> f64> {
    let d = c.len();
    FnProblem::new(d, move |x: &[f64], g: &mut [f64]| {
        let mut f = 0.0;
        for i in 0..d {
            g[i] = (0..d).map(|j| a[i][j] * x[j]).sum::<f64>() - c[i];
            f += 0.5 * x[i] * (g[i] - c[i]);
        }
        f
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn smooth_solver_finds_the_quadratic_minimizer(
        d in 1usize..7,
        entries in prop::collection::vec(-2.0f64..2.0, 56),
    ) {
        let (a, c) = quadratic(d, &entries);
        let want = solve(a.clone(), c.clone());
        let (x, report) = minimize_smooth(
            &problem(a, c),
            &vec![0.0; d],
            SmoothOptions { tol: 1e-10, max_iter: 1000 },
        )
        .unwrap();
        prop_assert!(report.converged);
        // ‖x − x*‖ ≤ ‖A⁻¹‖‖∇f(x)‖ and the smallest eigenvalue of A is at least 1
        for (u, v) in x.iter().zip(&want) {
            prop_assert!((u - v).abs() <= 1e-9, "{:?} vs {:?}", x, want);
        }
    }

    #[test]
    fn composite_steps_never_increase_the_objective(
        d in 1usize..7,
        entries in prop::collection::vec(-2.0f64..2.0, 56),
        weight in 0.0f64..2.0,
        qi in 0usize..3,
    ) {
        let q = [NormOrder::One, NormOrder::Two, NormOrder::Inf][qi];
        let (a, c) = quadratic(d, &entries);
        let p = problem(a, c);
        let start = vec![1.5; d];
        let (x, report) = minimize_composite(&p, &start, q, weight, CompositeOptions::default()).unwrap();
        for w in report.trace.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
        }
        // optimality: ‖∇f(x)‖ in the dual norm is at most the weight
        let mut g = vec![0.0; d];
        p.value_grad(&x, &mut g);
        prop_assert!(q.conjugate().norm(&g) <= weight + 1e-6);
    }
}
