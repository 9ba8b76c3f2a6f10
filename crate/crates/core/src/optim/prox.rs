//! Proximal operators of `w‖·‖_q`.

use crate::norm::NormOrder;

/// `argmin_u  w‖u‖_q + ½‖u − v‖²`.
pub fn prox_norm(q: NormOrder, w: f64, v: &[f64]) -> Vec<f64> {
    debug_assert!(w >= 0.0);
    match q {
        NormOrder::One => soft_threshold(w, v),
        NormOrder::Two => block_shrink(w, v),
        NormOrder::Inf => {
            // Moreau: prox of w‖·‖_∞ is v minus the projection onto the ℓ1 ball of radius w.
            let p = project_l1_ball(w, v);
            v.iter().zip(&p).map(|(a, b)| a - b).collect()
        }
    }
}

pub fn soft_threshold(w: f64, v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| x.signum() * (x.abs() - w).max(0.0))
        .collect()
}

pub fn block_shrink(w: f64, v: &[f64]) -> Vec<f64> {
    let r = NormOrder::Two.norm(v);
    if r <= w {
        vec![0.0; v.len()]
    } else {
        let scale = (r - w) / r;
        v.iter().map(|x| x * scale).collect()
    }
}

/// Euclidean projection onto `{u : ‖u‖_1 ≤ radius}` by the sort-and-threshold
/// method.
pub fn project_l1_ball(radius: f64, v: &[f64]) -> Vec<f64> {
    if NormOrder::One.norm(v) <= radius {
        return v.to_vec();
    }
    if radius <= 0.0 {
        return vec![0.0; v.len()];
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, m) in mags.iter().enumerate() {
        cumsum += m;
        let t = (cumsum - radius) / (k as f64 + 1.0);
        if *m > t {
            theta = t;
        } else {
            break;
        }
    }
    v.iter()
        .map(|&x| x.signum() * (x.abs() - theta).max(0.0))
        .collect()
}
