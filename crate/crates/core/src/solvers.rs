//! Small deterministic optimizers used across the crate.

use crate::linalg::{cr, CVec};

/// Solution of a least-squares problem over the probability simplex.
#[derive(Clone, Debug)]
pub struct SimplexLsq {
    pub weights: Vec<f64>,
    /// `Σ w_j a_j`.
    pub point: CVec,
    /// `‖Σ w_j a_j − target‖`.
    pub residual: f64,
    /// Frank–Wolfe duality gap at the returned iterate.
    pub duality_gap: f64,
    pub iterations: usize,
}

/// Minimize `‖Σ_j w_j atoms_j − target‖²` over the simplex with Frank–Wolfe
/// plus away steps and exact line search; stops at duality gap `gap_tol`.
pub fn simplex_least_squares(
    atoms: &[CVec],
    target: &CVec,
    gap_tol: f64,
    max_iter: usize,
) -> SimplexLsq {
    let m = atoms.len();
    assert!(m > 0, "need at least one atom");
    let mut weights = vec![0.0f64; m];
    weights[0] = 1.0;
    let mut point = atoms[0].clone();
    let mut iterations = 0usize;
    let mut duality_gap = f64::INFINITY;

    for it in 0..max_iter {
        iterations = it;
        let r = &point - target;
        // ∇_j = 2 Re⟨a_j, r⟩
        let grad: Vec<f64> =
            atoms.iter().map(|a| 2.0 * crate::linalg::inner(a, &r).re).collect();
        let (mut s, mut v) = (0usize, 0usize);
        let mut s_val = f64::INFINITY;
        let mut v_val = f64::NEG_INFINITY;
        for j in 0..m {
            if grad[j] < s_val {
                s_val = grad[j];
                s = j;
            }
            if weights[j] > 0.0 && grad[j] > v_val {
                v_val = grad[j];
                v = j;
            }
        }
        let grad_dot_w: f64 = grad.iter().zip(&weights).map(|(g, w)| g * w).sum();
        duality_gap = grad_dot_w - s_val;
        if duality_gap <= gap_tol {
            break;
        }
        // Pick the steeper of the Frank–Wolfe and away directions.
        let fw_gain = grad_dot_w - s_val;
        let away_gain = v_val - grad_dot_w;
        let (dir, gamma_max, away): (CVec, f64, bool) = if fw_gain >= away_gain {
            (&atoms[s] - &point, 1.0, false)
        } else {
            let gm = if weights[v] < 1.0 { weights[v] / (1.0 - weights[v]) } else { f64::MAX };
            (&point - &atoms[v], gm, true)
        };
        let dd = dir.norm_squared();
        if dd <= f64::MIN_POSITIVE {
            break;
        }
        let gamma_star = -crate::linalg::inner(&dir, &r).re / dd;
        let gamma = gamma_star.clamp(0.0, gamma_max);
        if gamma <= 0.0 {
            break;
        }
        if away {
            for w in weights.iter_mut() {
                *w *= 1.0 + gamma;
            }
            weights[v] -= gamma;
        } else {
            for w in weights.iter_mut() {
                *w *= 1.0 - gamma;
            }
            weights[s] += gamma;
        }
        for w in weights.iter_mut() {
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        point += dir * cr(gamma);
    }
    // Recompute the point from the weights to wash out drift.
    let mut exact = CVec::zeros(target.len());
    for (w, a) in weights.iter().zip(atoms) {
        if *w > 0.0 {
            exact += a * cr(*w);
        }
    }
    let residual = (&exact - target).norm();
    SimplexLsq { weights, point: exact, residual, duality_gap, iterations }
}
