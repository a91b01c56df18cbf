//! Nonnegative least squares by the Lawson-Hanson active-set method.
//!
//! Solves min ||A x - b|| subject to x >= 0. The passive-set subproblems
//! are solved through an SVD least-squares solve, which keeps the method
//! well behaved when A has dependent columns (duplicate directions are
//! common inputs here).

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn least_squares_on(a: &DMatrix<f64>, b: &DVector<f64>, passive: &[usize]) -> DVector<f64> {
    let sub = a.select_columns(passive.iter());
    let svd = sub.svd(true, true);
    svd.solve(b, 1e-14).expect("svd solve with u and v_t computed")
}

/// Runs Lawson-Hanson NNLS. Deterministic: ties in the dual vector are
/// broken by the smallest index.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> NnlsSolution {
    let n = a.ncols();
    let mut x = DVector::zeros(n);
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = vec![false; n];

    // Dual feasibility threshold, relative to the natural scale of A^T b.
    let scale = a
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0f64, f64::max)
        .max(1.0)
        * (b.norm() + 1.0);
    let w_tol = 1e-12 * scale;

    let max_outer = 10 * n + 30;
    let mut iterations = 0;

    for _ in 0..max_outer {
        iterations += 1;
        let residual_vec = b - a * &x;
        let w = a.transpose() * residual_vec;

        let mut best: Option<(usize, f64)> = None;
        for i in 0..n {
            if !in_passive[i] && best.map(|(_, bw)| w[i] > bw).unwrap_or(true) {
                best = Some((i, w[i]));
            }
        }
        match best {
            Some((i, wi)) if wi > w_tol => {
                passive.push(i);
                in_passive[i] = true;
            }
            _ => break,
        }

        // Inner loop: restore nonnegativity on the passive set.
        let max_inner = 3 * n + 10;
        for _ in 0..max_inner {
            let z = least_squares_on(a, b, &passive);
            let z_floor = -1e-12 * z.amax().max(1.0);
            if z.iter().all(|&zi| zi > z_floor) {
                for (slot, &idx) in passive.iter().enumerate() {
                    x[idx] = z[slot].max(0.0);
                }
                break;
            }
            // Step toward z until the first passive variable hits zero.
            let mut alpha = 1.0f64;
            for (slot, &idx) in passive.iter().enumerate() {
                if z[slot] <= z_floor {
                    let denom = x[idx] - z[slot];
                    if denom > 0.0 {
                        alpha = alpha.min(x[idx] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for (slot, &idx) in passive.iter().enumerate() {
                x[idx] += alpha * (z[slot] - x[idx]);
            }
            let drop_tol = 1e-13 * x.amax().max(1.0);
            let mut kept: Vec<usize> = Vec::with_capacity(passive.len());
            for &idx in &passive {
                if x[idx] > drop_tol {
                    kept.push(idx);
                } else {
                    x[idx] = 0.0;
                    in_passive[idx] = false;
                }
            }
            if kept.len() == passive.len() {
                // No variable left the passive set; accept the clamped point.
                break;
            }
            passive = kept;
            if passive.is_empty() {
                break;
            }
        }
    }

    for xi in x.iter_mut() {
        if *xi < 0.0 {
            *xi = 0.0;
        }
    }
    let residual = (b - a * &x).norm();
    NnlsSolution {
        x,
        residual,
        iterations,
    }
}
