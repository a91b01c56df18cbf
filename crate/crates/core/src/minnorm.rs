//! Minimum-norm point in the convex hull of a finite point set, by Wolfe's
//! active-set method.
//!
//! The solver maintains a corral of affinely independent points, solves the
//! min-norm problem over the affine hull of the corral through a bordered
//! KKT system, and walks toward that solution dropping points whose hull
//! coefficient would go negative. Termination is by duality gap:
//! min_j x^T p_j >= ||x||^2 - gap_tol certifies optimality.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct MinNormSolution {
    /// The nearest point of conv(points) to the origin.
    pub point: DVector<f64>,
    /// Hull coefficients over the input points: nonnegative, summing to one.
    pub coefficients: Vec<f64>,
    /// ||x||^2 - min_j x^T p_j at termination (nonnegative up to roundoff).
    pub gap: f64,
    pub iterations: usize,
}

/// Minimum-norm point of the affine hull of the selected points:
/// solve [G 1; 1^T 0] [alpha; mu] = [0; 1]. Returns the barycentric
/// coordinates alpha, or `None` when the bordered system is numerically
/// singular (affinely dependent selection).
fn affine_min_norm_coeffs(points: &[DVector<f64>], selection: &[usize]) -> Option<DVector<f64>> {
    let s = selection.len();
    let mut k = DMatrix::zeros(s + 1, s + 1);
    for (a, &i) in selection.iter().enumerate() {
        for (b, &j) in selection.iter().enumerate() {
            k[(a, b)] = points[i].dot(&points[j]);
        }
        k[(a, s)] = 1.0;
        k[(s, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(s + 1);
    rhs[s] = 1.0;
    let lu = k.full_piv_lu();
    let sol = lu.solve(&rhs)?;
    let alpha = sol.rows(0, s).into_owned();
    if alpha.iter().any(|v| !v.is_finite()) {
        return None;
    }
    Some(alpha)
}

pub fn min_norm_point_in_hull(points: &[DVector<f64>], gap_tol: f64) -> MinNormSolution {
    assert!(!points.is_empty(), "hull of an empty set is empty");
    let q = points.len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(1.0, f64::max);
    let stop_tol = gap_tol * scale;

    // Start from the shortest input point.
    let mut start = 0;
    for j in 1..q {
        if points[j].norm_squared() < points[start].norm_squared() {
            start = j;
        }
    }
    let mut corral: Vec<usize> = vec![start];
    let mut lambda: Vec<f64> = vec![1.0];
    let mut x = points[start].clone();
    let mut iterations = 0;
    let mut gap;

    let max_outer = 20 * q + 200;
    'outer: for _ in 0..max_outer {
        iterations += 1;
        let xx = x.norm_squared();
        let mut t = 0;
        let mut tmin = f64::INFINITY;
        for (j, p) in points.iter().enumerate() {
            let v = x.dot(p);
            if v < tmin {
                tmin = v;
                t = j;
            }
        }
        gap = xx - tmin;
        if gap <= stop_tol || xx <= 1e-30 * scale {
            break;
        }
        if corral.contains(&t) {
            // Numerical stall: the best improving point is already in the
            // corral but the gap has not closed. Accept the current point.
            break;
        }
        corral.push(t);
        lambda.push(0.0);

        let max_inner = 3 * q + 10;
        for _ in 0..max_inner {
            match affine_min_norm_coeffs(points, &corral) {
                Some(alpha) => {
                    let floor = -1e-13;
                    if alpha.iter().all(|&a| a > floor) {
                        lambda = alpha.iter().map(|&a| a.max(0.0)).collect();
                        break;
                    }
                    // Move toward alpha until the first coefficient vanishes.
                    let mut theta = 1.0f64;
                    for (slot, &a) in alpha.iter().enumerate() {
                        if a <= floor {
                            let denom = lambda[slot] - a;
                            if denom > 0.0 {
                                theta = theta.min(lambda[slot] / denom);
                            } else {
                                theta = 0.0;
                            }
                        }
                    }
                    let mut kept_idx = Vec::with_capacity(corral.len());
                    let mut kept_lam = Vec::with_capacity(corral.len());
                    for slot in 0..corral.len() {
                        let v = (1.0 - theta) * lambda[slot] + theta * alpha[slot];
                        if v > 1e-13 {
                            kept_idx.push(corral[slot]);
                            kept_lam.push(v);
                        }
                    }
                    if kept_idx.is_empty() {
                        // Keep the most recently added point.
                        kept_idx.push(*corral.last().unwrap());
                        kept_lam.push(1.0);
                    }
                    corral = kept_idx;
                    lambda = kept_lam;
                    if corral.len() == 1 {
                        lambda[0] = 1.0;
                        break;
                    }
                }
                None => {
                    // Affinely dependent corral: drop the oldest point and
                    // retry the solve.
                    corral.remove(0);
                    lambda.remove(0);
                    if corral.len() <= 1 {
                        lambda = vec![1.0];
                        break;
                    }
                    continue;
                }
            }
        }
        // Renormalize and rebuild x from the corral.
        let total: f64 = lambda.iter().sum();
        if total > 0.0 {
            for l in lambda.iter_mut() {
                *l /= total;
            }
        }
        x = DVector::zeros(points[0].len());
        for (slot, &i) in corral.iter().enumerate() {
            x += &points[i] * lambda[slot];
        }
        if x.norm_squared() <= 1e-30 * scale {
            break 'outer;
        }
    }

    let xx = x.norm_squared();
    let tmin = (0..q)
        .map(|j| x.dot(&points[j]))
        .fold(f64::INFINITY, f64::min);
    let mut coefficients = vec![0.0; q];
    for (slot, &i) in corral.iter().enumerate() {
        coefficients[i] += lambda[slot];
    }
    MinNormSolution {
        point: x,
        coefficients,
        gap: xx - tmin,
        iterations,
    }
}
