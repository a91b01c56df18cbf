//! Positive-spanning certificates and related set operations: membership in
//! the positive span, positive independence, extensions to positive spanning
//! sets, ascent directions, and the set radius.
//!
//! The central test is feasibility of "gamma >= 0 with D gamma = -D 1",
//! solved as a nonnegative least-squares problem so that the witness and the
//! infeasibility residual come out of the same computation.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{span_basis, span_dimension};
use crate::nnls::nnls;
use crate::types::{DirectionSet, Tolerances};

/// Outcome of the positive-spanning test, with the coefficient witness when
/// the verdict is positive and the feasibility residual either way.
#[derive(Debug, Clone)]
pub struct SpanningCertificate {
    pub is_positive_spanning: bool,
    /// Nonnegative coefficients with D gamma ~= -D 1; present iff spanning.
    pub gamma: Option<Vec<f64>>,
    /// Norm of D gamma + D 1 at the optimum.
    pub residual: f64,
    pub span_dim: usize,
}

/// Decides whether pspan(D) = span(D).
pub fn is_positive_spanning(d: &DirectionSet, tol: &Tolerances) -> SpanningCertificate {
    let a = d.as_matrix();
    let ones = DVector::from_element(d.len(), 1.0);
    let target = &a * ones;
    let b = -&target;
    let sol = nnls(&a, &b);
    let scale = target.norm() + 1.0;
    let feasible = sol.residual <= tol.feas_tol * scale;
    SpanningCertificate {
        is_positive_spanning: feasible,
        gamma: feasible.then(|| sol.x.iter().cloned().collect()),
        residual: sol.residual,
        span_dim: span_dimension(d, tol),
    }
}

/// Membership of `v` in the positive span of the given columns. An empty
/// column list positively spans only the origin.
pub(crate) fn pspan_membership_columns(
    columns: &[DVector<f64>],
    dim: usize,
    v: &DVector<f64>,
    tol: &Tolerances,
) -> (bool, Option<Vec<f64>>) {
    let threshold = tol.feas_tol * (v.norm() + 1.0);
    if columns.is_empty() {
        return (v.norm() <= threshold, Some(Vec::new()));
    }
    let a = DMatrix::from_fn(dim, columns.len(), |i, j| columns[j][i]);
    let sol = nnls(&a, v);
    if sol.residual <= threshold {
        (true, Some(sol.x.iter().cloned().collect()))
    } else {
        (false, None)
    }
}

/// Tests v in pspan(D), returning the minimizing nonnegative coefficients
/// when membership holds.
pub fn pspan_membership(
    d: &DirectionSet,
    v: &DVector<f64>,
    tol: &Tolerances,
) -> (bool, Option<Vec<f64>>) {
    let columns: Vec<DVector<f64>> = d.iter().cloned().collect();
    pspan_membership_columns(&columns, d.dim(), v, tol)
}

/// A direction is redundant when it lies in the positive span of the
/// others; the set is positively independent when no direction is.
pub fn is_positively_independent(d: &DirectionSet, tol: &Tolerances) -> (bool, Vec<usize>) {
    let mut redundant = Vec::new();
    for i in 0..d.len() {
        let others: Vec<DVector<f64>> = d
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, c)| c.clone())
            .collect();
        let (member, _) = pspan_membership_columns(&others, d.dim(), d.column(i), tol);
        if member {
            redundant.push(i);
        }
    }
    (redundant.is_empty(), redundant)
}

/// How to extend a deficient set into a positive spanning set of its span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionMode {
    /// Append w = -(b_1 + ... + b_m) for a column basis B of span(D).
    SingleVector,
    /// Append -b for every column b of the basis.
    MirrorBasis,
}

/// Extends `d` so that the result positively spans span(D).
pub fn extend_to_positive_spanning(
    d: &DirectionSet,
    mode: ExtensionMode,
    tol: &Tolerances,
) -> DirectionSet {
    let basis = span_basis(d, tol);
    match mode {
        ExtensionMode::SingleVector => {
            let mut w = DVector::zeros(d.dim());
            for &i in &basis {
                w -= d.column(i);
            }
            // Cannot vanish for an independent basis, but guarded anyway.
            if w.norm() <= tol.zero_tol {
                d.clone()
            } else {
                d.with_appended(w)
            }
        }
        ExtensionMode::MirrorBasis => {
            let mut out = d.clone();
            for &i in &basis {
                out = out.with_appended(-d.column(i));
            }
            out
        }
    }
}

/// First index i with v^T d_i strictly above the activity slack, if any.
pub fn find_ascent_direction(
    d: &DirectionSet,
    v: &DVector<f64>,
    tol: &Tolerances,
) -> Option<usize> {
    (0..d.len()).find(|&i| v.dot(d.column(i)) > tol.active_tol)
}

/// Radius of the set: the largest column norm.
pub fn radius(d: &DirectionSet) -> f64 {
    d.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
