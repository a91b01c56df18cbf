//! Small dense linear-algebra substrate: ranks and span bases with explicit
//! tolerances, orthogonal projection, Gram matrices, and null spaces.
//!
//! Everything here is sized for desk-scale problems (dimensions up to a few
//! hundred); all factorizations are dense SVD, QR, or Cholesky.

use nalgebra::{DMatrix, DVector};

use crate::types::{DirectionSet, Subspace, Tolerances};

/// Singular values of `m`, unsorted, together with the rank cutoff
/// `rank_tol * sigma_max`.
fn singular_values_and_cutoff(m: &DMatrix<f64>, tol: &Tolerances) -> (DVector<f64>, f64) {
    let svals = m.clone().singular_values();
    let smax = svals.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = tol.rank_tol_for(m.nrows(), m.ncols()) * smax;
    (svals, cutoff)
}

/// Numerical rank of a matrix: singular values strictly above
/// `rank_tol * sigma_max`.
pub fn matrix_rank(m: &DMatrix<f64>, tol: &Tolerances) -> usize {
    let (svals, cutoff) = singular_values_and_cutoff(m, tol);
    if cutoff == 0.0 {
        return 0;
    }
    svals.iter().filter(|&&s| s > cutoff).count()
}

/// dim(span(D)).
pub fn span_dimension(d: &DirectionSet, tol: &Tolerances) -> usize {
    matrix_rank(&d.as_matrix(), tol)
}

/// Indices of a deterministic column basis of span(D): greedy in input
/// order, accepting a column exactly when it increases the numerical rank
/// of the selection.
pub fn span_basis(d: &DirectionSet, tol: &Tolerances) -> Vec<usize> {
    let m = span_dimension(d, tol);
    let n = d.dim();
    let mut selected: Vec<usize> = Vec::with_capacity(m);
    for j in 0..d.len() {
        if selected.len() == m {
            break;
        }
        let mut cols: Vec<usize> = selected.clone();
        cols.push(j);
        let candidate = d.subset(&cols).as_matrix();
        if matrix_rank(&candidate, tol) == cols.len() {
            selected.push(j);
        }
        let _ = n;
    }
    selected
}

/// An orthonormal basis of span(D) as an n x m matrix, from the left
/// singular vectors with singular value above the rank cutoff.
pub fn orthonormal_span_basis(d: &DirectionSet, tol: &Tolerances) -> DMatrix<f64> {
    let m = d.as_matrix();
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = tol.rank_tol_for(m.nrows(), m.ncols()) * smax;
    // Keep columns in decreasing singular-value order for a canonical basis.
    let mut order: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > cutoff)
        .collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut basis = DMatrix::zeros(m.nrows(), order.len());
    for (out, &i) in order.iter().enumerate() {
        basis.set_column(out, &u.column(i));
    }
    basis
}

/// Orthogonal projection of `v` onto span(D).
pub fn project_onto_span(d: &DirectionSet, v: &DVector<f64>, tol: &Tolerances) -> DVector<f64> {
    let basis = orthonormal_span_basis(d, tol);
    &basis * (basis.transpose() * v)
}

/// Gram matrix B^T B.
pub fn gram(b: &DMatrix<f64>) -> DMatrix<f64> {
    b.transpose() * b
}

/// Orthonormal basis of the null space {x : M x = 0}, or `None` when the
/// null space is trivial.
///
/// The right singular vectors with singular value at or below the rank
/// cutoff are kept; when the matrix has fewer rows than columns the thin
/// SVD misses part of the domain, so the singular basis is completed to a
/// full orthonormal basis by pivoted Gram-Schmidt over coordinate vectors.
pub fn orthonormal_null_space(m: &DMatrix<f64>, tol: &Tolerances) -> Option<Subspace> {
    let cols = m.ncols();
    if cols == 0 {
        return None;
    }
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = tol.rank_tol_for(m.nrows(), m.ncols()) * smax;

    let mut known: Vec<DVector<f64>> = (0..v_t.nrows())
        .map(|i| DVector::from_column_slice(v_t.row(i).transpose().as_slice()))
        .collect();
    let mut null_basis: Vec<DVector<f64>> = (0..v_t.nrows())
        .filter(|&i| svd.singular_values[i] <= cutoff || smax == 0.0)
        .map(|i| known[i].clone())
        .collect();

    // Complete the singular basis of the domain when rows < cols.
    while known.len() < cols {
        let mut best: Option<(usize, f64, DVector<f64>)> = None;
        for j in 0..cols {
            let mut res = DVector::zeros(cols);
            res[j] = 1.0;
            for _ in 0..2 {
                for b in &known {
                    let c = b.dot(&res);
                    res -= b * c;
                }
            }
            let norm = res.norm();
            if best.as_ref().map(|(_, n, _)| norm > *n).unwrap_or(true) {
                best = Some((j, norm, res));
            }
        }
        let (_, norm, res) = best.expect("cols > 0");
        let unit = res / norm;
        known.push(unit.clone());
        null_basis.push(unit);
    }

    if null_basis.is_empty() {
        return None;
    }
    // Canonical sign: largest-magnitude entry positive.
    for b in &mut null_basis {
        let mut pivot = 0;
        for i in 1..b.len() {
            if b[i].abs() > b[pivot].abs() {
                pivot = i;
            }
        }
        if b[pivot] < 0.0 {
            *b *= -1.0;
        }
    }
    let mat = DMatrix::from_fn(cols, null_basis.len(), |i, j| null_basis[j][i]);
    Subspace::from_orthonormal(mat).ok()
}

/// The unit vector in span(B) whose dot products with the columns of `B`
/// are all equal to the same positive value `gamma`, together with that
/// value. Returns `None` when the Gram matrix is numerically singular.
///
/// For B with independent columns: gamma = 1/sqrt(1^T G(B)^{-1} 1) and
/// u = gamma * B G(B)^{-1} 1; the result is renormalized explicitly so a
/// poorly conditioned solve can only raise, never lower, downstream maxima.
pub fn equal_dot_product_vector(b: &DMatrix<f64>) -> Option<(DVector<f64>, f64)> {
    let g = gram(b);
    let chol = nalgebra::linalg::Cholesky::new(g)?;
    let ones = DVector::from_element(b.ncols(), 1.0);
    let y = chol.solve(&ones);
    let s = ones.dot(&y);
    if !(s.is_finite() && s > 0.0) {
        return None;
    }
    let gamma = 1.0 / s.sqrt();
    let mut u = b * y * gamma;
    let norm = u.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return None;
    }
    u /= norm;
    Some((u, gamma))
}

/// Cheap independence screen for a candidate basis: Cholesky of the Gram
/// matrix of the normalized columns must succeed with its smallest pivot
/// above the rank tolerance.
pub fn columns_independent(b: &DMatrix<f64>, tol: &Tolerances) -> bool {
    let mut unit = b.clone();
    for mut c in unit.column_iter_mut() {
        let n = c.norm();
        if n == 0.0 {
            return false;
        }
        c /= n;
    }
    let g = gram(&unit);
    match nalgebra::linalg::Cholesky::new(g) {
        Some(chol) => {
            let l = chol.l();
            let mut min_diag = f64::INFINITY;
            for i in 0..l.nrows() {
                min_diag = min_diag.min(l[(i, i)]);
            }
            min_diag * min_diag > tol.rank_tol_for(b.nrows(), b.ncols())
        }
        None => false,
    }
}
