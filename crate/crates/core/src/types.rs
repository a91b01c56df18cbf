//! Domain types shared across the crate: direction sets, subspaces,
//! tolerances, and the enumeration budget.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Default threshold below which a vector norm is treated as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;
/// Default slack for dot-product equality (active sets, case classification).
pub const DEFAULT_ACTIVE_TOL: f64 = 1e-8;
/// Default relative feasibility residual bound for nonnegative least squares.
pub const DEFAULT_FEAS_TOL: f64 = 1e-9;
/// Default duality-gap bound for the minimum-norm-point solver.
pub const DEFAULT_GAP_TOL: f64 = 1e-12;
/// Default cap on the number of candidate bases enumerated.
pub const DEFAULT_MAX_BASES: u64 = 2_000_000;

#[derive(Debug, Error)]
pub enum Error {
    #[error("direction set must contain at least one vector")]
    EmptySet,
    #[error("vector {index} has norm {norm:e}, at or below the zero threshold {zero_tol:e}")]
    ZeroVector {
        index: usize,
        norm: f64,
        zero_tol: f64,
    },
    #[error("vector {index} has dimension {got}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("subspace basis is degenerate: no linearly independent rows")]
    DegenerateSubspace,
    #[error("enumeration budget exceeded: {bases} candidate bases of size {size}, cap {max_bases}")]
    BudgetExceeded {
        bases: u128,
        size: usize,
        max_bases: u64,
    },
    #[error("cosine measure {value} is not positive; gradient bound undefined")]
    NonpositiveCosineMeasure { value: f64 },
    #[error("direction {index} has no antipodal partner; symmetry hypothesis violated")]
    AsymmetricSet { index: usize },
    #[error("{count} points exceed the oracle cap of {cap}")]
    TooManyPoints { count: usize, cap: usize },
    #[error("missing required constant: {name}")]
    MissingConstant { name: &'static str },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Numeric thresholds used throughout the solvers.
///
/// All fields are strictly positive. `rank_tol` is relative to the largest
/// singular value of the matrix under test; when `None` it defaults to
/// `max(rows, cols) * f64::EPSILON`, the usual rank-revealing convention.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Relative singular-value cutoff; `None` means the per-matrix default.
    pub rank_tol: Option<f64>,
    /// Vector norms at or below this are treated as the zero vector.
    pub zero_tol: f64,
    /// Dot-product equality slack for active sets and case classification.
    pub active_tol: f64,
    /// Relative feasibility residual bound for spanning certificates.
    pub feas_tol: f64,
    /// Duality-gap stopping bound for the minimum-norm-point solver.
    pub gap_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: None,
            zero_tol: DEFAULT_ZERO_TOL,
            active_tol: DEFAULT_ACTIVE_TOL,
            feas_tol: DEFAULT_FEAS_TOL,
            gap_tol: DEFAULT_GAP_TOL,
        }
    }
}

impl Tolerances {
    /// Effective relative rank cutoff for a matrix of the given shape.
    pub fn rank_tol_for(&self, rows: usize, cols: usize) -> f64 {
        self.rank_tol
            .unwrap_or_else(|| rows.max(cols).max(1) as f64 * f64::EPSILON)
    }
}

/// Cap on combinatorial enumeration. Exceeding it is a loud error, never a
/// silent subsample.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationBudget {
    pub max_bases: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_bases: DEFAULT_MAX_BASES,
        }
    }
}

/// An ordered finite list of nonzero vectors in R^n, also viewed as the
/// n x q matrix whose columns are the vectors. Order is preserved and
/// duplicates are permitted.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSet {
    columns: Vec<DVector<f64>>,
    dim: usize,
}

impl DirectionSet {
    /// Builds a set from column vectors, rejecting empty input, dimension
    /// mismatches, and vectors with norm at or below `zero_tol`.
    pub fn new(vectors: Vec<DVector<f64>>, zero_tol: f64) -> Result<Self> {
        let first = vectors.first().ok_or(Error::EmptySet)?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                index: 0,
                got: 0,
                expected: 1,
            });
        }
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    got: v.len(),
                    expected: dim,
                });
            }
            let norm = v.norm();
            if !norm.is_finite() || norm <= zero_tol {
                return Err(Error::ZeroVector {
                    index,
                    norm,
                    zero_tol,
                });
            }
        }
        Ok(DirectionSet {
            columns: vectors,
            dim,
        })
    }

    /// Builds a set from row slices (one vector per row).
    pub fn from_rows(rows: &[Vec<f64>], zero_tol: f64) -> Result<Self> {
        let vectors = rows
            .iter()
            .map(|r| DVector::from_column_slice(r))
            .collect();
        DirectionSet::new(vectors, zero_tol)
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cardinality q.
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, i: usize) -> &DVector<f64> {
        &self.columns[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DVector<f64>> {
        self.columns.iter()
    }

    /// The n x q matrix whose j-th column is the j-th vector.
    pub fn as_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.columns.len(), |i, j| self.columns[j][i])
    }

    /// The set with every column scaled to unit norm.
    pub fn normalized(&self) -> DirectionSet {
        DirectionSet {
            columns: self.columns.iter().map(|c| c / c.norm()).collect(),
            dim: self.dim,
        }
    }

    /// The subset selected by `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> DirectionSet {
        DirectionSet {
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            dim: self.dim,
        }
    }

    /// A copy with `v` appended.
    pub fn with_appended(&self, v: DVector<f64>) -> DirectionSet {
        let mut columns = self.columns.clone();
        columns.push(v);
        DirectionSet {
            columns,
            dim: self.dim,
        }
    }
}

/// A nontrivial linear subspace of R^n, stored as an n x k matrix with
/// orthonormal columns.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    /// Orthonormalizes the given spanning vectors (in order, dropping
    /// dependent or zero rows) into a subspace basis.
    pub fn from_spanning(rows: &[DVector<f64>], tol: &Tolerances) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::DegenerateSubspace);
        }
        for (index, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    index,
                    got: r.len(),
                    expected: dim,
                });
            }
        }
        let mut basis: Vec<DVector<f64>> = Vec::new();
        for r in rows {
            if r.norm() <= tol.zero_tol {
                continue;
            }
            // Modified Gram-Schmidt, applied twice for stability.
            let mut res = r.clone();
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&res);
                    res -= b * c;
                }
            }
            let rn = res.norm();
            if rn > tol.rank_tol_for(dim, rows.len()).sqrt().max(1e-12) * r.norm() {
                basis.push(res / rn);
            }
        }
        if basis.is_empty() {
            return Err(Error::DegenerateSubspace);
        }
        let mat = DMatrix::from_fn(dim, basis.len(), |i, j| basis[j][i]);
        Ok(Subspace { basis: mat })
    }

    /// Wraps a matrix whose columns are already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<f64>) -> Result<Self> {
        let k = basis.ncols();
        if k == 0 || k > basis.nrows() {
            return Err(Error::DegenerateSubspace);
        }
        let gram = basis.transpose() * &basis;
        for i in 0..k {
            for j in 0..k {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - expect).abs() > 1e-8 {
                    return Err(Error::DegenerateSubspace);
                }
            }
        }
        Ok(Subspace { basis })
    }

    /// The whole of R^n, with the coordinate basis.
    pub fn full_space(n: usize) -> Self {
        Subspace {
            basis: DMatrix::identity(n, n),
        }
    }

    /// k = dim(L).
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Ambient dimension n.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Column `j` of the orthonormal basis.
    pub fn basis_vector(&self, j: usize) -> DVector<f64> {
        DVector::from_column_slice(self.basis.column(j).as_slice())
    }

    /// Coordinates of `v` in the basis: Q^T v.
    pub fn coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.basis.transpose() * v
    }

    /// Maps reduced coordinates back to the ambient space: Q w.
    pub fn embed(&self, w: &DVector<f64>) -> DVector<f64> {
        &self.basis * w
    }

    /// Orthogonal projection of `v` onto the subspace: Q Q^T v.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }
}
