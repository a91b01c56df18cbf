//! Cosine measures of finite direction sets: relative to the span of the
//! set, and relative to an arbitrary nontrivial subspace.
//!
//! The quantity computed is
//!
//! ```text
//!   min over unit u in the reference subspace  of  max_j  u . d_j / ||d_j||
//! ```
//!
//! It is positive exactly when the (projected) set positively spans the
//! reference subspace, and the computation splits on that test:
//!
//! * positive branch: enumerate every index subset whose columns form a
//!   basis of the reference space; each basis has a unique unit vector with
//!   equal positive dot products against its columns, and the measure is
//!   the smallest of the resulting dot-product maxima;
//! * nonpositive branch: the problem relaxes exactly to the unit ball, and
//!   the value is the negated distance from the origin to the convex hull
//!   of the (projected, normalized) directions, from the minimum-norm-point
//!   solver. A vanishing distance means the measure is zero and a witness
//!   direction is recovered from the null space of the maximal positively
//!   spanning subset.
//!
//! For a subspace reference, directions are first normalized, then expressed
//! in the orthonormal basis of the subspace *without renormalizing*;
//! directions that project to zero keep the value from dipping below zero
//! but are otherwise inert.

use nalgebra::{DMatrix, DVector};

use crate::linalg::{
    columns_independent, equal_dot_product_vector, matrix_rank, orthonormal_null_space,
    orthonormal_span_basis, span_dimension,
};
use crate::minnorm::min_norm_point_in_hull;
use crate::oracle;
use crate::spanning::{is_positive_spanning, pspan_membership_columns};
use crate::types::{DirectionSet, EnumerationBudget, Error, Result, Subspace, Tolerances};

/// Euclidean distance under which two cosine vectors are merged.
const VECTOR_DEDUP_EPS: f64 = 1e-8;
/// Sample count and seed for the runtime cross-check of subspace-relative
/// results against the sphere-sampling oracle.
const CROSS_CHECK_SAMPLES: usize = 2048;
const CROSS_CHECK_SEED: u64 = 0x0C05_14E5;
const CROSS_CHECK_REFINE: usize = 64;
const CROSS_CHECK_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CosineCase {
    Positive,
    Zero,
    Negative,
}

#[derive(Debug, Clone)]
pub enum CosineWitness {
    /// Positive case: the first minimizing basis (indices into D) and the
    /// equal dot-product value attained on it.
    PositiveBasis { indices: Vec<usize>, gamma: f64 },
    /// Negative case: hull coefficients over the normalized directions,
    /// nonnegative and summing to one, with the attained hull-point norm.
    HullPoint { coefficients: Vec<f64>, norm: f64 },
    /// Zero case: a unit direction in the reference subspace whose dot
    /// products with all directions are nonpositive (within tolerance).
    ZeroDirection { direction: DVector<f64> },
}

#[derive(Debug, Clone)]
pub struct CosineReport {
    /// The cosine measure, in [-1, 1].
    pub value: f64,
    /// POSITIVE iff value > active_tol, ZERO iff |value| <= active_tol,
    /// NEGATIVE iff value < -active_tol.
    pub case: CosineCase,
    /// Unit representatives of the cosine vector set, in ambient
    /// coordinates, deduplicated.
    pub cosine_vectors: Vec<DVector<f64>>,
    /// For each cosine vector, the indices of D whose normalized dot
    /// product attains the value within active_tol.
    pub active_sets: Vec<Vec<usize>>,
    pub witness: CosineWitness,
    /// dim(span(D)).
    pub span_dim: usize,
    /// Dimension of the reference subspace.
    pub reference_dim: usize,
    /// True when the cosine vector set may contain a continuum; the listed
    /// vectors are then representatives only.
    pub may_be_non_isolated: bool,
    /// Non-fatal numerical observations (failed self-checks, oracle
    /// disagreements). Empty in the ordinary case.
    pub diagnostics: Vec<String>,
}

fn classify(value: f64, tol: &Tolerances) -> CosineCase {
    if value > tol.active_tol {
        CosineCase::Positive
    } else if value < -tol.active_tol {
        CosineCase::Negative
    } else {
        CosineCase::Zero
    }
}

/// Exact binomial coefficient, saturating at u128::MAX.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = match r.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    r
}

/// Lexicographic advance of a k-combination of {0, .., n-1}.
fn advance_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        if idx[i] != i + n - k {
            break;
        }
    }
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

fn dedup_vectors(vectors: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        if !out.iter().any(|u| (u - &v).norm() <= VECTOR_DEDUP_EPS) {
            out.push(v);
        }
    }
    out
}

enum CoreWitness {
    Basis { combo: Vec<usize>, gamma: f64 },
    Hull { coefficients: Vec<f64>, norm: f64 },
    ZeroDir { direction: DVector<f64> },
}

struct CoreOutcome {
    value: f64,
    vectors: Vec<DVector<f64>>,
    witness: CoreWitness,
    may_be_non_isolated: bool,
    diagnostics: Vec<String>,
}

/// min over unit u in R^ref_dim of max_j u . points_j, for nonzero points
/// that need not be unit vectors. This is the shared core of both measure
/// computations, operating in reference-subspace coordinates.
fn minimax_unit_sphere(
    points: &[DVector<f64>],
    ref_dim: usize,
    tol: &Tolerances,
    budget: &EnumerationBudget,
) -> Result<CoreOutcome> {
    let set = DirectionSet::new(points.to_vec(), 0.0)?;
    let cert = is_positive_spanning(&set, tol);
    if cert.is_positive_spanning && cert.span_dim == ref_dim {
        positive_branch(points, ref_dim, tol, budget)
    } else {
        hull_branch(points, ref_dim, tol, budget)
    }
}

fn positive_branch(
    points: &[DVector<f64>],
    m: usize,
    tol: &Tolerances,
    budget: &EnumerationBudget,
) -> Result<CoreOutcome> {
    let q = points.len();
    let count = binomial(q, m);
    if count > budget.max_bases as u128 {
        return Err(Error::BudgetExceeded {
            bases: count,
            size: m,
            max_bases: budget.max_bases,
        });
    }

    let basis_matrix = |combo: &[usize]| -> DMatrix<f64> {
        DMatrix::from_fn(points[0].len(), combo.len(), |i, j| points[combo[j]][i])
    };
    let evaluate = |combo: &[usize]| -> Option<(DVector<f64>, f64, f64)> {
        let b = basis_matrix(combo);
        if !columns_independent(&b, tol) {
            return None;
        }
        let (u, gamma) = equal_dot_product_vector(&b)?;
        let peak = points
            .iter()
            .map(|p| u.dot(p))
            .fold(f64::NEG_INFINITY, f64::max);
        Some((u, gamma, peak))
    };

    // First pass: the exact minimum of the per-basis maxima.
    let mut best = f64::INFINITY;
    let mut combo: Vec<usize> = (0..m).collect();
    loop {
        if let Some((_, _, peak)) = evaluate(&combo) {
            if peak < best {
                best = peak;
            }
        }
        if !advance_combination(&mut combo, q) {
            break;
        }
    }
    if !best.is_finite() {
        // Every candidate basis was screened out; at least the greedy span
        // basis must be usable, so this indicates severe degeneracy.
        let fallback = crate::linalg::span_basis(&DirectionSet::new(points.to_vec(), 0.0)?, tol);
        if let Some((u, gamma, peak)) = evaluate(&fallback) {
            return Ok(CoreOutcome {
                value: peak,
                vectors: vec![u],
                witness: CoreWitness::Basis {
                    combo: fallback,
                    gamma,
                },
                may_be_non_isolated: false,
                diagnostics: vec![
                    "all enumerated bases were numerically dependent; value taken from the greedy span basis".to_string(),
                ],
            });
        }
        return Err(Error::DegenerateSubspace);
    }

    // Second pass: collect every basis attaining the minimum within the
    // activity slack, deduplicating the associated unit vectors.
    let mut vectors: Vec<DVector<f64>> = Vec::new();
    let mut first_witness: Option<(Vec<usize>, f64)> = None;
    let mut combo: Vec<usize> = (0..m).collect();
    loop {
        if let Some((u, gamma, peak)) = evaluate(&combo) {
            if peak <= best + tol.active_tol {
                if first_witness.is_none() {
                    first_witness = Some((combo.clone(), gamma));
                }
                if !vectors.iter().any(|v| (v - &u).norm() <= VECTOR_DEDUP_EPS) {
                    vectors.push(u);
                }
            }
        }
        if !advance_combination(&mut combo, q) {
            break;
        }
    }
    let (combo, gamma) = first_witness.expect("a finite minimum has a witness");
    Ok(CoreOutcome {
        value: best,
        vectors,
        witness: CoreWitness::Basis { combo, gamma },
        may_be_non_isolated: false,
        diagnostics: Vec::new(),
    })
}

fn hull_branch(
    points: &[DVector<f64>],
    ref_dim: usize,
    tol: &Tolerances,
    budget: &EnumerationBudget,
) -> Result<CoreOutcome> {
    let q = points.len();
    let sol = min_norm_point_in_hull(points, tol.gap_tol);
    let norm = sol.point.norm();
    let mut diagnostics = Vec::new();

    if norm > tol.active_tol {
        let u = -&sol.point / norm;
        let scale = points.iter().map(|p| p.norm_squared()).fold(1.0, f64::max);
        if sol.gap > tol.gap_tol * scale * 10.0 {
            diagnostics.push(format!(
                "minimum-norm solver stopped with duality gap {:e}",
                sol.gap
            ));
        }
        return Ok(CoreOutcome {
            value: -norm,
            vectors: vec![u],
            witness: CoreWitness::Hull {
                coefficients: sol.coefficients,
                norm,
            },
            may_be_non_isolated: false,
            diagnostics,
        });
    }

    // Zero case: locate unit directions with nonpositive dot products
    // against every point.
    let passes = |u: &DVector<f64>| -> bool {
        points.iter().all(|p| u.dot(p) <= tol.active_tol)
    };
    let mut candidates: Vec<DVector<f64>> = Vec::new();
    let push_signed = |v: DVector<f64>, candidates: &mut Vec<DVector<f64>>| {
        for u in [v.clone(), -v] {
            if passes(&u) {
                candidates.push(u);
            }
        }
    };

    // Maximal positively spanning subset: directions whose negation stays
    // in the positive span of the whole set.
    let columns: Vec<DVector<f64>> = points.to_vec();
    let wstar: Vec<usize> = (0..q)
        .filter(|&j| pspan_membership_columns(&columns, ref_dim, &(-&points[j]), tol).0)
        .collect();
    let wstar_rank = if wstar.is_empty() {
        0
    } else {
        let rows = DMatrix::from_fn(wstar.len(), ref_dim, |i, j| points[wstar[i]][j]);
        if let Some(ns) = orthonormal_null_space(&rows, tol) {
            for j in 0..ns.dim() {
                push_signed(ns.basis_vector(j), &mut candidates);
            }
        }
        matrix_rank(&rows, tol)
    };
    if wstar.is_empty() {
        diagnostics.push(
            "hull point is numerically zero but no positively dependent circuit was found"
                .to_string(),
        );
    }

    if candidates.is_empty() {
        // Vertex enumeration fallback: null directions of every subset of
        // size ref_dim - 1 are the candidate extreme rays of the feasible
        // cone.
        let s = ref_dim.saturating_sub(1);
        if s == 0 {
            let mut e = DVector::zeros(ref_dim);
            e[0] = 1.0;
            push_signed(e, &mut candidates);
        } else if binomial(q, s) <= budget.max_bases as u128 {
            let mut combo: Vec<usize> = (0..s).collect();
            loop {
                let rows = DMatrix::from_fn(s, ref_dim, |i, j| points[combo[i]][j]);
                if let Some(ns) = orthonormal_null_space(&rows, tol) {
                    for j in 0..ns.dim() {
                        push_signed(ns.basis_vector(j), &mut candidates);
                    }
                }
                if !advance_combination(&mut combo, q) {
                    break;
                }
            }
        } else {
            diagnostics.push(format!(
                "zero-case vertex enumeration skipped: {} subsets exceed the budget",
                binomial(q, s)
            ));
        }
    }

    if candidates.is_empty() {
        // Last resort: best sampled direction, reported as approximate.
        let sample = oracle::SphereSample::generate(ref_dim, 8192, 0x5EED);
        let mut best_u: Option<(f64, DVector<f64>)> = None;
        for u in &sample.points {
            let peak = points
                .iter()
                .map(|p| u.dot(p))
                .fold(f64::NEG_INFINITY, f64::max);
            if best_u.as_ref().map(|(b, _)| peak < *b).unwrap_or(true) {
                best_u = Some((peak, u.clone()));
            }
        }
        let (peak, u) = best_u.expect("sample count is positive");
        diagnostics.push(format!(
            "zero-case witness enumeration failed; best sampled direction attains {:e}",
            peak
        ));
        candidates.push(u);
    }

    let vectors = dedup_vectors(candidates);
    let witness = CoreWitness::ZeroDir {
        direction: vectors[0].clone(),
    };
    Ok(CoreOutcome {
        value: 0.0,
        vectors,
        witness,
        may_be_non_isolated: ref_dim - wstar_rank >= 2,
        diagnostics,
    })
}

/// Indices of D whose normalized dot product with `u` equals `value`
/// within the activity slack.
pub fn active_set(
    d: &DirectionSet,
    _reference: &Subspace,
    u: &DVector<f64>,
    value: f64,
    tol: &Tolerances,
) -> Vec<usize> {
    (0..d.len())
        .filter(|&i| {
            let c = d.column(i);
            (u.dot(c) / c.norm() - value).abs() <= tol.active_tol
        })
        .collect()
}

fn active_sets_for(
    d_hat: &DirectionSet,
    vectors: &[DVector<f64>],
    value: f64,
    tol: &Tolerances,
) -> Vec<Vec<usize>> {
    vectors
        .iter()
        .map(|u| {
            (0..d_hat.len())
                .filter(|&i| (u.dot(d_hat.column(i)) - value).abs() <= tol.active_tol)
                .collect()
        })
        .collect()
}

/// The cosine measure of D relative to span(D).
pub fn compute_cosine_measure_span(
    d: &DirectionSet,
    tol: &Tolerances,
    budget: &EnumerationBudget,
) -> Result<CosineReport> {
    let d_hat = d.normalized();
    let m = span_dimension(&d_hat, tol);
    let basis = orthonormal_span_basis(&d_hat, tol);
    let reduced: Vec<DVector<f64>> = d_hat.iter().map(|c| basis.transpose() * c).collect();

    let outcome = minimax_unit_sphere(&reduced, m, tol, budget)?;
    let value = outcome.value;
    let cosine_vectors: Vec<DVector<f64>> = outcome.vectors.iter().map(|v| &basis * v).collect();
    let witness = match outcome.witness {
        CoreWitness::Basis { combo, gamma } => CosineWitness::PositiveBasis {
            indices: combo,
            gamma,
        },
        CoreWitness::Hull { coefficients, norm } => CosineWitness::HullPoint { coefficients, norm },
        CoreWitness::ZeroDir { direction } => CosineWitness::ZeroDirection {
            direction: &basis * direction,
        },
    };
    let active_sets = active_sets_for(&d_hat, &cosine_vectors, value, tol);
    let mut diagnostics = outcome.diagnostics;
    let case = classify(value, tol);
    if case == CosineCase::Positive {
        for (u_idx, active) in active_sets.iter().enumerate() {
            let rank = if active.is_empty() {
                0
            } else {
                span_dimension(&d.subset(active), tol)
            };
            if rank != m {
                diagnostics.push(format!(
                    "active set at cosine vector {} spans a subspace of dimension {} instead of {}",
                    u_idx, rank, m
                ));
            }
        }
    }
    Ok(CosineReport {
        value,
        case,
        cosine_vectors,
        active_sets,
        witness,
        span_dim: m,
        reference_dim: m,
        may_be_non_isolated: outcome.may_be_non_isolated,
        diagnostics,
    })
}

/// The cosine measure of D relative to the subspace L.
pub fn compute_cosine_measure_relative(
    d: &DirectionSet,
    l: &Subspace,
    tol: &Tolerances,
    budget: &EnumerationBudget,
) -> Result<CosineReport> {
    if l.ambient_dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            index: 0,
            got: l.ambient_dim(),
            expected: d.dim(),
        });
    }
    let k = l.dim();
    let d_hat = d.normalized();

    // Coordinates of the projected normalized directions in the basis of L,
    // deliberately not renormalized. Members that project to zero never
    // produce a negative dot product against a unit vector of L, so they
    // clamp the value at zero from below.
    let mut projected_zero: Vec<usize> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    let mut points: Vec<DVector<f64>> = Vec::new();
    for (j, c) in d_hat.iter().enumerate() {
        let w = l.coords(c);
        if w.norm() <= tol.zero_tol {
            projected_zero.push(j);
        } else {
            kept.push(j);
            points.push(w);
        }
    }

    let (value, vectors_reduced, witness, may_be_non_isolated, mut diagnostics) =
        if points.is_empty() {
            // Every direction is orthogonal to L: the objective vanishes at
            // every unit vector of L.
            let mut vectors = Vec::new();
            for j in 0..k {
                vectors.push(l.coords(&l.basis_vector(j)));
                vectors.push(-l.coords(&l.basis_vector(j)));
            }
            let vectors = dedup_vectors(vectors);
            let witness = CoreWitness::ZeroDir {
                direction: vectors[0].clone(),
            };
            (0.0, vectors, witness, k >= 2, Vec::new())
        } else {
            let outcome = minimax_unit_sphere(&points, k, tol, budget)?;
            let c = outcome.value;
            if projected_zero.is_empty() || c > tol.active_tol {
                (
                    c,
                    outcome.vectors,
                    outcome.witness,
                    outcome.may_be_non_isolated,
                    outcome.diagnostics,
                )
            } else if c < -tol.active_tol {
                // The zero members pin the maximum at zero; the minimizer of
                // the negative sub-problem still witnesses value zero, and a
                // whole neighborhood of it does too when dim(L) > 1.
                let witness = CoreWitness::ZeroDir {
                    direction: outcome.vectors[0].clone(),
                };
                (0.0, outcome.vectors, witness, k >= 2, outcome.diagnostics)
            } else {
                (
                    0.0,
                    outcome.vectors,
                    outcome.witness,
                    outcome.may_be_non_isolated,
                    outcome.diagnostics,
                )
            }
        };

    let cosine_vectors: Vec<DVector<f64>> =
        vectors_reduced.iter().map(|v| l.embed(v)).collect();
    let witness = match witness {
        CoreWitness::Basis { combo, gamma } => CosineWitness::PositiveBasis {
            indices: combo.iter().map(|&i| kept[i]).collect(),
            gamma,
        },
        CoreWitness::Hull { coefficients, norm } => {
            let mut full = vec![0.0; d.len()];
            for (slot, &j) in kept.iter().enumerate() {
                full[j] = coefficients[slot];
            }
            CosineWitness::HullPoint {
                coefficients: full,
                norm,
            }
        }
        CoreWitness::ZeroDir { direction } => CosineWitness::ZeroDirection {
            direction: l.embed(&direction),
        },
    };
    let active_sets = active_sets_for(&d_hat, &cosine_vectors, value, tol);

    // The basis enumeration theory is proved for the span reference; for a
    // general subspace the result is cross-checked against the
    // sphere-sampling oracle and any disagreement is surfaced.
    let check = oracle::sampled_cosine_measure(
        d,
        l,
        CROSS_CHECK_SAMPLES,
        CROSS_CHECK_SEED,
        CROSS_CHECK_REFINE,
    );
    if check.value < value - CROSS_CHECK_SLACK {
        diagnostics.push(format!(
            "sphere-sampling oracle found a lower objective ({:.12e} < {:.12e})",
            check.value, value
        ));
    }

    Ok(CosineReport {
        value,
        case: classify(value, tol),
        cosine_vectors,
        active_sets,
        witness,
        span_dim: span_dimension(&d_hat, tol),
        reference_dim: k,
        may_be_non_isolated,
        diagnostics,
    })
}

/// When the measure relative to span(D) vanishes, peels off the directions
/// orthogonal to a cosine vector until the remainder positively spans its
/// own span. Returns all indices when D already positively spans, `None`
/// when the measure is strictly negative.
pub fn find_positive_spanning_subset(
    d: &DirectionSet,
    tol: &Tolerances,
    budget: &EnumerationBudget,
) -> Result<Option<Vec<usize>>> {
    let cert = is_positive_spanning(d, tol);
    if cert.is_positive_spanning {
        return Ok(Some((0..d.len()).collect()));
    }
    let report = compute_cosine_measure_span(d, tol, budget)?;
    if report.value < -tol.active_tol {
        return Ok(None);
    }
    if report.value > tol.active_tol {
        // Contradicts the certificate; trust the sign characterization.
        return Ok(Some((0..d.len()).collect()));
    }

    let d_hat = d.normalized();
    let mut current: Vec<usize> = (0..d.len()).collect();
    let mut rep = report;
    for _ in 0..=d.len() {
        let u = match rep.cosine_vectors.first() {
            Some(u) => u.clone(),
            None => break,
        };
        let restricted: Vec<usize> = current
            .iter()
            .cloned()
            .filter(|&i| u.dot(d_hat.column(i)).abs() <= tol.active_tol)
            .collect();
        if restricted.is_empty() || restricted.len() == current.len() {
            break;
        }
        let sub = d.subset(&restricted);
        let sub_cert = is_positive_spanning(&sub, tol);
        let sub_rep = compute_cosine_measure_span(&sub, tol, budget)?;
        if sub_rep.value > tol.active_tol && sub_cert.is_positive_spanning {
            return Ok(Some(restricted));
        }
        if sub_rep.value < -tol.active_tol {
            break;
        }
        current = restricted;
        rep = sub_rep;
    }

    // Fallback: the union of all positively dependent circuits.
    let columns: Vec<DVector<f64>> = d.iter().cloned().collect();
    let wstar: Vec<usize> = (0..d.len())
        .filter(|&j| pspan_membership_columns(&columns, d.dim(), &(-d.column(j)), tol).0)
        .collect();
    if !wstar.is_empty() && is_positive_spanning(&d.subset(&wstar), tol).is_positive_spanning {
        return Ok(Some(wstar));
    }
    Ok(None)
}
