//! Independent brute-force verifiers used by the test suites and, on
//! request, at runtime to cross-check solver output.
//!
//! Three oracles live here:
//!
//! * `sampled_cosine_measure` — evaluates the minimax objective at unit
//!   vectors of the reference subspace (seeded uniform sphere samples plus
//!   the signed basis vectors) and optionally polishes the best sample by a
//!   steepest-descent walk on the sphere. Sampling a minimum always yields
//!   an upper bound on it.
//! * `kkt_min_norm_oracle` — exhaustive subset enumeration for the nearest
//!   point of a convex hull to the origin, verifying the optimality
//!   conditions of each candidate.
//! * `exhaustive_pspan_subset_check` — tests every nonempty subset for the
//!   positive-spanning property.

use nalgebra::{DMatrix, DVector};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spanning::is_positive_spanning;
use crate::types::{DirectionSet, Error, Result, Subspace, Tolerances};

/// Hard cap for the exhaustive minimum-norm oracle.
pub const KKT_POINT_CAP: usize = 20;
/// Hard cap for exhaustive subset enumeration (2^q subsets).
pub const SUBSET_CAP: usize = 12;

fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    // 53 random bits, offset to stay inside the open interval.
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = uniform_open01(rng);
    let u2 = uniform_open01(rng);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// A deterministic batch of unit vectors: normalized Gaussian draws from a
/// seeded generator.
#[derive(Debug, Clone)]
pub struct SphereSample {
    pub dim: usize,
    pub points: Vec<DVector<f64>>,
}

impl SphereSample {
    pub fn generate(dim: usize, count: usize, seed: u64) -> SphereSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        while points.len() < count {
            let v = DVector::from_fn(dim, |_, _| standard_normal(&mut rng));
            let n = v.norm();
            if n > 1e-8 {
                points.push(v / n);
            }
        }
        SphereSample { dim, points }
    }
}

#[derive(Debug, Clone)]
pub struct SampledMeasure {
    /// min over evaluated unit u in L of max_j u . d_j / ||d_j||; an upper
    /// bound on the true measure.
    pub value: f64,
    /// The evaluated vector attaining the minimum, in ambient coordinates.
    pub argmin: DVector<f64>,
    /// Number of random samples drawn.
    pub samples: usize,
}

/// Minimum-norm point of the affine hull of `points`, as barycentric
/// coordinates, via the bordered system [G 1; 1^T 0][a; mu] = [0; 1].
fn affine_min_norm(points: &[&DVector<f64>]) -> Option<(DVector<f64>, Vec<f64>)> {
    let s = points.len();
    let mut k = DMatrix::zeros(s + 1, s + 1);
    for a in 0..s {
        for b in 0..s {
            k[(a, b)] = points[a].dot(points[b]);
        }
        k[(a, s)] = 1.0;
        k[(s, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(s + 1);
    rhs[s] = 1.0;
    let sol = k.full_piv_lu().solve(&rhs)?;
    let alpha: Vec<f64> = sol.rows(0, s).iter().cloned().collect();
    if alpha.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut p = DVector::zeros(points[0].len());
    for (a, pt) in alpha.iter().zip(points.iter()) {
        p += *pt * *a;
    }
    Some((p, alpha))
}

/// Local refinement for f(v) = max_j v . w_j on the unit sphere.
///
/// Each iteration first tries to snap to the minimum-norm point of the
/// affine hull of the pieces active within a range of slacks (minimizers of
/// a piecewise-linear function on the sphere sit at such equal-dot-product
/// points), then falls back to a steepest-descent step with a geometric
/// line search. Every candidate is an exact unit vector, so the returned
/// value stays an upper bound on the true minimum.
fn refine_on_sphere(
    w: &[DVector<f64>],
    mut v: DVector<f64>,
    mut fv: f64,
    steps: usize,
) -> (DVector<f64>, f64) {
    let dim = w.first().map(|p| p.len()).unwrap_or(0);
    let eval = |v: &DVector<f64>| -> f64 {
        w.iter().map(|p| v.dot(p)).fold(f64::NEG_INFINITY, f64::max)
    };
    for _ in 0..steps {
        let mut improved = false;

        // Snap toward equal-dot-product points of nearby piece bundles.
        for slack in [1e-7, 1e-5, 1e-3, 1e-1] {
            let cutoff = fv - slack * (1.0 + fv.abs());
            let active: Vec<&DVector<f64>> =
                w.iter().filter(|p| v.dot(p) >= cutoff).collect();
            if active.is_empty() || active.len() > dim + 1 {
                continue;
            }
            if let Some((p, _)) = affine_min_norm(&active) {
                let n = p.norm();
                if n > 1e-12 {
                    for cand in [&p / n, -(&p / n)] {
                        let fc = eval(&cand);
                        if fc < fv - 1e-15 {
                            v = cand;
                            fv = fc;
                            improved = true;
                        }
                    }
                }
            }
        }

        // Steepest-descent step on the sphere.
        let cutoff = fv - 1e-6 * (1.0 + fv.abs());
        let active: Vec<usize> = (0..w.len()).filter(|&j| v.dot(&w[j]) >= cutoff).collect();
        let tangents: Vec<DVector<f64>> = active
            .iter()
            .map(|&j| &w[j] - &v * v.dot(&w[j]))
            .collect();
        let descent = if tangents.len() == 1 || tangents.len() > 12 {
            // With one active piece (or too many for exhaustive direction
            // finding) use the gradient of the worst piece.
            let worst = active
                .iter()
                .enumerate()
                .max_by(|(_, &a), (_, &b)| v.dot(&w[a]).partial_cmp(&v.dot(&w[b])).unwrap())
                .map(|(slot, _)| slot)
                .unwrap_or(0);
            -tangents[worst].clone()
        } else {
            // Steepest descent for a max of linear pieces: the negated
            // minimum-norm element of the convex hull of the active
            // gradients (by subset enumeration, Caratheodory-capped).
            let refs: Vec<&DVector<f64>> = tangents.iter().collect();
            let mut best: Option<(f64, DVector<f64>)> = None;
            let cap = refs.len().min(dim + 1);
            let mut stack: Vec<usize> = Vec::new();
            enumerate_subsets(refs.len(), cap, &mut stack, &mut |sel: &[usize]| {
                let chosen: Vec<&DVector<f64>> = sel.iter().map(|&i| refs[i]).collect();
                if let Some((p, alpha)) = affine_min_norm(&chosen) {
                    if alpha.iter().all(|&a| a >= -1e-10) {
                        let n = p.norm_squared();
                        if best.as_ref().map(|(b, _)| n < *b).unwrap_or(true) {
                            best = Some((n, p));
                        }
                    }
                }
            });
            match best {
                Some((_, p)) => -p,
                None => -tangents[0].clone(),
            }
        };
        let dn = descent.norm();
        if dn > 1e-13 {
            let dir = descent / dn;
            let mut best_step: Option<(f64, DVector<f64>)> = None;
            let mut eta = 2.0f64;
            for _ in 0..48 {
                let cand = &v + &dir * eta;
                let n = cand.norm();
                if n > 1e-12 {
                    let cand = cand / n;
                    let fc = eval(&cand);
                    if best_step.as_ref().map(|(b, _)| fc < *b).unwrap_or(true) {
                        best_step = Some((fc, cand));
                    }
                }
                eta *= 0.5;
            }
            if let Some((fc, cand)) = best_step {
                if fc < fv - 1e-15 {
                    v = cand;
                    fv = fc;
                    improved = true;
                }
            }
        }

        if !improved {
            break;
        }
    }
    (v, fv)
}

fn enumerate_subsets(
    n: usize,
    max_size: usize,
    stack: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    fn recur(
        n: usize,
        max_size: usize,
        start: usize,
        stack: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if !stack.is_empty() {
            visit(stack);
        }
        if stack.len() == max_size {
            return;
        }
        for i in start..n {
            stack.push(i);
            recur(n, max_size, i + 1, stack, visit);
            stack.pop();
        }
    }
    recur(n, max_size, 0, stack, visit);
}

/// Upper bound on the cosine measure of D relative to L by direct
/// evaluation at sampled unit vectors of L. The evaluated set always
/// includes the signed basis vectors of L; `refine_steps` > 0 additionally
/// polishes the best vector by steepest descent on the sphere.
pub fn sampled_cosine_measure(
    d: &DirectionSet,
    l: &Subspace,
    count: usize,
    seed: u64,
    refine_steps: usize,
) -> SampledMeasure {
    let k = l.dim();
    let d_hat = d.normalized();
    // Reduced coordinates of all normalized directions, zeros included.
    let w: Vec<DVector<f64>> = d_hat.iter().map(|c| l.coords(c)).collect();
    let eval = |v: &DVector<f64>| -> f64 {
        w.iter().map(|p| v.dot(p)).fold(f64::NEG_INFINITY, f64::max)
    };

    let mut best_v = DVector::zeros(k);
    let mut best_f = f64::INFINITY;
    for j in 0..k {
        for sign in [1.0, -1.0] {
            let mut e = DVector::zeros(k);
            e[j] = sign;
            let f = eval(&e);
            if f < best_f {
                best_f = f;
                best_v = e;
            }
        }
    }
    let sample = SphereSample::generate(k, count, seed);
    for v in &sample.points {
        let f = eval(v);
        if f < best_f {
            best_f = f;
            best_v = v.clone();
        }
    }
    if refine_steps > 0 {
        let (v, f) = refine_on_sphere(&w, best_v, best_f, refine_steps);
        best_v = v;
        best_f = f;
    }
    SampledMeasure {
        value: best_f,
        argmin: l.embed(&best_v),
        samples: count,
    }
}

#[derive(Debug, Clone)]
pub struct KktMinNorm {
    pub point: DVector<f64>,
    /// Hull coefficients over the input points: nonnegative, summing to one.
    pub coefficients: Vec<f64>,
    pub norm: f64,
}

/// Exhaustive minimum-norm point of conv(points): enumerates affinely
/// independent subsets up to size dim+1, solves the equality-constrained
/// least-norm combination on each, keeps nonnegative solutions, and
/// verifies the optimality conditions of the winner.
pub fn kkt_min_norm_oracle(points: &[DVector<f64>]) -> Result<KktMinNorm> {
    let q = points.len();
    if q == 0 {
        return Err(Error::EmptySet);
    }
    if q > KKT_POINT_CAP {
        return Err(Error::TooManyPoints {
            count: q,
            cap: KKT_POINT_CAP,
        });
    }
    let dim = points[0].len();
    let scale = points.iter().map(|p| p.norm_squared()).fold(1.0, f64::max);

    let mut best_valid: Option<(f64, DVector<f64>, Vec<f64>)> = None;
    let mut best_any: Option<(f64, DVector<f64>, Vec<f64>)> = None;
    let mut stack = Vec::new();
    enumerate_subsets(q, (dim + 1).min(q), &mut stack, &mut |sel: &[usize]| {
        let chosen: Vec<&DVector<f64>> = sel.iter().map(|&i| &points[i]).collect();
        if let Some((p, alpha)) = affine_min_norm(&chosen) {
            if alpha.iter().all(|&a| a >= -1e-10) {
                let mut coeffs = vec![0.0; q];
                for (&i, &a) in sel.iter().zip(alpha.iter()) {
                    coeffs[i] = a.max(0.0);
                }
                let n = p.norm();
                let min_dot = points
                    .iter()
                    .map(|x| p.dot(x))
                    .fold(f64::INFINITY, f64::min);
                let kkt_ok = min_dot >= p.norm_squared() - 1e-9 * scale;
                if kkt_ok && best_valid.as_ref().map(|(b, _, _)| n < *b).unwrap_or(true) {
                    best_valid = Some((n, p.clone(), coeffs.clone()));
                }
                if best_any.as_ref().map(|(b, _, _)| n < *b).unwrap_or(true) {
                    best_any = Some((n, p, coeffs));
                }
            }
        }
    });
    let (norm, point, coefficients) = best_valid
        .or(best_any)
        .expect("size-1 subsets always produce a candidate");
    Ok(KktMinNorm {
        point,
        coefficients,
        norm,
    })
}

/// All nonempty subsets V of D with pspan(V) = span(V), as index lists in
/// increasing bitmask order.
pub fn exhaustive_pspan_subset_check(
    d: &DirectionSet,
    tol: &Tolerances,
) -> Result<Vec<Vec<usize>>> {
    let q = d.len();
    if q > SUBSET_CAP {
        return Err(Error::TooManyPoints {
            count: q,
            cap: SUBSET_CAP,
        });
    }
    let mut out = Vec::new();
    for mask in 1u32..(1u32 << q) {
        let indices: Vec<usize> = (0..q).filter(|&i| mask & (1 << i) != 0).collect();
        let sub = d.subset(&indices);
        if is_positive_spanning(&sub, tol).is_positive_spanning {
            out.push(indices);
        }
    }
    Ok(out)
}
