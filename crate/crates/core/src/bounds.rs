//! Gradient error bounds for directional direct search after a failed poll,
//! and the extension advice for sets that do not positively span.
//!
//! When every poll step fails (f(x0) <= f(x0 + d) for all d in D) and D
//! positively spans its span, the projected gradient obeys
//!
//! ```text
//!   ||P_D grad f(x0)||  <=  (1/2) L_grad   cm^-1 radius      (first order)
//!   ||P_D grad f(x0)||  <=  (1/3) a_max L_hess cm^-1 radius^2 (second order)
//! ```
//!
//! where cm is the cosine measure relative to span(D) and the second-order
//! form additionally requires every direction to have an antipodal partner
//! -a_d * d in D, with a_max the largest such factor. The module evaluates
//! the bounds and verifies the hypotheses; Lipschitz constants are supplied
//! by the caller.

use nalgebra::DVector;

use crate::cosine::compute_cosine_measure_span;
use crate::spanning::{extend_to_positive_spanning, is_positive_spanning, radius, ExtensionMode};
use crate::types::{DirectionSet, EnumerationBudget, Error, Result, Tolerances};

/// Direction cosine threshold for recognizing an antipodal partner.
const ANTIPODE_COS_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct BoundInputs {
    /// Cosine measure relative to span(D); must be positive.
    pub cm_value: f64,
    /// Radius of the poll set.
    pub delta: f64,
    pub lip_grad: Option<f64>,
    pub lip_hess: Option<f64>,
    pub alpha_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub first_order: Option<f64>,
    pub second_order: Option<f64>,
    pub inputs: BoundInputs,
}

fn require_positive_cm(cm: f64) -> Result<()> {
    if cm > 0.0 {
        Ok(())
    } else {
        Err(Error::NonpositiveCosineMeasure { value: cm })
    }
}

/// (1/2) * lip_grad * delta / cm.
pub fn first_order_bound(inputs: &BoundInputs) -> Result<f64> {
    require_positive_cm(inputs.cm_value)?;
    let l = inputs.lip_grad.ok_or(Error::MissingConstant { name: "lip_grad" })?;
    Ok(0.5 * l * inputs.delta / inputs.cm_value)
}

/// The antipodal factor of every direction: alpha_i is the smallest ratio
/// ||d_j|| / ||d_i|| over partners d_j opposite to d_i. Errors with the
/// first unmatched index when the set is not symmetric.
pub fn symmetry_factors(d: &DirectionSet, _tol: &Tolerances) -> Result<Vec<f64>> {
    let q = d.len();
    let mut alphas = Vec::with_capacity(q);
    for i in 0..q {
        let di = d.column(i);
        let ni = di.norm();
        let mut alpha: Option<f64> = None;
        for j in 0..q {
            if i == j {
                continue;
            }
            let dj = d.column(j);
            let nj = dj.norm();
            let cos = di.dot(dj) / (ni * nj);
            if cos <= -1.0 + ANTIPODE_COS_TOL {
                let ratio = nj / ni;
                alpha = Some(alpha.map_or(ratio, |a: f64| a.min(ratio)));
            }
        }
        match alpha {
            Some(a) => alphas.push(a),
            None => return Err(Error::AsymmetricSet { index: i }),
        }
    }
    Ok(alphas)
}

/// (1/3) * alpha_max * lip_hess * delta^2 / cm, with alpha_max taken from
/// the verified per-direction factors.
pub fn second_order_bound(inputs: &BoundInputs, alphas: &[f64]) -> Result<f64> {
    require_positive_cm(inputs.cm_value)?;
    let l = inputs.lip_hess.ok_or(Error::MissingConstant { name: "lip_hess" })?;
    let alpha_max = alphas.iter().cloned().fold(f64::NAN, f64::max);
    if !alpha_max.is_finite() || alpha_max <= 0.0 {
        return Err(Error::MissingConstant { name: "alpha_max" });
    }
    Ok(alpha_max * l * inputs.delta * inputs.delta / (3.0 * inputs.cm_value))
}

/// Evaluates whichever bounds the inputs support: the first-order bound
/// when `lip_grad` is present, the second-order bound when `lip_hess` and
/// the symmetry factors are. At least one must be computable.
pub fn evaluate_bounds(inputs: &BoundInputs, alphas: Option<&[f64]>) -> Result<BoundReport> {
    require_positive_cm(inputs.cm_value)?;
    let first_order = inputs
        .lip_grad
        .map(|_| first_order_bound(inputs))
        .transpose()?;
    let second_order = match (inputs.lip_hess, alphas) {
        (Some(_), Some(alphas)) => Some(second_order_bound(inputs, alphas)?),
        _ => None,
    };
    if first_order.is_none() && second_order.is_none() {
        return Err(Error::MissingConstant { name: "lip_grad" });
    }
    Ok(BoundReport {
        first_order,
        second_order,
        inputs: inputs.clone(),
    })
}

/// What to do after a failed poll on a set that does not positively span:
/// either descend along one of the certified extensions or accept the
/// corresponding gradient bound.
#[derive(Debug, Clone)]
pub struct FailedPollAdvice {
    /// Single extension direction, scaled to the radius of D.
    pub extension: DVector<f64>,
    /// Cosine measure (relative to span) of D with `extension` appended.
    pub extended_cm: f64,
    pub extended_spanning: bool,
    /// Cosine measure (relative to span) of D union -D.
    pub mirrored_cm: f64,
    pub mirrored_spanning: bool,
}

pub fn failed_poll_advice(
    d: &DirectionSet,
    tol: &Tolerances,
    budget: &EnumerationBudget,
) -> Result<FailedPollAdvice> {
    let delta = radius(d);
    // w = -radius * (sum of a span basis) / ||sum||; the basis sum cannot
    // vanish, and rescaling keeps the radius of the extended set unchanged.
    let extended = extend_to_positive_spanning(d, ExtensionMode::SingleVector, tol);
    let raw_w = extended.column(extended.len() - 1).clone();
    let w = &raw_w * (delta / raw_w.norm());
    let d_prime = d.with_appended(w.clone());
    let extended_report = compute_cosine_measure_span(&d_prime, tol, budget)?;
    let extended_spanning = is_positive_spanning(&d_prime, tol).is_positive_spanning;

    let mut mirrored = d.clone();
    for i in 0..d.len() {
        mirrored = mirrored.with_appended(-d.column(i));
    }
    let mirrored_report = compute_cosine_measure_span(&mirrored, tol, budget)?;
    let mirrored_spanning = is_positive_spanning(&mirrored, tol).is_positive_spanning;

    Ok(FailedPollAdvice {
        extension: w,
        extended_cm: extended_report.value,
        extended_spanning,
        mirrored_cm: mirrored_report.value,
        mirrored_spanning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::DEFAULT_ZERO_TOL;
    use approx::assert_relative_eq;

    fn set(rows: &[&[f64]]) -> DirectionSet {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        DirectionSet::from_rows(&rows, DEFAULT_ZERO_TOL).unwrap()
    }

    #[test]
    fn first_order_examples() {
        let inputs = BoundInputs {
            cm_value: std::f64::consts::FRAC_1_SQRT_2,
            delta: 0.1,
            lip_grad: Some(1.0),
            lip_hess: None,
            alpha_max: None,
        };
        assert_relative_eq!(
            first_order_bound(&inputs).unwrap(),
            0.05 * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        let inputs = BoundInputs {
            cm_value: 1.0,
            delta: 1.0,
            lip_grad: Some(2.0),
            lip_hess: None,
            alpha_max: None,
        };
        assert_relative_eq!(first_order_bound(&inputs).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn nonpositive_cm_is_rejected() {
        let inputs = BoundInputs {
            cm_value: 0.0,
            delta: 1.0,
            lip_grad: Some(1.0),
            lip_hess: None,
            alpha_max: None,
        };
        assert!(matches!(
            first_order_bound(&inputs),
            Err(Error::NonpositiveCosineMeasure { .. })
        ));
    }

    #[test]
    fn symmetry_factor_examples() {
        let tol = Tolerances::default();
        // Maximal coordinate basis: every factor is one.
        let d = set(&[
            &[1.0, 0.0],
            &[-1.0, 0.0],
            &[0.0, 1.0],
            &[0.0, -1.0],
        ]);
        let alphas = symmetry_factors(&d, &tol).unwrap();
        assert!(alphas.iter().all(|&a| (a - 1.0).abs() < 1e-12));

        let d = set(&[&[1.0, 0.0], &[-2.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        let alphas = symmetry_factors(&d, &tol).unwrap();
        assert_relative_eq!(alphas[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(alphas[1], 0.5, epsilon = 1e-12);
        let max = alphas.iter().cloned().fold(f64::MIN, f64::max);
        assert_relative_eq!(max, 2.0, epsilon = 1e-12);

        let d = set(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, -1.0]]);
        assert!(matches!(
            symmetry_factors(&d, &tol),
            Err(Error::AsymmetricSet { index: 0 })
        ));
    }

    #[test]
    fn second_order_uses_alpha_max() {
        let inputs = BoundInputs {
            cm_value: 0.5,
            delta: 2.0,
            lip_grad: None,
            lip_hess: Some(3.0),
            alpha_max: None,
        };
        let alphas = vec![1.0, 2.0, 1.0];
        // (1/3) * 2 * 3 * 4 / 0.5 = 16
        assert_relative_eq!(
            second_order_bound(&inputs, &alphas).unwrap(),
            16.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn evaluate_bounds_fills_available_orders() {
        let inputs = BoundInputs {
            cm_value: 0.5,
            delta: 1.0,
            lip_grad: Some(1.0),
            lip_hess: Some(3.0),
            alpha_max: None,
        };
        let report = evaluate_bounds(&inputs, Some(&[1.0, 1.0])).unwrap();
        assert_relative_eq!(report.first_order.unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(report.second_order.unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(report.inputs.cm_value, 0.5);

        let grad_only = BoundInputs {
            lip_hess: None,
            ..inputs.clone()
        };
        let report = evaluate_bounds(&grad_only, None).unwrap();
        assert!(report.second_order.is_none());

        let nothing = BoundInputs {
            lip_grad: None,
            lip_hess: None,
            ..inputs
        };
        assert!(matches!(
            evaluate_bounds(&nothing, None),
            Err(Error::MissingConstant { .. })
        ));
    }

    #[test]
    fn advice_extensions_are_certified() {
        let tol = Tolerances::default();
        let budget = EnumerationBudget::default();
        let d = set(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let advice = failed_poll_advice(&d, &tol, &budget).unwrap();
        // w = -radius * (e1 + e2)/sqrt(2)
        assert_relative_eq!(advice.extension.norm(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            advice.extension[0],
            -std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
        assert!(advice.extended_spanning);
        assert!(advice.mirrored_spanning);
        assert!(advice.extended_cm > 0.0);
        // D union -D here is the maximal coordinate cross in the plane.
        assert_relative_eq!(
            advice.mirrored_cm,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-10
        );

        let d2 = set(&[&[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let advice = failed_poll_advice(&d2, &tol, &budget).unwrap();
        assert!(advice.extended_spanning);
        assert!(advice.mirrored_spanning);
    }
}
