//! Certification of positive-spanning properties of finite direction sets
//! in R^n, and deterministic computation of the cosine measure relative to
//! a subspace.
//!
//! A finite set of nonzero directions D positively spans its span when
//! every vector of span(D) is a nonnegative combination of members of D —
//! the property that makes D a useful poll set in directional direct
//! search. The cosine measure
//!
//! ```text
//!   cm_L(D) = min over unit u in L  of  max_j  u . d_j / ||d_j||
//! ```
//!
//! quantifies how well D covers the subspace L: it is positive exactly when
//! the projections of D positively span L, zero when a proper subset does
//! the spanning, and negative when a half-space of L sees no direction at
//! all. This crate computes the measure exactly (basis enumeration on the
//! positive side, minimum-norm point on the other), certifies the spanning
//! property with explicit coefficient witnesses, evaluates the
//! direct-search gradient error bounds that consume these quantities, and
//! ships brute-force oracles so every solver answer can be cross-checked.
//!
//! Modules:
//!
//! * [`types`] — direction sets, subspaces, tolerances, budgets.
//! * [`linalg`] — ranks, span bases, projections, null spaces.
//! * [`nnls`] — nonnegative least squares (the feasibility engine).
//! * [`spanning`] — spanning certificates, membership, independence,
//!   extensions.
//! * [`minnorm`] — minimum-norm point in a convex hull.
//! * [`cosine`] — the cosine measure solvers and active sets.
//! * [`bounds`] — gradient error bounds and failed-poll advice.
//! * [`oracle`] — sampling and enumeration verifiers.

pub mod bounds;
pub mod cosine;
pub mod linalg;
pub mod minnorm;
pub mod nnls;
pub mod oracle;
pub mod spanning;
pub mod types;

pub use bounds::{
    evaluate_bounds, failed_poll_advice, first_order_bound, second_order_bound, symmetry_factors,
    BoundInputs, BoundReport, FailedPollAdvice,
};
pub use cosine::{
    active_set, compute_cosine_measure_relative, compute_cosine_measure_span,
    find_positive_spanning_subset, CosineCase, CosineReport, CosineWitness,
};
pub use linalg::{
    gram, orthonormal_null_space, project_onto_span, span_basis, span_dimension,
};
pub use oracle::{
    exhaustive_pspan_subset_check, kkt_min_norm_oracle, sampled_cosine_measure, KktMinNorm,
    SampledMeasure, SphereSample,
};
pub use spanning::{
    extend_to_positive_spanning, find_ascent_direction, is_positive_spanning,
    is_positively_independent, pspan_membership, radius, ExtensionMode, SpanningCertificate,
};
pub use types::{
    DirectionSet, EnumerationBudget, Error, Result, Subspace, Tolerances,
};
