//! Machine-readable report documents. Numbers are serialized as shortest
//! round-trip decimals, so parsing a report reproduces every value bit for
//! bit, and identical inputs yield byte-identical reports (timing is
//! included only on request).

use nalgebra::DVector;
use serde::Serialize;

use pspankit::{
    CosineCase, CosineReport, CosineWitness, EnumerationBudget, SpanningCertificate, Tolerances,
};

pub fn vec_of(v: &DVector<f64>) -> Vec<f64> {
    // Canonicalize negative zero so sign noise from projections does not
    // leak into reports.
    v.iter().map(|&x| if x == 0.0 { 0.0 } else { x }).collect()
}

#[derive(Serialize)]
pub struct InputEcho {
    pub n: usize,
    pub q: usize,
    pub vectors: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize)]
pub struct SettingsEcho {
    pub rank_tol: Option<f64>,
    pub zero_tol: f64,
    pub active_tol: f64,
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_bases: u64,
}

impl SettingsEcho {
    pub fn new(tol: &Tolerances, budget: &EnumerationBudget) -> Self {
        SettingsEcho {
            rank_tol: tol.rank_tol,
            zero_tol: tol.zero_tol,
            active_tol: tol.active_tol,
            feas_tol: tol.feas_tol,
            gap_tol: tol.gap_tol,
            max_bases: budget.max_bases,
        }
    }
}

#[derive(Serialize)]
pub struct Report<R: Serialize> {
    pub command: String,
    pub input: InputEcho,
    pub settings: SettingsEcho,
    pub result: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingEcho>,
}

#[derive(Serialize)]
pub struct TimingEcho {
    pub seconds: f64,
}

#[derive(Serialize)]
pub struct OracleEcho {
    pub samples: usize,
    pub seed: u64,
    pub refine_steps: usize,
    pub sampled_value: f64,
    pub argmin: Vec<f64>,
    /// sampled_value - solver value; nonnegative up to solver tolerance
    /// because sampling a minimum overestimates it.
    pub gap: f64,
}

#[derive(Serialize)]
pub struct SpanningEcho {
    pub is_positive_spanning: bool,
    pub span_dim: usize,
    pub residual: f64,
    pub gamma: Option<Vec<f64>>,
}

impl SpanningEcho {
    pub fn new(cert: &SpanningCertificate) -> Self {
        SpanningEcho {
            is_positive_spanning: cert.is_positive_spanning,
            span_dim: cert.span_dim,
            residual: cert.residual,
            gamma: cert.gamma.clone(),
        }
    }
}

#[derive(Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WitnessEcho {
    PositiveBasis { indices: Vec<usize>, gamma: f64 },
    HullPoint { coefficients: Vec<f64>, norm: f64 },
    ZeroDirection { direction: Vec<f64> },
}

pub fn case_name(case: CosineCase) -> &'static str {
    match case {
        CosineCase::Positive => "POSITIVE",
        CosineCase::Zero => "ZERO",
        CosineCase::Negative => "NEGATIVE",
    }
}

#[derive(Serialize)]
pub struct CosineEcho {
    pub reference: String,
    pub value: f64,
    pub case: &'static str,
    pub span_dim: usize,
    pub reference_dim: usize,
    pub cosine_vectors: Vec<Vec<f64>>,
    pub active_sets: Vec<Vec<usize>>,
    pub vectors_truncated: bool,
    pub witness: WitnessEcho,
    pub may_be_non_isolated: bool,
    pub diagnostics: Vec<String>,
}

/// Default cap on reported cosine vectors; lifted by --all-vectors.
pub const VECTOR_CAP: usize = 16;

impl CosineEcho {
    pub fn new(reference: &str, report: &CosineReport, all_vectors: bool) -> Self {
        let cap = if all_vectors {
            usize::MAX
        } else {
            VECTOR_CAP
        };
        let shown = report.cosine_vectors.len().min(cap);
        CosineEcho {
            reference: reference.to_string(),
            value: report.value,
            case: case_name(report.case),
            span_dim: report.span_dim,
            reference_dim: report.reference_dim,
            cosine_vectors: report.cosine_vectors[..shown].iter().map(vec_of).collect(),
            active_sets: report.active_sets[..shown].to_vec(),
            vectors_truncated: shown < report.cosine_vectors.len(),
            witness: match &report.witness {
                CosineWitness::PositiveBasis { indices, gamma } => WitnessEcho::PositiveBasis {
                    indices: indices.clone(),
                    gamma: *gamma,
                },
                CosineWitness::HullPoint { coefficients, norm } => WitnessEcho::HullPoint {
                    coefficients: coefficients.clone(),
                    norm: *norm,
                },
                CosineWitness::ZeroDirection { direction } => WitnessEcho::ZeroDirection {
                    direction: vec_of(direction),
                },
            },
            may_be_non_isolated: report.may_be_non_isolated,
            diagnostics: report.diagnostics.clone(),
        }
    }
}

#[derive(Serialize)]
pub struct ExtendResult {
    pub mode: &'static str,
    pub appended: Vec<Vec<f64>>,
    pub extended_vectors: Vec<Vec<f64>>,
    pub certificate: SpanningEcho,
}

#[derive(Serialize)]
pub struct AdviceEcho {
    pub extension: Vec<f64>,
    pub extended_cm: f64,
    pub extended_spanning: bool,
    pub mirrored_cm: f64,
    pub mirrored_spanning: bool,
}

#[derive(Serialize)]
pub struct BoundResult {
    pub order: u8,
    pub cm_value: f64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lip_grad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lip_hess: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<f64>>,
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub advice: Option<AdviceEcho>,
}

#[derive(Serialize)]
pub struct SelfChecks {
    pub active_sets_span: bool,
    pub sign_agreement: bool,
}

#[derive(Serialize)]
pub struct AnalyzeResult {
    pub span_dim: usize,
    pub radius: f64,
    pub spanning: SpanningEcho,
    pub positively_independent: bool,
    pub redundant_indices: Vec<usize>,
    pub cosine: CosineEcho,
    /// Indices of a certified positive-spanning subset, present when the
    /// cosine measure vanishes.
    pub spanning_subset: Option<Vec<usize>>,
    pub self_checks: SelfChecks,
}

#[derive(Serialize)]
pub struct KktEcho {
    pub norm: f64,
    pub point: Vec<f64>,
    pub coefficients: Vec<f64>,
}

#[derive(Serialize)]
pub struct OracleResult {
    pub reference: String,
    pub samples: usize,
    pub seed: u64,
    pub refine_steps: usize,
    pub sampled_value: f64,
    pub argmin: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kkt_min_norm: Option<KktEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spanning_subsets: Option<Vec<Vec<usize>>>,
}

pub fn print_report<R: Serialize>(report: &Report<R>) {
    println!(
        "{}",
        serde_json::to_string_pretty(report).expect("report serialization cannot fail")
    );
}
