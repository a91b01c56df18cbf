//! Command-line frontend: ingest direction sets and subspaces from files,
//! run the analyses, and emit machine-readable JSON reports.
//!
//! Exit codes: 0 ok/true, 10 not positive spanning, 11 enumeration budget
//! exceeded, 12 bound unavailable (cosine measure <= 0), 13 symmetry
//! hypothesis violated, 2 input error.

mod input;
mod report;

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;

use pspankit::{
    compute_cosine_measure_relative, compute_cosine_measure_span,
    exhaustive_pspan_subset_check, extend_to_positive_spanning, failed_poll_advice,
    find_positive_spanning_subset, first_order_bound, is_positive_spanning,
    is_positively_independent, kkt_min_norm_oracle, radius, sampled_cosine_measure,
    second_order_bound, span_dimension, symmetry_factors, BoundInputs, CosineCase,
    DirectionSet, EnumerationBudget, ExtensionMode, Subspace, Tolerances,
};

use input::{
    build_direction_set, build_subspace, detect_format, parse_input, parse_subspace_file,
    read_source, resolve_settings, CliError, Format, SettingsArgs,
};
use report::{
    print_report, vec_of, AdviceEcho, AnalyzeResult, BoundResult, CosineEcho,
    ExtendResult, InputEcho, KktEcho, OracleEcho, OracleResult, Report, SelfChecks, SettingsEcho,
    SpanningEcho, TimingEcho,
};

const EXIT_OK: i32 = 0;
const EXIT_NOT_SPANNING: i32 = 10;
const EXIT_BOUND_UNAVAILABLE: i32 = 12;
const EXIT_ASYMMETRIC: i32 = 13;

#[derive(Parser)]
#[command(
    name = "pspankit",
    version,
    about = "Positive-spanning certificates, cosine measures, and direct-search gradient bounds for finite direction sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Input file: structured .json or plain .csv (one vector per row);
    /// '-' reads stdin.
    input: String,
    /// Input format override; otherwise detected from the extension.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    settings: SettingsArgs,
    /// Include wall-clock timing in the report. Off by default so that
    /// identical inputs produce byte-identical reports.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
#[group(id = "reference", required = true, multiple = false)]
struct ReferenceArgs {
    /// Reference subspace: span of the input set.
    #[arg(long)]
    span: bool,
    /// Reference subspace: the whole ambient space.
    #[arg(long)]
    full_space: bool,
    /// Reference subspace: the rows of this file (orthonormalized on
    /// load); pass an empty value to use the subspace embedded in the
    /// input document.
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    subspace: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify whether the set positively spans its own span.
    Pspan {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute the cosine measure and cosine vectors.
    Cosine {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        reference: ReferenceArgs,
        /// Cross-check against the sampling oracle with this many samples.
        #[arg(long, value_name = "N")]
        oracle: Option<usize>,
        /// Seed for the sampling oracle.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report every cosine vector representative (default caps at 16).
        #[arg(long)]
        all_vectors: bool,
    },
    /// Extend the set to a positive spanning set of its span.
    Extend {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = Mode::Single)]
        mode: Mode,
    },
    /// Evaluate the direct-search gradient error bound after a failed poll.
    Bound {
        #[command(flatten)]
        common: CommonArgs,
        /// Bound order: 1 needs --lip-grad, 2 needs --lip-hess and a
        /// symmetric set.
        #[arg(long, default_value_t = 1)]
        order: u8,
        /// Lipschitz constant of the gradient.
        #[arg(long)]
        lip_grad: Option<f64>,
        /// Lipschitz constant of the Hessian.
        #[arg(long)]
        lip_hess: Option<f64>,
        /// Poll radius; defaults to the radius of the set.
        #[arg(long)]
        delta: Option<f64>,
    },
    /// One-shot structural report: dimensions, certificates, cosine
    /// measure, zero-case subset extraction, self-checks.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// Report every cosine vector representative.
        #[arg(long)]
        all_vectors: bool,
    },
    /// Run the brute-force verification oracles directly.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Reference subspace flags; defaults to --span.
        #[command(flatten)]
        reference: OracleReferenceArgs,
        /// Number of sphere samples.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Local refinement steps from the best sample.
        #[arg(long, default_value_t = 0)]
        refine: usize,
        /// Also run the exhaustive minimum-norm oracle (at most 20 vectors).
        #[arg(long)]
        kkt: bool,
        /// Also enumerate all positively spanning subsets (at most 12
        /// vectors).
        #[arg(long)]
        subsets: bool,
    },
}

#[derive(Args)]
#[group(id = "oracle_reference", required = false, multiple = false)]
struct OracleReferenceArgs {
    #[arg(long)]
    span: bool,
    #[arg(long)]
    full_space: bool,
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    subspace: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Single,
    Mirror,
}

struct Loaded {
    set: DirectionSet,
    echo: InputEcho,
    doc_subspace: Option<Vec<Vec<f64>>>,
    tol: Tolerances,
    budget: EnumerationBudget,
}

fn load(common: &CommonArgs) -> Result<Loaded, CliError> {
    let text = read_source(&common.input)?;
    let format = detect_format(&common.input, common.format);
    let doc = parse_input(&common.input, &text, format)?;
    let (tol, budget) = resolve_settings(&doc.tolerances, &doc.budget, &common.settings)?;
    let set = build_direction_set(&doc.vectors, &tol)?;
    let echo = InputEcho {
        n: set.dim(),
        q: set.len(),
        vectors: doc.vectors.clone(),
        subspace: doc.subspace_rows.clone(),
    };
    Ok(Loaded {
        set,
        echo,
        doc_subspace: doc.subspace_rows,
        tol,
        budget,
    })
}

enum Reference {
    Span,
    FullSpace,
    Subspace(Subspace),
}

impl Reference {
    fn name(&self) -> &'static str {
        match self {
            Reference::Span => "span",
            Reference::FullSpace => "full_space",
            Reference::Subspace(_) => "subspace",
        }
    }
}

fn resolve_reference(
    span: bool,
    full_space: bool,
    subspace: &Option<String>,
    format: Option<Format>,
    loaded: &Loaded,
) -> Result<Reference, CliError> {
    if span {
        return Ok(Reference::Span);
    }
    if full_space {
        return Ok(Reference::FullSpace);
    }
    match subspace {
        Some(path) if !path.is_empty() => {
            let rows = parse_subspace_file(path, format)?;
            Ok(Reference::Subspace(build_subspace(&rows, &loaded.tol)?))
        }
        Some(_) => match &loaded.doc_subspace {
            Some(rows) => Ok(Reference::Subspace(build_subspace(rows, &loaded.tol)?)),
            None => Err(CliError::Input(
                "--subspace given without a file, but the input document has no subspace".into(),
            )),
        },
        None => Ok(Reference::Span),
    }
}

fn timing(started: Instant, enabled: bool) -> Option<TimingEcho> {
    enabled.then(|| TimingEcho {
        seconds: started.elapsed().as_secs_f64(),
    })
}

fn cmd_pspan(common: CommonArgs) -> Result<i32, CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let cert = is_positive_spanning(&loaded.set, &loaded.tol);
    let code = if cert.is_positive_spanning {
        EXIT_OK
    } else {
        EXIT_NOT_SPANNING
    };
    print_report(&Report {
        command: "pspan".into(),
        input: loaded.echo,
        settings: SettingsEcho::new(&loaded.tol, &loaded.budget),
        result: SpanningEcho::new(&cert),
        oracle: None,
        timing: timing(started, common.timing),
    });
    Ok(code)
}

fn compute_with_reference(
    loaded: &Loaded,
    reference: &Reference,
) -> Result<pspankit::CosineReport, CliError> {
    let rep = match reference {
        Reference::Span => {
            compute_cosine_measure_span(&loaded.set, &loaded.tol, &loaded.budget)?
        }
        Reference::FullSpace => compute_cosine_measure_relative(
            &loaded.set,
            &Subspace::full_space(loaded.set.dim()),
            &loaded.tol,
            &loaded.budget,
        )?,
        Reference::Subspace(l) => {
            compute_cosine_measure_relative(&loaded.set, l, &loaded.tol, &loaded.budget)?
        }
    };
    Ok(rep)
}

fn reference_subspace(loaded: &Loaded, reference: &Reference) -> Result<Subspace, CliError> {
    Ok(match reference {
        Reference::Span => {
            let basis = pspankit::linalg::orthonormal_span_basis(
                &loaded.set.normalized(),
                &loaded.tol,
            );
            Subspace::from_orthonormal(basis).map_err(CliError::Core)?
        }
        Reference::FullSpace => Subspace::full_space(loaded.set.dim()),
        Reference::Subspace(l) => l.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_cosine(
    common: CommonArgs,
    reference: ReferenceArgs,
    oracle_samples: Option<usize>,
    seed: u64,
    all_vectors: bool,
) -> Result<i32, CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let reference = resolve_reference(
        reference.span,
        reference.full_space,
        &reference.subspace,
        common.format,
        &loaded,
    )?;
    let rep = compute_with_reference(&loaded, &reference)?;
    let oracle = match oracle_samples {
        Some(samples) => {
            let l = reference_subspace(&loaded, &reference)?;
            let refine_steps = 64;
            let sampled = sampled_cosine_measure(&loaded.set, &l, samples, seed, refine_steps);
            Some(OracleEcho {
                samples,
                seed,
                refine_steps,
                sampled_value: sampled.value,
                argmin: vec_of(&sampled.argmin),
                gap: sampled.value - rep.value,
            })
        }
        None => None,
    };
    print_report(&Report {
        command: "cosine".into(),
        input: loaded.echo,
        settings: SettingsEcho::new(&loaded.tol, &loaded.budget),
        result: CosineEcho::new(reference.name(), &rep, all_vectors),
        oracle,
        timing: timing(started, common.timing),
    });
    Ok(EXIT_OK)
}

fn cmd_extend(common: CommonArgs, mode: Mode) -> Result<i32, CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let ext_mode = match mode {
        Mode::Single => ExtensionMode::SingleVector,
        Mode::Mirror => ExtensionMode::MirrorBasis,
    };
    let extended = extend_to_positive_spanning(&loaded.set, ext_mode, &loaded.tol);
    let cert = is_positive_spanning(&extended, &loaded.tol);
    let appended: Vec<Vec<f64>> = (loaded.set.len()..extended.len())
        .map(|i| vec_of(extended.column(i)))
        .collect();
    print_report(&Report {
        command: "extend".into(),
        input: loaded.echo,
        settings: SettingsEcho::new(&loaded.tol, &loaded.budget),
        result: ExtendResult {
            mode: match mode {
                Mode::Single => "single",
                Mode::Mirror => "mirror",
            },
            appended,
            extended_vectors: extended.iter().map(vec_of).collect(),
            certificate: SpanningEcho::new(&cert),
        },
        oracle: None,
        timing: timing(started, common.timing),
    });
    Ok(EXIT_OK)
}

fn cmd_bound(
    common: CommonArgs,
    order: u8,
    lip_grad: Option<f64>,
    lip_hess: Option<f64>,
    delta: Option<f64>,
) -> Result<i32, CliError> {
    let started = Instant::now();
    if !(order == 1 || order == 2) {
        return Err(CliError::Input("--order must be 1 or 2".into()));
    }
    let loaded = load(&common)?;
    let delta = delta.unwrap_or_else(|| radius(&loaded.set));
    if !(delta.is_finite() && delta > 0.0) {
        return Err(CliError::Input("--delta must be strictly positive".into()));
    }
    let rep = compute_cosine_measure_span(&loaded.set, &loaded.tol, &loaded.budget)?;

    if rep.value <= 0.0 {
        // No bound is available; report the certified extension advice.
        let advice = failed_poll_advice(&loaded.set, &loaded.tol, &loaded.budget)?;
        print_report(&Report {
            command: "bound".into(),
            input: loaded.echo,
            settings: SettingsEcho::new(&loaded.tol, &loaded.budget),
            result: BoundResult {
                order,
                cm_value: rep.value,
                delta,
                lip_grad,
                lip_hess,
                alpha_max: None,
                alphas: None,
                bound: None,
                advice: Some(AdviceEcho {
                    extension: vec_of(&advice.extension),
                    extended_cm: advice.extended_cm,
                    extended_spanning: advice.extended_spanning,
                    mirrored_cm: advice.mirrored_cm,
                    mirrored_spanning: advice.mirrored_spanning,
                }),
            },
            oracle: None,
            timing: timing(started, common.timing),
        });
        return Ok(EXIT_BOUND_UNAVAILABLE);
    }

    let mut inputs = BoundInputs {
        cm_value: rep.value,
        delta,
        lip_grad,
        lip_hess,
        alpha_max: None,
    };
    let (bound, alphas) = if order == 1 {
        if lip_grad.is_none() {
            return Err(CliError::Input("--order 1 requires --lip-grad".into()));
        }
        (first_order_bound(&inputs)?, None)
    } else {
        if lip_hess.is_none() {
            return Err(CliError::Input("--order 2 requires --lip-hess".into()));
        }
        let alphas = match symmetry_factors(&loaded.set, &loaded.tol) {
            Ok(a) => a,
            Err(e @ pspankit::Error::AsymmetricSet { .. }) => {
                eprintln!("error: {e}");
                return Ok(EXIT_ASYMMETRIC);
            }
            Err(e) => return Err(CliError::Core(e)),
        };
        inputs.alpha_max = alphas.iter().cloned().fold(None, |acc: Option<f64>, a| {
            Some(acc.map_or(a, |m| m.max(a)))
        });
        (second_order_bound(&inputs, &alphas)?, Some(alphas))
    };
    print_report(&Report {
        command: "bound".into(),
        input: loaded.echo,
        settings: SettingsEcho::new(&loaded.tol, &loaded.budget),
        result: BoundResult {
            order,
            cm_value: rep.value,
            delta,
            lip_grad,
            lip_hess,
            alpha_max: inputs.alpha_max,
            alphas,
            bound: Some(bound),
            advice: None,
        },
        oracle: None,
        timing: timing(started, common.timing),
    });
    Ok(EXIT_OK)
}

fn cmd_analyze(common: CommonArgs, all_vectors: bool) -> Result<i32, CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let cert = is_positive_spanning(&loaded.set, &loaded.tol);
    let (independent, redundant) = is_positively_independent(&loaded.set, &loaded.tol);
    let rep = compute_cosine_measure_span(&loaded.set, &loaded.tol, &loaded.budget)?;
    let spanning_subset = if rep.case == CosineCase::Zero {
        find_positive_spanning_subset(&loaded.set, &loaded.tol, &loaded.budget)?
    } else if cert.is_positive_spanning {
        Some((0..loaded.set.len()).collect())
    } else {
        None
    };
    let active_sets_span = rep.case != CosineCase::Positive
        || rep.active_sets.iter().all(|active| {
            !active.is_empty()
                && span_dimension(&loaded.set.subset(active), &loaded.tol) == rep.span_dim
        });
    let sign_agreement = cert.is_positive_spanning == (rep.value > loaded.tol.active_tol);
    print_report(&Report {
        command: "analyze".into(),
        input: loaded.echo,
        settings: SettingsEcho::new(&loaded.tol, &loaded.budget),
        result: AnalyzeResult {
            span_dim: rep.span_dim,
            radius: radius(&loaded.set),
            spanning: SpanningEcho::new(&cert),
            positively_independent: independent,
            redundant_indices: redundant,
            cosine: CosineEcho::new("span", &rep, all_vectors),
            spanning_subset,
            self_checks: SelfChecks {
                active_sets_span,
                sign_agreement,
            },
        },
        oracle: None,
        timing: timing(started, common.timing),
    });
    Ok(EXIT_OK)
}

fn cmd_oracle(
    common: CommonArgs,
    reference: OracleReferenceArgs,
    samples: usize,
    seed: u64,
    refine: usize,
    kkt: bool,
    subsets: bool,
) -> Result<i32, CliError> {
    let started = Instant::now();
    let loaded = load(&common)?;
    let reference = resolve_reference(
        reference.span,
        reference.full_space,
        &reference.subspace,
        common.format,
        &loaded,
    )?;
    if samples == 0 {
        return Err(CliError::Input("--samples must be positive".into()));
    }
    let l = reference_subspace(&loaded, &reference)?;
    let sampled = sampled_cosine_measure(&loaded.set, &l, samples, seed, refine);

    let kkt_min_norm = if kkt {
        // Distance from the origin to the hull of the normalized projected
        // directions: the negative-branch quantity.
        let d_hat = loaded.set.normalized();
        let points: Vec<DVector<f64>> = d_hat.iter().map(|c| l.coords(c)).collect();
        let sol = kkt_min_norm_oracle(&points).map_err(|e| match e {
            pspankit::Error::TooManyPoints { count, cap } => CliError::Input(format!(
                "--kkt supports at most {cap} vectors, input has {count}"
            )),
            other => CliError::Core(other),
        })?;
        Some(KktEcho {
            norm: sol.norm,
            point: vec_of(&sol.point),
            coefficients: sol.coefficients,
        })
    } else {
        None
    };

    let spanning_subsets = if subsets {
        let list = exhaustive_pspan_subset_check(&loaded.set, &loaded.tol).map_err(|e| match e {
            pspankit::Error::TooManyPoints { count, cap } => CliError::Input(format!(
                "--subsets supports at most {cap} vectors, input has {count}"
            )),
            other => CliError::Core(other),
        })?;
        Some(list)
    } else {
        None
    };

    print_report(&Report {
        command: "oracle".into(),
        input: loaded.echo,
        settings: SettingsEcho::new(&loaded.tol, &loaded.budget),
        result: OracleResult {
            reference: reference.name().to_string(),
            samples,
            seed,
            refine_steps: refine,
            sampled_value: sampled.value,
            argmin: vec_of(&sampled.argmin),
            kkt_min_norm,
            spanning_subsets,
        },
        oracle: None,
        timing: timing(started, common.timing),
    });
    Ok(EXIT_OK)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Pspan { common } => cmd_pspan(common),
        Command::Cosine {
            common,
            reference,
            oracle,
            seed,
            all_vectors,
        } => cmd_cosine(common, reference, oracle, seed, all_vectors),
        Command::Extend { common, mode } => cmd_extend(common, mode),
        Command::Bound {
            common,
            order,
            lip_grad,
            lip_hess,
            delta,
        } => cmd_bound(common, order, lip_grad, lip_hess, delta),
        Command::Analyze {
            common,
            all_vectors,
        } => cmd_analyze(common, all_vectors),
        Command::Oracle {
            common,
            reference,
            samples,
            seed,
            refine,
            kkt,
            subsets,
        } => cmd_oracle(common, reference, samples, seed, refine, kkt, subsets),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
