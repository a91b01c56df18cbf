//! Input ingestion: structured JSON documents and plain CSV, tolerance
//! resolution across file, environment, and command-line layers.

use std::io::Read;

use serde::Deserialize;

use pspankit::{DirectionSet, EnumerationBudget, Error as CoreError, Subspace, Tolerances};

/// Environment variable prefix for tolerance and budget overrides.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input, bad flags, oversized oracle requests: exit 2.
    Input(String),
    /// An error surfaced by the solvers (budget, bound hypotheses, ...).
    Core(CoreError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Core(CoreError::BudgetExceeded { .. }) => 11,
            CliError::Core(CoreError::NonpositiveCosineMeasure { .. }) => 12,
            CliError::Core(CoreError::AsymmetricSet { .. }) => 13,
            CliError::Core(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub rank_tol: Option<f64>,
    pub zero_tol: Option<f64>,
    pub active_tol: Option<f64>,
    pub feas_tol: Option<f64>,
    pub gap_tol: Option<f64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetOverride {
    pub max_bases: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    vectors: Vec<Vec<f64>>,
    #[serde(default)]
    subspace: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    tolerances: Option<ToleranceOverrides>,
    #[serde(default)]
    budget: Option<BudgetOverride>,
}

/// Parsed input before domain validation.
#[derive(Debug)]
pub struct LoadedInput {
    pub vectors: Vec<Vec<f64>>,
    pub subspace_rows: Option<Vec<Vec<f64>>>,
    pub tolerances: ToleranceOverrides,
    pub budget: BudgetOverride,
}

pub fn read_source(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Input(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{path}: {e}")))
    }
}

pub fn detect_format(path: &str, flag: Option<Format>) -> Format {
    flag.unwrap_or_else(|| {
        if path.to_ascii_lowercase().ends_with(".csv") {
            Format::Csv
        } else {
            Format::Json
        }
    })
}

fn parse_csv(name: &str, text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut row = Vec::new();
        for (col, field) in trimmed.split(',').enumerate() {
            let field = field.trim();
            let value: f64 = field.parse().map_err(|_| {
                CliError::Input(format!(
                    "{name}: line {}, column {}: invalid number {field:?}",
                    lineno + 1,
                    col + 1
                ))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{name}: no data rows")));
    }
    Ok(rows)
}

pub fn parse_input(name: &str, text: &str, format: Format) -> Result<LoadedInput, CliError> {
    match format {
        Format::Csv => Ok(LoadedInput {
            vectors: parse_csv(name, text)?,
            subspace_rows: None,
            tolerances: ToleranceOverrides::default(),
            budget: BudgetOverride::default(),
        }),
        Format::Json => {
            let raw: RawDocument = serde_json::from_str(text).map_err(|e| {
                CliError::Input(format!(
                    "{name}: line {}, column {}: {e}",
                    e.line(),
                    e.column()
                ))
            })?;
            Ok(LoadedInput {
                vectors: raw.vectors,
                subspace_rows: raw.subspace,
                tolerances: raw.tolerances.unwrap_or_default(),
                budget: raw.budget.unwrap_or_default(),
            })
        }
    }
}

/// Reads a subspace basis from a standalone file (same formats as the main
/// input; the `vectors` field of a JSON document holds the basis rows).
pub fn parse_subspace_file(path: &str, flag: Option<Format>) -> Result<Vec<Vec<f64>>, CliError> {
    let text = read_source(path)?;
    let loaded = parse_input(path, &text, detect_format(path, flag))?;
    Ok(loaded.vectors)
}

fn env_f64(name: &str) -> Result<Option<f64>, CliError> {
    match std::env::var(name) {
        Ok(s) => s
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{name}: invalid number {s:?}"))),
        Err(_) => Ok(None),
    }
}

fn env_u64(name: &str) -> Result<Option<u64>, CliError> {
    match std::env::var(name) {
        Ok(s) => s
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{name}: invalid count {s:?}"))),
        Err(_) => Ok(None),
    }
}

/// Tolerance and budget flags shared by every subcommand.
#[derive(Debug, Clone, clap::Args)]
pub struct SettingsArgs {
    /// Relative singular-value cutoff (default: max(n,q) * machine epsilon).
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Vector-norm zero threshold.
    #[arg(long)]
    pub zero_tol: Option<f64>,
    /// Dot-product equality slack.
    #[arg(long)]
    pub active_tol: Option<f64>,
    /// Relative feasibility residual bound.
    #[arg(long)]
    pub feas_tol: Option<f64>,
    /// Minimum-norm solver duality-gap bound.
    #[arg(long)]
    pub gap_tol: Option<f64>,
    /// Cap on enumerated candidate bases.
    #[arg(long)]
    pub max_bases: Option<u64>,
}

/// Layered resolution: defaults, then input document, then PSPANKIT_*
/// environment variables, then command-line flags.
pub fn resolve_settings(
    file_tol: &ToleranceOverrides,
    file_budget: &BudgetOverride,
    flags: &SettingsArgs,
) -> Result<(Tolerances, EnumerationBudget), CliError> {
    let mut tol = Tolerances::default();
    let mut budget = EnumerationBudget::default();

    if let Some(v) = file_tol.rank_tol {
        tol.rank_tol = Some(v);
    }
    if let Some(v) = file_tol.zero_tol {
        tol.zero_tol = v;
    }
    if let Some(v) = file_tol.active_tol {
        tol.active_tol = v;
    }
    if let Some(v) = file_tol.feas_tol {
        tol.feas_tol = v;
    }
    if let Some(v) = file_tol.gap_tol {
        tol.gap_tol = v;
    }
    if let Some(v) = file_budget.max_bases {
        budget.max_bases = v;
    }

    if let Some(v) = env_f64("PSPANKIT_RANK_TOL")? {
        tol.rank_tol = Some(v);
    }
    if let Some(v) = env_f64("PSPANKIT_ZERO_TOL")? {
        tol.zero_tol = v;
    }
    if let Some(v) = env_f64("PSPANKIT_ACTIVE_TOL")? {
        tol.active_tol = v;
    }
    if let Some(v) = env_f64("PSPANKIT_FEAS_TOL")? {
        tol.feas_tol = v;
    }
    if let Some(v) = env_f64("PSPANKIT_GAP_TOL")? {
        tol.gap_tol = v;
    }
    if let Some(v) = env_u64("PSPANKIT_MAX_BASES")? {
        budget.max_bases = v;
    }

    if let Some(v) = flags.rank_tol {
        tol.rank_tol = Some(v);
    }
    if let Some(v) = flags.zero_tol {
        tol.zero_tol = v;
    }
    if let Some(v) = flags.active_tol {
        tol.active_tol = v;
    }
    if let Some(v) = flags.feas_tol {
        tol.feas_tol = v;
    }
    if let Some(v) = flags.gap_tol {
        tol.gap_tol = v;
    }
    if let Some(v) = flags.max_bases {
        budget.max_bases = v;
    }

    for (name, v) in [
        ("zero_tol", tol.zero_tol),
        ("active_tol", tol.active_tol),
        ("feas_tol", tol.feas_tol),
        ("gap_tol", tol.gap_tol),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Input(format!("{name} must be strictly positive")));
        }
    }
    if let Some(v) = tol.rank_tol {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Input("rank_tol must be strictly positive".into()));
        }
    }
    if budget.max_bases == 0 {
        return Err(CliError::Input("max_bases must be positive".into()));
    }
    Ok((tol, budget))
}

/// Validates the vector rows into a direction set, reporting the offending
/// row on failure.
pub fn build_direction_set(rows: &[Vec<f64>], tol: &Tolerances) -> Result<DirectionSet, CliError> {
    DirectionSet::from_rows(rows, tol.zero_tol).map_err(|e| match e {
        CoreError::ZeroVector { index, norm, .. } => CliError::Input(format!(
            "vector row {index} has norm {norm:e}, at or below the zero threshold"
        )),
        CoreError::DimensionMismatch {
            index,
            got,
            expected,
        } => CliError::Input(format!(
            "vector row {index} has {got} entries, expected {expected}"
        )),
        CoreError::EmptySet => CliError::Input("input contains no vectors".into()),
        other => CliError::Core(other),
    })
}

pub fn build_subspace(rows: &[Vec<f64>], tol: &Tolerances) -> Result<Subspace, CliError> {
    let vectors: Vec<nalgebra::DVector<f64>> = rows
        .iter()
        .map(|r| nalgebra::DVector::from_column_slice(r))
        .collect();
    Subspace::from_spanning(&vectors, tol).map_err(|e| match e {
        CoreError::DegenerateSubspace => {
            CliError::Input("subspace basis is degenerate: no independent rows".into())
        }
        other => CliError::Core(other),
    })
}
