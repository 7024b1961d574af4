//! Command-line front end: every library capability as a subcommand with
//! file-based JSON/CSV input and JSON reports on stdout.
//!
//! Exit codes: 0 success, 1 negative domain verdict (not positive, not
//! dominated, inadmissible), 2 input or usage error, 3 numerical failure.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use momentkit::exact::{hilbert_exact, reciprocal_factorial_exact};
use momentkit::spectral::{self, HeuristicParams};
use momentkit::{
    build_hankel, check_domination, circle_relation_check, classify_exact, classify_positivity,
    complete_arithmetic, detect_pattern, determinacy_heuristic, eigenvalue_trajectory,
    ejection_demo, extract_submoment, index_admissibility, moments_of, perturb_and_classify,
    quotient_relation_check, recover_atoms, stieltjes_transform, verify_completion,
    Admissibility, AtomicMeasure, ComplexPoint, Error as CoreError, IndexMap,
    PartialMomentSequence, SignedAtomicMeasure, TruncatedMomentSequence, Verdict,
    DEFAULT_TOLERANCE,
};

/// Environment variable overriding the default classification tolerance.
const TOLERANCE_ENV: &str = "MOMENTKIT_TOL";

#[derive(Parser)]
#[command(
    name = "momentkit",
    version,
    about = "Moment sequences: positivity, determinacy, measures, completions",
    after_help = "Exit codes: 0 ok, 1 negative verdict, 2 input/usage error, 3 numerical failure.\n\
                  MOMENTKIT_TOL overrides the default classification tolerance (1e-10).\n\
                  Sequence inputs may be JSON ({\"moments\": [...]}) or CSV (one moment per line)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a sequence (or validate a partial one) by Hankel positivity
    Classify(ClassifyArgs),
    /// Smallest-eigenvalue trajectory and full spectrum at the top order
    Spectrum(SpectrumArgs),
    /// Determinacy heuristic from the smallest-eigenvalue trajectory
    Determinacy(DeterminacyArgs),
    /// Extract the subsequence s_{k*d + offset}
    Extract(ExtractArgs),
    /// Test an index list for admissibility (arithmetic, even offset)
    Admissible(AdmissibleArgs),
    /// Complete a partial sequence along an arithmetic pattern
    Complete(CompleteArgs),
    /// Recover an atomic measure from a truncated moment sequence
    Recover(RecoverArgs),
    /// Perturb a measure's moments by a signed measure and classify
    Perturb(PerturbArgs),
    /// Zero the entry s_{2m} and reclassify (ejection from the cone)
    Eject(EjectArgs),
    /// Stieltjes transform of a measure, with optional identity checks
    Stieltjes(StieltjesArgs),
    /// Generate a built-in sequence (hilbert, factorial, stieltjes_wigert,
    /// geometric, from_measure)
    Generate(GenerateArgs),
}

#[derive(Args)]
struct ClassifyArgs {
    /// Sequence file (JSON or CSV); with --partial, a partial-sequence JSON
    #[arg(long)]
    input: PathBuf,
    /// Largest Hankel order to check (default: all the data supports)
    #[arg(long)]
    max_order: Option<usize>,
    /// Tolerance band (default 1e-10, or MOMENTKIT_TOL)
    #[arg(long)]
    tol: Option<f64>,
    /// Use exact rational arithmetic (input must carry "exact" entries)
    #[arg(long)]
    exact: bool,
    /// Treat the input as a partial sequence and validate its specified
    /// principal submatrices
    #[arg(long)]
    partial: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    max_order: Option<usize>,
    /// Emit the trajectory as CSV (order,lambda_min) instead of JSON
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeterminacyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    max_order: Option<usize>,
    /// Trailing window for the log-slope fit
    #[arg(long, default_value_t = spectral::DEFAULT_WINDOW)]
    window: usize,
    /// Slope threshold tau; slopes below -tau suggest determinacy
    #[arg(long, default_value_t = spectral::DEFAULT_SLOPE_THRESHOLD)]
    slope_threshold: f64,
    /// Positive floor for "bounded away from zero"
    #[arg(long, default_value_t = spectral::DEFAULT_FLOOR)]
    floor: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtractArgs {
    #[arg(long)]
    input: PathBuf,
    /// Extraction step
    #[arg(long)]
    d: usize,
    /// Even offset
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdmissibleArgs {
    /// Index list l_0 l_1 l_2 ...
    #[arg(required = true)]
    indices: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompleteArgs {
    /// Partial sequence JSON ({"entries": {"0": 1.0, ...}, "horizon": N})
    #[arg(long)]
    input: PathBuf,
    /// Override the completion horizon
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverArgs {
    #[arg(long)]
    input: PathBuf,
    /// Target atom count (default: all the data supports); reduced
    /// automatically when the moment matrix is rank deficient
    #[arg(long)]
    atoms: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PerturbArgs {
    /// Base measure JSON ({"atoms": [{"node": ..., "weight": ...}]})
    #[arg(long)]
    sigma: PathBuf,
    /// Signed measure JSON ({"plus": {...}, "minus": {...}})
    #[arg(long)]
    mu: PathBuf,
    /// Highest moment index to perturb
    #[arg(long)]
    kmax: usize,
    /// Node matching tolerance for the domination check
    #[arg(long, default_value_t = momentkit::perturbation::DEFAULT_NODE_TOLERANCE)]
    node_tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EjectArgs {
    #[arg(long)]
    input: PathBuf,
    /// Zero the entry s_{2m}
    #[arg(long)]
    m: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StieltjesArgs {
    #[arg(long)]
    measure: PathBuf,
    /// Evaluation point, e.g. "1+2i" (imaginary part must be nonzero)
    #[arg(long)]
    lambda: String,
    /// Measure representing the offset-shifted moments: check the circle
    /// relation against it
    #[arg(long)]
    shifted: Option<PathBuf>,
    /// Measure representing the power-extracted moments: check the quotient
    /// relation against it (requires --d)
    #[arg(long)]
    image: Option<PathBuf>,
    /// Extraction step for the quotient relation
    #[arg(long)]
    d: Option<usize>,
    /// Even offset for the relation checks
    #[arg(long, default_value_t = 0)]
    offset: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// One of: hilbert, factorial, stieltjes_wigert, geometric, from_measure
    name: String,
    /// Number of entries to emit
    #[arg(long, default_value_t = 17)]
    count: usize,
    /// Base of the log-normal-type sequence s_n = q^{-(n+1)^2/2}; recommended
    /// range [0.85, 0.95] (smaller q overflows f64 quickly)
    #[arg(long)]
    q: Option<f64>,
    /// Ratio of the geometric sequence a^k
    #[arg(long)]
    ratio: Option<f64>,
    /// Measure file for from_measure
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum CliError {
    Core(CoreError),
    Io(PathBuf, std::io::Error),
    Parse(PathBuf, String),
    UnknownBuiltin(String),
    QOutOfRange(f64),
    BadLambda(String),
    MissingOption(&'static str),
    BadEnvTolerance(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Parse(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::UnknownBuiltin(name) => write!(
                f,
                "unknown builtin {name:?}; expected hilbert, factorial, \
                 stieltjes_wigert, geometric, or from_measure"
            ),
            CliError::QOutOfRange(q) => write!(f, "q = {q} must lie in (0, 1)"),
            CliError::BadLambda(text) => write!(f, "cannot parse lambda {text:?}"),
            CliError::MissingOption(name) => write!(f, "missing required option {name}"),
            CliError::BadEnvTolerance(text) => {
                write!(f, "{TOLERANCE_ENV}={text:?} is not a positive real")
            }
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(core) => match core {
                CoreError::ConvergenceFailure { .. }
                | CoreError::Overflow
                | CoreError::CompletionMismatch { .. }
                | CoreError::AmbiguousMatch { .. } => 3,
                CoreError::NotPositive
                | CoreError::SubsequenceNotPositive
                | CoreError::EvenStepNegativeNode { .. }
                | CoreError::ZeroNodeWithOffset { .. }
                | CoreError::NonPositiveTrajectory { .. } => 1,
                _ => 2,
            },
            _ => 2,
        }
    }
}

/// Command output: a JSON report (or raw text) and whether the domain
/// verdict is negative.
struct Outcome {
    body: Body,
    negative: bool,
}

enum Body {
    Json(Value),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = out_path(&cli.command);
    match run(cli.command) {
        Ok(outcome) => {
            let rendered = match &outcome.body {
                Body::Json(value) => {
                    let mut text = serde_json::to_string_pretty(value)
                        .expect("report serialization cannot fail");
                    text.push('\n');
                    text
                }
                Body::Text(text) => text.clone(),
            };
            if let Some(path) = out_path {
                if let Err(e) = fs::write(&path, &rendered) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{rendered}");
            }
            ExitCode::from(if outcome.negative { 1 } else { 0 })
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn out_path(command: &Command) -> Option<PathBuf> {
    match command {
        Command::Classify(a) => a.out.clone(),
        Command::Spectrum(a) => a.out.clone(),
        Command::Determinacy(a) => a.out.clone(),
        Command::Extract(a) => a.out.clone(),
        Command::Admissible(a) => a.out.clone(),
        Command::Complete(a) => a.out.clone(),
        Command::Recover(a) => a.out.clone(),
        Command::Perturb(a) => a.out.clone(),
        Command::Eject(a) => a.out.clone(),
        Command::Stieltjes(a) => a.out.clone(),
        Command::Generate(a) => a.out.clone(),
    }
}

fn run(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Classify(args) => classify(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Determinacy(args) => determinacy(args),
        Command::Extract(args) => extract(args),
        Command::Admissible(args) => admissible(args),
        Command::Complete(args) => complete(args),
        Command::Recover(args) => recover(args),
        Command::Perturb(args) => perturb(args),
        Command::Eject(args) => eject(args),
        Command::Stieltjes(args) => stieltjes(args),
        Command::Generate(args) => generate(args),
    }
}

fn classify(args: ClassifyArgs) -> Result<Outcome, CliError> {
    let tol = resolve_tolerance(args.tol)?;
    if args.partial {
        let pseq: PartialMomentSequence = load_json(&args.input)?;
        let max_order = args.max_order.unwrap_or(pseq.horizon() / 2);
        let report = momentkit::validate_partial(&pseq, max_order, tol)?;
        let negative = report.verdict == Verdict::NotPositive;
        return Ok(Outcome {
            body: Body::Json(to_value(&report)),
            negative,
        });
    }

    let seq = load_sequence(&args.input)?;
    let max_order = args.max_order.unwrap_or(seq.max_feasible_order());
    let report = if args.exact {
        classify_exact(&seq, max_order)?
    } else {
        classify_positivity(&seq, max_order, tol)?
    };
    let negative = report.verdict == Verdict::NotPositive;
    Ok(Outcome {
        body: Body::Json(to_value(&report)),
        negative,
    })
}

fn spectrum(args: SpectrumArgs) -> Result<Outcome, CliError> {
    let seq = load_sequence(&args.input)?;
    let max_order = args.max_order.unwrap_or(seq.max_feasible_order());
    let trajectory = eigenvalue_trajectory(&seq, max_order)?;
    if args.csv {
        return Ok(Outcome {
            body: Body::Text(spectral::trajectory_to_csv(&trajectory)),
            negative: false,
        });
    }
    let top = build_hankel(&seq, max_order)?;
    let decomposition = momentkit::symmetric_eigen(&top)?;
    Ok(Outcome {
        body: Body::Json(json!({
            "max_order": max_order,
            "trajectory": trajectory,
            "eigenvalues": decomposition.eigenvalues(),
        })),
        negative: false,
    })
}

fn determinacy(args: DeterminacyArgs) -> Result<Outcome, CliError> {
    let seq = load_sequence(&args.input)?;
    let max_order = args.max_order.unwrap_or(seq.max_feasible_order());
    let trajectory = eigenvalue_trajectory(&seq, max_order)?;
    let params = HeuristicParams {
        window: args.window,
        slope_threshold: args.slope_threshold,
        floor: args.floor,
    };
    let report = determinacy_heuristic(&trajectory, &params)?;
    Ok(Outcome {
        body: Body::Json(to_value(&report)),
        negative: false,
    })
}

fn extract(args: ExtractArgs) -> Result<Outcome, CliError> {
    let seq = load_sequence(&args.input)?;
    let map = IndexMap::arithmetic(args.d, args.offset)?;
    let sub = extract_submoment(&seq, &map)?;
    Ok(Outcome {
        body: Body::Json(to_value(&sub)),
        negative: false,
    })
}

fn admissible(args: AdmissibleArgs) -> Result<Outcome, CliError> {
    let verdict = index_admissibility(&args.indices)?;
    let negative = matches!(verdict, Admissibility::Inadmissible { .. });
    Ok(Outcome {
        body: Body::Json(to_value(&verdict)),
        negative,
    })
}

fn complete(args: CompleteArgs) -> Result<Outcome, CliError> {
    let mut pseq: PartialMomentSequence = load_json(&args.input)?;
    if let Some(horizon) = args.horizon {
        pseq = PartialMomentSequence::new(pseq.specified().clone(), Some(horizon))?;
    }
    let descriptor = detect_pattern(&pseq)?;
    let result = complete_arithmetic(&pseq, &descriptor)?;
    let report = verify_completion(&pseq, &result)?;
    Ok(Outcome {
        body: Body::Json(json!({
            "pattern": to_value(&descriptor),
            "completed": to_value(&result.completed),
            "measure": to_value(&result.measure),
            "definiteness": to_value(&result.definiteness),
            "verification": to_value(&report),
        })),
        negative: false,
    })
}

fn recover(args: RecoverArgs) -> Result<Outcome, CliError> {
    let seq = load_sequence(&args.input)?;
    let requested = match args.atoms {
        Some(atoms) => atoms,
        None => (seq.len() / 2).max(1),
    };
    let mut atoms = requested;
    let measure = loop {
        match recover_atoms(&seq, atoms) {
            Ok(measure) => break measure,
            Err(CoreError::RankDeficient(r)) if r > 0 && r < atoms => atoms = r,
            Err(e) => return Err(e.into()),
        }
    };
    Ok(Outcome {
        body: Body::Json(json!({
            "requested_atoms": requested,
            "atoms": measure.len(),
            "measure": to_value(&measure),
            "matched_moments": 2 * measure.len(),
        })),
        negative: false,
    })
}

fn perturb(args: PerturbArgs) -> Result<Outcome, CliError> {
    let sigma: AtomicMeasure = load_json(&args.sigma)?;
    let mu: SignedAtomicMeasure = load_json(&args.mu)?;
    let seq = moments_of(&sigma, args.kmax)?;
    let (perturbed, positivity, _) = perturb_and_classify(&seq, &sigma, &mu, args.kmax)?;
    let domination = check_domination(&sigma, &mu, args.node_tol)?;
    let negative = !domination.dominated || positivity.verdict == Verdict::NotPositive;
    Ok(Outcome {
        body: Body::Json(json!({
            "perturbed": to_value(&perturbed),
            "positivity": to_value(&positivity),
            "domination": to_value(&domination),
        })),
        negative,
    })
}

fn eject(args: EjectArgs) -> Result<Outcome, CliError> {
    let seq = load_sequence(&args.input)?;
    let report = ejection_demo(&seq, args.m)?;
    let negative = report.verdict == Verdict::NotPositive;
    Ok(Outcome {
        body: Body::Json(to_value(&report)),
        negative,
    })
}

fn stieltjes(args: StieltjesArgs) -> Result<Outcome, CliError> {
    let measure: AtomicMeasure = load_json(&args.measure)?;
    let lambda: ComplexPoint = args
        .lambda
        .parse()
        .map_err(|_| CliError::BadLambda(args.lambda.clone()))?;
    let transform = stieltjes_transform(&measure, lambda)?;
    let mut report = json!({
        "lambda": to_value(&lambda),
        "transform": to_value(&ComplexPoint::from(transform)),
    });

    if let Some(path) = &args.shifted {
        let shifted: AtomicMeasure = load_json(path)?;
        let residual = circle_relation_check(&measure, &shifted, args.offset, lambda)?;
        report["circle_residual"] = json!(residual);
    }
    if let Some(path) = &args.image {
        let step = args.d.ok_or(CliError::MissingOption("--d"))?;
        let image: AtomicMeasure = load_json(path)?;
        let residual = quotient_relation_check(&measure, &image, step, args.offset, lambda)?;
        report["quotient_residual"] = json!(residual);
    }
    Ok(Outcome {
        body: Body::Json(report),
        negative: false,
    })
}

fn generate(args: GenerateArgs) -> Result<Outcome, CliError> {
    if args.count == 0 {
        return Err(CoreError::InsufficientMoments { needed: 1, got: 0 }.into());
    }
    let seq = match args.name.as_str() {
        "hilbert" => TruncatedMomentSequence::from_exact(hilbert_exact(args.count))?,
        "factorial" => {
            TruncatedMomentSequence::from_exact(reciprocal_factorial_exact(args.count))?
        }
        "stieltjes_wigert" => {
            let q = args.q.ok_or(CliError::MissingOption("--q"))?;
            if !(q > 0.0 && q < 1.0) {
                return Err(CliError::QOutOfRange(q));
            }
            let entries: Vec<f64> = (0..args.count)
                .map(|n| q.powf(-((n as f64 + 1.0).powi(2)) / 2.0))
                .collect();
            if entries.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::Overflow.into());
            }
            TruncatedMomentSequence::new(entries)?
        }
        "geometric" => {
            let ratio = args.ratio.ok_or(CliError::MissingOption("--ratio"))?;
            let entries: Vec<f64> = (0..args.count).map(|k| ratio.powi(k as i32)).collect();
            if entries.iter().any(|v| !v.is_finite()) {
                return Err(CoreError::Overflow.into());
            }
            TruncatedMomentSequence::new(entries)?
        }
        "from_measure" => {
            let path = args.measure.as_ref().ok_or(CliError::MissingOption("--measure"))?;
            let measure: AtomicMeasure = load_json(path)?;
            moments_of(&measure, args.count - 1)?
        }
        other => return Err(CliError::UnknownBuiltin(other.to_string())),
    };
    Ok(Outcome {
        body: Body::Json(to_value(&seq)),
        negative: false,
    })
}

fn resolve_tolerance(flag: Option<f64>) -> Result<f64, CliError> {
    if let Some(tol) = flag {
        return Ok(tol);
    }
    match std::env::var(TOLERANCE_ENV) {
        Ok(text) => match text.parse::<f64>() {
            Ok(tol) if tol > 0.0 && tol.is_finite() => Ok(tol),
            _ => Err(CliError::BadEnvTolerance(text)),
        },
        Err(_) => Ok(DEFAULT_TOLERANCE),
    }
}

fn load_sequence(path: &Path) -> Result<TruncatedMomentSequence, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let is_csv = path
        .extension()
        .map(|ext| ext.eq_ignore_ascii_case("csv"))
        .unwrap_or(false);
    if is_csv {
        return TruncatedMomentSequence::from_csv_str(&text)
            .map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()));
    }
    serde_json::from_str(&text).map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(path.to_path_buf(), e.to_string()))
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report serialization cannot fail")
}
