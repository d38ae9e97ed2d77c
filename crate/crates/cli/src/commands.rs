use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use nade_core::bounds::DEFAULT_TOLERANCE;
use nade_core::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::output::sig17;

/// What a command produced. Refusals are results too: they carry the failed
/// conditions and exit with code 2.
#[derive(Debug)]
pub struct Run {
    pub result: Value,
    pub refusal: Option<String>,
    pub growth_csv: Option<Vec<GrowthCurve>>,
}

impl Run {
    fn ok(result: impl Serialize) -> Result<Self, CliError> {
        Ok(Run {
            result: serde_json::to_value(result).expect("results are plain data"),
            refusal: None,
            growth_csv: None,
        })
    }

    fn refused(result: Value, message: String) -> Result<Self, CliError> {
        Ok(Run {
            result,
            refusal: Some(message),
            growth_csv: None,
        })
    }
}

fn load_matrix(m: &mut RunManifest, path: &Path) -> Result<TransitionMatrix, CliError> {
    Ok(TransitionMatrix::from_json(&m.read_input("matrix", path)?)?)
}

fn load_system(m: &mut RunManifest, path: &Path) -> Result<SystemModel, CliError> {
    Ok(SystemModel::from_json(&m.read_input("system", path)?)?)
}

fn load_cover(m: &mut RunManifest, path: &Path) -> Result<CoverConfig, CliError> {
    Ok(CoverConfig::from_json(&m.read_input("cover", path)?)?)
}

/// Accepts `0.25`, `2/3` or `-1/8`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("not a number: {text:?}"))
    };
    let x = match text.split_once('/') {
        Some((num, den)) => {
            let d = number(den)?;
            if d == 0.0 {
                return Err(format!("zero denominator in {text:?}"));
            }
            number(num)? / d
        }
        None => number(text)?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("not a finite number: {text:?}"))
    }
}

fn refusal_result(e: BoundError) -> Result<Run, CliError> {
    let message = e.to_string();
    match e {
        BoundError::Refused {
            claim,
            failed,
            report,
        } => Run::refused(
            json!({
                "claim": claim,
                "status": "refused",
                "failed": failed,
                "witnesses": report.witnesses,
                "report": report,
            }),
            message,
        ),
        other => Err(other.into()),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SpectralRadiusArgs {
    /// Transition matrix JSON.
    #[arg(long)]
    pub matrix: PathBuf,
    /// Stopping tolerance for power iteration.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Also report the Gelfand estimate `||A^n||^(1/n)` at this power.
    #[arg(long)]
    pub gelfand_n: Option<u64>,
}

pub fn spectral_radius(m: &mut RunManifest, args: &SpectralRadiusArgs) -> Result<Run, CliError> {
    let a = load_matrix(m, &args.matrix)?;
    let bound = MatrixBound::of(&a, args.tol)?;
    Run::ok(json!({
        "rho": bound.rho,
        "log_rho": bound.log_rho,
        "nu": bound.nu,
        "log_nu": bound.log_nu,
        "irreducible": a.is_irreducible(),
        "gelfand": args.gelfand_n.map(|n| json!({"n": n, "estimate": a.gelfand_estimate(n)})),
    }))
}

#[derive(Debug, Args, Serialize)]
pub struct EnumerateWordsArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Number of symbols per word.
    #[arg(long)]
    pub length: usize,
    /// Refuse to list more words than this.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: usize,
    /// Print the exact count only.
    #[arg(long)]
    pub count_only: bool,
}

pub fn enumerate_words(m: &mut RunManifest, args: &EnumerateWordsArgs) -> Result<Run, CliError> {
    let a = load_matrix(m, &args.matrix)?;
    let count = a.count_allowable_words(args.length)?;
    let words = if args.count_only {
        None
    } else {
        let words = a.enumerate_allowable_words(args.length, args.cap)?;
        Some(
            words
                .into_iter()
                .map(|w| Itinerary::Word(w).to_string())
                .collect::<Vec<_>>(),
        )
    };
    Run::ok(json!({
        "length": args.length,
        "count": count.to_string(),
        "words": words,
    }))
}

#[derive(Debug, Args, Serialize)]
pub struct BoundLowerArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// System JSON; with `--cover`, certifies the bound for this system.
    #[arg(long, requires = "cover")]
    pub system: Option<PathBuf>,
    #[arg(long, requires = "system")]
    pub cover: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
}

pub fn bound_lower(m: &mut RunManifest, args: &BoundLowerArgs) -> Result<Run, CliError> {
    let a = load_matrix(m, &args.matrix)?;
    let (Some(system), Some(cover)) = (&args.system, &args.cover) else {
        return Run::ok(matrix_lower_bound(&a, args.tol)?);
    };
    let sys = load_system(m, system)?;
    let cover = load_cover(m, cover)?;
    match certify_lower_bound(&sys, &cover, &a, args.tol) {
        Ok(c) => Run::ok(c),
        Err(e) => refusal_result(e),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SystemCoverMatrixArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub cover: PathBuf,
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
}

pub fn bound_upper(m: &mut RunManifest, args: &SystemCoverMatrixArgs) -> Result<Run, CliError> {
    let sys = load_system(m, &args.system)?;
    let cover = load_cover(m, &args.cover)?;
    let a = load_matrix(m, &args.matrix)?;
    match certify_upper_bound(&sys, &cover, &a, args.tol) {
        Ok(c) => Run::ok(c),
        Err(e) => refusal_result(e),
    }
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub cover: PathBuf,
    /// Matrix to verify against; derived from the cover when omitted.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Random points per step and set for the sampled slope constants.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

pub fn verify(m: &mut RunManifest, args: &VerifyArgs) -> Result<Run, CliError> {
    let sys = load_system(m, &args.system)?;
    let cover = load_cover(m, &args.cover)?;
    let (a, derived) = match &args.matrix {
        Some(path) => (load_matrix(m, path)?, false),
        None => (derive_matrix(&sys, &cover)?, true),
    };
    let report = verify_expansion(&sys, &cover, &a)?;
    let sampled = estimate_constants(&sys, &cover, args.samples, m.seed)?;
    let result = json!({
        "matrix_derived": derived,
        "report": report,
        "sampled_constants": sampled,
    });
    if report.coupled_expanding {
        Run::ok(result)
    } else {
        let message = format!(
            "refused: hypothesis (i) failed with {} witnesses",
            report.witnesses.len()
        );
        Run::refused(result, message)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long)]
    pub system: PathBuf,
    /// Grid intervals over the domain, used unless `--coded-depth` is given.
    #[arg(long, default_value_t = 200_000)]
    pub grid: usize,
    /// Evaluate on the coded points of all words with this many symbols minus one.
    #[arg(long, requires_all = ["cover", "matrix"])]
    pub coded_depth: Option<usize>,
    #[arg(long)]
    pub cover: Option<PathBuf>,
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    /// Strictly decreasing separation scales.
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.1, 0.05, 0.02, 0.01])]
    pub eps: Vec<f64>,
}

pub fn estimate(m: &mut RunManifest, args: &EstimateArgs) -> Result<Run, CliError> {
    let sys = load_system(m, &args.system)?;
    let evaluation = match args.coded_depth {
        Some(depth) => {
            let (Some(cover), Some(matrix)) = (&args.cover, &args.matrix) else {
                return Err(CliError::Input(
                    "--coded-depth needs --cover and --matrix".into(),
                ));
            };
            let cover = load_cover(m, cover)?;
            let a = load_matrix(m, matrix)?;
            let coder = Coder::new(&sys, &cover, Arc::new(a))?;
            Evaluation::Points(coder.coded_points(depth, 1, 1e-12, 1 << 22)?)
        }
        None => Evaluation::Grid(args.grid),
    };
    let cfg = EstimateConfig {
        n_min: args.n_min,
        n_max: args.n_max,
        epsilons: args.eps.clone(),
        evaluation,
    };
    let est = estimate_entropy(&sys, &cfg)?;
    let slopes: Vec<Value> = est
        .per_eps_slopes()
        .into_iter()
        .map(|(epsilon, slope)| json!({"epsilon": epsilon, "slope": slope}))
        .collect();
    Ok(Run {
        result: json!({
            "h_est": est.h_est,
            "degenerate": est.degenerate,
            "restricted": est.restricted,
            "slopes": slopes,
        }),
        refusal: None,
        growth_csv: Some(est.curves),
    })
}

#[derive(Debug, Args, Serialize)]
pub struct CodeArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub cover: PathBuf,
    #[arg(long)]
    pub matrix: PathBuf,
    /// Sequence literal such as `1,2|1` (1-based head, then repeating cycle).
    /// Drawn at random from `--seed` when omitted.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Head length of a randomly drawn sequence.
    #[arg(long, default_value_t = 20)]
    pub random_prefix: usize,
    /// Start time.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Target half-width of the enclosure.
    #[arg(long, default_value_t = 1e-8)]
    pub radius: f64,
}

pub fn code(m: &mut RunManifest, args: &CodeArgs) -> Result<Run, CliError> {
    let sys = load_system(m, &args.system)?;
    let cover = load_cover(m, &args.cover)?;
    let a = Arc::new(load_matrix(m, &args.matrix)?);
    let coder = Coder::new(&sys, &cover, Arc::clone(&a))?;
    let alpha = match &args.alpha {
        Some(literal) => SymbolSequence::parse(a, literal)?,
        None => SymbolSequence::random(a, m.seed, args.random_prefix),
    };
    let point = coder.code_point(&alpha, args.n, args.radius)?;
    Run::ok(json!({
        "alpha": alpha.to_string(),
        "n": args.n,
        "value": point.value,
        "radius": point.radius,
        "depth": point.depth,
    }))
}

#[derive(Debug, Args, Serialize)]
pub struct ItineraryArgs {
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub cover: PathBuf,
    /// Starting point, decimal or rational (`2/3`).
    #[arg(long, value_parser = parse_real)]
    pub x: f64,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Number of symbols.
    #[arg(long, default_value_t = 10)]
    pub len: usize,
}

pub fn itinerary(m: &mut RunManifest, args: &ItineraryArgs) -> Result<Run, CliError> {
    let sys = load_system(m, &args.system)?;
    let cover = load_cover(m, &args.cover)?;
    let it = nade_core::itinerary(&sys, &cover, args.x, args.n, args.len)?;
    let undefined_at = match it {
        Itinerary::Undefined(k) => Some(k),
        Itinerary::Word(_) => None,
    };
    Run::ok(json!({
        "x": args.x,
        "n": args.n,
        "itinerary": it.to_string(),
        "undefined_at": undefined_at,
    }))
}

/// Growth curves as CSV, headed by a comment naming the manifest digest.
pub fn growth_csv(curves: &[GrowthCurve], digest: &str) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["epsilon", "n", "count", "log_count_over_n"])
        .expect("in-memory write");
    for c in curves {
        for r in &c.rows {
            w.write_record([
                sig17(c.epsilon),
                r.n.to_string(),
                r.count.to_string(),
                sig17(r.log_count_over_n),
            ])
            .expect("in-memory write");
        }
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8");
    format!("# manifest_sha256={digest}\n{body}")
}
