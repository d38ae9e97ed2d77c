//! Coupled-expansion checks: does each `f_n` stretch `V_i` over every `V_j`
//! that row `i` of the transition matrix allows?

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{normalize, Interval};
use crate::system::{Extension, SystemModel};
use crate::transition::{MatrixError, MatrixFile, TransitionMatrix};

/// Slack allowed when cross-checking slope constants against sampled pairs.
pub const SLOPE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error("cover has {sets} sets but the matrix is {matrix}x{matrix}")]
    SizeMismatch { sets: usize, matrix: usize },
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("the realized relation is not a transition matrix: {0}")]
    NotATransitionMatrix(MatrixError),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("malformed cover JSON: {0}")]
    Parse(String),
}

/// The sets `V_1, …, V_N` and the number of steps to check.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverConfig {
    sets: Vec<Interval>,
    horizon: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub sets: Vec<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl CoverConfig {
    /// Sets must be nonempty in number and have pairwise disjoint interiors.
    /// Without an explicit horizon, checks run over the system's required horizon.
    pub fn new(sets: Vec<Interval>, horizon: Option<usize>) -> Result<Self, ExpansionError> {
        if sets.is_empty() {
            return Err(ExpansionError::InvalidCover("no sets".into()));
        }
        if horizon == Some(0) {
            return Err(ExpansionError::InvalidCover(
                "horizon must be positive".into(),
            ));
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i].interiors_overlap(&sets[j]) {
                    return Err(ExpansionError::InvalidCover(format!(
                        "V_{} = {} and V_{} = {} overlap in their interiors",
                        i + 1,
                        sets[i],
                        j + 1,
                        sets[j]
                    )));
                }
            }
        }
        Ok(CoverConfig { sets, horizon })
    }

    pub fn from_file(file: &CoverFile) -> Result<Self, ExpansionError> {
        Self::new(file.sets.clone(), file.horizon)
    }

    pub fn from_json(text: &str) -> Result<Self, ExpansionError> {
        let file: CoverFile =
            serde_json::from_str(text).map_err(|e| ExpansionError::Parse(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            sets: self.sets.clone(),
            horizon: self.horizon,
        }
    }

    pub fn sets(&self) -> &[Interval] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn explicit_horizon(&self) -> Option<usize> {
        self.horizon
    }

    pub fn horizon_for(&self, sys: &SystemModel) -> usize {
        self.horizon.unwrap_or_else(|| sys.required_horizon())
    }

    /// Smallest distance between two distinct sets; `None` for a single set.
    pub fn min_gap(&self) -> Option<f64> {
        let mut gap: Option<f64> = None;
        for i in 0..self.sets.len() {
            for j in i + 1..self.sets.len() {
                let d = self.sets[i].distance(&self.sets[j]);
                gap = Some(gap.map_or(d, |g| g.min(d)));
            }
        }
        gap
    }

    /// Pairwise disjoint as closed sets.
    pub fn is_disjoint(&self) -> bool {
        self.min_gap().is_none_or(|g| g > 0.0)
    }

    /// Index of the set containing `x`, if any. Assumes disjoint sets.
    pub fn locate(&self, x: f64) -> Option<usize> {
        self.sets.iter().position(|v| v.contains(x))
    }

    fn check_domain(&self, sys: &SystemModel) -> Result<(), ExpansionError> {
        for (i, v) in self.sets.iter().enumerate() {
            if !sys.domain().contains_interval(v) {
                return Err(ExpansionError::InvalidCover(format!(
                    "V_{} = {} is not inside the domain {}",
                    i + 1,
                    v,
                    sys.domain()
                )));
            }
        }
        Ok(())
    }

    fn check_size(&self, a: &TransitionMatrix) -> Result<(), ExpansionError> {
        if a.size() != self.sets.len() {
            return Err(ExpansionError::SizeMismatch {
                sets: self.sets.len(),
                matrix: a.size(),
            });
        }
        Ok(())
    }
}

/// A covering failure: `f_n(V_i)` misses `uncovered ∈ V_j` although `a_ij = 1`. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub n: usize,
    pub i: usize,
    pub j: usize,
    pub image: Interval,
    pub uncovered: f64,
}

/// Exact slope constants over the cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeConstants {
    /// Largest `λ` with `|f_n(x) − f_n(y)| ≥ λ|x − y|` on every `V_i`; zero when some `f_n` folds or flattens on some `V_i`.
    pub lambda: f64,
    /// Smallest `μ` with `|f_n(x) − f_n(y)| ≤ μ|x − y|` on every `V_i`.
    pub mu: f64,
    /// Sampled pairs used to cross-check the two constants.
    pub samples: usize,
    /// Sampled pairs that violated either inequality beyond [`SLOPE_SLACK`].
    pub violations: usize,
}

impl SlopeConstants {
    pub fn expanding(&self) -> bool {
        self.lambda > 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub matrix: MatrixFile,
    pub horizon: usize,
    pub required_horizon: usize,
    pub extension: Extension,
    /// The horizon reaches every distinct step, so the checks hold for all `n`.
    pub complete: bool,
    pub coupled_expanding: bool,
    pub strict: bool,
    pub min_gap: Option<f64>,
    pub exact_covering: bool,
    pub lambda_est: f64,
    pub mu_est: f64,
    pub witnesses: Vec<Witness>,
}

fn covering_witnesses(
    sys: &SystemModel,
    cfg: &CoverConfig,
    a: &TransitionMatrix,
    horizon: usize,
) -> Vec<Witness> {
    let mut out = Vec::new();
    for n in 1..=horizon {
        let f = sys.map(n);
        for (i, vi) in cfg.sets.iter().enumerate() {
            let image = f.image(vi);
            for j in a.successors(i) {
                let vj = &cfg.sets[j];
                if !image.contains_interval(vj) {
                    let uncovered = if vj.lo() < image.lo() {
                        vj.lo()
                    } else {
                        vj.hi()
                    };
                    out.push(Witness {
                        n,
                        i: i + 1,
                        j: j + 1,
                        image,
                        uncovered,
                    });
                }
            }
        }
    }
    out
}

/// Checks `f_n(V_i) ⊇ ⋃_{a_ij=1} V_j` for `n = 1..=H` with exact images.
pub fn verify_expansion(
    sys: &SystemModel,
    cfg: &CoverConfig,
    a: &TransitionMatrix,
) -> Result<ExpansionReport, ExpansionError> {
    cfg.check_size(a)?;
    cfg.check_domain(sys)?;
    let horizon = cfg.horizon_for(sys);
    let witnesses = covering_witnesses(sys, cfg, a, horizon);
    let min_gap = cfg.min_gap();
    let constants = slope_constants(sys, cfg, horizon);
    Ok(ExpansionReport {
        matrix: a.to_file(),
        horizon,
        required_horizon: sys.required_horizon(),
        extension: sys.extension(),
        complete: horizon >= sys.required_horizon(),
        coupled_expanding: witnesses.is_empty(),
        strict: min_gap.is_none_or(|g| g > 0.0),
        min_gap,
        exact_covering: exact_covering_holds(sys, cfg, a, horizon),
        lambda_est: constants.0,
        mu_est: constants.1,
        witnesses,
    })
}

/// The largest matrix the system realizes: `a_ij = 1` iff `f_n(V_i) ⊇ V_j` for every `n ≤ H`.
pub fn derive_matrix(
    sys: &SystemModel,
    cfg: &CoverConfig,
) -> Result<TransitionMatrix, ExpansionError> {
    cfg.check_domain(sys)?;
    let horizon = cfg.horizon_for(sys);
    let n_sets = cfg.len();
    let mut rows = vec![vec![1i64; n_sets]; n_sets];
    for n in 1..=horizon {
        let f = sys.map(n);
        for (i, vi) in cfg.sets.iter().enumerate() {
            let image = f.image(vi);
            for (j, vj) in cfg.sets.iter().enumerate() {
                if !image.contains_interval(vj) {
                    rows[i][j] = 0;
                }
            }
        }
    }
    TransitionMatrix::from_rows(&rows).map_err(ExpansionError::NotATransitionMatrix)
}

fn exact_covering_holds(
    sys: &SystemModel,
    cfg: &CoverConfig,
    a: &TransitionMatrix,
    horizon: usize,
) -> bool {
    if normalize(cfg.sets.clone()) != vec![sys.domain()] {
        return false;
    }
    for i in 0..cfg.len() {
        let targets = normalize(a.successors(i).map(|j| cfg.sets[j]).collect());
        let [target] = targets.as_slice() else {
            return false;
        };
        for n in 1..=horizon {
            if sys.map(n).image(&cfg.sets[i]) != *target {
                return false;
            }
        }
    }
    true
}

/// `f_n(V_i) = ⋃_{a_ij=1} V_j` for all `n ≤ H`, and the sets cover the domain.
pub fn verify_exact_covering(
    sys: &SystemModel,
    cfg: &CoverConfig,
    a: &TransitionMatrix,
) -> Result<bool, ExpansionError> {
    cfg.check_size(a)?;
    cfg.check_domain(sys)?;
    Ok(exact_covering_holds(sys, cfg, a, cfg.horizon_for(sys)))
}

/// `(λ, μ)` from the slopes of the pieces meeting each `V_i`.
fn slope_constants(sys: &SystemModel, cfg: &CoverConfig, horizon: usize) -> (f64, f64) {
    let mut lambda = f64::INFINITY;
    let mut mu = 0.0f64;
    for n in 1..=horizon {
        let f = sys.map(n);
        for v in &cfg.sets {
            let slopes: Vec<f64> = (0..f.piece_count())
                .filter(|&k| {
                    let span = f.piece_span(k);
                    if v.width() > 0.0 {
                        span.interiors_overlap(v)
                    } else {
                        span.contains(v.lo())
                    }
                })
                .map(|k| f.slope(k))
                .collect();
            let monotone = slopes.iter().all(|&s| s > 0.0) || slopes.iter().all(|&s| s < 0.0);
            let steepest = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            let flattest = slopes.iter().fold(f64::INFINITY, |m, s| m.min(s.abs()));
            mu = mu.max(steepest);
            lambda = lambda.min(if monotone { flattest } else { 0.0 });
        }
    }
    (lambda, mu)
}

/// Exact `λ` and `μ`, cross-checked on `samples` random pairs drawn from the same `V_i`.
pub fn estimate_constants(
    sys: &SystemModel,
    cfg: &CoverConfig,
    samples: usize,
    seed: u64,
) -> Result<SlopeConstants, ExpansionError> {
    if samples < 2 {
        return Err(ExpansionError::TooFewSamples(samples));
    }
    cfg.check_domain(sys)?;
    let horizon = cfg.horizon_for(sys);
    let (lambda, mu) = slope_constants(sys, cfg, horizon);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..samples {
        let n = rng.gen_range(1..=horizon);
        let v = cfg.sets[rng.gen_range(0..cfg.len())];
        let x = rng.gen_range(v.lo()..=v.hi());
        let y = rng.gen_range(v.lo()..=v.hi());
        let f = sys.map(n);
        let d = (x - y).abs();
        let fd = (f.eval(x) - f.eval(y)).abs();
        if fd < lambda * d - SLOPE_SLACK || fd > mu * d + SLOPE_SLACK {
            violations += 1;
        }
    }
    Ok(SlopeConstants {
        lambda,
        mu,
        samples,
        violations,
    })
}
