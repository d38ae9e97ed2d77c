//! Entropy estimates from `(n, ε)`-separated sets under the Bowen metric
//! `d_n(x, y) = max_{j<n} |f_1^j(x) − f_1^j(y)|`.
//!
//! Separated sets are built greedily over a fixed candidate order. Instead of
//! comparing each candidate with every selected point, each selected point
//! blocks its closed Bowen ball, computed exactly by pulling the ball of the
//! last iterate back through the maps. A candidate is taken iff it is not blocked.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::interval::{float_key as key, normalize, Interval};
use crate::system::{SystemError, SystemModel};

/// Relative shrink of `ε` so that points exactly `ε` apart count as separated.
pub const SEPARATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntropyError {
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("epsilons must be non-empty and strictly decreasing")]
    EpsilonOrder,
    #[error("grid needs at least 2 intervals, got {0}")]
    GridTooSmall(usize),
    #[error("window needs 1 <= n_min < n_max, got [{n_min}, {n_max}]")]
    InvalidWindow { n_min: usize, n_max: usize },
    #[error("the evaluation set is empty")]
    NoPoints,
    #[error("orbit length must be at least 1")]
    ZeroLength,
    #[error(transparent)]
    System(#[from] SystemError),
}

/// `d_n(x, y)`.
pub fn bowen_distance(sys: &SystemModel, x: f64, y: f64, n: usize) -> Result<f64, EntropyError> {
    if n == 0 {
        return Err(EntropyError::ZeroLength);
    }
    sys.check_point(x)?;
    sys.check_point(y)?;
    let (mut a, mut b) = (x, y);
    let mut d = (a - b).abs();
    for j in 1..n {
        a = sys.map(j).eval(a);
        b = sys.map(j).eval(b);
        d = d.max((a - b).abs());
    }
    Ok(d)
}

/// Points the greedy pass visits, already in visiting order.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidates {
    points: Vec<f64>,
}

impl Candidates {
    /// The `intervals + 1` points `a + (b − a)·i/intervals`, coarse dyadic
    /// levels first and left to right within a level.
    ///
    /// Indices are ordered by decreasing number of trailing zeros, so the grid
    /// with `2·intervals` visits the old points in the same relative order
    /// before any new one. Doubling the grid therefore never lowers a count.
    pub fn grid(domain: Interval, intervals: usize) -> Result<Self, EntropyError> {
        if intervals < 2 {
            return Err(EntropyError::GridTooSmall(intervals));
        }
        let mut idx: Vec<usize> = (0..=intervals).collect();
        idx.sort_by_key(|&i| {
            let tz = if i == 0 { u32::MAX } else { i.trailing_zeros() };
            (std::cmp::Reverse(tz), i)
        });
        let (a, w, g) = (domain.lo(), domain.width(), intervals as f64);
        let points = idx
            .into_iter()
            .map(|i| (a + w * (i as f64 / g)).min(domain.hi()))
            .collect();
        Ok(Candidates { points })
    }

    /// Arbitrary points, visited in ascending order.
    pub fn points(mut points: Vec<f64>) -> Result<Self, EntropyError> {
        if points.is_empty() {
            return Err(EntropyError::NoPoints);
        }
        if let Some(&x) = points.iter().find(|x| !x.is_finite()) {
            return Err(SystemError::OutOfDomain(x).into());
        }
        points.sort_by(f64::total_cmp);
        Ok(Candidates { points })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Disjoint closed intervals keyed by left endpoint.
#[derive(Default)]
struct Blocked {
    parts: BTreeMap<i64, (f64, f64)>,
}

impl Blocked {
    fn contains(&self, x: f64) -> bool {
        self.parts
            .range(..=key(x))
            .next_back()
            .is_some_and(|(_, &(_, hi))| x <= hi)
    }

    fn insert(&mut self, iv: Interval) {
        let (mut lo, mut hi) = (iv.lo(), iv.hi());
        if let Some((&k, &(l, h))) = self.parts.range(..=key(lo)).next_back() {
            if h >= lo {
                self.parts.remove(&k);
                lo = l;
                hi = hi.max(h);
            }
        }
        let absorbed: Vec<i64> = self
            .parts
            .range(key(lo)..=key(hi))
            .map(|(&k, _)| k)
            .collect();
        for k in absorbed {
            let (_, h) = self.parts.remove(&k).unwrap();
            hi = hi.max(h);
        }
        self.parts.insert(key(lo), (lo, hi));
    }
}

/// Closed Bowen ball `{y : d_n(x, y) <= radius}` as disjoint intervals.
pub fn bowen_ball(sys: &SystemModel, x: f64, n: usize, radius: f64) -> Vec<Interval> {
    let dom = sys.domain();
    let mut orbit = Vec::with_capacity(n);
    let mut y = x;
    for j in 0..n {
        orbit.push(y);
        if j + 1 < n {
            y = sys.map(j + 1).eval(y);
        }
    }
    let window =
        |c: f64| Interval::spanning((c - radius).max(dom.lo()), (c + radius).min(dom.hi()));
    let mut ball = vec![window(orbit[n - 1])];
    for j in (0..n - 1).rev() {
        let f = sys.map(j + 1);
        let w = window(orbit[j]);
        ball = normalize(ball.iter().flat_map(|t| f.preimage(t, &w)).collect());
    }
    ball
}

/// Greedy maximal `(n, ε)`-separated subset of the candidates, in selection order.
///
/// Two points are separated when `d_n > ε·(1 − SEPARATION_SLACK)`.
pub fn separated_set(
    sys: &SystemModel,
    n: usize,
    epsilon: f64,
    candidates: &Candidates,
) -> Result<Vec<f64>, EntropyError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(EntropyError::InvalidEpsilon(epsilon));
    }
    if n == 0 {
        return Err(EntropyError::ZeroLength);
    }
    if let Some(&x) = candidates
        .points
        .iter()
        .find(|x| !sys.domain().contains(**x))
    {
        return Err(SystemError::OutOfDomain(x).into());
    }
    let radius = epsilon * (1.0 - SEPARATION_SLACK);
    let mut blocked = Blocked::default();
    let mut chosen = Vec::new();
    for &x in &candidates.points {
        if blocked.contains(x) {
            continue;
        }
        chosen.push(x);
        for part in bowen_ball(sys, x, n, radius) {
            blocked.insert(part);
        }
    }
    Ok(chosen)
}

pub fn separated_count(
    sys: &SystemModel,
    n: usize,
    epsilon: f64,
    candidates: &Candidates,
) -> Result<usize, EntropyError> {
    separated_set(sys, n, epsilon, candidates).map(|s| s.len())
}

/// Where the separated sets are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    /// Uniform grid over the domain with this many intervals.
    Grid(usize),
    /// A supplied point set, e.g. coded points of an invariant subsystem.
    Points(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    pub n_min: usize,
    pub n_max: usize,
    /// Strictly decreasing.
    pub epsilons: Vec<f64>,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub count: usize,
    pub log_count_over_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthCurve {
    pub epsilon: f64,
    pub rows: Vec<GrowthRow>,
    /// Least-squares slope of `ln count` against `n` over the window.
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub curves: Vec<GrowthCurve>,
    /// Largest slope over the `ε` sweep.
    pub h_est: f64,
    /// Every count was 1, so the estimate carries no information.
    pub degenerate: bool,
    /// Counts come from a supplied point set rather than the whole domain.
    pub restricted: bool,
}

impl EntropyEstimate {
    pub fn per_eps_slopes(&self) -> Vec<(f64, f64)> {
        self.curves.iter().map(|c| (c.epsilon, c.slope)).collect()
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

pub fn estimate_entropy(
    sys: &SystemModel,
    cfg: &EstimateConfig,
) -> Result<EntropyEstimate, EntropyError> {
    if cfg.n_min == 0 || cfg.n_min >= cfg.n_max {
        return Err(EntropyError::InvalidWindow {
            n_min: cfg.n_min,
            n_max: cfg.n_max,
        });
    }
    if cfg.epsilons.is_empty() || cfg.epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(EntropyError::EpsilonOrder);
    }
    if let Some(&e) = cfg.epsilons.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(EntropyError::InvalidEpsilon(e));
    }
    let (candidates, restricted) = match &cfg.evaluation {
        Evaluation::Grid(g) => (Candidates::grid(sys.domain(), *g)?, false),
        Evaluation::Points(p) => (Candidates::points(p.clone())?, true),
    };
    let ns: Vec<usize> = (cfg.n_min..=cfg.n_max).collect();
    let jobs: Vec<(usize, usize)> = (0..cfg.epsilons.len())
        .flat_map(|e| ns.iter().map(move |&n| (e, n)))
        .collect();
    let counts = jobs
        .par_iter()
        .map(|&(e, n)| separated_count(sys, n, cfg.epsilons[e], &candidates))
        .collect::<Result<Vec<_>, _>>()?;

    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let curves: Vec<GrowthCurve> = cfg
        .epsilons
        .iter()
        .zip(counts.chunks(ns.len()))
        .map(|(&epsilon, chunk)| {
            let rows: Vec<GrowthRow> = ns
                .iter()
                .zip(chunk)
                .map(|(&n, &count)| GrowthRow {
                    n,
                    count,
                    log_count_over_n: (count as f64).ln() / n as f64,
                })
                .collect();
            let ys: Vec<f64> = chunk.iter().map(|&c| (c as f64).ln()).collect();
            GrowthCurve {
                epsilon,
                rows,
                slope: ls_slope(&xs, &ys),
            }
        })
        .collect();
    let degenerate = counts.iter().all(|&c| c == 1);
    let h_est = if degenerate {
        0.0
    } else {
        curves
            .iter()
            .map(|c| c.slope)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    Ok(EntropyEstimate {
        curves,
        h_est,
        degenerate,
        restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Extension, PiecewiseLinearMap};

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    fn tent(s: f64) -> SystemModel {
        SystemModel::tent_family(&[s], Extension::ConstantTail).unwrap()
    }

    fn identity() -> SystemModel {
        SystemModel::autonomous(PiecewiseLinearMap::identity(unit())).unwrap()
    }

    #[test]
    fn bowen_distance_examples() {
        assert_eq!(
            bowen_distance(&tent(2.0), 0.1, 0.3, 1).unwrap(),
            (0.1f64 - 0.3).abs()
        );
        assert_eq!(
            bowen_distance(&identity(), 0.1, 0.3, 9).unwrap(),
            (0.1f64 - 0.3).abs()
        );
        let d = bowen_distance(&tent(2.0), 0.1, 0.2, 2).unwrap();
        assert!((d - 0.2).abs() < 1e-15);
        assert!(bowen_distance(&tent(2.0), 0.1, 1.2, 2).is_err());
        assert!(bowen_distance(&tent(2.0), 0.1, 0.2, 0).is_err());
    }

    #[test]
    fn grid_order_is_dyadic() {
        let c = Candidates::grid(unit(), 4).unwrap();
        assert_eq!(c.as_slice(), &[0.0, 1.0, 0.5, 0.25, 0.75]);
        let c = Candidates::grid(unit(), 10).unwrap();
        assert_eq!(c.len(), 11);
        assert!(Candidates::grid(unit(), 1).is_err());
    }

    #[test]
    fn identity_counts_tenths() {
        let c = Candidates::grid(unit(), 10).unwrap();
        for n in [1, 3, 7] {
            assert_eq!(separated_count(&identity(), n, 0.1, &c).unwrap(), 11);
        }
    }

    #[test]
    fn ball_matches_direct_distance() {
        let sys = tent(2.0);
        let ball = bowen_ball(&sys, 0.3, 4, 0.1);
        for k in 0..=1000 {
            let y = k as f64 / 1000.0;
            let inside = ball.iter().any(|b| b.contains(y));
            let d = bowen_distance(&sys, 0.3, y, 4).unwrap();
            if (d - 0.1).abs() > 1e-12 {
                assert_eq!(inside, d <= 0.1, "y = {y}, d = {d}");
            }
        }
    }

    #[test]
    fn blocked_set_merges() {
        let mut b = Blocked::default();
        b.insert(Interval::new(0.1, 0.2).unwrap());
        b.insert(Interval::new(0.5, 0.6).unwrap());
        b.insert(Interval::new(0.15, 0.55).unwrap());
        assert_eq!(b.parts.len(), 1);
        assert!(b.contains(0.3) && b.contains(0.6) && !b.contains(0.61) && !b.contains(0.05));
    }

    #[test]
    fn estimate_identity_is_flat() {
        let cfg = EstimateConfig {
            n_min: 2,
            n_max: 8,
            epsilons: vec![0.1, 0.05],
            evaluation: Evaluation::Grid(1000),
        };
        let est = estimate_entropy(&identity(), &cfg).unwrap();
        assert!(est.h_est.abs() < 1e-12);
        assert!(!est.degenerate && !est.restricted);
    }

    #[test]
    fn estimate_flags_degenerate_window() {
        let cfg = EstimateConfig {
            n_min: 1,
            n_max: 3,
            epsilons: vec![2.0],
            evaluation: Evaluation::Grid(16),
        };
        let est = estimate_entropy(&identity(), &cfg).unwrap();
        assert!(est.degenerate);
        assert_eq!(est.h_est, 0.0);
    }

    #[test]
    fn estimate_rejects_bad_config() {
        let base = EstimateConfig {
            n_min: 3,
            n_max: 3,
            epsilons: vec![0.1],
            evaluation: Evaluation::Grid(16),
        };
        assert!(matches!(
            estimate_entropy(&identity(), &base),
            Err(EntropyError::InvalidWindow { .. })
        ));
        let cfg = EstimateConfig {
            n_max: 5,
            epsilons: vec![0.1, 0.2],
            ..base.clone()
        };
        assert_eq!(
            estimate_entropy(&identity(), &cfg),
            Err(EntropyError::EpsilonOrder)
        );
        let cfg = EstimateConfig {
            n_max: 5,
            epsilons: vec![-0.1],
            ..base
        };
        assert_eq!(
            estimate_entropy(&identity(), &cfg),
            Err(EntropyError::InvalidEpsilon(-0.1))
        );
    }

    #[test]
    fn ls_slope_of_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x + 1.0).collect();
        assert!((ls_slope(&xs, &ys) - 0.5).abs() < 1e-15);
    }
}
