//! Coding maps between the subshift and the system.
//!
//! `π_n(α)` is the point whose orbit from time `n` visits `V_{a_0}, V_{a_1}, …`.
//! It is the limit of the nested sets `V_α^{m,n}`, which are computed exactly
//! by pulling `V_{a_m}` back one step at a time. The itinerary map goes the
//! other way, reading off which `V_i` each iterate lies in.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::expansion::{verify_expansion, CoverConfig, ExpansionError, ExpansionReport};
use crate::interval::{hull_of, normalize, Interval};
use crate::subshift::SymbolSequence;
use crate::system::{SystemError, SystemModel};
use crate::transition::{MatrixError, TransitionMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodingError {
    #[error(
        "the system is not coupled-expanding for this cover and matrix ({witnesses} witnesses)"
    )]
    NotCoupledExpanding { witnesses: usize },
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("level {0} of the refinement is empty")]
    EmptyLevel(usize),
    #[error("refinements stopped contracting (lambda = {lambda}, gave up at depth {depth})")]
    NoContraction { lambda: f64, depth: usize },
    #[error("target radius must be positive and finite, got {0}")]
    InvalidRadius(f64),
    #[error("the sequence is over a different transition matrix")]
    MatrixMismatch,
    #[error("iterate {step} = {value} lies on the shared boundary of two sets")]
    AmbiguousMembership { step: usize, value: f64 },
}

/// The levels `V_α^{0,n} ⊇ V_α^{1,n} ⊇ …` and their diameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NestedRefinement {
    pub alpha: String,
    pub start: usize,
    pub levels: Vec<Vec<Interval>>,
    /// Hull width of each level.
    pub diameters: Vec<f64>,
}

/// An enclosure `[value − radius, value + radius]` of `π_n(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodedPoint {
    pub value: f64,
    pub radius: f64,
    pub depth: usize,
}

/// Symbols (0-based) of the sets visited by an orbit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Itinerary {
    Word(Vec<usize>),
    /// The iterate with this index lies in no `V_i`.
    Undefined(usize),
}

impl fmt::Display for Itinerary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Itinerary::Word(w) => {
                let parts: Vec<String> = w.iter().map(|s| (s + 1).to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            Itinerary::Undefined(k) => write!(f, "undefined at {k}"),
        }
    }
}

/// `f_n^k(x)` lands in `V_{s_k}` for `k < len`, or the first `k` where it lands in none.
///
/// Sets may touch at endpoints; an iterate landing on such a point has no
/// well-defined symbol and is reported as ambiguous.
pub fn itinerary(
    sys: &SystemModel,
    cover: &CoverConfig,
    x: f64,
    n: usize,
    len: usize,
) -> Result<Itinerary, CodingError> {
    if n == 0 {
        return Err(SystemError::ZeroStep.into());
    }
    sys.check_point(x)?;
    let mut word = Vec::with_capacity(len);
    let mut y = x;
    for k in 0..len {
        let mut hits = cover
            .sets()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.contains(y));
        match (hits.next(), hits.next()) {
            (Some((s, _)), None) => word.push(s),
            (None, _) => return Ok(Itinerary::Undefined(k)),
            (Some(_), Some(_)) => {
                return Err(CodingError::AmbiguousMembership { step: k, value: y })
            }
        }
        if k + 1 < len {
            y = sys.map(n + k).eval(y);
        }
    }
    Ok(Itinerary::Word(word))
}

/// Codes sequences of `Σ_N^+(A)` into points of a system verified to be `A`-coupled-expanding.
#[derive(Debug, Clone)]
pub struct Coder {
    sys: SystemModel,
    cover: CoverConfig,
    matrix: Arc<TransitionMatrix>,
    report: ExpansionReport,
}

impl Coder {
    pub fn new(
        sys: &SystemModel,
        cover: &CoverConfig,
        matrix: Arc<TransitionMatrix>,
    ) -> Result<Self, CodingError> {
        let report = verify_expansion(sys, cover, &matrix)?;
        if !report.coupled_expanding {
            return Err(CodingError::NotCoupledExpanding {
                witnesses: report.witnesses.len(),
            });
        }
        Ok(Coder {
            sys: sys.clone(),
            cover: cover.clone(),
            matrix,
            report,
        })
    }

    pub fn report(&self) -> &ExpansionReport {
        &self.report
    }

    pub fn matrix(&self) -> &Arc<TransitionMatrix> {
        &self.matrix
    }

    pub fn lambda(&self) -> f64 {
        self.report.lambda_est
    }

    pub fn mu(&self) -> f64 {
        self.report.mu_est
    }

    fn check_alpha(&self, alpha: &SymbolSequence) -> Result<(), CodingError> {
        if alpha.matrix().as_ref() != self.matrix.as_ref() {
            return Err(CodingError::MatrixMismatch);
        }
        Ok(())
    }

    /// `V_α^{m,n}` by backward recursion from `V_{a_m}`.
    fn level_unchecked(
        &self,
        alpha: &SymbolSequence,
        n: usize,
        m: usize,
    ) -> Result<Vec<Interval>, CodingError> {
        let sets = self.cover.sets();
        let mut w = vec![sets[alpha.symbol(m)]];
        for k in (0..m).rev() {
            let f = self.sys.map(n + k);
            let v = sets[alpha.symbol(k)];
            w = normalize(w.iter().flat_map(|t| f.preimage(t, &v)).collect());
            if w.is_empty() {
                return Err(CodingError::EmptyLevel(m));
            }
        }
        Ok(w)
    }

    pub fn level(
        &self,
        alpha: &SymbolSequence,
        n: usize,
        m: usize,
    ) -> Result<Vec<Interval>, CodingError> {
        self.check_alpha(alpha)?;
        if n == 0 {
            return Err(SystemError::ZeroStep.into());
        }
        self.level_unchecked(alpha, n, m)
    }

    pub fn refine(
        &self,
        alpha: &SymbolSequence,
        n: usize,
        depth: usize,
    ) -> Result<NestedRefinement, CodingError> {
        let levels = (0..=depth)
            .map(|m| self.level(alpha, n, m))
            .collect::<Result<Vec<_>, _>>()?;
        let diameters = levels.iter().map(|l| diameter(l)).collect();
        Ok(NestedRefinement {
            alpha: alpha.to_string(),
            start: n,
            levels,
            diameters,
        })
    }

    /// Depth at which `λ^{-m}·|X|` first drops below `radius`, plus one.
    pub fn predicted_depth(&self, radius: f64) -> usize {
        let ratio = self.sys.domain().width() / radius;
        if ratio <= 1.0 {
            return 1;
        }
        (ratio.ln() / self.lambda().ln()).ceil() as usize + 1
    }

    /// Midpoint and half-width of the first level whose diameter is at most `2·radius`.
    pub fn code_point(
        &self,
        alpha: &SymbolSequence,
        n: usize,
        radius: f64,
    ) -> Result<CodedPoint, CodingError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(CodingError::InvalidRadius(radius));
        }
        self.check_alpha(alpha)?;
        if n == 0 {
            return Err(SystemError::ZeroStep.into());
        }
        let lambda = self.lambda();
        if lambda <= 1.0 {
            return Err(CodingError::NoContraction { lambda, depth: 0 });
        }
        let predicted = self.predicted_depth(radius);
        let limit = 10 * predicted;
        let fits = |m: usize| -> Result<Option<Interval>, CodingError> {
            let hull = hull_of(&self.level_unchecked(alpha, n, m)?).expect("levels are nonempty");
            Ok((hull.width() <= 2.0 * radius).then_some(hull))
        };
        // Levels are nested, so fitting is monotone in m: gallop up, then bisect.
        let mut lo = 0usize;
        let mut hi = predicted;
        while fits(hi)?.is_none() {
            if hi == limit {
                return Err(CodingError::NoContraction {
                    lambda,
                    depth: limit,
                });
            }
            lo = hi + 1;
            hi = (hi * 2).min(limit);
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if fits(mid)?.is_some() {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let hull = fits(hi)?.expect("bisection ends on a fitting level");
        Ok(CodedPoint {
            value: hull.midpoint(),
            radius: 0.5 * hull.width(),
            depth: hi,
        })
    }

    /// `|f_n(π_n(α)) − π_{n+1}(σα)|` with both points coded to `radius`.
    pub fn semiconjugacy_residual(
        &self,
        alpha: &SymbolSequence,
        n: usize,
        radius: f64,
    ) -> Result<f64, CodingError> {
        let here = self.code_point(alpha, n, radius)?;
        let next = self.code_point(&alpha.shift(), n + 1, radius)?;
        Ok((self.sys.map(n).eval(here.value) - next.value).abs())
    }

    /// Itinerary of `x` from time `n` over this coder's cover.
    pub fn itinerary(&self, x: f64, n: usize, len: usize) -> Result<Itinerary, CodingError> {
        itinerary(&self.sys, &self.cover, x, n, len)
    }

    /// Coded points `π_n(α)`, one per level-`depth` set `V_α^{depth,n}`, i.e.
    /// one per allowable word of `depth + 1` symbols, each word extended by
    /// its shortest reachable cycle. Sorted ascending.
    pub fn coded_points(
        &self,
        depth: usize,
        n: usize,
        radius: f64,
        cap: usize,
    ) -> Result<Vec<f64>, CodingError> {
        let words = self.matrix.enumerate_allowable_words(depth + 1, cap)?;
        let mut points = words
            .par_iter()
            .map(|w| {
                let alpha = SymbolSequence::from_word(Arc::clone(&self.matrix), w)
                    .expect("enumerated words are allowable");
                self.code_point(&alpha, n, radius).map(|p| p.value)
            })
            .collect::<Result<Vec<_>, _>>()?;
        points.sort_by(f64::total_cmp);
        Ok(points)
    }
}

fn diameter(level: &[Interval]) -> f64 {
    hull_of(level).map_or(0.0, |h| h.width())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{Extension, PiecewiseLinearMap};

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn tent_coder(s: f64, cover: Vec<Interval>) -> Coder {
        let sys = SystemModel::tent_family(&[s], Extension::ConstantTail).unwrap();
        let cfg = CoverConfig::new(cover, None).unwrap();
        Coder::new(&sys, &cfg, Arc::new(TransitionMatrix::full(2))).unwrap()
    }

    fn halves() -> Coder {
        tent_coder(2.0, vec![iv(0.0, 0.5), iv(0.5, 1.0)])
    }

    fn seq(c: &Coder, lit: &str) -> SymbolSequence {
        SymbolSequence::parse(Arc::clone(c.matrix()), lit).unwrap()
    }

    #[test]
    fn refine_examples() {
        let c = halves();
        let r = c.refine(&seq(&c, "1"), 1, 2).unwrap();
        assert_eq!(r.levels[2], vec![iv(0.0, 0.125)]);
        assert_eq!(r.levels[0], vec![iv(0.0, 0.5)]);
        let r = c.refine(&seq(&c, "1,2|1"), 1, 1).unwrap();
        assert_eq!(r.levels[1], vec![iv(0.25, 0.5)]);
        for w in r.diameters.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn code_point_examples() {
        let c = halves();
        let p = c.code_point(&seq(&c, "1"), 1, 1e-10).unwrap();
        assert!(p.value.abs() <= 1e-10 && p.radius <= 1e-10);
        let p = c.code_point(&seq(&c, "1,2"), 1, 1e-10).unwrap();
        assert!((p.value - 0.4).abs() <= 2e-10, "{p:?}");
        let p = c.code_point(&seq(&c, "2"), 1, 1e-10).unwrap();
        assert!((p.value - 2.0 / 3.0).abs() <= 2e-10, "{p:?}");
        assert!(p.depth <= c.predicted_depth(1e-10));
        assert!(matches!(
            c.code_point(&seq(&c, "1"), 1, 0.0),
            Err(CodingError::InvalidRadius(_))
        ));
    }

    #[test]
    fn identity_does_not_contract() {
        let sys = SystemModel::autonomous(PiecewiseLinearMap::identity(iv(0.0, 1.0))).unwrap();
        let cfg = CoverConfig::new(vec![iv(0.0, 0.25), iv(0.5, 1.0)], None).unwrap();
        let c = Coder::new(&sys, &cfg, Arc::new(TransitionMatrix::identity(2))).unwrap();
        let alpha = seq(&c, "2");
        assert!(matches!(
            c.code_point(&alpha, 1, 1e-8),
            Err(CodingError::NoContraction { .. })
        ));
        assert!(matches!(
            c.semiconjugacy_residual(&alpha, 1, 1e-8),
            Err(CodingError::NoContraction { .. })
        ));
        assert!(matches!(
            Coder::new(&sys, &cfg, Arc::new(TransitionMatrix::full(2))),
            Err(CodingError::NotCoupledExpanding { witnesses: 2 })
        ));
    }

    #[test]
    fn itinerary_examples() {
        let c = tent_coder(3.0, vec![iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)]);
        assert_eq!(c.itinerary(0.0, 1, 5).unwrap(), Itinerary::Word(vec![0; 5]));
        assert_eq!(c.itinerary(0.5, 1, 5).unwrap(), Itinerary::Undefined(0));
        // 0.2 -> 0.6, which falls in the gap.
        assert_eq!(c.itinerary(0.2, 1, 5).unwrap(), Itinerary::Undefined(1));
        // 0.3 <-> 0.9 is a 2-cycle of the exact map.
        assert_eq!(
            c.itinerary(0.3, 1, 4).unwrap(),
            Itinerary::Word(vec![0, 1, 0, 1])
        );
        let h = halves();
        assert_eq!(
            h.itinerary(2.0 / 3.0, 1, 4).unwrap(),
            Itinerary::Word(vec![1; 4])
        );
        assert_eq!(
            h.itinerary(0.2, 1, 3).unwrap(),
            Itinerary::Word(vec![0, 0, 1])
        );
        assert_eq!(
            h.itinerary(0.25, 1, 3),
            Err(CodingError::AmbiguousMembership {
                step: 1,
                value: 0.5
            })
        );
    }

    #[test]
    fn residual_at_the_fixed_point_is_within_the_enclosure() {
        let c = tent_coder(3.0, vec![iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)]);
        let r = 1e-8;
        let p = c.code_point(&seq(&c, "1"), 1, r).unwrap();
        assert!(p.value - p.radius <= 0.0 && 0.0 <= p.value + p.radius);
        let res = c.semiconjugacy_residual(&seq(&c, "1"), 1, r).unwrap();
        assert!(res <= (c.mu() + 1.0) * r, "{res}");
        let res = c
            .semiconjugacy_residual(&seq(&c, "1,2,2|1,2"), 3, r)
            .unwrap();
        assert!(res <= (c.mu() + 1.0) * r, "{res}");
    }

    #[test]
    fn coded_points_of_the_middle_thirds() {
        let c = tent_coder(3.0, vec![iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)]);
        let pts = c.coded_points(3, 1, 1e-9, 1 << 10).unwrap();
        assert_eq!(pts.len(), 16);
        assert!(pts.windows(2).all(|w| w[1] - w[0] > 1.0 / 81.0 - 1e-6));
        assert!(c.coded_points(20, 1, 1e-9, 1000).is_err());
    }
}
