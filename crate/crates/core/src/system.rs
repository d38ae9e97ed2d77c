//! Non-autonomous systems `x_{n+1} = f_n(x_n)` of piecewise-linear interval maps.
//!
//! Restricting to piecewise-linear maps makes images and preimages of
//! intervals computable in closed form per linear piece, so the covering
//! relations checked downstream are decided, not sampled. Steps are 1-based:
//! `map(1)` is `f_1`.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::interval::{first_true, last_true, normalize, Interval, IntervalError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SystemError {
    #[error("a piecewise-linear map needs at least two breakpoints")]
    TooFewBreakpoints,
    #[error("{breakpoints} breakpoints but {values} values")]
    LengthMismatch { breakpoints: usize, values: usize },
    #[error("breakpoints must be finite and strictly increasing (index {0})")]
    BreakpointOrder(usize),
    #[error("value {value} of step {step} lies outside the domain")]
    ValueOutOfDomain { step: usize, value: f64 },
    #[error("step {step} is defined on [{lo}, {hi}], not on the system domain")]
    DomainMismatch { step: usize, lo: f64, hi: f64 },
    #[error("a system needs at least one step")]
    NoSteps,
    #[error("domain must satisfy a < b")]
    DegenerateDomain,
    #[error("point {0} lies outside the domain")]
    OutOfDomain(f64),
    #[error("interval {0} is not contained in the domain")]
    IntervalOutOfDomain(Interval),
    #[error("step index must be at least 1")]
    ZeroStep,
    #[error("invalid map family: {0}")]
    InvalidFamily(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("malformed system JSON: {0}")]
    Parse(String),
}

/// A continuous map given by linear interpolation between breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearMap {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// Serialized form of one map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSpec {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewiseLinearMap {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, SystemError> {
        if breakpoints.len() != values.len() {
            return Err(SystemError::LengthMismatch {
                breakpoints: breakpoints.len(),
                values: values.len(),
            });
        }
        if breakpoints.len() < 2 {
            return Err(SystemError::TooFewBreakpoints);
        }
        if let Some(k) = breakpoints.iter().position(|b| !b.is_finite()) {
            return Err(SystemError::BreakpointOrder(k));
        }
        if let Some(k) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
            return Err(SystemError::BreakpointOrder(k + 1));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(SystemError::ValueOutOfDomain { step: 0, value: v });
        }
        let slopes = breakpoints
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .collect();
        Ok(PiecewiseLinearMap {
            breakpoints,
            values,
            slopes,
        })
    }

    pub fn identity(domain: Interval) -> Self {
        Self::new(
            vec![domain.lo(), domain.hi()],
            vec![domain.lo(), domain.hi()],
        )
        .expect("a < b domain")
    }

    /// `x ↦ min(s·min(x, 1−x), 1)` on `[0, 1]`.
    pub fn clipped_tent(slope: f64) -> Result<Self, SystemError> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(SystemError::InvalidFamily(format!(
                "tent slope must be positive, got {slope}"
            )));
        }
        if slope > 2.0 {
            // (s-1)/s rather than 1-1/s keeps 2/3 bit-identical to the literal for s = 3.
            Self::new(
                vec![0.0, 1.0 / slope, 0.5, (slope - 1.0) / slope, 1.0],
                vec![0.0, 1.0, 1.0, 1.0, 0.0],
            )
        } else {
            Self::new(vec![0.0, 0.5, 1.0], vec![0.0, slope / 2.0, 0.0])
        }
    }

    /// A unimodal map on `[0, 1]` that is affine with slope `±slope` on two
    /// branches of width `branch_width` separated by `gap` and centred at 1/2.
    ///
    /// Each branch is mapped onto the interval of length `slope·branch_width`
    /// centred at 1/2, so both branches cover the hull of the two branches as
    /// long as `slope·branch_width >= 2·branch_width + gap`. The remaining
    /// pieces join `(0, 0)`, the peak `(1/2, 1)` and `(1, 0)`. The branches
    /// are returned by [`PiecewiseLinearMap::horseshoe_branches`].
    pub fn horseshoe(slope: f64, branch_width: f64, gap: f64) -> Result<Self, SystemError> {
        let [left, right] = Self::horseshoe_branches(branch_width, gap)?;
        let reach = slope * branch_width;
        if !(slope > 1.0 && reach <= 1.0) {
            return Err(SystemError::InvalidFamily(format!(
                "horseshoe needs slope > 1 and slope*branch_width <= 1, got {slope}, {branch_width}"
            )));
        }
        if reach < 2.0 * branch_width + gap {
            return Err(SystemError::InvalidFamily(format!(
                "slope {slope} is too small for the branches to cover each other"
            )));
        }
        let lo = 0.5 - 0.5 * reach;
        let hi = 0.5 + 0.5 * reach;
        Self::new(
            vec![0.0, left.lo(), left.hi(), 0.5, right.lo(), right.hi(), 1.0],
            vec![0.0, lo, hi, 1.0, hi, lo, 0.0],
        )
    }

    /// The two expanding branches of [`PiecewiseLinearMap::horseshoe`].
    pub fn horseshoe_branches(branch_width: f64, gap: f64) -> Result<[Interval; 2], SystemError> {
        if !(branch_width > 0.0 && gap > 0.0 && 2.0 * branch_width + gap < 1.0) {
            return Err(SystemError::InvalidFamily(format!(
                "need branch_width > 0, gap > 0 and 2*branch_width + gap < 1, got {branch_width}, {gap}"
            )));
        }
        let left = Interval::new(0.5 - 0.5 * gap - branch_width, 0.5 - 0.5 * gap)?;
        let right = Interval::new(0.5 + 0.5 * gap, 0.5 + 0.5 * gap + branch_width)?;
        Ok([left, right])
    }

    pub fn from_spec(spec: &StepSpec) -> Result<Self, SystemError> {
        Self::new(spec.breakpoints.clone(), spec.values.clone())
    }

    pub fn to_spec(&self) -> StepSpec {
        StepSpec {
            breakpoints: self.breakpoints.clone(),
            values: self.values.clone(),
        }
    }

    pub fn domain(&self) -> Interval {
        Interval::spanning(self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.slopes.len()
    }

    /// Span of piece `k`.
    pub fn piece_span(&self, k: usize) -> Interval {
        Interval::spanning(self.breakpoints[k], self.breakpoints[k + 1])
    }

    pub fn slope(&self, k: usize) -> f64 {
        self.slopes[k]
    }

    fn piece_of(&self, x: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        k.saturating_sub(1).min(self.slopes.len() - 1)
    }

    /// Evaluates on piece `k`; exact at breakpoints and monotone in `x` on the closed piece.
    #[inline]
    fn eval_on(&self, k: usize, x: f64) -> f64 {
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        if x == self.breakpoints[k] {
            y0
        } else if x == self.breakpoints[k + 1] {
            y1
        } else {
            (y0 + (x - self.breakpoints[k]) * self.slopes[k]).clamp(y0.min(y1), y0.max(y1))
        }
    }

    /// `f(x)`; the caller guarantees `x` lies in the domain.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        self.eval_on(self.piece_of(x), x)
    }

    /// Exact image of `j`: the hull of the values at its endpoints and interior breakpoints.
    pub fn image(&self, j: &Interval) -> Interval {
        let mut lo = self.eval(j.lo()).min(self.eval(j.hi()));
        let mut hi = self.eval(j.lo()).max(self.eval(j.hi()));
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            if j.lo() < *b && *b < j.hi() {
                lo = lo.min(*v);
                hi = hi.max(*v);
            }
        }
        Interval::spanning(lo, hi)
    }

    /// `f^{-1}(target) ∩ within` as maximal disjoint closed intervals.
    ///
    /// Endpoints are the extreme floats of each piece whose computed value
    /// lands in `target`, so membership agrees exactly with [`Self::eval`].
    pub fn preimage(&self, target: &Interval, within: &Interval) -> Vec<Interval> {
        let mut parts = Vec::new();
        for k in 0..self.piece_count() {
            let Some(span) = self.piece_span(k).intersect(within) else {
                continue;
            };
            if let Some(part) = self.preimage_on_piece(k, target, &span) {
                parts.push(part);
            }
        }
        normalize(parts)
    }

    fn preimage_on_piece(&self, k: usize, target: &Interval, span: &Interval) -> Option<Interval> {
        let slope = self.slopes[k];
        if slope == 0.0 {
            return target.contains(self.values[k]).then_some(*span);
        }
        let g = |x: f64| self.eval_on(k, x);
        let (p, q) = (span.lo(), span.hi());
        // Solve on the exact line for a starting guess, then search the floats.
        let solve = |y: f64| (self.breakpoints[k] + (y - self.values[k]) / slope).clamp(p, q);
        let (t_lo, t_hi) = (target.lo(), target.hi());
        let (a, b) = if slope > 0.0 {
            (
                first_true(p, q, solve(t_lo), |x| g(x) >= t_lo)?,
                last_true(p, q, solve(t_hi), |x| g(x) <= t_hi)?,
            )
        } else {
            (
                first_true(p, q, solve(t_hi), |x| g(x) <= t_hi)?,
                last_true(p, q, solve(t_lo), |x| g(x) >= t_lo)?,
            )
        };
        (a <= b).then(|| Interval::spanning(a, b))
    }
}

/// How `f_n` is defined for `n` beyond the listed steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extension {
    /// Cycle through the listed steps.
    Periodic,
    /// Repeat the last step forever.
    ConstantTail,
}

/// The map sequence `{f_n}` on a compact interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    domain: Interval,
    steps: Vec<PiecewiseLinearMap>,
    extension: Extension,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ExplicitSpec {
    domain: Interval,
    extension: Extension,
    steps: Vec<StepSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilySpec {
    family: String,
    slopes: SlopeSchedule,
    #[serde(default)]
    branch_width: Option<f64>,
    #[serde(default)]
    gap: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
struct SlopeSchedule {
    kind: Extension,
    values: Vec<f64>,
}

impl SystemModel {
    pub fn new(
        domain: Interval,
        steps: Vec<PiecewiseLinearMap>,
        extension: Extension,
    ) -> Result<Self, SystemError> {
        if domain.width() <= 0.0 {
            return Err(SystemError::DegenerateDomain);
        }
        if steps.is_empty() {
            return Err(SystemError::NoSteps);
        }
        for (idx, step) in steps.iter().enumerate() {
            let d = step.domain();
            if d != domain {
                return Err(SystemError::DomainMismatch {
                    step: idx + 1,
                    lo: d.lo(),
                    hi: d.hi(),
                });
            }
            if let Some(&value) = step.values.iter().find(|v| !domain.contains(**v)) {
                return Err(SystemError::ValueOutOfDomain {
                    step: idx + 1,
                    value,
                });
            }
        }
        Ok(SystemModel {
            domain,
            steps,
            extension,
        })
    }

    /// An autonomous system: one map repeated forever.
    pub fn autonomous(map: PiecewiseLinearMap) -> Result<Self, SystemError> {
        Self::new(map.domain(), vec![map], Extension::ConstantTail)
    }

    /// Clipped tent maps with the given slope schedule on `[0, 1]`.
    pub fn tent_family(slopes: &[f64], extension: Extension) -> Result<Self, SystemError> {
        let steps = slopes
            .iter()
            .map(|&s| PiecewiseLinearMap::clipped_tent(s))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(Interval::new(0.0, 1.0)?, steps, extension)
    }

    /// Horseshoe maps sharing one pair of branches, with the given slope schedule.
    pub fn horseshoe_family(
        slopes: &[f64],
        branch_width: f64,
        gap: f64,
        extension: Extension,
    ) -> Result<Self, SystemError> {
        let steps = slopes
            .iter()
            .map(|&s| PiecewiseLinearMap::horseshoe(s, branch_width, gap))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(Interval::new(0.0, 1.0)?, steps, extension)
    }

    /// Parses either the explicit form or a `{"family": ...}` generator.
    pub fn from_json(text: &str) -> Result<Self, SystemError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| SystemError::Parse(e.to_string()))?;
        if value.get("family").is_some() {
            let spec: FamilySpec =
                serde_json::from_value(value).map_err(|e| SystemError::Parse(e.to_string()))?;
            if spec.slopes.values.is_empty() {
                return Err(SystemError::NoSteps);
            }
            match spec.family.as_str() {
                "tent" => Self::tent_family(&spec.slopes.values, spec.slopes.kind),
                "horseshoe" => {
                    let (Some(w), Some(g)) = (spec.branch_width, spec.gap) else {
                        return Err(SystemError::InvalidFamily(
                            "horseshoe needs branch_width and gap".into(),
                        ));
                    };
                    Self::horseshoe_family(&spec.slopes.values, w, g, spec.slopes.kind)
                }
                other => Err(SystemError::InvalidFamily(format!(
                    "unknown family {other:?}"
                ))),
            }
        } else {
            let spec: ExplicitSpec =
                serde_json::from_value(value).map_err(|e| SystemError::Parse(e.to_string()))?;
            let steps = spec
                .steps
                .iter()
                .map(PiecewiseLinearMap::from_spec)
                .collect::<Result<Vec<_>, _>>()?;
            Self::new(spec.domain, steps, spec.extension)
        }
    }

    /// The explicit form, whatever the system was built from.
    pub fn to_json(&self) -> String {
        let spec = ExplicitSpec {
            domain: self.domain,
            extension: self.extension,
            steps: self.steps.iter().map(PiecewiseLinearMap::to_spec).collect(),
        };
        serde_json::to_string(&spec).expect("plain data serializes")
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn extension(&self) -> Extension {
        self.extension
    }

    pub fn steps(&self) -> &[PiecewiseLinearMap] {
        &self.steps
    }

    /// Number of steps after which the covering conditions repeat: the
    /// period for a periodic extension, the list length for a constant tail.
    pub fn required_horizon(&self) -> usize {
        self.steps.len()
    }

    /// `f_n` for `n >= 1`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn map(&self, n: usize) -> &PiecewiseLinearMap {
        assert!(n >= 1, "steps are 1-based");
        let idx = match self.extension {
            Extension::Periodic => (n - 1) % self.steps.len(),
            Extension::ConstantTail => (n - 1).min(self.steps.len() - 1),
        };
        &self.steps[idx]
    }

    fn check_step(n: usize) -> Result<(), SystemError> {
        if n == 0 {
            Err(SystemError::ZeroStep)
        } else {
            Ok(())
        }
    }

    pub fn check_point(&self, x: f64) -> Result<(), SystemError> {
        if self.domain.contains(x) {
            Ok(())
        } else {
            Err(SystemError::OutOfDomain(x))
        }
    }

    pub fn check_interval(&self, j: &Interval) -> Result<(), SystemError> {
        if self.domain.contains_interval(j) {
            Ok(())
        } else {
            Err(SystemError::IntervalOutOfDomain(*j))
        }
    }

    /// `f_n(x)`.
    pub fn evaluate(&self, n: usize, x: f64) -> Result<f64, SystemError> {
        Self::check_step(n)?;
        self.check_point(x)?;
        Ok(self.map(n).eval(x))
    }

    /// `f_i^n(x) = f_{i+n-1} ∘ … ∘ f_i (x)`, with `f_i^0` the identity.
    pub fn compose_orbit(&self, i: usize, n: usize, x: f64) -> Result<f64, SystemError> {
        Self::check_step(i)?;
        self.check_point(x)?;
        Ok((i..i + n).fold(x, |y, k| self.map(k).eval(y)))
    }

    /// `f_1^j(x)` for `j = 0..len`.
    pub fn orbit(&self, x: f64, len: usize) -> Result<Vec<f64>, SystemError> {
        self.check_point(x)?;
        let mut out = Vec::with_capacity(len);
        let mut y = x;
        for j in 0..len {
            out.push(y);
            if j + 1 < len {
                y = self.map(j + 1).eval(y);
            }
        }
        Ok(out)
    }

    /// Exact `f_n(J)`. Continuity makes the image an interval.
    pub fn image_of_interval(&self, n: usize, j: &Interval) -> Result<Interval, SystemError> {
        Self::check_step(n)?;
        self.check_interval(j)?;
        Ok(self.map(n).image(j))
    }

    /// `f_n^{-1}(target) ∩ within` as maximal disjoint closed intervals.
    pub fn preimage_in_interval(
        &self,
        n: usize,
        target: &Interval,
        within: &Interval,
    ) -> Result<Vec<Interval>, SystemError> {
        Self::check_step(n)?;
        self.check_interval(target)?;
        self.check_interval(within)?;
        Ok(self.map(n).preimage(target, within))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn tent2() -> SystemModel {
        SystemModel::tent_family(&[2.0], Extension::ConstantTail).unwrap()
    }

    fn identity() -> SystemModel {
        SystemModel::autonomous(PiecewiseLinearMap::identity(iv(0.0, 1.0))).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(tent2().evaluate(1, 0.25).unwrap(), 0.5);
        assert_eq!(identity().evaluate(3, 0.37).unwrap(), 0.37);
        let clipped = PiecewiseLinearMap::new(
            vec![0.0, 1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0],
            vec![0.0, 1.0, 1.0, 1.0, 0.0],
        )
        .unwrap();
        assert_eq!(clipped.eval(0.4), 1.0);
        assert_eq!(clipped, PiecewiseLinearMap::clipped_tent(3.0).unwrap());
        assert_eq!(tent2().evaluate(1, 1.5), Err(SystemError::OutOfDomain(1.5)));
        assert_eq!(tent2().evaluate(0, 0.5), Err(SystemError::ZeroStep));
    }

    #[test]
    fn compose_examples() {
        let t = tent2();
        assert_eq!(t.compose_orbit(1, 0, 0.3).unwrap(), 0.3);
        assert!((t.compose_orbit(1, 2, 0.2).unwrap() - 0.8).abs() < 1e-15);
        let p = SystemModel::tent_family(&[2.5, 3.0], Extension::Periodic).unwrap();
        assert_eq!(
            p.compose_orbit(2, 1, 0.1).unwrap(),
            p.evaluate(2, 0.1).unwrap()
        );
        assert_eq!(t.orbit(0.2, 3).unwrap().len(), 3);
    }

    #[test]
    fn image_examples() {
        let t = tent2();
        assert_eq!(t.image_of_interval(1, &iv(0.0, 0.5)).unwrap(), iv(0.0, 1.0));
        assert_eq!(
            t.image_of_interval(1, &iv(0.25, 0.75)).unwrap(),
            iv(0.5, 1.0)
        );
        assert_eq!(
            identity().image_of_interval(1, &iv(0.2, 0.6)).unwrap(),
            iv(0.2, 0.6)
        );
        assert!(t.image_of_interval(1, &iv(0.5, 1.5)).is_err());
    }

    #[test]
    fn preimage_examples() {
        let t = tent2();
        let pre = t
            .preimage_in_interval(1, &iv(0.0, 0.5), &iv(0.0, 1.0))
            .unwrap();
        assert_eq!(pre, vec![iv(0.0, 0.25), iv(0.75, 1.0)]);
        let id = identity();
        assert_eq!(
            id.preimage_in_interval(1, &iv(0.2, 0.6), &iv(0.5, 0.9))
                .unwrap(),
            vec![iv(0.5, 0.6)]
        );
        assert!(id
            .preimage_in_interval(1, &iv(0.2, 0.3), &iv(0.5, 0.9))
            .unwrap()
            .is_empty());
        assert!(t
            .preimage_in_interval(1, &iv(2.0, 3.0), &iv(0.0, 1.0))
            .is_err());
    }

    #[test]
    fn preimage_of_plateau_value_is_the_plateau() {
        let s = SystemModel::tent_family(&[3.0], Extension::ConstantTail).unwrap();
        let pre = s
            .preimage_in_interval(1, &iv(1.0, 1.0), &iv(0.0, 1.0))
            .unwrap();
        assert_eq!(pre, vec![iv(1.0 / 3.0, 2.0 / 3.0)]);
    }

    #[test]
    fn periodic_and_constant_tail_extension() {
        let p = SystemModel::tent_family(&[2.5, 3.0], Extension::Periodic).unwrap();
        assert_eq!(p.map(1), p.map(3));
        assert_eq!(p.map(2), p.map(10));
        let c = SystemModel::tent_family(&[2.5, 3.0], Extension::ConstantTail).unwrap();
        assert_eq!(c.map(2), c.map(7));
        assert_ne!(c.map(1), c.map(7));
    }

    #[test]
    fn rejects_bad_maps() {
        assert_eq!(
            PiecewiseLinearMap::new(vec![0.0, 0.5, 0.5], vec![0.0, 1.0, 0.0]),
            Err(SystemError::BreakpointOrder(2))
        );
        assert!(PiecewiseLinearMap::new(vec![0.0], vec![0.0]).is_err());
        let escaping = PiecewiseLinearMap::new(vec![0.0, 0.5, 1.0], vec![0.0, 1.5, 0.0]).unwrap();
        assert!(matches!(
            SystemModel::autonomous(escaping),
            Err(SystemError::ValueOutOfDomain { step: 1, .. })
        ));
        let shorter = PiecewiseLinearMap::identity(iv(0.0, 0.5));
        assert!(matches!(
            SystemModel::new(iv(0.0, 1.0), vec![shorter], Extension::Periodic),
            Err(SystemError::DomainMismatch { step: 1, .. })
        ));
    }

    #[test]
    fn json_forms() {
        let explicit = r#"{"domain":[0,1],"extension":"periodic",
            "steps":[{"breakpoints":[0,0.5,1],"values":[0,1,0]}]}"#;
        let s = SystemModel::from_json(explicit).unwrap();
        assert_eq!(s, tent2_periodic());
        let fam = r#"{"family":"tent","slopes":{"kind":"periodic","values":[2.0]}}"#;
        assert_eq!(SystemModel::from_json(fam).unwrap(), tent2_periodic());
        let back = SystemModel::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let hs = r#"{"family":"horseshoe","slopes":{"kind":"periodic","values":[2.4,3.0]},
            "branch_width":0.3,"gap":0.1}"#;
        assert_eq!(SystemModel::from_json(hs).unwrap().steps().len(), 2);
        assert!(SystemModel::from_json(
            r#"{"family":"logistic","slopes":{"kind":"periodic","values":[2]}}"#
        )
        .is_err());
        assert!(SystemModel::from_json("{").is_err());
    }

    fn tent2_periodic() -> SystemModel {
        SystemModel::tent_family(&[2.0], Extension::Periodic).unwrap()
    }

    #[test]
    fn horseshoe_geometry() {
        let f = PiecewiseLinearMap::horseshoe(2.4, 0.3, 0.1).unwrap();
        let [l, r] = PiecewiseLinearMap::horseshoe_branches(0.3, 0.1).unwrap();
        assert!((l.lo() - 0.15).abs() < 1e-15 && (r.hi() - 0.85).abs() < 1e-15);
        let hull = l.hull(&r);
        assert!(f.image(&l).contains_interval(&hull));
        assert!(f.image(&r).contains_interval(&hull));
        assert!((f.slope(1) - 2.4).abs() < 1e-12);
        assert!((f.slope(4) + 2.4).abs() < 1e-12);
        assert!(PiecewiseLinearMap::horseshoe(2.0, 0.3, 0.1).is_err());
        assert!(PiecewiseLinearMap::horseshoe(4.0, 0.3, 0.1).is_err());
    }
}
