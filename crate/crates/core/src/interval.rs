//! Closed real intervals and finite unions of them.
//!
//! Everything the covering checks and the nested refinements manipulate is a
//! finite union of closed intervals, kept in a normalized form: sorted by left
//! endpoint with touching or overlapping components merged.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoints must be finite, got [{0}, {1}]")]
    NotFinite(f64, f64),
    #[error("interval [{0}, {1}] has lo > hi")]
    Reversed(f64, f64),
}

/// A closed interval `[lo, hi]` with `lo <= hi`. Degenerate intervals (points) are allowed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, IntervalError> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(IntervalError::NotFinite(lo, hi));
        }
        if lo > hi {
            return Err(IntervalError::Reversed(lo, hi));
        }
        Ok(Interval { lo, hi })
    }

    /// Hull of two values in either order.
    pub(crate) fn spanning(a: f64, b: f64) -> Self {
        debug_assert!(a.is_finite() && b.is_finite());
        Interval {
            lo: a.min(b),
            hi: a.max(b),
        }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Euclidean distance between the two sets; zero when they meet.
    pub fn distance(&self, other: &Interval) -> f64 {
        if self.hi < other.lo {
            other.lo - self.hi
        } else if other.hi < self.lo {
            self.lo - other.hi
        } else {
            0.0
        }
    }

    /// True when the open interiors intersect. Sets that only share an endpoint do not.
    pub fn interiors_overlap(&self, other: &Interval) -> bool {
        self.lo.max(other.lo) < self.hi.min(other.hi)
    }
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = IntervalError;

    fn try_from(v: [f64; 2]) -> Result<Self, Self::Error> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(iv: Interval) -> Self {
        [iv.lo, iv.hi]
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Order-preserving integer key of a finite float: `a < b` iff `key(a) < key(b)`,
/// and consecutive keys are adjacent floats.
pub(crate) fn float_key(x: f64) -> i64 {
    let b = x.to_bits() as i64;
    b ^ ((((b >> 63) as u64) >> 1) as i64)
}

pub(crate) fn from_float_key(k: i64) -> f64 {
    f64::from_bits((k ^ ((((k >> 63) as u64) >> 1) as i64)) as u64)
}

/// Smallest `x` in `[lo, hi]` with `pred(x)`, for `pred` monotone from false to
/// true. The search gallops from `guess` and then bisects over adjacent floats.
pub(crate) fn first_true(lo: f64, hi: f64, guess: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    if !pred(hi) {
        return None;
    }
    let (l, h) = (float_key(lo), float_key(hi));
    let g = float_key(guess.clamp(lo, hi));
    // `bad` is false (or the sentinel l - 1), `good` is true.
    let (mut bad, mut good);
    if pred(from_float_key(g)) {
        good = g;
        let mut step = 1i64;
        loop {
            let t = good.saturating_sub(step);
            if t < l {
                bad = l - 1;
                break;
            }
            if pred(from_float_key(t)) {
                good = t;
                step = step.saturating_mul(2);
            } else {
                bad = t;
                break;
            }
        }
    } else {
        bad = g;
        let mut step = 1i64;
        loop {
            let t = bad.saturating_add(step);
            if t >= h {
                good = h;
                break;
            }
            if pred(from_float_key(t)) {
                good = t;
                break;
            }
            bad = t;
            step = step.saturating_mul(2);
        }
    }
    while good - bad > 1 {
        let mid = bad + (good - bad) / 2;
        if pred(from_float_key(mid)) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some(from_float_key(good))
}

/// Largest `x` in `[lo, hi]` with `pred(x)`, for `pred` monotone from true to false.
pub(crate) fn last_true(lo: f64, hi: f64, guess: f64, pred: impl Fn(f64) -> bool) -> Option<f64> {
    if !pred(lo) {
        return None;
    }
    match first_true(lo, hi, guess, |x| !pred(x)) {
        Some(x) => Some(from_float_key(float_key(x) - 1)),
        None => Some(hi),
    }
}

/// Sort and merge into maximal disjoint closed intervals.
pub fn normalize(mut parts: Vec<Interval>) -> Vec<Interval> {
    if parts.len() < 2 {
        return parts;
    }
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
    for iv in parts {
        match merged.last_mut() {
            Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
            _ => merged.push(iv),
        }
    }
    merged
}

/// Convex hull of a union; `None` for the empty union.
pub fn hull_of(parts: &[Interval]) -> Option<Interval> {
    let first = parts.first()?;
    Some(parts[1..].iter().fold(*first, |acc, iv| acc.hull(iv)))
}

/// Whether the union `outer` contains every point of `inner` (both normalized).
pub fn union_contains(outer: &[Interval], inner: &[Interval]) -> bool {
    inner
        .iter()
        .all(|iv| outer.iter().any(|o| o.contains_interval(iv)))
}
