//! Entropy bounds tied to the hypotheses they need.
//!
//! A certificate is only issued after every hypothesis has been verified over
//! the full horizon. Otherwise the caller gets a refusal naming the failed
//! conditions, never an unlabeled number.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::expansion::{verify_expansion, CoverConfig, ExpansionError, ExpansionReport};
use crate::system::SystemModel;
use crate::transition::{MatrixError, TransitionMatrix};

/// Tolerance used for `ρ(A)` unless the caller asks otherwise.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// A hypothesis a certificate can fail on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// The checks do not reach every distinct step of the system.
    #[serde(rename = "horizon")]
    Horizon,
    /// `f_n(V_i) ⊇ ⋃_{a_ij=1} V_j`.
    #[serde(rename = "(i)")]
    Expansion,
    /// The sets are pairwise disjoint.
    #[serde(rename = "disjoint")]
    Disjoint,
    /// The sets cover the whole domain.
    #[serde(rename = "covering")]
    Covering,
    /// `f_n(V_i) = ⋃_{a_ij=1} V_j`.
    #[serde(rename = "(i_a)")]
    ExactCovering,
    /// Uniform expansion `λ > 1` on every `V_i`.
    #[serde(rename = "(ii_a)")]
    Expanding,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Horizon => "horizon",
            Condition::Expansion => "(i)",
            Condition::Disjoint => "disjoint",
            Condition::Covering => "covering",
            Condition::ExactCovering => "(i_a)",
            Condition::Expanding => "(ii_a)",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    /// `h(f_{1,∞}) >= log ρ(A) >= log ν`.
    LowerBound,
    /// `h(f_{1,∞}) <= log ρ(A)`.
    UpperBound,
    /// `h(f_{1,∞}, Λ_1) = log ρ(A)`, with the subsystem conjugate to the subshift.
    SubsystemEquality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    /// Computed from the matrix alone; no system was checked.
    MatrixOnly,
}

/// Quantities read off the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatrixBound {
    pub rho: f64,
    pub log_rho: f64,
    pub nu: usize,
    pub log_nu: f64,
}

impl MatrixBound {
    pub fn of(a: &TransitionMatrix, tol: f64) -> Result<Self, MatrixError> {
        let rho = a.spectral_radius(tol)?;
        let nu = a.nu();
        Ok(MatrixBound {
            rho,
            log_rho: rho.ln(),
            nu,
            log_nu: (nu as f64).ln(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub claim: Claim,
    pub status: Status,
    pub bound: MatrixBound,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<ExpansionReport>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("refused: hypothesis {} failed", failed.iter().map(Condition::to_string).collect::<Vec<_>>().join(", "))]
    Refused {
        claim: Claim,
        failed: Vec<Condition>,
        report: Box<ExpansionReport>,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
}

impl BoundError {
    /// The first failed condition, if this is a refusal.
    pub fn condition(&self) -> Option<Condition> {
        match self {
            BoundError::Refused { failed, .. } => failed.first().copied(),
            _ => None,
        }
    }
}

/// `log ρ(A)` and `log ν` without any system.
pub fn matrix_lower_bound(a: &TransitionMatrix, tol: f64) -> Result<Certificate, BoundError> {
    Ok(Certificate {
        claim: Claim::LowerBound,
        status: Status::MatrixOnly,
        bound: MatrixBound::of(a, tol)?,
        report: None,
    })
}

fn settle(
    claim: Claim,
    failed: Vec<Condition>,
    report: ExpansionReport,
    a: &TransitionMatrix,
    tol: f64,
) -> Result<Certificate, BoundError> {
    if !failed.is_empty() {
        return Err(BoundError::Refused {
            claim,
            failed,
            report: Box::new(report),
        });
    }
    Ok(Certificate {
        claim,
        status: Status::Certified,
        bound: MatrixBound::of(a, tol)?,
        report: Some(report),
    })
}

/// Lower bound for a system that is `A`-coupled-expanding in pairwise disjoint closed sets.
pub fn certify_lower_bound(
    sys: &SystemModel,
    cover: &CoverConfig,
    a: &TransitionMatrix,
    tol: f64,
) -> Result<Certificate, BoundError> {
    let report = verify_expansion(sys, cover, a)?;
    let mut failed = Vec::new();
    if !report.complete {
        failed.push(Condition::Horizon);
    }
    if !report.coupled_expanding {
        failed.push(Condition::Expansion);
    }
    if !report.strict {
        failed.push(Condition::Disjoint);
    }
    settle(Claim::LowerBound, failed, report, a, tol)
}

/// Upper bound when the sets cover the domain, map exactly onto the allowed
/// unions, and every step expands uniformly on every set.
pub fn certify_upper_bound(
    sys: &SystemModel,
    cover: &CoverConfig,
    a: &TransitionMatrix,
    tol: f64,
) -> Result<Certificate, BoundError> {
    let report = verify_expansion(sys, cover, a)?;
    let covers_domain = crate::interval::normalize(cover.sets().to_vec()) == vec![sys.domain()];
    let mut failed = Vec::new();
    if !report.complete {
        failed.push(Condition::Horizon);
    }
    if !covers_domain {
        failed.push(Condition::Covering);
    }
    if report.lambda_est <= 1.0 {
        failed.push(Condition::Expanding);
    }
    if covers_domain && !report.exact_covering {
        failed.push(Condition::ExactCovering);
    }
    settle(Claim::UpperBound, failed, report, a, tol)
}

/// Entropy of the coded subsystem: disjoint sets, coupled expansion and `1 < λ <= μ`.
pub fn certify_conjugacy(
    sys: &SystemModel,
    cover: &CoverConfig,
    a: &TransitionMatrix,
    tol: f64,
) -> Result<Certificate, BoundError> {
    let report = verify_expansion(sys, cover, a)?;
    let mut failed = Vec::new();
    if !report.complete {
        failed.push(Condition::Horizon);
    }
    if !report.coupled_expanding {
        failed.push(Condition::Expansion);
    }
    if !report.strict {
        failed.push(Condition::Disjoint);
    }
    if report.lambda_est <= 1.0 {
        failed.push(Condition::Expanding);
    }
    settle(Claim::SubsystemEquality, failed, report, a, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::Interval;
    use crate::system::{Extension, PiecewiseLinearMap};

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn tent(s: f64) -> SystemModel {
        SystemModel::tent_family(&[s], Extension::ConstantTail).unwrap()
    }

    fn identity() -> SystemModel {
        SystemModel::autonomous(PiecewiseLinearMap::identity(iv(0.0, 1.0))).unwrap()
    }

    fn thirds() -> CoverConfig {
        CoverConfig::new(vec![iv(0.0, 1.0 / 3.0), iv(2.0 / 3.0, 1.0)], None).unwrap()
    }

    fn halves() -> CoverConfig {
        CoverConfig::new(vec![iv(0.0, 0.5), iv(0.5, 1.0)], None).unwrap()
    }

    #[test]
    fn golden_mean_matrix_only() {
        let c = matrix_lower_bound(&TransitionMatrix::golden_mean(), DEFAULT_TOLERANCE).unwrap();
        assert!((c.bound.log_rho - 0.48121182505960347).abs() < 1e-9);
        assert_eq!(c.bound.log_nu, 0.0);
        assert_eq!(c.status, Status::MatrixOnly);
    }

    #[test]
    fn clipped_tent_lower_bound() {
        let c = certify_lower_bound(
            &tent(3.0),
            &thirds(),
            &TransitionMatrix::full(2),
            DEFAULT_TOLERANCE,
        )
        .unwrap();
        assert_eq!(c.status, Status::Certified);
        assert!((c.bound.log_rho - 2f64.ln()).abs() < 1e-9);
        assert!((c.bound.log_nu - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_refusals() {
        let full = TransitionMatrix::full(2);
        let e = certify_lower_bound(&tent(2.0), &halves(), &full, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Disjoint));
        let cfg = CoverConfig::new(vec![iv(0.0, 0.25), iv(0.5, 0.75)], None).unwrap();
        let e = certify_lower_bound(&identity(), &cfg, &full, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Expansion));
        let BoundError::Refused { report, .. } = e else {
            unreachable!()
        };
        assert!(!report.witnesses.is_empty());
        let p = SystemModel::tent_family(&[3.0, 3.0], Extension::Periodic).unwrap();
        let short = CoverConfig::new(thirds().sets().to_vec(), Some(1)).unwrap();
        let e = certify_lower_bound(&p, &short, &full, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Horizon));
    }

    #[test]
    fn upper_bound_examples() {
        let full = TransitionMatrix::full(2);
        let c = certify_upper_bound(&tent(2.0), &halves(), &full, DEFAULT_TOLERANCE).unwrap();
        assert!((c.bound.log_rho - 2f64.ln()).abs() < 1e-9);
        let e = certify_upper_bound(&tent(3.0), &thirds(), &full, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Covering));
        let id = TransitionMatrix::identity(2);
        let e = certify_upper_bound(&identity(), &halves(), &id, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Expanding));
        let e = certify_upper_bound(&identity(), &halves(), &full, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Expanding));
        assert!(e.to_string().contains("(ii_a)"));
    }

    #[test]
    fn conjugacy_examples() {
        let full = TransitionMatrix::full(2);
        let c = certify_conjugacy(&tent(3.0), &thirds(), &full, DEFAULT_TOLERANCE).unwrap();
        let r = c.report.unwrap();
        assert!(r.lambda_est > 1.0 && r.lambda_est <= r.mu_est);
        let e = certify_conjugacy(&tent(2.0), &halves(), &full, DEFAULT_TOLERANCE).unwrap_err();
        assert_eq!(e.condition(), Some(Condition::Disjoint));
    }
}
