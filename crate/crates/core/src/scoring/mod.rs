//! Fraud risk, manuscript score components and the threshold decision policy.

mod checklist;
mod outcome;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argumentation::{DungFramework, Extension};

pub use checklist::{default_checklist, meth_val, ChecklistItem, ChecklistModule};
pub use outcome::{build_report, fit_score, BuildError, Issue, IssueCategory, ReportInputs, ReviewOutcome, Scores, UnanchoredAssertion};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("invalid score weights: {0}")]
    InvalidWeights(String),
    #[error("checklist domain {attached} does not match declared domain {declared}")]
    DomainMismatch { declared: String, attached: String },
    #[error("invalid checklist: {0}")]
    InvalidChecklist(String),
    #[error("issue category {0:?} is not allowed at this severity")]
    MisplacedIssue(IssueCategory),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Recommendation {
    Accept,
    Revise,
    Reject,
}

impl Recommendation {
    pub const ALL: [Recommendation; 3] = [Recommendation::Accept, Recommendation::Revise, Recommendation::Reject];

    /// Severity rank: Accept < Revise < Reject.
    pub fn severity(self) -> u8 {
        match self {
            Recommendation::Accept => 0,
            Recommendation::Revise => 1,
            Recommendation::Reject => 2,
        }
    }
}

impl fmt::Display for Recommendation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataFlag {
    IncompleteResults,
    UnverifiableClaim,
    StatisticalInconsistency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LangFlag {
    IncoherentConcepts,
    ExcessiveJargon,
    LogicalFallacy,
}

impl DataFlag {
    pub const ALL: [DataFlag; 3] = [
        DataFlag::IncompleteResults,
        DataFlag::UnverifiableClaim,
        DataFlag::StatisticalInconsistency,
    ];
}

impl LangFlag {
    pub const ALL: [LangFlag; 3] = [LangFlag::IncoherentConcepts, LangFlag::ExcessiveJargon, LangFlag::LogicalFallacy];
}

/// Outputs of the data and language anomaly detectors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectorReport {
    #[serde(default, rename = "data")]
    pub data_flags: BTreeSet<DataFlag>,
    #[serde(default, rename = "lang")]
    pub lang_flags: BTreeSet<LangFlag>,
}

impl DetectorReport {
    pub fn flag_count(&self) -> usize {
        self.data_flags.len() + self.lang_flags.len()
    }
}

pub const RISK_NONE: f64 = 0.0;
pub const RISK_SINGLE: f64 = 0.4;
pub const RISK_HIGH: f64 = 0.8;

/// Three-level step aggregator over detector flags.
pub fn fraud_risk(d: &DetectorReport) -> f64 {
    let n = d.flag_count();
    if n == 0 {
        RISK_NONE
    } else if n >= 2 || d.data_flags.contains(&DataFlag::StatisticalInconsistency) {
        RISK_HIGH
    } else {
        RISK_SINGLE
    }
}

/// Share of arguments in the accepted extension; 1 for an empty framework.
pub fn coherence_score(g: &DungFramework, ext: &Extension) -> f64 {
    if g.is_empty() {
        return 1.0;
    }
    let accepted = g.arguments().iter().filter(|a| ext.contains(&a.id)).count();
    accepted as f64 / g.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub theta1: f64,
    pub theta2: f64,
    pub lambda: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            theta1: 0.2,
            theta2: 0.6,
            lambda: 1.0,
        }
    }
}

impl Thresholds {
    pub fn new(theta1: f64, theta2: f64, lambda: f64) -> Result<Self, ScoringError> {
        let t = Thresholds { theta1, theta2, lambda };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        if !(0.0 < self.theta1 && self.theta1 <= self.theta2 && self.theta2 < 1.0) {
            return Err(ScoringError::InvalidThresholds(format!(
                "need 0 < theta1 <= theta2 < 1, got theta1={} theta2={}",
                self.theta1, self.theta2
            )));
        }
        if !self.lambda.is_finite() {
            return Err(ScoringError::InvalidThresholds("lambda must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            alpha: 0.4,
            beta: 0.3,
            gamma: 0.3,
        }
    }
}

impl ScoreWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, ScoringError> {
        let w = ScoreWeights { alpha, beta, gamma };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<(), ScoringError> {
        let parts = [self.alpha, self.beta, self.gamma];
        if parts.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(ScoringError::InvalidWeights("weights must be non-negative".into()));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ScoringError::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(())
    }
}

/// Convex combination of coherence, evidential fit and methodological validity.
pub fn score(coh: f64, fit: f64, mv: f64, w: &ScoreWeights) -> f64 {
    w.alpha * coh + w.beta * fit + w.gamma * mv
}

/// Which branch conditions of the policy hold at a point, before priority is
/// applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchConditions {
    pub reject: bool,
    pub revise: bool,
    pub accept: bool,
}

pub fn branch_conditions(r_f: f64, w_min: f64, any_obligation_unmet: bool, t: &Thresholds) -> BranchConditions {
    BranchConditions {
        reject: r_f > t.theta2 || w_min <= t.lambda,
        revise: (t.theta1 <= r_f && r_f <= t.theta2) || any_obligation_unmet,
        accept: r_f < t.theta1 && w_min > t.lambda,
    }
}

/// Reject, then Revise, then Accept, first matching condition wins.
/// `w_min` is `f64::INFINITY` when there are no critical arguments.
pub fn decide(r_f: f64, w_min: f64, any_obligation_unmet: bool, t: &Thresholds) -> Recommendation {
    let c = branch_conditions(r_f, w_min, any_obligation_unmet, t);
    if c.reject {
        Recommendation::Reject
    } else if c.revise {
        Recommendation::Revise
    } else {
        debug_assert!(c.accept);
        Recommendation::Accept
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::argumentation::grounded_extension;

    /// All 64 flag combinations, by bitmask.
    fn all_reports() -> Vec<(u32, DetectorReport)> {
        (0u32..64)
            .map(|mask| {
                let mut d = DetectorReport::default();
                for (i, f) in DataFlag::ALL.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        d.data_flags.insert(*f);
                    }
                }
                for (i, f) in LangFlag::ALL.iter().enumerate() {
                    if mask & (1 << (i + 3)) != 0 {
                        d.lang_flags.insert(*f);
                    }
                }
                (mask, d)
            })
            .collect()
    }

    #[test]
    fn fraud_risk_examples() {
        assert_eq!(fraud_risk(&DetectorReport::default()), 0.0);
        let mut d = DetectorReport::default();
        d.lang_flags.insert(LangFlag::ExcessiveJargon);
        assert_eq!(fraud_risk(&d), 0.4);
        let mut d = DetectorReport::default();
        d.data_flags.insert(DataFlag::StatisticalInconsistency);
        assert_eq!(fraud_risk(&d), 0.8);
    }

    #[test]
    fn fraud_risk_exhaustive_oracle_and_monotone() {
        let reports = all_reports();
        for (mask, d) in &reports {
            // independent oracle over the raw bitmask
            let count = mask.count_ones();
            let stat = mask & 0b100 != 0;
            let expected = match (count, stat) {
                (0, _) => 0.0,
                (_, true) => 0.8,
                (1, false) => 0.4,
                _ => 0.8,
            };
            assert_eq!(fraud_risk(d), expected, "mask {mask:06b}");
        }
        for (a, da) in &reports {
            for (b, db) in &reports {
                if a & b == *a {
                    assert!(fraud_risk(da) <= fraud_risk(db));
                }
            }
        }
    }

    #[test]
    fn coherence_examples() {
        let empty = DungFramework::default();
        assert_eq!(coherence_score(&empty, &grounded_extension(&empty)), 1.0);
        let g = DungFramework::from_edges(&["a", "b", "c", "d"], &[("a", "b"), ("c", "d")], &[]).unwrap();
        assert_eq!(coherence_score(&g, &grounded_extension(&g)), 0.5);
        let free = DungFramework::from_edges(&["a", "b"], &[], &[]).unwrap();
        assert_eq!(coherence_score(&free, &grounded_extension(&free)), 1.0);
    }

    #[test]
    fn score_examples() {
        let w = ScoreWeights::new(0.4, 0.3, 0.3).unwrap();
        assert!((score(1.0, 1.0, 1.0, &w) - 1.0).abs() < 1e-12);
        assert_eq!(score(0.0, 0.0, 0.0, &w), 0.0);
        assert!((score(0.5, 1.0, 0.0, &w) - 0.5).abs() < 1e-12);
        assert!(ScoreWeights::new(0.5, 0.5, 0.5).is_err());
        assert!(ScoreWeights::new(1.2, -0.2, 0.0).is_err());
    }

    #[test]
    fn decide_examples() {
        let t = Thresholds::new(0.2, 0.6, 1.0).unwrap();
        assert_eq!(decide(0.8, 1.5, false, &t), Recommendation::Reject);
        assert_eq!(decide(0.4, 1.5, false, &t), Recommendation::Revise);
        assert_eq!(decide(0.0, 1.5, false, &t), Recommendation::Accept);
        assert_eq!(decide(0.0, 1.0, false, &t), Recommendation::Reject);
        assert_eq!(decide(0.0, 1.5, true, &t), Recommendation::Revise);
        assert_eq!(decide(0.0, f64::INFINITY, false, &t), Recommendation::Accept);
    }

    #[test]
    fn thresholds_validation() {
        assert!(Thresholds::new(0.0, 0.5, 1.0).is_err());
        assert!(Thresholds::new(0.6, 0.5, 1.0).is_err());
        assert!(Thresholds::new(0.2, 1.0, 1.0).is_err());
        assert!(Thresholds::new(0.3, 0.3, -2.0).is_ok());
    }
}
