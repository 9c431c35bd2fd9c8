//! Double-blind review: two isolated reviewer sessions and an editor policy.
//!
//! Sessions share nothing but an immutable submission; each owns its belief,
//! guard state and configuration copy, so one reviewer's output cannot depend
//! on the other's profile.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::EngineConfig;
use crate::manuscript::{Domain, ReviewTask};
use crate::report::ReportFile;
use crate::scoring::{fraud_risk, Recommendation, Thresholds};
use crate::session::{ReviewSession, ReviewerSettings, SessionError, SessionOutcome};
use crate::submission::Submission;

pub const DBSIM_SCHEMA: &str = "xpeerd-dbsim/1";
pub const EDITOR_POLICY: &str = "disagree-revise-else-majority";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DbSimError {
    #[error("reviewer profiles share both prior and thresholds")]
    IdenticalProfiles,
    #[error("reviewer {0}: {1}")]
    Session(u8, SessionError),
    #[error("malformed profile: {0}")]
    Schema(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewerProfile {
    pub reviewer_id: u8,
    #[serde(default)]
    pub prior_skew: BTreeMap<String, f64>,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checklist_domain: Option<Domain>,
}

impl ReviewerProfile {
    pub fn from_json(bytes: &[u8]) -> Result<Self, DbSimError> {
        let p: ReviewerProfile = serde_json::from_slice(bytes).map_err(|e| DbSimError::Schema(e.to_string()))?;
        p.thresholds.validate().map_err(|e| DbSimError::Schema(e.to_string()))?;
        Ok(p)
    }

    fn settings(&self) -> ReviewerSettings {
        ReviewerSettings {
            prior_skew: self.prior_skew.clone(),
            thresholds: Some(self.thresholds),
            checklist_domain: self.checklist_domain,
            checklist: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregationInput {
    pub delta1: Recommendation,
    pub delta2: Recommendation,
    pub s: f64,
    pub r_f: f64,
}

/// Disagreement yields Revise; agreement yields the shared decision.
pub fn aggregate(input: &AggregationInput) -> Recommendation {
    if input.delta1 == input.delta2 {
        input.delta1
    } else {
        Recommendation::Revise
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditorRecord {
    /// Absent when either reviewer did not reach a decision.
    pub delta_star: Option<Recommendation>,
    pub s: Option<f64>,
    pub r_f: f64,
    pub policy: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbRunOutput {
    pub schema: String,
    pub reviewer1: ReportFile,
    pub reviewer2: ReportFile,
    pub editor: EditorRecord,
}

impl DbRunOutput {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("dbsim output serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, String> {
        let out: DbRunOutput = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        if out.schema != DBSIM_SCHEMA {
            return Err(format!("expected schema `{DBSIM_SCHEMA}`, found `{}`", out.schema));
        }
        Ok(out)
    }
}

/// Runs one reviewer in a session of its own.
pub fn review_once(
    submission: &Arc<Submission>,
    profile: &ReviewerProfile,
    config: &EngineConfig,
) -> Result<ReportFile, SessionError> {
    let task = ReviewTask::DbReviewSim;
    let mut session = ReviewSession::with_settings(task, config.clone(), profile.settings());
    session.upload(Arc::clone(submission))?;
    let outcome = session.run_to_completion()?;
    Ok(match outcome {
        SessionOutcome::GroundingFailed { .. } => unreachable!("run_to_completion exhausts grounding attempts"),
        other => other.report(task).expect("settled outcomes carry a report"),
    })
}

pub fn run_double_blind(
    submission: &Arc<Submission>,
    p1: &ReviewerProfile,
    p2: &ReviewerProfile,
    config: &EngineConfig,
) -> Result<DbRunOutput, DbSimError> {
    if p1.prior_skew == p2.prior_skew && p1.thresholds == p2.thresholds {
        return Err(DbSimError::IdenticalProfiles);
    }
    let r1 = review_once(submission, p1, config).map_err(|e| DbSimError::Session(1, e))?;
    let r2 = review_once(submission, p2, config).map_err(|e| DbSimError::Session(2, e))?;

    let r_f = fraud_risk(&submission.detectors);
    let (delta_star, s) = match (r1.decision, r2.decision, &r1.scores, &r2.scores) {
        (Some(delta1), Some(delta2), Some(s1), Some(s2)) => {
            let s = (s1.s + s2.s) / 2.0;
            let d = aggregate(&AggregationInput { delta1, delta2, s, r_f });
            (Some(d), Some(s))
        }
        _ => (None, None),
    };
    Ok(DbRunOutput {
        schema: DBSIM_SCHEMA.into(),
        reviewer1: r1,
        reviewer2: r2,
        editor: EditorRecord {
            delta_star,
            s,
            r_f,
            policy: EDITOR_POLICY.into(),
        },
    })
}
