//! `xpeerd-report/1` report files.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::belief::BeliefState;
use crate::guards::RefusalRecord;
use crate::manuscript::ReviewTask;
use crate::scoring::{Issue, Recommendation, ReviewOutcome, Scores};

pub const REPORT_SCHEMA: &str = "xpeerd-report/1";

/// Top-level ASJC subject grouping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Supergroup {
    PhysicalSciences,
    HealthSciences,
    LifeSciences,
    SocialSciences,
    Humanities,
    Multidisciplinary,
}

impl Supergroup {
    pub const ALL: [Supergroup; 6] = [
        Supergroup::PhysicalSciences,
        Supergroup::HealthSciences,
        Supergroup::LifeSciences,
        Supergroup::SocialSciences,
        Supergroup::Humanities,
        Supergroup::Multidisciplinary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Supergroup::PhysicalSciences => "PhysicalSciences",
            Supergroup::HealthSciences => "HealthSciences",
            Supergroup::LifeSciences => "LifeSciences",
            Supergroup::SocialSciences => "SocialSciences",
            Supergroup::Humanities => "Humanities",
            Supergroup::Multidisciplinary => "Multidisciplinary",
        }
    }

    pub fn parse(label: &str) -> Option<Supergroup> {
        Supergroup::ALL.into_iter().find(|g| g.as_str() == label)
    }
}

impl fmt::Display for Supergroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityScore {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefEntry {
    pub hypothesis: String,
    pub mass: f64,
}

pub fn belief_entries(b: &BeliefState) -> Vec<BeliefEntry> {
    b.support()
        .iter()
        .zip(b.masses())
        .map(|(x, m)| BeliefEntry {
            hypothesis: x.clone(),
            mass: *m,
        })
        .collect()
}

/// Terminal PRR quantities attached to PRR reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrrSummary {
    pub q: f64,
    pub a_hat: f64,
}

/// Paired reviewer decisions attached to double-blind reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbPair {
    pub delta1: Recommendation,
    pub delta2: Recommendation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub schema: String,
    pub task: ReviewTask,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decision: Option<Recommendation>,
    pub summary: String,
    pub majors: Vec<Issue>,
    pub minors: Vec<Issue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scores: Option<Scores>,
    pub anchor_fraction: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refusal: Option<RefusalRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub belief: Option<Vec<BeliefEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supergroup: Option<Supergroup>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Vec<SimilarityScore>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prr: Option<PrrSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db: Option<DbPair>,
}

impl ReportFile {
    pub fn decided(task: ReviewTask, outcome: &ReviewOutcome, scores: Scores, belief: &BeliefState) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.into(),
            task,
            decision: Some(outcome.recommendation),
            summary: outcome.summary.clone(),
            majors: outcome.majors.clone(),
            minors: outcome.minors.clone(),
            anchor_fraction: scores.fit,
            scores: Some(scores),
            refusal: None,
            belief: Some(belief_entries(belief)),
            supergroup: None,
            classification: None,
            prr: None,
            db: None,
        }
    }

    /// A report carrying a halt or refusal record and no decision.
    pub fn refused(task: ReviewTask, record: RefusalRecord) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.into(),
            task,
            decision: None,
            summary: record.instructions.clone(),
            majors: vec![],
            minors: vec![],
            scores: None,
            anchor_fraction: 0.0,
            refusal: Some(record),
            belief: None,
            supergroup: None,
            classification: None,
            prr: None,
            db: None,
        }
    }

    pub fn issue_count(&self) -> (usize, usize) {
        (self.majors.len(), self.minors.len())
    }

    /// Whitespace-token count over the summary and issue texts.
    pub fn word_count(&self) -> usize {
        std::iter::once(&self.summary)
            .chain(self.majors.iter().map(|i| &i.text))
            .chain(self.minors.iter().map(|i| &i.text))
            .map(|t| t.split_whitespace().count())
            .sum()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, String> {
        let r: ReportFile = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
        if r.schema != REPORT_SCHEMA {
            return Err(format!("expected schema `{REPORT_SCHEMA}`, found `{}`", r.schema));
        }
        if !(0.0..=1.0).contains(&r.anchor_fraction) {
            return Err(format!("anchor_fraction {} outside [0, 1]", r.anchor_fraction));
        }
        Ok(r)
    }
}
