use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{coherence_score, decide, fraud_risk, meth_val, score, ChecklistModule, DetectorReport, Recommendation, ScoreWeights, ScoringError, Thresholds};
use crate::argumentation::{justification, DungFramework, Extension, WeightMap};
use crate::belief::BeliefState;
use crate::manuscript::{Manuscript, Page, ReviewTask};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueCategory {
    Integrity,
    Reproducibility,
    Ethics,
    Clarity,
    Typography,
    Formatting,
}

impl IssueCategory {
    pub fn is_major(self) -> bool {
        matches!(self, IssueCategory::Integrity | IssueCategory::Reproducibility | IssueCategory::Ethics)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub argument_id: Option<String>,
    pub category: IssueCategory,
    pub text: String,
    pub page_refs: BTreeSet<Page>,
    pub evidence_ids: Vec<String>,
}

impl Issue {
    pub fn is_anchored(&self) -> bool {
        !self.page_refs.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewOutcome {
    pub summary: String,
    pub majors: Vec<Issue>,
    pub minors: Vec<Issue>,
    pub recommendation: Recommendation,
}

impl ReviewOutcome {
    pub fn new(summary: String, majors: Vec<Issue>, minors: Vec<Issue>, recommendation: Recommendation) -> Result<Self, ScoringError> {
        if let Some(i) = majors.iter().find(|i| !i.category.is_major()) {
            return Err(ScoringError::MisplacedIssue(i.category));
        }
        if let Some(i) = minors.iter().find(|i| i.category.is_major()) {
            return Err(ScoringError::MisplacedIssue(i.category));
        }
        Ok(ReviewOutcome {
            summary,
            majors,
            minors,
            recommendation,
        })
    }

    pub fn issues(&self) -> impl Iterator<Item = &Issue> {
        self.majors.iter().chain(&self.minors)
    }
}

/// Share of issues with at least one page reference; 1 when there are none.
pub fn fit_score(outcome: &ReviewOutcome) -> f64 {
    anchored_share(outcome.issues())
}

fn anchored_share<'a>(issues: impl Iterator<Item = &'a Issue>) -> f64 {
    let (mut total, mut anchored) = (0usize, 0usize);
    for i in issues {
        total += 1;
        anchored += i.is_anchored() as usize;
    }
    if total == 0 {
        1.0
    } else {
        anchored as f64 / total as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub coh: f64,
    pub fit: f64,
    pub methval: f64,
    #[serde(rename = "S")]
    pub s: f64,
    pub r_f: f64,
    /// `None` encodes the +∞ sentinel (no critical argument).
    pub w_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("claim-derived issues without page-anchored evidence: {}", argument_ids.join(", "))]
pub struct UnanchoredAssertion {
    pub argument_ids: Vec<String>,
}

pub struct ReportInputs<'a> {
    pub task: ReviewTask,
    pub manuscript: &'a Manuscript,
    /// Compiled framework (no supports).
    pub framework: &'a DungFramework,
    pub extension: &'a Extension,
    pub weights: &'a WeightMap,
    pub critical: &'a [&'a str],
    pub detectors: &'a DetectorReport,
    /// Evaluated checklist.
    pub checklist: &'a ChecklistModule,
    pub belief: &'a BeliefState,
    pub thresholds: &'a Thresholds,
    pub score_weights: &'a ScoreWeights,
    /// Whether any obligation other than page grounding is unmet.
    pub obligations_unmet: bool,
}

#[derive(Debug)]
pub enum BuildError {
    Unanchored(UnanchoredAssertion),
    Scoring(ScoringError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Unanchored(e) => e.fmt(f),
            BuildError::Scoring(e) => e.fmt(f),
        }
    }
}

fn flag_text<T: Serialize>(flag: &T) -> String {
    serde_json::to_value(flag)
        .ok()
        .and_then(|v| v.as_str().map(|s| s.replace('_', " ")))
        .unwrap_or_default()
}

fn fmt_weight(w: f64) -> String {
    if w.is_finite() {
        format!("{w:.2}")
    } else {
        "unbounded".into()
    }
}

/// Assembles the review: integrity majors from detector flags, checklist
/// failures by item category, and an issue for every argument outside the
/// accepted extension (critical ones as integrity majors, the rest as
/// clarity minors). Argument-derived issues cite their justification set and
/// must be anchored.
pub fn build_report(inp: &ReportInputs<'_>) -> Result<(ReviewOutcome, Scores), BuildError> {
    let m = inp.manuscript;
    let mut majors = Vec::new();
    let mut minors = Vec::new();

    for flag in &inp.detectors.data_flags {
        majors.push(Issue {
            argument_id: None,
            category: IssueCategory::Integrity,
            text: format!("Data anomaly detected: {}.", flag_text(flag)),
            page_refs: BTreeSet::new(),
            evidence_ids: vec![],
        });
    }
    for flag in &inp.detectors.lang_flags {
        majors.push(Issue {
            argument_id: None,
            category: IssueCategory::Integrity,
            text: format!("Language anomaly detected: {}.", flag_text(flag)),
            page_refs: BTreeSet::new(),
            evidence_ids: vec![],
        });
    }

    for item in inp.checklist.items.iter().filter(|i| !i.passed) {
        let units: Vec<_> = m
            .evidence()
            .iter()
            .filter(|e| e.kind == item.required_evidence_kind)
            .collect();
        let issue = Issue {
            argument_id: None,
            category: item.category,
            text: format!("Checklist item `{}` not satisfied: {}.", item.id, item.description),
            page_refs: units.iter().map(|e| e.page).collect(),
            evidence_ids: units.iter().map(|e| e.id.clone()).collect(),
        };
        if item.category.is_major() {
            majors.push(issue);
        } else {
            minors.push(issue);
        }
    }

    let mut unanchored = Vec::new();
    for a in inp.framework.arguments().iter().filter(|a| !inp.extension.contains(&a.id)) {
        let just = justification(a, m);
        if just.is_empty() {
            unanchored.push(a.id.clone());
            continue;
        }
        let critical = inp.critical.contains(&a.id.as_str());
        let claim = a.anchor.as_ref().and_then(|an| m.claim(&an.claim_id));
        let claim_text = claim.map(|c| c.text.as_str()).unwrap_or("");
        let issue = Issue {
            argument_id: Some(a.id.clone()),
            category: if critical { IssueCategory::Integrity } else { IssueCategory::Clarity },
            text: if critical {
                format!("Critical claim {} is defeated by counter-arguments and not reinstated: {}", a.id, claim_text)
            } else {
                format!("Claim {} is contested and not defended in the text: {}", a.id, claim_text)
            },
            page_refs: just.iter().map(|e| e.page).collect(),
            evidence_ids: just.iter().map(|e| e.id.clone()).collect(),
        };
        if critical {
            majors.push(issue);
        } else {
            minors.push(issue);
        }
    }
    if !unanchored.is_empty() {
        return Err(BuildError::Unanchored(UnanchoredAssertion { argument_ids: unanchored }));
    }

    let r_f = fraud_risk(inp.detectors);
    let w_min = crate::argumentation::min_critical_weight(inp.weights, inp.critical.iter().copied()).unwrap_or(f64::INFINITY);
    let recommendation = decide(r_f, w_min, inp.obligations_unmet, inp.thresholds);

    let coh = coherence_score(inp.framework, inp.extension);
    let fit = anchored_share(majors.iter().chain(&minors));
    let methval = meth_val(m, inp.checklist).map_err(BuildError::Scoring)?;
    let s = score(coh, fit, methval, inp.score_weights);

    let (mode, mode_mass) = inp.belief.mode();
    let summary = format!(
        "{task} of a manuscript with {nc} claims, {ne} evidence units and {np} pages. \
         {acc} of {na} arguments accepted under {sem} semantics; fraud risk {r_f:.2}; \
         minimum critical weight {w}. Leading hypothesis {mode} at {mode_mass:.3}. \
         {nmaj} major and {nmin} minor issues. Recommendation: {recommendation}.",
        task = inp.task,
        nc = m.claims().len(),
        ne = m.evidence().len(),
        np = m.pages().len(),
        acc = inp.extension.len(),
        na = inp.framework.len(),
        sem = inp.extension.semantics,
        w = fmt_weight(w_min),
        nmaj = majors.len(),
        nmin = minors.len(),
    );

    let outcome = ReviewOutcome::new(summary, majors, minors, recommendation).map_err(BuildError::Scoring)?;
    let scores = Scores {
        coh,
        fit,
        methval,
        s,
        r_f,
        w_min: w_min.is_finite().then_some(w_min),
    };
    Ok((outcome, scores))
}
