//! Corpus evaluation: report ingestion and descriptive metrics.

mod metrics;
mod stats;

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dbsim::{DbRunOutput, DBSIM_SCHEMA};
use crate::manuscript::ReviewTask;
use crate::report::{DbPair, ReportFile, SimilarityScore, Supergroup, REPORT_SCHEMA};
use crate::scoring::Recommendation;

pub use metrics::{
    anchoring_compliance, compute_metrics, db_agreement, decision_composition, decision_coverage,
    correlate_length_anchor, issue_stats, prr_q_histogram, Agreement, Compliance, CompositionShares, CorpusMetrics,
    Histogram, IssueStats,
};
pub use stats::{mean_se, mid_ranks, normalize_confidence, quartiles, spearman, Confidence, MeanSe, Quartiles, SpearmanResult};

pub const DEFAULT_COMPLIANCE_THRESHOLD: f64 = 0.2;
pub const DEFAULT_UNCERTAINTY_TAU: f64 = 0.20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no similarity scores")]
    EmptyScores,
    #[error("similarity scores must be finite")]
    NonFiniteScore,
    #[error("need at least 3 paired observations, got {0}")]
    InsufficientData(usize),
    #[error("a sample is constant; correlation is undefined")]
    ZeroVariance,
    #[error("threshold {0} outside (0, 1)")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    /// File name the record was read from.
    pub source: String,
    pub review_type: ReviewTask,
    pub decision: Option<Recommendation>,
    pub n_major: usize,
    pub n_minor: usize,
    pub anchor_fraction: f64,
    pub word_count: usize,
    pub supergroup: Option<Supergroup>,
    pub similarity_scores: Option<Vec<SimilarityScore>>,
    pub prr_q: Option<f64>,
    pub db: Option<DbPair>,
}

fn top_label(scores: &[SimilarityScore]) -> Option<Supergroup> {
    let mut best: Option<&SimilarityScore> = None;
    for s in scores {
        if best.is_none_or(|b| s.score > b.score) {
            best = Some(s);
        }
    }
    best.and_then(|s| Supergroup::parse(&s.label))
}

impl ReportRecord {
    pub fn from_report(source: impl Into<String>, r: &ReportFile) -> Self {
        let supergroup = r
            .supergroup
            .or_else(|| r.classification.as_deref().and_then(top_label));
        ReportRecord {
            source: source.into(),
            review_type: r.task,
            decision: r.decision,
            n_major: r.majors.len(),
            n_minor: r.minors.len(),
            anchor_fraction: r.anchor_fraction,
            word_count: r.word_count(),
            supergroup,
            similarity_scores: r.classification.clone(),
            prr_q: r.prr.map(|p| p.q),
            db: r.db,
        }
    }

    /// One record for a double-blind run: the editor decision, pooled issue
    /// counts and word counts, mean anchor fraction, and the paired decisions.
    pub fn from_db_run(source: impl Into<String>, out: &DbRunOutput) -> Self {
        let (a, b) = (&out.reviewer1, &out.reviewer2);
        let db = match (a.decision, b.decision) {
            (Some(delta1), Some(delta2)) => Some(DbPair { delta1, delta2 }),
            _ => None,
        };
        ReportRecord {
            source: source.into(),
            review_type: ReviewTask::DbReviewSim,
            decision: out.editor.delta_star,
            n_major: a.majors.len() + b.majors.len(),
            n_minor: a.minors.len() + b.minors.len(),
            anchor_fraction: (a.anchor_fraction + b.anchor_fraction) / 2.0,
            word_count: a.word_count() + b.word_count(),
            supergroup: a.supergroup.or(b.supergroup),
            similarity_scores: None,
            prr_q: None,
            db,
        }
    }

    pub fn is_decided(&self) -> bool {
        self.decision.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Corpus {
    pub records: Vec<ReportRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Deserialize)]
struct SchemaProbe {
    schema: String,
}

/// Parses one file's bytes into a record.
pub fn parse_record(source: &str, bytes: &[u8]) -> Result<ReportRecord, String> {
    let probe: SchemaProbe = serde_json::from_slice(bytes).map_err(|e| e.to_string())?;
    match probe.schema.as_str() {
        REPORT_SCHEMA => ReportFile::from_json(bytes).map(|r| ReportRecord::from_report(source, &r)),
        DBSIM_SCHEMA => DbRunOutput::from_json(bytes).map(|o| ReportRecord::from_db_run(source, &o)),
        other => Err(format!("unsupported schema `{other}`")),
    }
}

/// Reads every `*.json` file in `dir` (non-recursive), in file-name order.
/// Unparseable files become diagnostics rather than errors.
pub fn parse_corpus(dir: &Path) -> io::Result<Corpus> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            paths.push(path);
        }
    }
    paths.sort();
    let mut corpus = Corpus::default();
    for path in paths {
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let parsed = fs::read(&path)
            .map_err(|e| e.to_string())
            .and_then(|bytes| parse_record(&name, &bytes));
        match parsed {
            Ok(r) => corpus.records.push(r),
            Err(message) => corpus.diagnostics.push(Diagnostic { file: name, message }),
        }
    }
    Ok(corpus)
}
