use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::stats::{mean_se, normalize_confidence, quartiles, spearman, MeanSe, Quartiles, SpearmanResult};
use super::{EvalError, ReportRecord};
use crate::manuscript::ReviewTask;
use crate::report::DbPair;
use crate::scoring::Recommendation;

pub const PRR_BINS: usize = 10;

/// Decided share per review type. Types without records are absent.
pub fn decision_coverage(records: &[ReportRecord]) -> BTreeMap<String, f64> {
    let mut tally: BTreeMap<ReviewTask, (usize, usize)> = BTreeMap::new();
    for r in records {
        let t = tally.entry(r.review_type).or_default();
        t.1 += 1;
        if r.is_decided() {
            t.0 += 1;
        }
    }
    tally
        .into_iter()
        .map(|(task, (decided, total))| (task.as_str().to_string(), decided as f64 / total as f64))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Compliance {
    pub threshold: f64,
    pub overall: Option<MeanSe>,
    pub by_group: BTreeMap<String, MeanSe>,
    pub by_type: BTreeMap<String, MeanSe>,
}

fn indicator_means<K: Ord>(
    records: &[ReportRecord],
    threshold: f64,
    key: impl Fn(&ReportRecord) -> Option<K>,
) -> BTreeMap<K, MeanSe> {
    let mut groups: BTreeMap<K, Vec<f64>> = BTreeMap::new();
    for r in records {
        if let Some(k) = key(r) {
            groups.entry(k).or_default().push(compliant(r, threshold));
        }
    }
    groups
        .into_iter()
        .filter_map(|(k, v)| mean_se(&v).map(|m| (k, m)))
        .collect()
}

fn compliant(r: &ReportRecord, threshold: f64) -> f64 {
    if r.anchor_fraction >= threshold {
        1.0
    } else {
        0.0
    }
}

pub fn anchoring_compliance(records: &[ReportRecord], threshold: f64) -> Result<Compliance, EvalError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(EvalError::InvalidThreshold(threshold));
    }
    let all: Vec<f64> = records.iter().map(|r| compliant(r, threshold)).collect();
    Ok(Compliance {
        threshold,
        overall: mean_se(&all),
        by_group: indicator_means(records, threshold, |r| r.supergroup.map(|g| g.as_str().to_string())),
        by_type: indicator_means(records, threshold, |r| Some(r.review_type.as_str().to_string())),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionShares {
    pub n: usize,
    pub p_reject: f64,
    pub p_revise: f64,
    pub p_accept: f64,
}

/// Decision shares per supergroup over decided, classified records.
pub fn decision_composition(records: &[ReportRecord]) -> BTreeMap<String, CompositionShares> {
    let mut counts: BTreeMap<&'static str, [usize; 3]> = BTreeMap::new();
    for r in records {
        let (Some(d), Some(g)) = (r.decision, r.supergroup) else {
            continue;
        };
        let c = counts.entry(g.as_str()).or_default();
        match d {
            Recommendation::Reject => c[0] += 1,
            Recommendation::Revise => c[1] += 1,
            Recommendation::Accept => c[2] += 1,
        }
    }
    counts
        .into_iter()
        .map(|(g, c)| {
            let n = c.iter().sum::<usize>();
            let share = |k: usize| c[k] as f64 / n as f64;
            let shares = CompositionShares {
                n,
                p_reject: share(0),
                p_revise: share(1),
                p_accept: share(2),
            };
            (g.to_string(), shares)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IssueStats {
    pub n: usize,
    pub major: Quartiles,
    pub minor: Quartiles,
}

pub fn issue_stats(records: &[ReportRecord]) -> BTreeMap<String, IssueStats> {
    let mut by_type: BTreeMap<ReviewTask, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for r in records {
        let e = by_type.entry(r.review_type).or_default();
        e.0.push(r.n_major as f64);
        e.1.push(r.n_minor as f64);
    }
    by_type
        .into_iter()
        .map(|(t, (major, minor))| {
            let stats = IssueStats {
                n: major.len(),
                major: quartiles(&major).expect("non-empty group"),
                minor: quartiles(&minor).expect("non-empty group"),
            };
            (t.as_str().to_string(), stats)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Ten equal bins over [0, 1]; the last bin is closed.
pub fn prr_q_histogram(records: &[ReportRecord]) -> Histogram {
    let mut counts = vec![0u64; PRR_BINS];
    for q in records.iter().filter_map(|r| r.prr_q) {
        let bin = ((q.clamp(0.0, 1.0) * PRR_BINS as f64) as usize).min(PRR_BINS - 1);
        counts[bin] += 1;
    }
    Histogram {
        edges: (0..=PRR_BINS).map(|i| i as f64 / PRR_BINS as f64).collect(),
        counts,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agreement {
    pub labels: [Recommendation; 3],
    /// `counts[i][j]`: reviewer 1 chose `labels[i]`, reviewer 2 `labels[j]`.
    pub counts: [[u64; 3]; 3],
    pub total: u64,
    pub agreement_rate: Option<f64>,
}

fn label_index(d: Recommendation) -> usize {
    Recommendation::ALL.iter().position(|x| *x == d).expect("every label listed")
}

pub fn db_agreement<'a>(pairs: impl IntoIterator<Item = &'a DbPair>) -> Agreement {
    let mut counts = [[0u64; 3]; 3];
    for p in pairs {
        counts[label_index(p.delta1)][label_index(p.delta2)] += 1;
    }
    let total: u64 = counts.iter().flatten().sum();
    let trace: u64 = (0..3).map(|i| counts[i][i]).sum();
    Agreement {
        labels: Recommendation::ALL,
        counts,
        total,
        agreement_rate: (total > 0).then(|| trace as f64 / total as f64),
    }
}

/// Spearman correlation between report word count and anchor fraction.
pub fn correlate_length_anchor(records: &[ReportRecord]) -> Result<SpearmanResult, EvalError> {
    let x: Vec<f64> = records.iter().map(|r| r.word_count as f64).collect();
    let y: Vec<f64> = records.iter().map(|r| r.anchor_fraction).collect();
    spearman(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMetrics {
    pub n_records: usize,
    pub n_diagnostics: usize,
    pub coverage_by_type: BTreeMap<String, f64>,
    pub compliance: Compliance,
    pub composition: BTreeMap<String, CompositionShares>,
    pub issue_stats: BTreeMap<String, IssueStats>,
    pub prr_q_histogram: Histogram,
    pub db_agreement: Agreement,
    pub length_anchor: Option<SpearmanResult>,
    pub uncertainty_tau: f64,
    pub uncertain_count: usize,
}

fn canonical_key(r: &ReportRecord) -> impl Ord + '_ {
    (
        r.review_type,
        r.decision,
        r.supergroup,
        r.anchor_fraction.to_bits(),
        r.word_count,
        r.n_major,
        r.n_minor,
        &r.source,
    )
}

/// All metrics over `records`, independent of their order.
pub fn compute_metrics(
    records: &[ReportRecord],
    n_diagnostics: usize,
    compliance_threshold: f64,
    tau: f64,
) -> Result<CorpusMetrics, EvalError> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(EvalError::InvalidThreshold(tau));
    }
    let mut sorted: Vec<&ReportRecord> = records.iter().collect();
    sorted.sort_by(|a, b| canonical_key(a).cmp(&canonical_key(b)));
    let records: Vec<ReportRecord> = sorted.into_iter().cloned().collect();

    let uncertain_count = records
        .iter()
        .filter_map(|r| r.similarity_scores.as_ref())
        .filter(|s| {
            let scores: Vec<f64> = s.iter().map(|x| x.score).collect();
            normalize_confidence(&scores, tau).is_ok_and(|c| c.uncertain)
        })
        .count();
    Ok(CorpusMetrics {
        n_records: records.len(),
        n_diagnostics,
        coverage_by_type: decision_coverage(&records),
        compliance: anchoring_compliance(&records, compliance_threshold)?,
        composition: decision_composition(&records),
        issue_stats: issue_stats(&records),
        prr_q_histogram: prr_q_histogram(&records),
        db_agreement: db_agreement(records.iter().filter_map(|r| r.db.as_ref())),
        length_anchor: correlate_length_anchor(&records).ok(),
        uncertainty_tau: tau,
        uncertain_count,
    })
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer")
}

impl CorpusMetrics {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("metrics serialize");
        out.push(b'\n');
        out
    }

    pub fn composition_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["supergroup", "n", "p_reject", "p_revise", "p_accept"]).unwrap();
        for (g, s) in &self.composition {
            w.write_record([
                g.clone(),
                s.n.to_string(),
                s.p_reject.to_string(),
                s.p_revise.to_string(),
                s.p_accept.to_string(),
            ])
            .unwrap();
        }
        finish(w)
    }

    pub fn compliance_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scope", "key", "n", "mean", "se"]).unwrap();
        let mut row = |scope: &str, key: &str, m: &MeanSe| {
            w.write_record([scope, key, &m.n.to_string(), &m.mean.to_string(), &opt(m.se)]).unwrap();
        };
        if let Some(m) = &self.compliance.overall {
            row("overall", "all", m);
        }
        for (k, m) in &self.compliance.by_group {
            row("group", k, m);
        }
        for (k, m) in &self.compliance.by_type {
            row("type", k, m);
        }
        finish(w)
    }

    pub fn issues_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["review_type", "n", "severity", "min", "q1", "median", "q3", "max"]).unwrap();
        for (t, s) in &self.issue_stats {
            for (severity, q) in [("major", &s.major), ("minor", &s.minor)] {
                w.write_record([
                    t.clone(),
                    s.n.to_string(),
                    severity.to_string(),
                    q.min.to_string(),
                    q.q1.to_string(),
                    q.median.to_string(),
                    q.q3.to_string(),
                    q.max.to_string(),
                ])
                .unwrap();
            }
        }
        finish(w)
    }

    pub fn prr_q_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bin_lo", "bin_hi", "count"]).unwrap();
        let h = &self.prr_q_histogram;
        for (i, c) in h.counts.iter().enumerate() {
            w.write_record([h.edges[i].to_string(), h.edges[i + 1].to_string(), c.to_string()])
                .unwrap();
        }
        finish(w)
    }

    pub fn db_agreement_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let a = &self.db_agreement;
        let mut header = vec!["delta1\\delta2".to_string()];
        header.extend(a.labels.iter().map(|l| l.to_string()));
        w.write_record(&header).unwrap();
        for (i, l) in a.labels.iter().enumerate() {
            let mut row = vec![l.to_string()];
            row.extend(a.counts[i].iter().map(|c| c.to_string()));
            w.write_record(&row).unwrap();
        }
        finish(w)
    }

    /// Writes `metrics.json` and the per-figure CSV files into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let files = [
            ("metrics.json", self.to_json()),
            ("composition.csv", self.composition_csv()),
            ("compliance.csv", self.compliance_csv()),
            ("issues.csv", self.issues_csv()),
            ("prr_q.csv", self.prr_q_csv()),
            ("db_agreement.csv", self.db_agreement_csv()),
        ];
        let mut written = Vec::with_capacity(files.len());
        for (name, bytes) in files {
            let path = dir.join(name);
            fs::write(&path, bytes)?;
            written.push(path);
        }
        Ok(written)
    }

    /// One-screen text summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "records: {} ({} skipped)", self.n_records, self.n_diagnostics);
        match &self.compliance.overall {
            Some(m) => {
                let _ = writeln!(
                    s,
                    "anchoring compliance (>= {}): c = {:.4} (se {})",
                    self.compliance.threshold,
                    m.mean,
                    m.se.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into())
                );
            }
            None => {
                let _ = writeln!(s, "anchoring compliance: no records");
            }
        }
        let _ = writeln!(s, "decision coverage:");
        for (t, c) in &self.coverage_by_type {
            let _ = writeln!(s, "  {t:<12} {c:.4}");
        }
        let _ = writeln!(s, "decision composition (reject / revise / accept):");
        for (g, c) in &self.composition {
            let _ = writeln!(
                s,
                "  {g:<18} n={:<4} {:.4} / {:.4} / {:.4}",
                c.n, c.p_reject, c.p_revise, c.p_accept
            );
        }
        if let Some(r) = &self.length_anchor {
            let _ = writeln!(s, "length vs anchoring: rho = {:.4}, p = {:.4} (n={})", r.rho, r.p_value, r.n);
        }
        if let Some(rate) = self.db_agreement.agreement_rate {
            let _ = writeln!(s, "double-blind agreement: {rate:.4} over {} pairs", self.db_agreement.total);
        }
        let _ = writeln!(s, "uncertain classifications (tau {}): {}", self.uncertainty_tau, self.uncertain_count);
        s
    }
}
