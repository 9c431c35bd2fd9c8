#![allow(dead_code)]

#[path = "../../../core/tests/common/fixtures.rs"]
pub mod fixtures;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xpeerd_core::dbsim::ReviewerProfile;
use xpeerd_core::report::{DbPair, PrrSummary, SimilarityScore, Supergroup};
use xpeerd_core::scoring::{Issue, IssueCategory, Thresholds};
use xpeerd_core::{Recommendation, ReportFile, ReviewTask, Submission};

pub fn xpeerd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xpeerd"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn write_submission(dir: &Path, name: &str, s: &Submission) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, s.to_json()).unwrap();
    path
}

/// Reasons over the submission's claims with Σ p1 ≤ 1 and a mixed schedule.
pub fn reasons_json(s: &Submission, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let claims: Vec<&str> = s.manuscript.claims().iter().map(|c| c.id.as_str()).collect();
    let k = rng.gen_range(1..=3);
    let mut reasons = Vec::new();
    let mut schedule: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for i in 0..k {
        let id = format!("r{i}");
        let n_linked = rng.gen_range(1..=claims.len());
        let linked: Vec<&str> = claims.choose_multiple(&mut rng, n_linked).copied().collect();
        reasons.push(serde_json::json!({
            "id": id,
            "description": format!("reason {i}"),
            "claims": linked,
            "p1": rng.gen_range(0.0..1.0 / k as f64),
        }));
        for t in 1..=3 {
            if rng.gen_bool(0.6) {
                schedule.entry(t.to_string()).or_default().push(id.clone());
            }
        }
    }
    serde_json::json!({ "reasons": reasons, "schedule": schedule }).to_string()
}

pub fn profile_json(id: u8, h_skew: f64, theta2: f64, lambda: f64) -> String {
    let p = ReviewerProfile {
        reviewer_id: id,
        prior_skew: BTreeMap::from([("h".to_string(), h_skew)]),
        thresholds: Thresholds::new(0.2, theta2, lambda).unwrap(),
        checklist_domain: None,
    };
    serde_json::to_string_pretty(&p).unwrap()
}

/// Per-group composition of the synthetic corpus.
pub struct GroupSpec {
    pub group: Supergroup,
    pub size: usize,
    pub compliant: usize,
    /// (reject, revise, accept)
    pub decisions: (usize, usize, usize),
}

pub const CORPUS_GROUPS: [GroupSpec; 5] = [
    GroupSpec { group: Supergroup::PhysicalSciences, size: 109, compliant: 37, decisions: (20, 89, 0) },
    GroupSpec { group: Supergroup::HealthSciences, size: 113, compliant: 33, decisions: (51, 58, 4) },
    GroupSpec { group: Supergroup::Humanities, size: 70, compliant: 14, decisions: (12, 54, 4) },
    GroupSpec { group: Supergroup::SocialSciences, size: 46, compliant: 14, decisions: (12, 30, 4) },
    GroupSpec { group: Supergroup::LifeSciences, size: 14, compliant: 4, decisions: (6, 8, 0) },
];

pub const CORPUS_RHO_TARGET: f64 = 0.13;

const FILLER: [&str; 8] = ["the", "manuscript", "reports", "results", "with", "limited", "page", "support"];

fn issue(category: IssueCategory, page: Option<u32>) -> Issue {
    Issue {
        argument_id: None,
        category,
        text: "Synthetic issue text.".into(),
        page_refs: page.into_iter().collect::<BTreeSet<_>>(),
        evidence_ids: vec![],
    }
}

fn spearman_of_ranks(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len() as f64;
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (*x as f64 - *y as f64).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

/// Word-count ranks whose rank correlation with `anchor_ranks` is near the target,
/// found by seeded pairwise swaps from a random start.
fn calibrated_ranks(anchor_ranks: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = anchor_ranks.len();
    let mut w: Vec<usize> = (0..n).collect();
    w.shuffle(rng);
    let mut gap = (spearman_of_ranks(anchor_ranks, &w) - CORPUS_RHO_TARGET).abs();
    while gap > 0.002 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        w.swap(i, j);
        let g = (spearman_of_ranks(anchor_ranks, &w) - CORPUS_RHO_TARGET).abs();
        if g < gap {
            gap = g;
        } else {
            w.swap(i, j);
        }
    }
    w
}

/// 352 report files stratified by `CORPUS_GROUPS`.
pub fn synthetic_corpus(seed: u64) -> Vec<ReportFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    struct Draft {
        group: Supergroup,
        compliant: bool,
        decision: Recommendation,
    }
    let mut drafts = Vec::new();
    for group in &CORPUS_GROUPS {
        let (rj, rv, ac) = group.decisions;
        let mut decisions: Vec<Recommendation> = std::iter::repeat_n(Recommendation::Reject, rj)
            .chain(std::iter::repeat_n(Recommendation::Revise, rv))
            .chain(std::iter::repeat_n(Recommendation::Accept, ac))
            .collect();
        assert_eq!(decisions.len(), group.size);
        decisions.shuffle(&mut rng);
        for (i, decision) in decisions.into_iter().enumerate() {
            drafts.push(Draft { group: group.group, compliant: i < group.compliant, decision });
        }
    }
    drafts.shuffle(&mut rng);

    // distinct anchor fractions, below 0.2 exactly for the non-compliant records
    let n_ok = drafts.iter().filter(|d| d.compliant).count();
    let n_bad = drafts.len() - n_ok;
    let (mut i_ok, mut i_bad) = (0, 0);
    let anchors: Vec<f64> = drafts
        .iter()
        .map(|d| {
            if d.compliant {
                i_ok += 1;
                0.2 + 0.8 * (i_ok as f64 - 0.5) / n_ok as f64
            } else {
                i_bad += 1;
                0.2 * (i_bad as f64 - 0.5) / n_bad as f64
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..anchors.len()).collect();
    order.sort_by(|a, b| anchors[*a].total_cmp(&anchors[*b]));
    let mut anchor_ranks = vec![0; anchors.len()];
    for (rank, idx) in order.into_iter().enumerate() {
        anchor_ranks[idx] = rank;
    }
    let word_ranks = calibrated_ranks(&anchor_ranks, &mut rng);

    let labels = Supergroup::ALL;
    drafts
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let task = [ReviewTask::HcReview, ReviewTask::DaReview, ReviewTask::Prr, ReviewTask::DbReviewSim][i % 4];
            let n_major = rng.gen_range(0..=4);
            let n_minor = rng.gen_range(0..=4);
            let majors: Vec<Issue> = (0..n_major).map(|k| issue(IssueCategory::Integrity, Some(k + 1))).collect();
            let minors: Vec<Issue> = (0..n_minor).map(|_| issue(IssueCategory::Clarity, None)).collect();
            let words = 120 + 2 * word_ranks[i];
            let issue_words = 3 * (n_major + n_minor) as usize;
            let summary: Vec<&str> = (0..words - issue_words).map(|k| FILLER[k % FILLER.len()]).collect();
            let mut r = ReportFile {
                schema: xpeerd_core::report::REPORT_SCHEMA.into(),
                task,
                decision: Some(d.decision),
                summary: summary.join(" "),
                majors,
                minors,
                scores: None,
                anchor_fraction: anchors[i],
                refusal: None,
                belief: None,
                supergroup: Some(d.group),
                classification: None,
                prr: None,
                db: None,
            };
            if i % 5 == 0 {
                // classification scores instead of a precomputed label
                r.supergroup = None;
                let scores = labels
                    .iter()
                    .map(|l| SimilarityScore {
                        label: l.as_str().into(),
                        score: if *l == d.group { 0.9 } else { rng.gen_range(0.0..0.8) },
                    })
                    .collect();
                r.classification = Some(scores);
            }
            match task {
                ReviewTask::Prr => {
                    let q: f64 = rng.gen_range(0.0..1.0);
                    r.prr = Some(PrrSummary { q, a_hat: 1.0 - q });
                }
                ReviewTask::DbReviewSim => {
                    let pair = match d.decision {
                        Recommendation::Revise if rng.gen_bool(0.5) => {
                            let a = *Recommendation::ALL.choose(&mut rng).unwrap();
                            let b = *Recommendation::ALL.iter().filter(|x| **x != a).collect::<Vec<_>>().choose(&mut rng).unwrap();
                            (a, *b)
                        }
                        other => (other, other),
                    };
                    r.db = Some(DbPair { delta1: pair.0, delta2: pair.1 });
                }
                _ => {}
            }
            r
        })
        .collect()
}

pub fn write_corpus(dir: &Path, reports: &[ReportFile]) {
    fs::create_dir_all(dir).unwrap();
    for (i, r) in reports.iter().enumerate() {
        fs::write(dir.join(format!("report_{i:03}.json")), r.to_json()).unwrap();
    }
}
