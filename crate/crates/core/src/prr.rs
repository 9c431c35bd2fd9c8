//! Three-round post-rejection review game.
//!
//! Each round reports a probability per rejection reason. Reasons addressed in
//! a round decay multiplicatively into the next round and pull the belief
//! toward their linked claims; unaddressed reasons carry over unchanged.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{agm_revise, BeliefError, BeliefState};
use crate::manuscript::{Manuscript, Page};
use crate::report::{belief_entries, BeliefEntry};

pub const ROUNDS: u8 = 3;
pub const DEFAULT_DECAY: f64 = 0.5;
pub const PRR_SCHEMA: &str = "xpeerd-prr/1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PrrError {
    #[error("initial rejection mass {0} exceeds 1")]
    MassExceedsUnity(f64),
    #[error("schedule names unknown reason `{0}`")]
    UnknownReasonId(String),
    #[error("reason `{reason}` links unknown claim `{claim}`")]
    UnknownClaim { reason: String, claim: String },
    #[error("reason `{0}` links no claim")]
    UnlinkedReason(String),
    #[error("duplicate reason `{0}`")]
    DuplicateReason(String),
    #[error("probability {p} of reason `{reason}` is outside [0, 1]")]
    InvalidProbability { reason: String, p: f64 },
    #[error("round {0} is outside 1..=3")]
    InvalidRound(u8),
    #[error("decay {0} is outside [0, 1]")]
    InvalidDecay(f64),
    #[error("table is missing rounds for reason `{0}`")]
    IncompleteTable(String),
    #[error("malformed PRR input: {0}")]
    Schema(String),
    #[error(transparent)]
    Belief(#[from] BeliefError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RejectionReason {
    pub id: String,
    pub description: String,
    #[serde(rename = "claims")]
    pub linked_claims: BTreeSet<String>,
    pub p1: f64,
}

/// Reasons with their initial probabilities and the per-round addressed sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrrInput {
    pub reasons: Vec<RejectionReason>,
    #[serde(default)]
    pub schedule: BTreeMap<u8, BTreeSet<String>>,
}

impl PrrInput {
    pub fn from_json(bytes: &[u8]) -> Result<Self, PrrError> {
        serde_json::from_slice(bytes).map_err(|e| PrrError::Schema(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrrRow {
    pub reason_id: String,
    pub round: u8,
    pub p: f64,
    pub quote: String,
    pub pages: BTreeSet<Page>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PrrTable {
    /// Grouped by reason id, then round.
    pub rows: Vec<PrrRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrrRun {
    pub table: PrrTable,
    /// Belief after the last round's revisions.
    pub belief: BeliefState,
}

/// First sentence of `text`, terminator included.
fn first_sentence(text: &str) -> &str {
    let text = text.trim();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = chars.peek().is_none_or(|(_, n)| n.is_whitespace());
            if at_boundary {
                return &text[..i + c.len_utf8()];
            }
        }
    }
    text
}

pub fn run_prr(m: &Manuscript, input: &PrrInput, decay: f64, floor: f64) -> Result<PrrRun, PrrError> {
    if !(0.0..=1.0).contains(&decay) {
        return Err(PrrError::InvalidDecay(decay));
    }
    let mut reasons: Vec<&RejectionReason> = input.reasons.iter().collect();
    reasons.sort_by(|a, b| a.id.cmp(&b.id));
    if let Some(w) = reasons.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(PrrError::DuplicateReason(w[0].id.clone()));
    }
    for r in &reasons {
        if !(0.0..=1.0).contains(&r.p1) {
            return Err(PrrError::InvalidProbability {
                reason: r.id.clone(),
                p: r.p1,
            });
        }
        if r.linked_claims.is_empty() {
            return Err(PrrError::UnlinkedReason(r.id.clone()));
        }
        if let Some(c) = r.linked_claims.iter().find(|c| m.claim(c).is_none()) {
            return Err(PrrError::UnknownClaim {
                reason: r.id.clone(),
                claim: c.clone(),
            });
        }
    }
    let mass: f64 = reasons.iter().map(|r| r.p1).sum();
    if mass > 1.0 + 1e-12 {
        return Err(PrrError::MassExceedsUnity(mass));
    }
    for (round, ids) in &input.schedule {
        if !(1..=ROUNDS).contains(round) {
            return Err(PrrError::InvalidRound(*round));
        }
        if let Some(id) = ids.iter().find(|id| !reasons.iter().any(|r| &r.id == *id)) {
            return Err(PrrError::UnknownReasonId(id.clone()));
        }
    }

    let empty = BTreeSet::new();
    let mut belief = BeliefState::prior_init(m);
    let mut p: Vec<f64> = reasons.iter().map(|r| r.p1).collect();
    let mut by_round: Vec<Vec<f64>> = Vec::with_capacity(ROUNDS as usize);
    for round in 1..=ROUNDS {
        by_round.push(p.clone());
        let addressed = input.schedule.get(&round).unwrap_or(&empty);
        for (i, r) in reasons.iter().enumerate() {
            if !addressed.contains(&r.id) {
                continue;
            }
            p[i] *= decay;
            for c in &r.linked_claims {
                belief = agm_revise(&belief, c, floor)?;
            }
        }
    }

    let mut rows = Vec::with_capacity(reasons.len() * ROUNDS as usize);
    for (i, r) in reasons.iter().enumerate() {
        let first = r.linked_claims.iter().next().expect("linked claims checked non-empty");
        let quote = first_sentence(&m.claim(first).expect("claims checked").text).to_string();
        let pages: BTreeSet<Page> = r
            .linked_claims
            .iter()
            .flat_map(|c| m.claim(c).expect("claims checked").page_refs.iter().copied())
            .collect();
        for (t, ps) in by_round.iter().enumerate() {
            rows.push(PrrRow {
                reason_id: r.id.clone(),
                round: t as u8 + 1,
                p: ps[i],
                quote: quote.clone(),
                pages: pages.clone(),
            });
        }
    }
    Ok(PrrRun {
        table: PrrTable { rows },
        belief,
    })
}

/// Sum of final-round probabilities.
pub fn terminal_mass(table: &PrrTable) -> Result<f64, PrrError> {
    let mut rounds: BTreeMap<&str, Vec<u8>> = BTreeMap::new();
    for row in &table.rows {
        rounds.entry(&row.reason_id).or_default().push(row.round);
    }
    for (id, rs) in &mut rounds {
        rs.sort_unstable();
        if rs.as_slice() != [1, 2, 3] {
            return Err(PrrError::IncompleteTable(id.to_string()));
        }
    }
    Ok(table.rows.iter().filter(|r| r.round == ROUNDS).map(|r| r.p).sum())
}

pub fn implied_acceptance(q: f64) -> f64 {
    1.0 - q
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrrOutput {
    pub schema: &'static str,
    pub rows: Vec<PrrRow>,
    pub q: f64,
    pub a_hat: f64,
    pub belief: Vec<BeliefEntry>,
}

impl PrrOutput {
    pub fn new(run: &PrrRun) -> Result<Self, PrrError> {
        let q = terminal_mass(&run.table)?;
        Ok(PrrOutput {
            schema: PRR_SCHEMA,
            rows: run.table.rows.clone(),
            q,
            a_hat: implied_acceptance(q),
            belief: belief_entries(&run.belief),
        })
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("PRR output serializes");
        out.push(b'\n');
        out
    }

    /// One line per (reason, round), plus the terminal mass.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["reason_id", "round", "p", "pages", "quote"]).unwrap();
        for r in &self.rows {
            let pages = r.pages.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(";");
            w.write_record([r.reason_id.as_str(), &r.round.to_string(), &r.p.to_string(), &pages, &r.quote])
                .unwrap();
        }
        w.write_record(["q", "", &self.q.to_string(), "", ""]).unwrap();
        w.into_inner().expect("in-memory writer")
    }
}
