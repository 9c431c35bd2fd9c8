//! `xpeerd-manuscript/1` files: the manuscript plus the review inputs that
//! travel with it (likelihoods, argument relations, detector flags,
//! checklist outcomes).

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::argumentation::{Edge, Relations};
use crate::belief::{hypothesis_space, LikelihoodTable};
use crate::manuscript::{Claim, Domain, EvidenceKind, EvidenceUnit, Manuscript, ManuscriptError, Page};
use crate::scoring::DetectorReport;

pub const MANUSCRIPT_SCHEMA: &str = "xpeerd-manuscript/1";

#[derive(Debug, Clone, PartialEq)]
pub struct Submission {
    pub manuscript: Manuscript,
    pub likelihoods: LikelihoodTable,
    pub relations: Relations,
    pub detectors: DetectorReport,
    pub checklist_outcomes: BTreeMap<String, bool>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClaim {
    id: String,
    text: String,
    pages: Vec<Page>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    critical: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvidence {
    id: String,
    kind: EvidenceKind,
    page: Page,
    content: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    claims: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLikelihood {
    evidence_id: String,
    hypothesis_id: String,
    value: f64,
}

fn detectors_empty(d: &DetectorReport) -> bool {
    d.flag_count() == 0
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSubmission {
    schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Domain>,
    pages: Vec<Page>,
    claims: Vec<RawClaim>,
    evidence: Vec<RawEvidence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    likelihoods: Vec<RawLikelihood>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    attacks: Vec<Edge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    supports: Vec<Edge>,
    #[serde(default, skip_serializing_if = "detectors_empty")]
    detectors: DetectorReport,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    checklist: BTreeMap<String, bool>,
}

impl Submission {
    pub fn new(
        manuscript: Manuscript,
        likelihoods: LikelihoodTable,
        mut relations: Relations,
        detectors: DetectorReport,
        checklist_outcomes: BTreeMap<String, bool>,
    ) -> Result<Self, ManuscriptError> {
        let support = hypothesis_space(&manuscript);
        likelihoods
            .validate(&support)
            .map_err(|e| ManuscriptError::Invariant(e.to_string()))?;
        if let Some((e, _, _)) = likelihoods.iter().find(|(e, _, _)| manuscript.evidence_unit(e).is_none()) {
            return Err(ManuscriptError::Invariant(format!("likelihood for unknown evidence `{e}`")));
        }
        for edges in [&mut relations.attacks, &mut relations.supports] {
            edges.sort();
            edges.dedup();
        }
        // endpoint validity is checked by building the framework once
        crate::argumentation::build_framework(&manuscript, &relations)
            .map_err(|e| ManuscriptError::Invariant(e.to_string()))?;
        Ok(Submission {
            manuscript,
            likelihoods,
            relations,
            detectors,
            checklist_outcomes,
        })
    }

    /// A submission carrying only the manuscript.
    pub fn bare(manuscript: Manuscript) -> Self {
        Submission {
            manuscript,
            likelihoods: LikelihoodTable::new(),
            relations: Relations::default(),
            detectors: DetectorReport::default(),
            checklist_outcomes: BTreeMap::new(),
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, ManuscriptError> {
        let raw: RawSubmission = serde_json::from_slice(bytes).map_err(|e| ManuscriptError::Schema(e.to_string()))?;
        if raw.schema != MANUSCRIPT_SCHEMA {
            return Err(ManuscriptError::Schema(format!(
                "expected schema `{MANUSCRIPT_SCHEMA}`, found `{}`",
                raw.schema
            )));
        }
        let claims = raw
            .claims
            .into_iter()
            .map(|c| {
                let pages: BTreeSet<Page> = c.pages.iter().copied().collect();
                if pages.len() != c.pages.len() {
                    return Err(ManuscriptError::Invariant(format!("claim `{}` repeats a page", c.id)));
                }
                Ok(Claim {
                    id: c.id,
                    text: c.text,
                    page_refs: pages,
                    critical: c.critical,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let evidence = raw
            .evidence
            .into_iter()
            .map(|e| EvidenceUnit {
                id: e.id,
                kind: e.kind,
                page: e.page,
                content: e.content,
                claim_refs: e.claims.into_iter().collect(),
            })
            .collect();
        let manuscript = Manuscript::new(raw.pages, claims, evidence, raw.domain)?;

        let mut likelihoods = LikelihoodTable::new();
        let mut seen = BTreeSet::new();
        for l in raw.likelihoods {
            if !seen.insert((l.evidence_id.clone(), l.hypothesis_id.clone())) {
                return Err(ManuscriptError::Invariant(format!(
                    "duplicate likelihood for ({}, {})",
                    l.evidence_id, l.hypothesis_id
                )));
            }
            likelihoods.insert(l.evidence_id, l.hypothesis_id, l.value);
        }
        Submission::new(
            manuscript,
            likelihoods,
            Relations {
                attacks: raw.attacks,
                supports: raw.supports,
            },
            raw.detectors,
            raw.checklist,
        )
    }

    /// Canonical JSON: claims and evidence by id, edges and likelihoods sorted.
    pub fn to_json(&self) -> Vec<u8> {
        let m = &self.manuscript;
        let raw = RawSubmission {
            schema: MANUSCRIPT_SCHEMA.into(),
            domain: m.declared_domain(),
            pages: m.pages().to_vec(),
            claims: m
                .claims()
                .iter()
                .map(|c| RawClaim {
                    id: c.id.clone(),
                    text: c.text.clone(),
                    pages: c.page_refs.iter().copied().collect(),
                    critical: c.critical,
                })
                .collect(),
            evidence: m
                .evidence()
                .iter()
                .map(|e| RawEvidence {
                    id: e.id.clone(),
                    kind: e.kind,
                    page: e.page,
                    content: e.content.clone(),
                    claims: e.claim_refs.iter().cloned().collect(),
                })
                .collect(),
            likelihoods: self
                .likelihoods
                .iter()
                .map(|(e, x, v)| RawLikelihood {
                    evidence_id: e.into(),
                    hypothesis_id: x.into(),
                    value: v,
                })
                .collect(),
            attacks: self.relations.attacks.clone(),
            supports: self.relations.supports.clone(),
            detectors: self.detectors.clone(),
            checklist: self.checklist_outcomes.clone(),
        };
        let mut out = serde_json::to_vec_pretty(&raw).expect("submission serializes");
        out.push(b'\n');
        out
    }
}

/// Loads just the manuscript triple from a submission file.
pub fn load_manuscript(source: &[u8]) -> Result<Manuscript, ManuscriptError> {
    Submission::from_json(source).map(|s| s.manuscript)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scoring::DataFlag;

    const SAMPLE: &str = r#"{
        "schema": "xpeerd-manuscript/1",
        "domain": "STEM",
        "pages": [1, 2],
        "claims": [
            {"id": "c2", "text": "Second claim.", "pages": [2]},
            {"id": "c1", "text": "First claim.", "pages": [1], "critical": true}
        ],
        "evidence": [
            {"id": "e1", "kind": "text-span", "page": 1, "content": "supports c1"},
            {"id": "e2", "kind": "figure", "page": 1, "content": "plot", "claims": ["c1"]},
            {"id": "e3", "kind": "table", "page": 2, "content": "numbers"}
        ],
        "likelihoods": [
            {"evidence_id": "e3", "hypothesis_id": "c1", "value": 0.2},
            {"evidence_id": "e3", "hypothesis_id": "c2", "value": 0.7},
            {"evidence_id": "e3", "hypothesis_id": "h", "value": 0.1}
        ],
        "attacks": [{"from": "c2", "to": "c1"}],
        "detectors": {"data": ["incomplete_results"]},
        "checklist": {"ethics_approval": false}
    }"#;

    #[test]
    fn loads_sample() {
        let s = Submission::from_json(SAMPLE.as_bytes()).unwrap();
        let m = &s.manuscript;
        assert_eq!(m.claims().len(), 2);
        assert_eq!(m.evidence().len(), 3);
        assert_eq!(m.pages(), &[1, 2]);
        assert_eq!(m.claims()[0].id, "c1");
        assert!(m.claims()[0].critical);
        assert_eq!(m.declared_domain(), Some(Domain::Stem));
        assert!(s.detectors.data_flags.contains(&DataFlag::IncompleteResults));
        assert_eq!(s.relations.attacks.len(), 1);
    }

    #[test]
    fn canonical_round_trip() {
        let s = Submission::from_json(SAMPLE.as_bytes()).unwrap();
        let bytes = s.to_json();
        let again = Submission::from_json(&bytes).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_json(), bytes);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(Submission::from_json(b"{"), Err(ManuscriptError::Schema(_))));
        let wrong = SAMPLE.replace("xpeerd-manuscript/1", "other/2");
        assert!(matches!(Submission::from_json(wrong.as_bytes()), Err(ManuscriptError::Schema(_))));
        let unknown_field = SAMPLE.replace("\"domain\"", "\"domian\"");
        assert!(matches!(Submission::from_json(unknown_field.as_bytes()), Err(ManuscriptError::Schema(_))));
    }

    #[test]
    fn invariant_errors() {
        let bad_page = SAMPLE.replace("\"pages\": [2]}", "\"pages\": [7]}");
        assert!(matches!(Submission::from_json(bad_page.as_bytes()), Err(ManuscriptError::Invariant(_))));
        let partial = SAMPLE.replace(
            r#"{"evidence_id": "e3", "hypothesis_id": "h", "value": 0.1}"#,
            r#"{"evidence_id": "e1", "hypothesis_id": "h", "value": 0.1}"#,
        );
        assert!(matches!(Submission::from_json(partial.as_bytes()), Err(ManuscriptError::Invariant(_))));
        let bad_edge = SAMPLE.replace(r#""to": "c1""#, r#""to": "c9""#);
        assert!(matches!(Submission::from_json(bad_edge.as_bytes()), Err(ManuscriptError::Invariant(_))));
    }

    #[test]
    fn empty_claims() {
        let json = r#"{"schema":"xpeerd-manuscript/1","pages":[1],"claims":[],"evidence":[]}"#;
        assert_eq!(load_manuscript(json.as_bytes()), Err(ManuscriptError::EmptyManuscript));
    }
}
