//! Manuscript ontology: claims, evidence units and the page index they live on.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One-based page index.
pub type Page = u32;

/// Reserved hypothesis id for the fabrication hypothesis.
pub const FABRICATION_HYPOTHESIS: &str = "h";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManuscriptError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("manuscript contains no claims")]
    EmptyManuscript,
    #[error("page {0} is not part of the manuscript")]
    PageOutOfRange(Page),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "STEM")]
    Stem,
    #[serde(rename = "HUM")]
    Hum,
    #[serde(rename = "SOC")]
    Soc,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::Stem, Domain::Hum, Domain::Soc];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Stem => "STEM",
            Domain::Hum => "HUM",
            Domain::Soc => "SOC",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Domain {
    type Err = ManuscriptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "STEM" => Ok(Domain::Stem),
            "HUM" => Ok(Domain::Hum),
            "SOC" => Ok(Domain::Soc),
            other => Err(ManuscriptError::Schema(format!("unknown domain `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EvidenceKind {
    #[serde(rename = "text-span")]
    TextSpan,
    #[serde(rename = "figure")]
    Figure,
    #[serde(rename = "table")]
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ReviewTask {
    #[serde(rename = "HCReview")]
    HcReview,
    #[serde(rename = "DAReview")]
    DaReview,
    #[serde(rename = "ConfReview")]
    ConfReview,
    #[serde(rename = "PRR")]
    Prr,
    #[serde(rename = "DBReviewSim")]
    DbReviewSim,
}

impl ReviewTask {
    pub const ALL: [ReviewTask; 5] = [
        ReviewTask::HcReview,
        ReviewTask::DaReview,
        ReviewTask::ConfReview,
        ReviewTask::Prr,
        ReviewTask::DbReviewSim,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReviewTask::HcReview => "HCReview",
            ReviewTask::DaReview => "DAReview",
            ReviewTask::ConfReview => "ConfReview",
            ReviewTask::Prr => "PRR",
            ReviewTask::DbReviewSim => "DBReviewSim",
        }
    }
}

impl fmt::Display for ReviewTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub id: String,
    pub text: String,
    /// Pages this claim is stated on. Never empty.
    pub page_refs: BTreeSet<Page>,
    /// Membership in the critical argument set.
    pub critical: bool,
}

impl Claim {
    pub fn new(id: impl Into<String>, text: impl Into<String>, pages: impl IntoIterator<Item = Page>) -> Self {
        Claim {
            id: id.into(),
            text: text.into(),
            page_refs: pages.into_iter().collect(),
            critical: false,
        }
    }

    pub fn critical(mut self) -> Self {
        self.critical = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceUnit {
    pub id: String,
    pub kind: EvidenceKind,
    pub page: Page,
    pub content: String,
    /// Claims this unit explicitly bears on.
    pub claim_refs: BTreeSet<String>,
}

impl EvidenceUnit {
    pub fn new(id: impl Into<String>, kind: EvidenceKind, page: Page, content: impl Into<String>) -> Self {
        EvidenceUnit {
            id: id.into(),
            kind,
            page,
            content: content.into(),
            claim_refs: BTreeSet::new(),
        }
    }

    pub fn referencing<I, S>(mut self, claims: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.claim_refs.extend(claims.into_iter().map(Into::into));
        self
    }

    /// Whether this unit bears on `claim_id`, either through an explicit
    /// reference or by naming the claim id as a token of its content.
    pub fn references(&self, claim_id: &str) -> bool {
        self.claim_refs.contains(claim_id)
            || self
                .content
                .split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '-'))
                .any(|tok| tok == claim_id)
    }
}

/// The manuscript triple of claims, evidence and pages.
///
/// Claims and evidence are held sorted by id; construction goes through
/// [`Manuscript::new`], which enforces every cross-reference invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manuscript {
    claims: Vec<Claim>,
    evidence: Vec<EvidenceUnit>,
    pages: Vec<Page>,
    declared_domain: Option<Domain>,
}

fn check_id(kind: &str, id: &str) -> Result<(), ManuscriptError> {
    if id.is_empty() || id.chars().any(|c| c.is_whitespace() || c == '@') {
        return Err(ManuscriptError::Invariant(format!(
            "{kind} id `{id}` must be non-empty and contain no whitespace or `@`"
        )));
    }
    Ok(())
}

impl Manuscript {
    pub fn new(
        pages: Vec<Page>,
        mut claims: Vec<Claim>,
        mut evidence: Vec<EvidenceUnit>,
        declared_domain: Option<Domain>,
    ) -> Result<Self, ManuscriptError> {
        if pages.is_empty() {
            return Err(ManuscriptError::Invariant("page index is empty".into()));
        }
        if pages[0] == 0 {
            return Err(ManuscriptError::Invariant("pages are one-based".into()));
        }
        if pages.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ManuscriptError::Invariant(
                "pages must be strictly increasing".into(),
            ));
        }
        if claims.is_empty() {
            return Err(ManuscriptError::EmptyManuscript);
        }
        let has_page = |p: Page| pages.binary_search(&p).is_ok();

        claims.sort_by(|a, b| a.id.cmp(&b.id));
        for w in claims.windows(2) {
            if w[0].id == w[1].id {
                return Err(ManuscriptError::Invariant(format!("duplicate claim id `{}`", w[0].id)));
            }
        }
        for c in &claims {
            check_id("claim", &c.id)?;
            if c.id == FABRICATION_HYPOTHESIS {
                return Err(ManuscriptError::Invariant(format!(
                    "claim id `{FABRICATION_HYPOTHESIS}` is reserved"
                )));
            }
            if c.page_refs.is_empty() {
                return Err(ManuscriptError::Invariant(format!("claim `{}` cites no page", c.id)));
            }
            if let Some(p) = c.page_refs.iter().find(|p| !has_page(**p)) {
                return Err(ManuscriptError::Invariant(format!(
                    "claim `{}` cites page {p} outside the page index",
                    c.id
                )));
            }
        }

        evidence.sort_by(|a, b| a.id.cmp(&b.id));
        for w in evidence.windows(2) {
            if w[0].id == w[1].id {
                return Err(ManuscriptError::Invariant(format!("duplicate evidence id `{}`", w[0].id)));
            }
        }
        for e in &evidence {
            check_id("evidence", &e.id)?;
            if !has_page(e.page) {
                return Err(ManuscriptError::Invariant(format!(
                    "evidence `{}` sits on page {} outside the page index",
                    e.id, e.page
                )));
            }
            if let Some(r) = e
                .claim_refs
                .iter()
                .find(|r| claims.binary_search_by(|c| c.id.as_str().cmp(r.as_str())).is_err())
            {
                return Err(ManuscriptError::Invariant(format!(
                    "evidence `{}` references unknown claim `{r}`",
                    e.id
                )));
            }
        }

        Ok(Manuscript {
            claims,
            evidence,
            pages,
            declared_domain,
        })
    }

    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    pub fn evidence(&self) -> &[EvidenceUnit] {
        &self.evidence
    }

    pub fn pages(&self) -> &[Page] {
        &self.pages
    }

    pub fn declared_domain(&self) -> Option<Domain> {
        self.declared_domain
    }

    pub fn has_page(&self, p: Page) -> bool {
        self.pages.binary_search(&p).is_ok()
    }

    pub fn claim(&self, id: &str) -> Option<&Claim> {
        self.claims
            .binary_search_by(|c| c.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.claims[i])
    }

    pub fn evidence_unit(&self, id: &str) -> Option<&EvidenceUnit> {
        self.evidence
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.evidence[i])
    }

    /// Page-anchored observation map: the evidence units on page `p`, in id order.
    pub fn obs(&self, p: Page) -> Result<Vec<&EvidenceUnit>, ManuscriptError> {
        if !self.has_page(p) {
            return Err(ManuscriptError::PageOutOfRange(p));
        }
        Ok(self.evidence.iter().filter(|e| e.page == p).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Manuscript {
        Manuscript::new(
            vec![1, 2],
            vec![Claim::new("c1", "First.", [1]), Claim::new("c2", "Second.", [2])],
            vec![
                EvidenceUnit::new("e1", EvidenceKind::TextSpan, 1, "a"),
                EvidenceUnit::new("e2", EvidenceKind::Figure, 1, "b"),
                EvidenceUnit::new("e3", EvidenceKind::Table, 2, "c"),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn obs_filters_by_page() {
        let m = sample();
        let ids = |v: Vec<&EvidenceUnit>| v.into_iter().map(|e| e.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(m.obs(1).unwrap()), ["e1", "e2"]);
        assert_eq!(ids(m.obs(2).unwrap()), ["e3"]);
        assert_eq!(m.obs(3), Err(ManuscriptError::PageOutOfRange(3)));
    }

    #[test]
    fn rejects_page_outside_index() {
        let err = Manuscript::new(vec![1, 2], vec![Claim::new("c1", "x", [7])], vec![], None).unwrap_err();
        assert!(matches!(err, ManuscriptError::Invariant(_)));
    }

    #[test]
    fn rejects_empty_claims() {
        let err = Manuscript::new(vec![1], vec![], vec![], None).unwrap_err();
        assert_eq!(err, ManuscriptError::EmptyManuscript);
    }

    #[test]
    fn rejects_duplicates_and_reserved_ids() {
        let dup = Manuscript::new(
            vec![1],
            vec![Claim::new("c1", "x", [1]), Claim::new("c1", "y", [1])],
            vec![],
            None,
        );
        assert!(matches!(dup, Err(ManuscriptError::Invariant(_))));
        let reserved = Manuscript::new(vec![1], vec![Claim::new("h", "x", [1])], vec![], None);
        assert!(matches!(reserved, Err(ManuscriptError::Invariant(_))));
    }

    #[test]
    fn rejects_unsorted_pages() {
        let err = Manuscript::new(vec![2, 1], vec![Claim::new("c1", "x", [1])], vec![], None);
        assert!(matches!(err, Err(ManuscriptError::Invariant(_))));
    }

    #[test]
    fn content_token_reference() {
        let e = EvidenceUnit::new("e1", EvidenceKind::TextSpan, 1, "supports c1, not c10");
        assert!(e.references("c1"));
        assert!(e.references("c10"));
        assert!(!e.references("c2"));
    }
}
