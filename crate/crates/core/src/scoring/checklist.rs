use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{IssueCategory, ScoringError};
use crate::manuscript::{Domain, EvidenceKind, Manuscript};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChecklistItem {
    pub id: String,
    pub description: String,
    pub required_evidence_kind: EvidenceKind,
    /// Category of the issue raised when the item fails.
    #[serde(default = "default_category")]
    pub category: IssueCategory,
    #[serde(default)]
    pub passed: bool,
}

fn default_category() -> IssueCategory {
    IssueCategory::Reproducibility
}

/// Field-specific verification checklist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChecklistModule {
    pub domain: Domain,
    pub items: Vec<ChecklistItem>,
}

impl ChecklistModule {
    pub fn new(domain: Domain, items: Vec<ChecklistItem>) -> Result<Self, ScoringError> {
        if items.is_empty() {
            return Err(ScoringError::InvalidChecklist("checklist has no items".into()));
        }
        let mut ids: Vec<&str> = items.iter().map(|i| i.id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(ScoringError::InvalidChecklist(format!("duplicate item `{}`", w[0])));
        }
        Ok(ChecklistModule { domain, items })
    }

    /// Reads a JSON array of items.
    pub fn from_json(domain: Domain, bytes: &[u8]) -> Result<Self, ScoringError> {
        let items: Vec<ChecklistItem> =
            serde_json::from_slice(bytes).map_err(|e| ScoringError::InvalidChecklist(e.to_string()))?;
        ChecklistModule::new(domain, items)
    }

    /// Marks each item passed or failed for `m`. Explicit outcomes win;
    /// otherwise an item passes when the manuscript holds at least one
    /// evidence unit of the required kind.
    pub fn evaluate(&self, m: &Manuscript, outcomes: &BTreeMap<String, bool>) -> ChecklistModule {
        let items = self
            .items
            .iter()
            .map(|item| {
                let passed = outcomes.get(&item.id).copied().unwrap_or_else(|| {
                    m.evidence().iter().any(|e| e.kind == item.required_evidence_kind)
                });
                ChecklistItem {
                    passed,
                    ..item.clone()
                }
            })
            .collect();
        ChecklistModule {
            domain: self.domain,
            items,
        }
    }

    pub fn passed_count(&self) -> usize {
        self.items.iter().filter(|i| i.passed).count()
    }
}

/// Share of checklist items passed.
pub fn meth_val(m: &Manuscript, checklist: &ChecklistModule) -> Result<f64, ScoringError> {
    if let Some(declared) = m.declared_domain() {
        if declared != checklist.domain {
            return Err(ScoringError::DomainMismatch {
                declared: declared.to_string(),
                attached: checklist.domain.to_string(),
            });
        }
    }
    if checklist.items.is_empty() {
        return Err(ScoringError::InvalidChecklist("checklist has no items".into()));
    }
    Ok(checklist.passed_count() as f64 / checklist.items.len() as f64)
}

fn item(id: &str, description: &str, kind: EvidenceKind, category: IssueCategory) -> ChecklistItem {
    ChecklistItem {
        id: id.into(),
        description: description.into(),
        required_evidence_kind: kind,
        category,
        passed: false,
    }
}

/// Built-in checklist for a domain (STEM 8 items, HUM 6, SOC 7).
pub fn default_checklist(domain: Domain) -> ChecklistModule {
    use EvidenceKind::*;
    use IssueCategory::*;
    let items = match domain {
        Domain::Stem => vec![
            item("methods_reproducible", "Methods are described in enough detail to reproduce", TextSpan, Reproducibility),
            item("statistics_reported", "Statistical tests, effect sizes and uncertainty are reported", Table, Reproducibility),
            item("data_available", "Data availability is stated", TextSpan, Reproducibility),
            item("results_visualized", "Key results are shown in figures", Figure, Reproducibility),
            item("controls_described", "Controls and baselines are described", TextSpan, Reproducibility),
            item("novelty_stated", "The contribution over prior work is stated", TextSpan, Clarity),
            item("ethics_approval", "Ethics approval or exemption is declared", TextSpan, Ethics),
            item("units_consistent", "Units and notation are consistent", Table, Formatting),
        ],
        Domain::Hum => vec![
            item("sources_critiqued", "Primary sources are identified and critically assessed", TextSpan, Reproducibility),
            item("framework_explicit", "The theoretical framework is made explicit", TextSpan, Clarity),
            item("citations_traceable", "Archival and textual citations are traceable", TextSpan, Reproducibility),
            item("novelty_stated", "The contribution over prior scholarship is stated", TextSpan, Clarity),
            item("representation_ethics", "Representation of people and communities is handled ethically", TextSpan, Ethics),
            item("image_permissions", "Reproduced images carry permissions", Figure, Ethics),
        ],
        Domain::Soc => vec![
            item("sampling_described", "Sampling design and response rates are described", TextSpan, Reproducibility),
            item("instruments_validated", "Measurement instruments are validated", Table, Reproducibility),
            item("statistics_reported", "Statistical models and uncertainty are reported", Table, Reproducibility),
            item("consent_obtained", "Informed consent and ethics review are declared", TextSpan, Ethics),
            item("novelty_stated", "The contribution over prior work is stated", TextSpan, Clarity),
            item("preregistration", "Preregistration or analysis plan is referenced", TextSpan, Reproducibility),
            item("limitations_discussed", "Limitations are discussed", TextSpan, Clarity),
        ],
    };
    ChecklistModule { domain, items }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manuscript::{Claim, EvidenceUnit};

    fn manuscript(domain: Option<Domain>, kinds: &[EvidenceKind]) -> Manuscript {
        let evidence = kinds
            .iter()
            .enumerate()
            .map(|(i, k)| EvidenceUnit::new(format!("e{i}"), *k, 1, ""))
            .collect();
        Manuscript::new(vec![1], vec![Claim::new("c1", "x", [1])], evidence, domain).unwrap()
    }

    #[test]
    fn default_sizes() {
        assert_eq!(default_checklist(Domain::Stem).items.len(), 8);
        assert_eq!(default_checklist(Domain::Hum).items.len(), 6);
        assert_eq!(default_checklist(Domain::Soc).items.len(), 7);
    }

    #[test]
    fn ratio_of_passed_items() {
        let items = (0..10)
            .map(|i| ChecklistItem {
                passed: i < 7,
                ..item(&format!("i{i}"), "", EvidenceKind::TextSpan, IssueCategory::Reproducibility)
            })
            .collect();
        let cl = ChecklistModule::new(Domain::Stem, items).unwrap();
        let m = manuscript(None, &[]);
        assert!((meth_val(&m, &cl).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn evaluation_uses_evidence_kinds_and_overrides() {
        let m = manuscript(Some(Domain::Stem), &[EvidenceKind::TextSpan, EvidenceKind::Table, EvidenceKind::Figure]);
        let cl = default_checklist(Domain::Stem).evaluate(&m, &BTreeMap::new());
        assert_eq!(meth_val(&m, &cl).unwrap(), 1.0);
        let overrides = BTreeMap::from([("ethics_approval".to_string(), false)]);
        let cl = default_checklist(Domain::Stem).evaluate(&m, &overrides);
        assert!((meth_val(&m, &cl).unwrap() - 7.0 / 8.0).abs() < 1e-12);
        let text_only = manuscript(None, &[EvidenceKind::TextSpan]);
        let cl = default_checklist(Domain::Stem).evaluate(&text_only, &BTreeMap::new());
        assert_eq!(cl.passed_count(), 5);
    }

    #[test]
    fn domain_mismatch() {
        let m = manuscript(Some(Domain::Hum), &[]);
        let cl = default_checklist(Domain::Stem);
        assert!(matches!(meth_val(&m, &cl), Err(ScoringError::DomainMismatch { .. })));
    }

    #[test]
    fn checklist_from_json() {
        let json = br#"[{"id":"a","description":"d","required_evidence_kind":"figure"},
                        {"id":"b","description":"d","required_evidence_kind":"table","category":"ethics","passed":true}]"#;
        let cl = ChecklistModule::from_json(Domain::Soc, json).unwrap();
        assert_eq!(cl.items.len(), 2);
        assert_eq!(cl.items[1].category, IssueCategory::Ethics);
        assert!(ChecklistModule::from_json(Domain::Soc, b"[]").is_err());
    }
}
