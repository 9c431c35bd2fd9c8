//! Discrete belief state over the claims plus the fabrication hypothesis,
//! with Bayesian conditioning, floor-based revision and the session events
//! that reinitialize it.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::manuscript::{EvidenceUnit, Manuscript, ReviewTask, FABRICATION_HYPOTHESIS};

/// Tolerance on total mass.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Default success floor for revision.
pub const DEFAULT_REVISION_FLOOR: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("likelihood of `{0}` is not defined for every hypothesis")]
    UndefinedLikelihood(String),
    #[error("observation `{0}` has zero total likelihood under the current belief")]
    ZeroEvidence(String),
    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),
    #[error("revision floor {0} must lie strictly between 0 and 1")]
    InvalidFloor(f64),
    #[error("invalid belief state: {0}")]
    InvalidState(String),
    #[error("invalid likelihood table: {0}")]
    InvalidLikelihood(String),
    #[error("retask requested with no manuscript loaded")]
    RetaskWithoutManuscript,
}

/// Probability function over `X = C ∪ {h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    support: Vec<String>,
    mass: Vec<f64>,
}

impl BeliefState {
    /// Uniform prior over the manuscript's claims and `h`.
    pub fn prior_init(m: &Manuscript) -> Self {
        let support = hypothesis_space(m);
        let n = support.len() as f64;
        let mass = vec![1.0 / n; support.len()];
        BeliefState { support, mass }
    }

    /// Uniform prior tilted by per-hypothesis multipliers, then renormalized.
    /// Missing ids keep multiplier 1.
    pub fn skewed_prior(m: &Manuscript, skew: &BTreeMap<String, f64>) -> Result<Self, BeliefError> {
        let support = hypothesis_space(m);
        if let Some(bad) = skew.keys().find(|k| !support.contains(k)) {
            return Err(BeliefError::UnknownHypothesis(bad.clone()));
        }
        let mass = support
            .iter()
            .map(|x| skew.get(x).copied().unwrap_or(1.0))
            .collect::<Vec<_>>();
        if mass.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(BeliefError::InvalidState("prior multipliers must be finite and non-negative".into()));
        }
        BeliefState::from_weights(support, mass)
    }

    /// Point mass on `h` with no claims.
    pub fn vacuous() -> Self {
        BeliefState {
            support: vec![FABRICATION_HYPOTHESIS.to_string()],
            mass: vec![1.0],
        }
    }

    /// Builds a state from unnormalized non-negative weights.
    pub fn from_weights(support: Vec<String>, weights: Vec<f64>) -> Result<Self, BeliefError> {
        if support.len() != weights.len() {
            return Err(BeliefError::InvalidState("support and weights differ in length".into()));
        }
        if support.iter().filter(|s| s.as_str() == FABRICATION_HYPOTHESIS).count() != 1 {
            return Err(BeliefError::InvalidState("support must contain `h` exactly once".into()));
        }
        let mut seen = support.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != support.len() {
            return Err(BeliefError::InvalidState("duplicate hypothesis id".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(BeliefError::InvalidState("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(BeliefError::InvalidState("weights sum to zero".into()));
        }
        let mass = weights.iter().map(|w| w / total).collect();
        Ok(BeliefState { support, mass })
    }

    pub fn support(&self) -> &[String] {
        &self.support
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass(&self, x: &str) -> Option<f64> {
        self.index(x).map(|i| self.mass[i])
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn index(&self, x: &str) -> Option<usize> {
        self.support.iter().position(|s| s == x)
    }

    fn renormalized(mut self) -> Self {
        let total: f64 = self.mass.iter().sum();
        for m in &mut self.mass {
            *m /= total;
        }
        self
    }

    /// The hypothesis with the largest mass; ties go to the earliest in support order.
    pub fn mode(&self) -> (&str, f64) {
        let mut best = 0;
        for i in 1..self.mass.len() {
            if self.mass[i] > self.mass[best] {
                best = i;
            }
        }
        (&self.support[best], self.mass[best])
    }
}

impl Serialize for BeliefState {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.support.len()))?;
        for (x, m) in self.support.iter().zip(&self.mass) {
            map.serialize_entry(x, m)?;
        }
        map.end()
    }
}

/// Claim ids in id order followed by `h`.
pub fn hypothesis_space(m: &Manuscript) -> Vec<String> {
    m.claims()
        .iter()
        .map(|c| c.id.clone())
        .chain(std::iter::once(FABRICATION_HYPOTHESIS.to_string()))
        .collect()
}

/// Partial likelihood table `L(o | x)`, keyed by evidence id then hypothesis id.
///
/// For a given evidence id the table defines either every hypothesis or none;
/// [`LikelihoodTable::validate`] checks this against a hypothesis space.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LikelihoodTable {
    entries: BTreeMap<String, BTreeMap<String, f64>>,
}

impl LikelihoodTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, evidence_id: impl Into<String>, hypothesis_id: impl Into<String>, value: f64) {
        self.entries
            .entry(evidence_id.into())
            .or_default()
            .insert(hypothesis_id.into(), value);
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, f64)> {
        self.entries
            .iter()
            .flat_map(|(e, row)| row.iter().map(move |(x, v)| (e.as_str(), x.as_str(), *v)))
    }

    pub fn validate(&self, support: &[String]) -> Result<(), BeliefError> {
        for (e, row) in &self.entries {
            if let Some((x, v)) = row.iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
                return Err(BeliefError::InvalidLikelihood(format!(
                    "L({e} | {x}) = {v} is not a finite non-negative number"
                )));
            }
            if let Some(x) = row.keys().find(|x| !support.contains(x)) {
                return Err(BeliefError::InvalidLikelihood(format!("L({e} | {x}) names an unknown hypothesis")));
            }
            if row.len() != support.len() {
                return Err(BeliefError::InvalidLikelihood(format!(
                    "likelihoods for `{e}` cover {} of {} hypotheses",
                    row.len(),
                    support.len()
                )));
            }
        }
        Ok(())
    }

    /// Likelihood vector aligned with `support`, if defined for all of it.
    pub fn column(&self, evidence_id: &str, support: &[String]) -> Option<Vec<f64>> {
        let row = self.entries.get(evidence_id)?;
        support.iter().map(|x| row.get(x).copied()).collect()
    }
}

/// Bayesian conditioning on an observation with a fully defined likelihood.
pub fn bayes_update(b: &BeliefState, o: &EvidenceUnit, lt: &LikelihoodTable) -> Result<BeliefState, BeliefError> {
    let lik = lt
        .column(&o.id, &b.support)
        .ok_or_else(|| BeliefError::UndefinedLikelihood(o.id.clone()))?;
    let weighted: Vec<f64> = b.mass.iter().zip(&lik).map(|(m, l)| m * l).collect();
    let denom: f64 = weighted.iter().sum();
    if denom.is_nan() || denom <= 0.0 {
        return Err(BeliefError::ZeroEvidence(o.id.clone()));
    }
    let mass = weighted.into_iter().map(|w| w / denom).collect();
    Ok(BeliefState {
        support: b.support.clone(),
        mass,
    }
    .renormalized())
}

/// Revision toward `target` with a success floor.
///
/// If the target already holds at least `floor`, the state is returned as is.
/// Otherwise the target receives exactly `floor` and every other hypothesis is
/// scaled by the common factor `(1 - floor) / (1 - b(target))`.
pub fn agm_revise(b: &BeliefState, target: &str, floor: f64) -> Result<BeliefState, BeliefError> {
    if !(floor > 0.0 && floor < 1.0) {
        return Err(BeliefError::InvalidFloor(floor));
    }
    let t = b
        .index(target)
        .ok_or_else(|| BeliefError::UnknownHypothesis(target.to_string()))?;
    let current = b.mass[t];
    if current >= floor {
        return Ok(b.clone());
    }
    // current < floor < 1, so the residue is positive.
    let factor = (1.0 - floor) / (1.0 - current);
    let mass = b
        .mass
        .iter()
        .enumerate()
        .map(|(i, m)| if i == t { floor } else { m * factor })
        .collect();
    // no renormalization: the target must hold exactly `floor`
    Ok(BeliefState {
        support: b.support.clone(),
        mass,
    })
}

/// Hypothesis targeted when an observation has no likelihood: the lowest-id
/// claim stated on the observation's page, preferring claims the unit
/// references; `h` when the page anchors no claim.
pub fn revision_target<'m>(m: &'m Manuscript, o: &EvidenceUnit) -> &'m str {
    let on_page = || m.claims().iter().filter(|c| c.page_refs.contains(&o.page));
    on_page()
        .find(|c| o.references(&c.id))
        .or_else(|| on_page().next())
        .map(|c| c.id.as_str())
        .unwrap_or(FABRICATION_HYPOTHESIS)
}

/// How an observation was absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateRoute {
    Bayes,
    Revision,
}

/// Two-case update: conditioning when the likelihood is defined (and
/// informative), revision toward [`revision_target`] otherwise.
pub fn observe(
    b: &BeliefState,
    m: &Manuscript,
    o: &EvidenceUnit,
    lt: &LikelihoodTable,
    floor: f64,
) -> Result<(BeliefState, UpdateRoute), BeliefError> {
    match bayes_update(b, o, lt) {
        Ok(next) => Ok((next, UpdateRoute::Bayes)),
        Err(BeliefError::UndefinedLikelihood(_)) | Err(BeliefError::ZeroEvidence(_)) => {
            agm_revise(b, revision_target(m, o), floor).map(|next| (next, UpdateRoute::Revision))
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EpistemicEvent {
    Upload(Arc<Manuscript>),
    Reset,
    Retask(ReviewTask),
}

/// Epistemic part of a review session: task, loaded manuscript, belief.
#[derive(Debug, Clone, PartialEq)]
pub struct EpistemicState {
    pub task: ReviewTask,
    pub manuscript: Option<Arc<Manuscript>>,
    pub belief: BeliefState,
}

impl EpistemicState {
    pub fn new(task: ReviewTask) -> Self {
        EpistemicState {
            task,
            manuscript: None,
            belief: BeliefState::vacuous(),
        }
    }

    pub fn apply_event(&self, ev: EpistemicEvent) -> Result<EpistemicState, BeliefError> {
        match ev {
            EpistemicEvent::Upload(m) => Ok(EpistemicState {
                task: self.task,
                belief: BeliefState::prior_init(&m),
                manuscript: Some(m),
            }),
            EpistemicEvent::Reset => Ok(EpistemicState::new(self.task)),
            EpistemicEvent::Retask(task) => {
                let m = self.manuscript.clone().ok_or(BeliefError::RetaskWithoutManuscript)?;
                Ok(EpistemicState {
                    task,
                    belief: BeliefState::prior_init(&m),
                    manuscript: Some(m),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manuscript::{Claim, EvidenceKind};
    use proptest::prelude::*;

    fn manuscript(n: usize) -> Manuscript {
        let claims = (1..=n).map(|i| Claim::new(format!("c{i}"), "x", [1])).collect();
        Manuscript::new(vec![1], claims, vec![], None).unwrap()
    }

    fn two_point(p: f64) -> BeliefState {
        BeliefState::from_weights(vec!["c1".into(), "h".into()], vec![p, 1.0 - p]).unwrap()
    }

    fn unit() -> EvidenceUnit {
        EvidenceUnit::new("o", EvidenceKind::TextSpan, 1, "")
    }

    fn table(c1: f64, h: f64) -> LikelihoodTable {
        let mut lt = LikelihoodTable::new();
        lt.insert("o", "c1", c1);
        lt.insert("o", "h", h);
        lt
    }

    #[test]
    fn uniform_priors() {
        for (n, expected) in [(3, 0.25), (1, 0.5), (9, 0.1)] {
            let b = BeliefState::prior_init(&manuscript(n));
            assert_eq!(b.support().len(), n + 1);
            for m in b.masses() {
                assert!((m - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn bayes_hand_example() {
        let b = bayes_update(&two_point(0.5), &unit(), &table(0.8, 0.2)).unwrap();
        assert!((b.mass("c1").unwrap() - 0.8).abs() < 1e-15);
        assert!((b.mass("h").unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn bayes_constant_likelihood_is_identity() {
        let b0 = two_point(0.3);
        let b = bayes_update(&b0, &unit(), &table(0.7, 0.7)).unwrap();
        assert!((b.mass("c1").unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn bayes_degenerate_prior_is_fixed_point() {
        let b = bayes_update(&two_point(1.0), &unit(), &table(0.3, 0.9)).unwrap();
        assert_eq!(b.masses(), &[1.0, 0.0]);
    }

    #[test]
    fn bayes_errors() {
        let b0 = two_point(1.0);
        assert_eq!(
            bayes_update(&b0, &unit(), &table(0.0, 0.5)),
            Err(BeliefError::ZeroEvidence("o".into()))
        );
        assert_eq!(
            bayes_update(&b0, &unit(), &LikelihoodTable::new()),
            Err(BeliefError::UndefinedLikelihood("o".into()))
        );
    }

    #[test]
    fn revision_examples() {
        let b = agm_revise(&two_point(0.1), "c1", 0.5).unwrap();
        assert!((b.mass("c1").unwrap() - 0.5).abs() < 1e-15);
        assert!((b.mass("h").unwrap() - 0.5).abs() < 1e-15);

        let b0 = two_point(0.7);
        assert_eq!(agm_revise(&b0, "c1", 0.5).unwrap(), b0);

        let b = agm_revise(&two_point(0.0), "c1", 0.5).unwrap();
        assert_eq!(b.masses(), &[0.5, 0.5]);
    }

    #[test]
    fn revision_rejects_bad_inputs() {
        assert_eq!(agm_revise(&two_point(0.5), "c1", 1.0), Err(BeliefError::InvalidFloor(1.0)));
        assert_eq!(
            agm_revise(&two_point(0.5), "zz", 0.5),
            Err(BeliefError::UnknownHypothesis("zz".into()))
        );
    }

    #[test]
    fn partial_table_is_invalid() {
        let mut lt = LikelihoodTable::new();
        lt.insert("o", "c1", 0.5);
        assert!(lt.validate(&["c1".into(), "h".into()]).is_err());
        assert!(table(0.1, 0.2).validate(&["c1".into(), "h".into()]).is_ok());
    }

    #[test]
    fn events() {
        let s = EpistemicState::new(ReviewTask::HcReview);
        assert_eq!(
            s.apply_event(EpistemicEvent::Retask(ReviewTask::Prr)),
            Err(BeliefError::RetaskWithoutManuscript)
        );
        let s = s.apply_event(EpistemicEvent::Upload(Arc::new(manuscript(2)))).unwrap();
        assert_eq!(s.belief.support().len(), 3);
        let s = s.apply_event(EpistemicEvent::Retask(ReviewTask::Prr)).unwrap();
        assert_eq!(s.task, ReviewTask::Prr);
        assert!(s.manuscript.is_some());
        let s = s.apply_event(EpistemicEvent::Reset).unwrap();
        assert_eq!(s.belief.support(), &["h".to_string()]);
        assert_eq!(s.belief.mass("h"), Some(1.0));
        assert!(s.manuscript.is_none());
    }

    #[test]
    fn skewed_prior_normalizes() {
        let m = manuscript(2);
        let skew = BTreeMap::from([("c1".to_string(), 2.0)]);
        let b = BeliefState::skewed_prior(&m, &skew).unwrap();
        assert!((b.mass("c1").unwrap() - 0.5).abs() < 1e-15);
        assert!((b.total() - 1.0).abs() < 1e-15);
    }

    fn arb_state() -> impl Strategy<Value = BeliefState> {
        prop::collection::vec(0.0f64..1.0, 2..8).prop_filter_map("nonzero", |w| {
            let support: Vec<String> = (0..w.len() - 1)
                .map(|i| format!("c{i}"))
                .chain(std::iter::once("h".to_string()))
                .collect();
            BeliefState::from_weights(support, w).ok()
        })
    }

    proptest! {
        #[test]
        fn revision_success_and_inclusion(b in arb_state(), floor in 0.01f64..0.99, pick in 0usize..8) {
            let target = b.support()[pick % b.support().len()].clone();
            let r = agm_revise(&b, &target, floor).unwrap();
            prop_assert!((r.total() - 1.0).abs() < MASS_TOLERANCE);
            if b.mass(&target).unwrap() >= floor {
                prop_assert_eq!(&r, &b);
            } else {
                prop_assert!(r.mass(&target).unwrap() >= floor - 1e-12);
            }
        }

        #[test]
        fn bayes_order_invariant(b in arb_state(), l1 in prop::collection::vec(0.01f64..1.0, 8), l2 in prop::collection::vec(0.01f64..1.0, 8)) {
            let mut lt = LikelihoodTable::new();
            for (i, x) in b.support().iter().enumerate() {
                lt.insert("o1", x.clone(), l1[i]);
                lt.insert("o2", x.clone(), l2[i]);
            }
            let o1 = EvidenceUnit::new("o1", EvidenceKind::Table, 1, "");
            let o2 = EvidenceUnit::new("o2", EvidenceKind::Table, 1, "");
            let a = bayes_update(&bayes_update(&b, &o1, &lt).unwrap(), &o2, &lt).unwrap();
            let c = bayes_update(&bayes_update(&b, &o2, &lt).unwrap(), &o1, &lt).unwrap();
            for (x, y) in a.masses().iter().zip(c.masses()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
