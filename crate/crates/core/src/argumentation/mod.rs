//! Page-anchored abstract argumentation: framework construction, support
//! compilation, grounded/preferred semantics, credibility weights and
//! justification sets.

mod format;
mod semantics;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::manuscript::{EvidenceUnit, Manuscript, Page};

pub use format::{parse_af, to_af_text};
pub use semantics::{grounded_extension, is_admissible, is_conflict_free, preferred_extensions, DEFAULT_ENUMERATION_LIMIT};

/// Default base credibility weight.
pub const DEFAULT_W0: f64 = 1.0;
/// Default boost for accepted arguments.
pub const DEFAULT_KAPPA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArgError {
    #[error("unknown argument `{0}`")]
    UnknownArgument(String),
    #[error("duplicate argument `{0}`")]
    DuplicateArgument(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("framework has {size} arguments, above the enumeration limit of {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("critical argument set is empty")]
    EmptyCriticalSet,
}

/// Claim and page an argument is anchored to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Anchor {
    pub claim_id: String,
    pub page: Page,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Argument {
    pub id: String,
    /// Absent for frameworks read from the standalone text format.
    pub anchor: Option<Anchor>,
}

impl Argument {
    pub fn bare(id: impl Into<String>) -> Self {
        Argument { id: id.into(), anchor: None }
    }

    pub fn anchored(claim_id: &str, page: Page) -> Self {
        Argument {
            id: argument_id(claim_id, page),
            anchor: Some(Anchor {
                claim_id: claim_id.to_string(),
                page,
            }),
        }
    }
}

/// Id of the argument for `claim_id` stated on `page`.
pub fn argument_id(claim_id: &str, page: Page) -> String {
    format!("{claim_id}@{page}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    Grounded,
    Preferred,
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Grounded => "grounded",
            Semantics::Preferred => "preferred",
        })
    }
}

/// Arguments with attack and (not yet compiled) support edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DungFramework {
    arguments: Vec<Argument>,
    attacks: BTreeSet<(String, String)>,
    supports: BTreeSet<(String, String)>,
}

impl DungFramework {
    pub fn new<I>(arguments: I) -> Result<Self, ArgError>
    where
        I: IntoIterator<Item = Argument>,
    {
        let mut arguments: Vec<Argument> = arguments.into_iter().collect();
        arguments.sort_by(|a, b| a.id.cmp(&b.id));
        if let Some(w) = arguments.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(ArgError::DuplicateArgument(w[0].id.clone()));
        }
        Ok(DungFramework {
            arguments,
            ..Default::default()
        })
    }

    /// Convenience constructor over bare ids.
    pub fn from_edges(ids: &[&str], attacks: &[(&str, &str)], supports: &[(&str, &str)]) -> Result<Self, ArgError> {
        let mut g = DungFramework::new(ids.iter().map(|id| Argument::bare(*id)))?;
        for (a, b) in attacks {
            g.add_attack(a, b)?;
        }
        for (a, b) in supports {
            g.add_support(a, b)?;
        }
        Ok(g)
    }

    fn require(&self, id: &str) -> Result<(), ArgError> {
        if self.index_of(id).is_some() {
            Ok(())
        } else {
            Err(ArgError::UnknownArgument(id.to_string()))
        }
    }

    pub fn add_attack(&mut self, from: &str, to: &str) -> Result<(), ArgError> {
        self.require(from)?;
        self.require(to)?;
        self.attacks.insert((from.to_string(), to.to_string()));
        Ok(())
    }

    pub fn add_support(&mut self, from: &str, to: &str) -> Result<(), ArgError> {
        self.require(from)?;
        self.require(to)?;
        self.supports.insert((from.to_string(), to.to_string()));
        Ok(())
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.arguments
    }

    pub fn attacks(&self) -> &BTreeSet<(String, String)> {
        &self.attacks
    }

    pub fn supports(&self) -> &BTreeSet<(String, String)> {
        &self.supports
    }

    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.arguments.binary_search_by(|a| a.id.as_str().cmp(id)).ok()
    }

    pub fn argument(&self, id: &str) -> Option<&Argument> {
        self.index_of(id).map(|i| &self.arguments[i])
    }

    /// Attack edges as index pairs.
    pub(crate) fn attack_indices(&self) -> Vec<(usize, usize)> {
        self.attacks
            .iter()
            .map(|(a, b)| (self.index_of(a).unwrap(), self.index_of(b).unwrap()))
            .collect()
    }

    /// Deductive support reduction: every attacker of a supporter also attacks
    /// everything the supporter reaches through support chains. Supports are
    /// emptied; arguments are unchanged.
    pub fn compile_support(&self) -> DungFramework {
        let n = self.arguments.len();
        let mut succ = vec![Vec::new(); n];
        for (s, a) in &self.supports {
            succ[self.index_of(s).unwrap()].push(self.index_of(a).unwrap());
        }
        let mut attacks = self.attacks.clone();
        for (x, s) in &self.attacks {
            let start = self.index_of(s).unwrap();
            let mut seen = vec![false; n];
            let mut stack = succ[start].clone();
            while let Some(v) = stack.pop() {
                if std::mem::replace(&mut seen[v], true) {
                    continue;
                }
                attacks.insert((x.clone(), self.arguments[v].id.clone()));
                stack.extend(succ[v].iter().copied());
            }
        }
        DungFramework {
            arguments: self.arguments.clone(),
            attacks,
            supports: BTreeSet::new(),
        }
    }
}

/// Accepted argument set under a semantics.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Extension {
    pub members: BTreeSet<String>,
    pub semantics: Semantics,
}

impl Extension {
    pub fn contains(&self, id: &str) -> bool {
        self.members.contains(id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Credibility weight per argument: `w0`, plus `kappa` when accepted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightMap {
    pub weights: BTreeMap<String, f64>,
    pub w0: f64,
    pub kappa: f64,
}

impl WeightMap {
    pub fn get(&self, id: &str) -> Option<f64> {
        self.weights.get(id).copied()
    }
}

pub fn credibility_weights(g: &DungFramework, ext: &Extension, w0: f64, kappa: f64) -> WeightMap {
    let weights = g
        .arguments()
        .iter()
        .map(|a| {
            let boost = if ext.contains(&a.id) { kappa } else { 0.0 };
            (a.id.clone(), w0 + boost)
        })
        .collect();
    WeightMap { weights, w0, kappa }
}

/// Minimum weight over the critical arguments.
pub fn min_critical_weight<'a, I>(w: &WeightMap, critical: I) -> Result<f64, ArgError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut min: Option<f64> = None;
    for id in critical {
        let v = w.get(id).ok_or_else(|| ArgError::UnknownArgument(id.to_string()))?;
        min = Some(min.map_or(v, |m| m.min(v)));
    }
    min.ok_or(ArgError::EmptyCriticalSet)
}

/// Smallest set of evidence on the argument's page that references its claim.
///
/// One matching unit always suffices, so the result is the lowest-id match or
/// empty when the argument cannot be anchored.
pub fn justification<'m>(a: &Argument, m: &'m Manuscript) -> Vec<&'m EvidenceUnit> {
    let Some(anchor) = &a.anchor else {
        return Vec::new();
    };
    m.obs(anchor.page)
        .ok()
        .and_then(|units| units.into_iter().find(|e| e.references(&anchor.claim_id)))
        .into_iter()
        .collect()
}

/// Attack/support edges between claims or specific claim-page arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relations {
    #[serde(default)]
    pub attacks: Vec<Edge>,
    #[serde(default)]
    pub supports: Vec<Edge>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
}

impl Edge {
    pub fn new(from: impl Into<String>, to: impl Into<String>) -> Self {
        Edge {
            from: from.into(),
            to: to.into(),
        }
    }
}

/// One argument per (claim, cited page). Relation endpoints name either an
/// argument id (`claim@page`) or a claim id, which stands for all of the
/// claim's arguments.
pub fn build_framework(m: &Manuscript, rel: &Relations) -> Result<DungFramework, ArgError> {
    let args = m
        .claims()
        .iter()
        .flat_map(|c| c.page_refs.iter().map(move |p| Argument::anchored(&c.id, *p)));
    let mut g = DungFramework::new(args)?;
    let expand = |g: &DungFramework, end: &str| -> Result<Vec<String>, ArgError> {
        if g.index_of(end).is_some() {
            return Ok(vec![end.to_string()]);
        }
        match m.claim(end) {
            Some(c) => Ok(c.page_refs.iter().map(|p| argument_id(&c.id, *p)).collect()),
            None => Err(ArgError::UnknownArgument(end.to_string())),
        }
    };
    for e in &rel.attacks {
        for a in expand(&g, &e.from)? {
            for b in expand(&g, &e.to)? {
                g.add_attack(&a, &b)?;
            }
        }
    }
    for e in &rel.supports {
        for a in expand(&g, &e.from)? {
            for b in expand(&g, &e.to)? {
                g.add_support(&a, &b)?;
            }
        }
    }
    Ok(g)
}

/// Arguments whose claims are flagged critical.
pub fn critical_arguments<'g>(g: &'g DungFramework, m: &Manuscript) -> Vec<&'g str> {
    g.arguments()
        .iter()
        .filter(|a| {
            a.anchor
                .as_ref()
                .and_then(|an| m.claim(&an.claim_id))
                .is_some_and(|c| c.critical)
        })
        .map(|a| a.id.as_str())
        .collect()
}

/// The extension used for weighting: grounded, or the first preferred
/// extension in canonical order.
pub fn accepted_extension(g: &DungFramework, semantics: Semantics, limit: usize) -> Result<Extension, ArgError> {
    match semantics {
        Semantics::Grounded => Ok(grounded_extension(g)),
        Semantics::Preferred => Ok(preferred_extensions(g, limit)?
            .into_iter()
            .next()
            .expect("at least one preferred extension exists")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manuscript::{Claim, EvidenceKind};

    fn attacks(g: &DungFramework) -> Vec<(&str, &str)> {
        g.attacks().iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
    }

    #[test]
    fn support_without_edges_is_identity() {
        let g = DungFramework::from_edges(&["a", "b"], &[("a", "b")], &[]).unwrap();
        assert_eq!(g.compile_support(), g);
    }

    #[test]
    fn support_inherits_attackers() {
        let g = DungFramework::from_edges(&["x", "s", "a"], &[("x", "s")], &[("s", "a")]).unwrap();
        let c = g.compile_support();
        assert_eq!(attacks(&c), [("x", "a"), ("x", "s")]);
        assert!(c.supports().is_empty());
    }

    #[test]
    fn support_chain_is_transitive() {
        let g = DungFramework::from_edges(&["x", "s", "a", "b"], &[("x", "s")], &[("s", "a"), ("a", "b")]).unwrap();
        let c = g.compile_support();
        assert_eq!(attacks(&c), [("x", "a"), ("x", "b"), ("x", "s")]);
        assert_eq!(c.compile_support(), c);
    }

    #[test]
    fn weights_follow_acceptance() {
        let g = DungFramework::from_edges(&["a", "b"], &[("a", "b")], &[]).unwrap();
        let ext = grounded_extension(&g);
        let w = credibility_weights(&g, &ext, 1.0, 0.5);
        assert_eq!(w.get("a"), Some(1.5));
        assert_eq!(w.get("b"), Some(1.0));
        let w0 = credibility_weights(&g, &ext, 1.0, 0.0);
        assert!(w0.weights.values().all(|v| *v == 1.0));
        let none = Extension {
            members: BTreeSet::new(),
            semantics: Semantics::Grounded,
        };
        assert!(credibility_weights(&g, &none, 1.0, 0.5).weights.values().all(|v| *v == 1.0));

        assert_eq!(min_critical_weight(&w, ["a", "b"]), Ok(1.0));
        assert_eq!(min_critical_weight(&w, ["a"]), Ok(1.5));
        assert_eq!(min_critical_weight(&w, []), Err(ArgError::EmptyCriticalSet));
    }

    fn manuscript() -> Manuscript {
        Manuscript::new(
            vec![1, 2, 3],
            vec![Claim::new("c1", "x", [1, 2]), Claim::new("c2", "y", [3])],
            vec![
                EvidenceUnit::new("e2", EvidenceKind::Table, 1, "").referencing(["c1"]),
                EvidenceUnit::new("e1", EvidenceKind::TextSpan, 1, "see c1"),
                EvidenceUnit::new("e3", EvidenceKind::Figure, 3, "nothing"),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn justification_picks_lowest_id_match() {
        let m = manuscript();
        let ids = |a: &Argument| justification(a, &m).iter().map(|e| e.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&Argument::anchored("c1", 1)), ["e1"]);
        assert!(ids(&Argument::anchored("c1", 2)).is_empty());
        assert!(ids(&Argument::anchored("c2", 3)).is_empty());
    }

    #[test]
    fn framework_from_manuscript() {
        let m = manuscript();
        let rel = Relations {
            attacks: vec![Edge::new("c2", "c1")],
            supports: vec![],
        };
        let g = build_framework(&m, &rel).unwrap();
        let ids: Vec<_> = g.arguments().iter().map(|a| a.id.as_str()).collect();
        assert_eq!(ids, ["c1@1", "c1@2", "c2@3"]);
        assert_eq!(attacks(&g), [("c2@3", "c1@1"), ("c2@3", "c1@2")]);
        let bad = Relations {
            attacks: vec![Edge::new("zz", "c1")],
            supports: vec![],
        };
        assert_eq!(build_framework(&m, &bad), Err(ArgError::UnknownArgument("zz".into())));
    }
}
