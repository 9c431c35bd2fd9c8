//! Obligations, forbiddances and the procedural policy that turns violations
//! into a halt or a refusal.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Failed grounding attempts after which refusal is mandatory.
pub const MAX_GROUNDING_ATTEMPTS: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Obligation {
    ScopeOnly,
    GroundToPages,
    CheckCoherence,
    CheckNovelty,
    CheckFabrication,
}

impl Obligation {
    pub const ALL: [Obligation; 5] = [
        Obligation::ScopeOnly,
        Obligation::GroundToPages,
        Obligation::CheckCoherence,
        Obligation::CheckNovelty,
        Obligation::CheckFabrication,
    ];

    fn name(self) -> &'static str {
        match self {
            Obligation::ScopeOnly => "scope_only",
            Obligation::GroundToPages => "ground_to_pages",
            Obligation::CheckCoherence => "check_coherence",
            Obligation::CheckNovelty => "check_novelty",
            Obligation::CheckFabrication => "check_fabrication",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Forbiddance {
    OffTopic,
    NoManuscript,
}

impl Forbiddance {
    pub const ALL: [Forbiddance; 2] = [Forbiddance::OffTopic, Forbiddance::NoManuscript];

    fn name(self) -> &'static str {
        match self {
            Forbiddance::OffTopic => "off_topic",
            Forbiddance::NoManuscript => "no_manuscript",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    Forbidden(Forbiddance),
    Unmet(Obligation),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Forbidden(x) => write!(f, "F({})", x.name()),
            Violation::Unmet(o) => write!(f, "O({})", o.name()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    Violations(Vec<Violation>),
}

/// Machine-readable halt/refusal record written into reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefusalRecord {
    pub code: String,
    pub unmet_guards: Vec<String>,
    pub instructions: String,
}

pub const CODE_HALT: &str = "halt_request_input";
pub const CODE_REFUSE: &str = "refuse_with_instructions";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Enforcement {
    Proceed,
    /// Names the missing or offending input.
    HaltRequestInput { input: String, record: RefusalRecord },
    RefuseWithInstructions(RefusalRecord),
}

/// Per-session guard set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardState {
    obligations: BTreeMap<Obligation, bool>,
    forbiddances: BTreeMap<Forbiddance, bool>,
    grounding_attempts: u32,
    refused: bool,
}

impl Default for GuardState {
    fn default() -> Self {
        GuardState {
            obligations: Obligation::ALL.iter().map(|o| (*o, false)).collect(),
            forbiddances: Forbiddance::ALL.iter().map(|f| (*f, false)).collect(),
            grounding_attempts: 0,
            refused: false,
        }
    }
}

impl GuardState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn satisfy(&mut self, o: Obligation) {
        self.obligations.insert(o, true);
    }

    pub fn set_satisfied(&mut self, o: Obligation, satisfied: bool) {
        self.obligations.insert(o, satisfied);
    }

    pub fn is_satisfied(&self, o: Obligation) -> bool {
        self.obligations[&o]
    }

    pub fn set_violated(&mut self, f: Forbiddance, violated: bool) {
        self.forbiddances.insert(f, violated);
    }

    pub fn is_violated(&self, f: Forbiddance) -> bool {
        self.forbiddances[&f]
    }

    pub fn grounding_attempts(&self) -> u32 {
        self.grounding_attempts
    }

    /// Records one failed grounding attempt.
    pub fn record_grounding_failure(&mut self) {
        self.grounding_attempts += 1;
        self.obligations.insert(Obligation::GroundToPages, false);
    }

    pub fn any_obligation_unmet(&self) -> bool {
        self.obligations.values().any(|s| !s)
    }

    fn grounding_exhausted(&self) -> bool {
        !self.is_satisfied(Obligation::GroundToPages) && self.grounding_attempts >= MAX_GROUNDING_ATTEMPTS
    }

    /// Forbiddances first, then obligations, each in declaration order.
    pub fn check_admissible(&self) -> Admissibility {
        let mut v: Vec<Violation> = self
            .forbiddances
            .iter()
            .filter(|(_, violated)| **violated)
            .map(|(f, _)| Violation::Forbidden(*f))
            .collect();
        // Only grounding has a bounded number of attempts; other pending
        // obligations remain satisfiable.
        if self.grounding_exhausted() {
            v.push(Violation::Unmet(Obligation::GroundToPages));
        }
        if v.is_empty() {
            Admissibility::Admissible
        } else {
            Admissibility::Violations(v)
        }
    }

    /// Applies the procedural policy. A refusal is sticky until the guard
    /// state is rebuilt by a reset or upload.
    pub fn enforce(&mut self) -> Enforcement {
        if self.refused {
            return Enforcement::RefuseWithInstructions(self.refusal_record());
        }
        for f in [Forbiddance::NoManuscript, Forbiddance::OffTopic] {
            if self.is_violated(f) {
                let input = match f {
                    Forbiddance::NoManuscript => "manuscript",
                    Forbiddance::OffTopic => "in-scope manuscript",
                };
                let record = RefusalRecord {
                    code: CODE_HALT.into(),
                    unmet_guards: vec![Violation::Forbidden(f).to_string()],
                    instructions: format!("Execution halted: provide the {input} to continue."),
                };
                return Enforcement::HaltRequestInput {
                    input: input.into(),
                    record,
                };
            }
        }
        if self.grounding_exhausted() {
            self.refused = true;
            return Enforcement::RefuseWithInstructions(self.refusal_record());
        }
        Enforcement::Proceed
    }

    fn refusal_record(&self) -> RefusalRecord {
        RefusalRecord {
            code: CODE_REFUSE.into(),
            unmet_guards: vec![Violation::Unmet(Obligation::GroundToPages).to_string()],
            instructions: format!(
                "Review refused after {} failed grounding attempts: every claim-derived issue must cite \
                 evidence on a manuscript page. Supply page-anchored evidence for the listed claims and resubmit.",
                self.grounding_attempts
            ),
        }
    }
}
