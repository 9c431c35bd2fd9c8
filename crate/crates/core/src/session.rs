//! A single reviewer session: epistemic state, guard state and the review
//! pipeline that ties belief, argumentation and scoring together.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::argumentation::{accepted_extension, build_framework, credibility_weights, critical_arguments, ArgError};
use crate::belief::{observe, BeliefError, BeliefState, EpistemicEvent, EpistemicState};
use crate::config::EngineConfig;
use crate::guards::{Enforcement, Forbiddance, GuardState, Obligation, RefusalRecord, MAX_GROUNDING_ATTEMPTS};
use crate::manuscript::{Domain, ReviewTask};
use crate::report::ReportFile;
use crate::scoring::{build_report, default_checklist, BuildError, ChecklistModule, ReportInputs, ScoringError, Thresholds};
use crate::submission::Submission;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Argumentation(#[from] ArgError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// Reviewer-specific settings layered over the engine configuration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReviewerSettings {
    /// Multiplicative prior tilt per hypothesis id.
    pub prior_skew: BTreeMap<String, f64>,
    pub thresholds: Option<Thresholds>,
    pub checklist_domain: Option<Domain>,
    /// Replaces the built-in checklist for the session's domain.
    pub checklist: Option<ChecklistModule>,
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)] // one outcome per run; boxing buys nothing
pub enum SessionOutcome {
    Decided(ReportFile),
    /// Claim-derived issues lacked anchors; grounding attempts remain.
    GroundingFailed { argument_ids: Vec<String> },
    Halted { input: String, record: RefusalRecord },
    Refused(RefusalRecord),
}

impl SessionOutcome {
    /// The report file for this outcome, if one is emitted.
    pub fn report(&self, task: ReviewTask) -> Option<ReportFile> {
        match self {
            SessionOutcome::Decided(r) => Some(r.clone()),
            SessionOutcome::Halted { record, .. } | SessionOutcome::Refused(record) => {
                Some(ReportFile::refused(task, record.clone()))
            }
            SessionOutcome::GroundingFailed { .. } => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReviewSession {
    state: EpistemicState,
    guards: GuardState,
    submission: Option<Arc<Submission>>,
    config: EngineConfig,
    settings: ReviewerSettings,
}

impl ReviewSession {
    pub fn new(task: ReviewTask, config: EngineConfig) -> Self {
        Self::with_settings(task, config, ReviewerSettings::default())
    }

    pub fn with_settings(task: ReviewTask, config: EngineConfig, settings: ReviewerSettings) -> Self {
        let mut guards = GuardState::new();
        guards.set_violated(Forbiddance::NoManuscript, true);
        ReviewSession {
            state: EpistemicState::new(task),
            guards,
            submission: None,
            config,
            settings,
        }
    }

    pub fn task(&self) -> ReviewTask {
        self.state.task
    }

    pub fn belief(&self) -> &BeliefState {
        &self.state.belief
    }

    pub fn guards(&self) -> &GuardState {
        &self.guards
    }

    fn fresh_guards(&mut self) {
        self.guards = GuardState::new();
        let Some(sub) = &self.submission else {
            self.guards.set_violated(Forbiddance::NoManuscript, true);
            return;
        };
        let off_topic = matches!(
            (self.config.scope.domain, sub.manuscript.declared_domain()),
            (Some(scope), Some(declared)) if scope != declared
        );
        self.guards.set_violated(Forbiddance::OffTopic, off_topic);
        self.guards.set_satisfied(Obligation::ScopeOnly, !off_topic);
    }

    pub fn upload(&mut self, submission: Arc<Submission>) -> Result<(), SessionError> {
        let manuscript = Arc::new(submission.manuscript.clone());
        self.state = self.state.apply_event(EpistemicEvent::Upload(manuscript))?;
        if !self.settings.prior_skew.is_empty() {
            self.state.belief = BeliefState::skewed_prior(&submission.manuscript, &self.settings.prior_skew)?;
        }
        self.submission = Some(submission);
        self.fresh_guards();
        Ok(())
    }

    pub fn reset(&mut self) {
        self.state = self
            .state
            .apply_event(EpistemicEvent::Reset)
            .expect("reset is total");
        self.submission = None;
        self.fresh_guards();
    }

    pub fn retask(&mut self, task: ReviewTask) -> Result<(), SessionError> {
        if self.submission.is_none() {
            self.guards.set_violated(Forbiddance::NoManuscript, true);
        }
        self.state = self.state.apply_event(EpistemicEvent::Retask(task))?;
        if let Some(sub) = &self.submission {
            if !self.settings.prior_skew.is_empty() {
                self.state.belief = BeliefState::skewed_prior(&sub.manuscript, &self.settings.prior_skew)?;
            }
        }
        Ok(())
    }

    fn checklist_for(&self, sub: &Submission) -> ChecklistModule {
        if let Some(cl) = &self.settings.checklist {
            return cl.clone();
        }
        let domain = self
            .settings
            .checklist_domain
            .or(sub.manuscript.declared_domain())
            .unwrap_or(Domain::Stem);
        default_checklist(domain)
    }

    /// One review attempt.
    pub fn run(&mut self) -> Result<SessionOutcome, SessionError> {
        match self.guards.enforce() {
            Enforcement::Proceed => {}
            Enforcement::HaltRequestInput { input, record } => return Ok(SessionOutcome::Halted { input, record }),
            Enforcement::RefuseWithInstructions(record) => return Ok(SessionOutcome::Refused(record)),
        }
        let sub = self.submission.clone().expect("guards ensure a manuscript is loaded");
        let m = &sub.manuscript;
        let cfg = &self.config;

        let mut belief = self.state.belief.clone();
        for o in m.evidence() {
            belief = observe(&belief, m, o, &sub.likelihoods, cfg.belief.agm_floor)?.0;
        }

        let framework = build_framework(m, &sub.relations)?.compile_support();
        let arg_cfg = &cfg.argumentation;
        let extension = accepted_extension(&framework, arg_cfg.semantics, arg_cfg.enumeration_limit)?;
        let weights = credibility_weights(&framework, &extension, arg_cfg.w0, arg_cfg.kappa);
        let critical = critical_arguments(&framework, m);
        self.guards.satisfy(Obligation::CheckCoherence);
        self.guards.satisfy(Obligation::CheckFabrication);

        let checklist = self.checklist_for(&sub).evaluate(m, &sub.checklist_outcomes);
        self.guards.satisfy(Obligation::CheckNovelty);

        let thresholds = self.settings.thresholds.unwrap_or(cfg.thresholds);
        let obligations_unmet = Obligation::ALL
            .iter()
            .filter(|o| **o != Obligation::GroundToPages)
            .any(|o| !self.guards.is_satisfied(*o));

        let inputs = ReportInputs {
            task: self.state.task,
            manuscript: m,
            framework: &framework,
            extension: &extension,
            weights: &weights,
            critical: &critical,
            detectors: &sub.detectors,
            checklist: &checklist,
            belief: &belief,
            thresholds: &thresholds,
            score_weights: &cfg.weights,
            obligations_unmet,
        };
        match build_report(&inputs) {
            Ok((outcome, scores)) => {
                self.guards.satisfy(Obligation::GroundToPages);
                self.state.belief = belief.clone();
                Ok(SessionOutcome::Decided(ReportFile::decided(
                    self.state.task,
                    &outcome,
                    scores,
                    &belief,
                )))
            }
            Err(BuildError::Unanchored(u)) => {
                self.guards.record_grounding_failure();
                match self.guards.enforce() {
                    Enforcement::RefuseWithInstructions(record) => Ok(SessionOutcome::Refused(record)),
                    _ => Ok(SessionOutcome::GroundingFailed {
                        argument_ids: u.argument_ids,
                    }),
                }
            }
            Err(BuildError::Scoring(e)) => Err(e.into()),
        }
    }

    /// Repeats [`ReviewSession::run`] until it settles or grounding attempts
    /// are exhausted.
    pub fn run_to_completion(&mut self) -> Result<SessionOutcome, SessionError> {
        let mut outcome = self.run()?;
        for _ in 1..MAX_GROUNDING_ATTEMPTS {
            if !matches!(outcome, SessionOutcome::GroundingFailed { .. }) {
                break;
            }
            outcome = self.run()?;
        }
        Ok(outcome)
    }
}
