//! Engine configuration: every free parameter of the review pipeline in one
//! place, with defaults.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::argumentation::{Semantics, DEFAULT_ENUMERATION_LIMIT, DEFAULT_KAPPA, DEFAULT_W0};
use crate::belief::DEFAULT_REVISION_FLOOR;
use crate::manuscript::Domain;
use crate::prr::DEFAULT_DECAY;
use crate::scoring::{ScoreWeights, Thresholds};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArgumentationConfig {
    pub w0: f64,
    pub kappa: f64,
    pub semantics: Semantics,
    pub enumeration_limit: usize,
}

impl Default for ArgumentationConfig {
    fn default() -> Self {
        ArgumentationConfig {
            w0: DEFAULT_W0,
            kappa: DEFAULT_KAPPA,
            semantics: Semantics::Grounded,
            enumeration_limit: DEFAULT_ENUMERATION_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeliefConfig {
    pub agm_floor: f64,
}

impl Default for BeliefConfig {
    fn default() -> Self {
        BeliefConfig {
            agm_floor: DEFAULT_REVISION_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrrConfig {
    pub decay: f64,
}

impl Default for PrrConfig {
    fn default() -> Self {
        PrrConfig { decay: DEFAULT_DECAY }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationConfig {
    pub compliance_threshold: f64,
    pub uncertainty_tau: f64,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        EvaluationConfig {
            compliance_threshold: 0.2,
            uncertainty_tau: 0.20,
        }
    }
}

/// Task scope. A manuscript declaring a different domain is off-topic.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScopeConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub thresholds: Thresholds,
    pub weights: ScoreWeights,
    pub argumentation: ArgumentationConfig,
    pub belief: BeliefConfig,
    pub prr: PrrConfig,
    pub evaluation: EvaluationConfig,
    pub scope: ScopeConfig,
}

impl EngineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.thresholds.validate().map_err(|e| ConfigError(e.to_string()))?;
        self.weights.validate().map_err(|e| ConfigError(e.to_string()))?;
        let a = &self.argumentation;
        if !a.w0.is_finite() || !a.kappa.is_finite() || a.kappa < 0.0 {
            return Err(ConfigError("argumentation.kappa must be finite and >= 0".into()));
        }
        if a.enumeration_limit == 0 || a.enumeration_limit > 64 {
            return Err(ConfigError("argumentation.enumeration_limit must be in 1..=64".into()));
        }
        let floor = self.belief.agm_floor;
        if !(floor > 0.0 && floor < 1.0) {
            return Err(ConfigError("belief.agm_floor must lie in (0, 1)".into()));
        }
        let decay = self.prr.decay;
        if !(0.0..=1.0).contains(&decay) {
            return Err(ConfigError("prr.decay must lie in [0, 1]".into()));
        }
        let e = &self.evaluation;
        if !(e.compliance_threshold > 0.0 && e.compliance_threshold < 1.0) {
            return Err(ConfigError("evaluation.compliance_threshold must lie in (0, 1)".into()));
        }
        if !(e.uncertainty_tau > 0.0 && e.uncertainty_tau < 1.0) {
            return Err(ConfigError("evaluation.uncertainty_tau must lie in (0, 1)".into()));
        }
        Ok(())
    }
}
