//! Deterministic manuscript-review engine.
//!
//! A review fuses a discrete belief over claims, a Dung argumentation
//! framework over page-anchored arguments, and deontic guards into a scored
//! Accept / Revise / Reject recommendation. Double-blind runs, the
//! post-rejection game and corpus metrics build on the same pieces.

pub mod argumentation;
pub mod belief;
pub mod config;
pub mod dbsim;
pub mod eval;
pub mod guards;
pub mod manuscript;
pub mod prr;
pub mod report;
pub mod scoring;
pub mod session;
pub mod submission;

pub use config::EngineConfig;
pub use manuscript::{Claim, Domain, EvidenceKind, EvidenceUnit, Manuscript, ManuscriptError, ReviewTask};
pub use report::ReportFile;
pub use scoring::Recommendation;
pub use session::{ReviewSession, SessionOutcome};
pub use submission::Submission;
