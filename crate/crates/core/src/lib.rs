//! Leader-follower simulation of a cobot co-regulating a human order picker's
//! trust and fatigue over a picking shift.
//!
//! Each turn the cobot (leader) commits to a collaboration level anticipating
//! the human's (follower's) effort choice; fatigue and trust then evolve from
//! the outcome. Four model variants are provided, from a naive trust rule up
//! to random disruptions with an apology-based trust repair mode.

pub mod chart;
pub mod config;
pub mod disruption;
pub mod dynamics;
pub mod game;
pub mod output;
pub mod repair;
pub mod report;
pub mod sim;

pub use disruption::{DisruptionEvent, DisruptionParams, RandomStream};
pub use dynamics::{InteractionOutcome, TrustParams, TrustRule};
pub use game::{ActionPair, CollabLevel, EffortLevel, GameParams, HumanState};
pub use repair::ApologyController;
pub use sim::{
    run_ensemble, run_shift, EnsembleSummary, ModelConfig, ModelVariant, RecoveryTime, ShiftRun,
    ShiftSummary, StepRecord,
};
