//! Apology mode: after a cobot failure the leader is forced to offer high
//! collaboration for a fixed number of subsequent turns.

use crate::dynamics::InteractionOutcome;
use crate::game::CollabLevel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ApologyController {
    remaining: u32,
    duration: u32,
}

impl ApologyController {
    /// # Panics
    /// If `duration` is zero.
    pub fn new(duration: u32) -> Self {
        assert!(duration > 0, "apology duration must be positive");
        Self {
            remaining: 0,
            duration,
        }
    }

    pub fn with_remaining(duration: u32, remaining: u32) -> Self {
        let mut c = Self::new(duration);
        c.remaining = remaining.min(duration);
        c
    }

    pub fn remaining(&self) -> u32 {
        self.remaining
    }

    pub fn duration(&self) -> u32 {
        self.duration
    }

    /// A severe failure (re)arms the full apology window.
    pub fn on_outcome(self, outcome: InteractionOutcome) -> Self {
        match outcome {
            InteractionOutcome::SevereFailure => Self {
                remaining: self.duration,
                ..self
            },
            _ => self,
        }
    }

    pub fn leader_override(&self) -> Option<CollabLevel> {
        (self.remaining > 0).then_some(CollabLevel::High)
    }

    pub fn tick(self) -> Self {
        Self {
            remaining: self.remaining.saturating_sub(1),
            ..self
        }
    }
}

impl Default for ApologyController {
    fn default() -> Self {
        Self::new(3)
    }
}
