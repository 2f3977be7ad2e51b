//! Interaction classification and the end-of-turn fatigue/trust updates.

use std::fmt;

use serde::Serialize;

use crate::game::{fatigue_increment, ActionPair, CollabLevel, EffortLevel, GameParams};

/// Trust is snapped to a grid of `1 / TRUST_SCALE` after every update so that
/// repeated `+0.05` / `-0.10` steps land exactly on their decimal values.
pub const TRUST_SCALE: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionOutcome {
    Success,
    MinorFailure,
    SevereFailure,
}

impl InteractionOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            InteractionOutcome::Success => "success",
            InteractionOutcome::MinorFailure => "minor_failure",
            InteractionOutcome::SevereFailure => "severe_failure",
        }
    }
}

impl fmt::Display for InteractionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which definition of a successful interaction the human applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrustRule {
    /// Success only when both players go high.
    Naive,
    /// Success whenever the cobot's action lowered the human's fatigue cost.
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustParams {
    pub gain: f64,
    pub loss: f64,
    pub severe_loss: f64,
    pub initial_trust: f64,
    pub initial_fatigue: f64,
}

impl Default for TrustParams {
    fn default() -> Self {
        Self {
            gain: 0.05,
            loss: 0.10,
            severe_loss: 0.50,
            initial_trust: 0.5,
            initial_fatigue: 0.0,
        }
    }
}

impl TrustParams {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        for (key, v) in [
            ("trust.gain", self.gain),
            ("trust.loss", self.loss),
            ("trust.severe_loss", self.severe_loss),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return Err((key, format!("must be in (0, 1], got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.initial_trust) {
            return Err((
                "trust.initial",
                format!("must be in [0, 1], got {}", self.initial_trust),
            ));
        }
        if !(self.initial_fatigue.is_finite() && self.initial_fatigue >= 0.0) {
            return Err((
                "trust.initial_fatigue",
                format!("must be finite and >= 0, got {}", self.initial_fatigue),
            ));
        }
        Ok(())
    }
}

pub fn classify_interaction(
    rule: TrustRule,
    pair: ActionPair,
    severe_event: bool,
    params: &GameParams,
) -> InteractionOutcome {
    if severe_event {
        return InteractionOutcome::SevereFailure;
    }
    let success = match rule {
        TrustRule::Naive => pair.human == EffortLevel::High && pair.cobot == CollabLevel::High,
        TrustRule::Refined => {
            let baseline = ActionPair::new(CollabLevel::Low, pair.human);
            fatigue_increment(pair, params) < fatigue_increment(baseline, params)
        }
    };
    if success {
        InteractionOutcome::Success
    } else {
        InteractionOutcome::MinorFailure
    }
}

pub fn update_trust(trust: f64, outcome: InteractionOutcome, tp: &TrustParams) -> f64 {
    let delta = match outcome {
        InteractionOutcome::Success => tp.gain,
        InteractionOutcome::MinorFailure => -tp.loss,
        InteractionOutcome::SevereFailure => -tp.severe_loss,
    };
    let snapped = ((trust + delta) * TRUST_SCALE).round() / TRUST_SCALE;
    snapped.clamp(0.0, 1.0)
}

/// `extra` carries exogenous fatigue such as a difficult pick.
pub fn update_fatigue(fatigue: f64, pair: ActionPair, extra: f64, params: &GameParams) -> f64 {
    (fatigue + fatigue_increment(pair, params) + extra).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::FatigueTable;
    use proptest::prelude::*;
    use CollabLevel as C;
    use EffortLevel as E;
    use InteractionOutcome as O;

    fn gp() -> GameParams {
        GameParams::default()
    }

    fn pairs() -> [ActionPair; 4] {
        [
            ActionPair::new(C::Low, E::Normal),
            ActionPair::new(C::High, E::Normal),
            ActionPair::new(C::Low, E::High),
            ActionPair::new(C::High, E::High),
        ]
    }

    #[test]
    fn classification_examples() {
        let nh = ActionPair::new(C::High, E::Normal);
        assert_eq!(
            classify_interaction(TrustRule::Naive, nh, false, &gp()),
            O::MinorFailure
        );
        assert_eq!(
            classify_interaction(TrustRule::Refined, nh, false, &gp()),
            O::Success
        );
        let hh = ActionPair::new(C::High, E::High);
        assert_eq!(
            classify_interaction(TrustRule::Refined, hh, true, &gp()),
            O::SevereFailure
        );
        let nl = ActionPair::new(C::Low, E::Normal);
        assert_eq!(
            classify_interaction(TrustRule::Naive, nl, false, &gp()),
            O::MinorFailure
        );
    }

    #[test]
    fn naive_rule_has_single_success_cell() {
        let n = pairs()
            .iter()
            .filter(|&&p| classify_interaction(TrustRule::Naive, p, false, &gp()) == O::Success)
            .count();
        assert_eq!(n, 1);
    }

    #[test]
    fn severe_overrides_everything() {
        for rule in [TrustRule::Naive, TrustRule::Refined] {
            for pair in pairs() {
                assert_eq!(
                    classify_interaction(rule, pair, true, &gp()),
                    O::SevereFailure
                );
            }
        }
    }

    #[test]
    fn trust_update_examples() {
        let tp = TrustParams::default();
        assert_eq!(update_trust(0.5, O::Success, &tp), 0.55);
        assert_eq!(update_trust(0.97, O::Success, &tp), 1.0);
        assert_eq!(update_trust(0.30, O::SevereFailure, &tp), 0.0);
        assert_eq!(update_trust(0.5, O::MinorFailure, &tp), 0.4);
    }

    #[test]
    fn trust_steps_land_on_decimals() {
        let tp = TrustParams::default();
        let mut t = 0.5;
        for _ in 0..5 {
            t = update_trust(t, O::MinorFailure, &tp);
        }
        assert_eq!(t, 0.0);
        let mut t = 0.5;
        for _ in 0..2 {
            t = update_trust(t, O::Success, &tp);
        }
        assert_eq!(t, 0.6);
    }

    #[test]
    fn fatigue_update_examples() {
        assert_eq!(
            update_fatigue(0.0, ActionPair::new(C::Low, E::Normal), 0.0, &gp()),
            1.0
        );
        assert_eq!(
            update_fatigue(49.0, ActionPair::new(C::High, E::High), 0.0, &gp()),
            50.0
        );
        assert_eq!(
            update_fatigue(10.0, ActionPair::new(C::High, E::Normal), 5.0, &gp()),
            15.5
        );
    }

    proptest! {
        #[test]
        fn trust_stays_clamped(t in 0.0f64..=1.0, o in 0usize..3, gain in 0.001f64..=1.0,
                               loss in 0.001f64..=1.0, severe in 0.001f64..=1.0) {
            let tp = TrustParams { gain, loss, severe_loss: severe, ..TrustParams::default() };
            let out = update_trust(t, [O::Success, O::MinorFailure, O::SevereFailure][o], &tp);
            prop_assert!((0.0..=1.0).contains(&out));
        }

        #[test]
        fn fatigue_never_negative(f in 0.0f64..1e6, extra in 0.0f64..100.0, i in 0usize..4) {
            prop_assert!(update_fatigue(f, pairs()[i], extra, &gp()) >= 0.0);
        }

        #[test]
        fn refined_rule_follows_collaboration(nl in 0.0f64..10.0, hl in 0.0f64..10.0,
                                              dn in 0.001f64..5.0, dh in 0.001f64..5.0) {
            // High column strictly below the Low column.
            let params = GameParams {
                fatigue_table: FatigueTable {
                    normal_low: nl + dn,
                    normal_high: nl,
                    high_low: hl + dh,
                    high_high: hl,
                },
                ..gp()
            };
            for e in E::ALL {
                prop_assert_eq!(
                    classify_interaction(TrustRule::Refined, ActionPair::new(C::High, e), false, &params),
                    O::Success
                );
                prop_assert_eq!(
                    classify_interaction(TrustRule::Refined, ActionPair::new(C::Low, e), false, &params),
                    O::MinorFailure
                );
            }
        }
    }
}
