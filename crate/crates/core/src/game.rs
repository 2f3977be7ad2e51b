//! Stage game between the cobot (leader) and the human picker (follower).
//!
//! Each turn the cobot commits to a collaboration level while anticipating the
//! human's best response; the human then picks an effort level. Both players
//! have pure-strategy, two-action sets, so the subgame perfect outcome is found
//! by enumerating the follower's response to each leader action.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Utilities closer than this are treated as tied.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum GameError {
    #[error("trust {0} is outside [0, 1]")]
    TrustOutOfRange(f64),
    #[error("fatigue {0} must be finite and non-negative")]
    InvalidFatigue(f64),
}

/// Human effort level. `Normal < High`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EffortLevel {
    Normal,
    High,
}

impl EffortLevel {
    pub const ALL: [EffortLevel; 2] = [EffortLevel::Normal, EffortLevel::High];

    pub fn as_str(self) -> &'static str {
        match self {
            EffortLevel::Normal => "normal",
            EffortLevel::High => "high",
        }
    }
}

impl fmt::Display for EffortLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cobot collaboration level. `Low < High`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CollabLevel {
    Low,
    High,
}

impl CollabLevel {
    pub const ALL: [CollabLevel; 2] = [CollabLevel::Low, CollabLevel::High];

    pub fn as_str(self) -> &'static str {
        match self {
            CollabLevel::Low => "low",
            CollabLevel::High => "high",
        }
    }
}

impl fmt::Display for CollabLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The follower's internal state: accumulated fatigue and trust in the cobot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HumanState {
    fatigue: f64,
    trust: f64,
}

impl HumanState {
    pub fn new(fatigue: f64, trust: f64) -> Result<Self, GameError> {
        if !fatigue.is_finite() || fatigue < 0.0 {
            return Err(GameError::InvalidFatigue(fatigue));
        }
        check_trust(trust)?;
        Ok(Self { fatigue, trust })
    }

    pub fn fatigue(&self) -> f64 {
        self.fatigue
    }

    pub fn trust(&self) -> f64 {
        self.trust
    }
}

/// One turn's joint choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ActionPair {
    pub cobot: CollabLevel,
    pub human: EffortLevel,
}

impl ActionPair {
    pub fn new(cobot: CollabLevel, human: EffortLevel) -> Self {
        Self { cobot, human }
    }
}

/// Fatigue increment per (effort, collaboration) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FatigueTable {
    pub normal_low: f64,
    pub normal_high: f64,
    pub high_low: f64,
    pub high_high: f64,
}

impl FatigueTable {
    pub fn get(&self, effort: EffortLevel, collab: CollabLevel) -> f64 {
        match (effort, collab) {
            (EffortLevel::Normal, CollabLevel::Low) => self.normal_low,
            (EffortLevel::Normal, CollabLevel::High) => self.normal_high,
            (EffortLevel::High, CollabLevel::Low) => self.high_low,
            (EffortLevel::High, CollabLevel::High) => self.high_high,
        }
    }
}

impl Default for FatigueTable {
    fn default() -> Self {
        Self {
            normal_low: 1.0,
            normal_high: 0.5,
            high_low: 2.5,
            high_high: 1.0,
        }
    }
}

/// Rewards, fatigue costs and the cobot's ergonomic penalty.
///
/// The perceived fatigue cost multiplier is
/// `kappa(T) = cost_kappa_base - cost_kappa_trust_slope * T`, so a trusting
/// human discounts the physical cost of effort.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GameParams {
    pub reward_normal: f64,
    pub reward_high: f64,
    pub fatigue_table: FatigueTable,
    pub cost_kappa_base: f64,
    pub cost_kappa_trust_slope: f64,
    pub fatigue_threshold: f64,
    pub penalty_weight: f64,
    /// The cobot helps when indifferent iff trust is at least this value.
    pub cobot_tiebreak_trust: f64,
}

impl Default for GameParams {
    fn default() -> Self {
        Self {
            reward_normal: 1.0,
            reward_high: 2.0,
            fatigue_table: FatigueTable::default(),
            cost_kappa_base: 2.6,
            cost_kappa_trust_slope: 1.0,
            fatigue_threshold: 80.0,
            penalty_weight: 100.0,
            cobot_tiebreak_trust: 0.5,
        }
    }
}

impl GameParams {
    pub fn kappa(&self, trust: f64) -> f64 {
        self.cost_kappa_base - self.cost_kappa_trust_slope * trust
    }

    /// Checks the parameter invariants. On failure returns the offending field
    /// name and a description of the broken constraint.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        let t = &self.fatigue_table;
        let reals = [
            ("game.reward_normal", self.reward_normal),
            ("game.reward_high", self.reward_high),
            ("game.fatigue_normal_low", t.normal_low),
            ("game.fatigue_normal_high", t.normal_high),
            ("game.fatigue_high_low", t.high_low),
            ("game.fatigue_high_high", t.high_high),
            ("game.cost_kappa_base", self.cost_kappa_base),
            ("game.cost_kappa_trust_slope", self.cost_kappa_trust_slope),
            ("game.fatigue_threshold", self.fatigue_threshold),
            ("game.penalty_weight", self.penalty_weight),
            ("game.cobot_tiebreak_trust", self.cobot_tiebreak_trust),
        ];
        for (key, v) in reals {
            if !v.is_finite() {
                return Err((key, format!("must be finite, got {v}")));
            }
        }
        for (key, v) in &reals[2..6] {
            if *v < 0.0 {
                return Err((key, format!("fatigue increments must be >= 0, got {v}")));
            }
        }
        if self.reward_high <= self.reward_normal {
            return Err(("game.reward_high", "must exceed game.reward_normal".into()));
        }
        if self.fatigue_threshold <= 0.0 {
            return Err(("game.fatigue_threshold", "must be > 0".into()));
        }
        if self.penalty_weight <= self.reward_high {
            return Err(("game.penalty_weight", "must exceed game.reward_high".into()));
        }
        // kappa is affine in T, so positivity at both ends covers [0, 1].
        if self.kappa(0.0) <= 0.0 || self.kappa(1.0) <= 0.0 {
            return Err((
                "game.cost_kappa_base",
                "cost multiplier must stay positive for all trust in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_trust(trust: f64) -> Result<(), GameError> {
    if (0.0..=1.0).contains(&trust) {
        Ok(())
    } else {
        Err(GameError::TrustOutOfRange(trust))
    }
}

/// Items picked at the given effort level.
pub fn human_reward(effort: EffortLevel, params: &GameParams) -> f64 {
    match effort {
        EffortLevel::Normal => params.reward_normal,
        EffortLevel::High => params.reward_high,
    }
}

pub fn fatigue_increment(pair: ActionPair, params: &GameParams) -> f64 {
    params.fatigue_table.get(pair.human, pair.cobot)
}

/// Fatigue cost as the human perceives it at the given trust level.
pub fn perceived_cost(pair: ActionPair, trust: f64, params: &GameParams) -> Result<f64, GameError> {
    check_trust(trust)?;
    Ok(fatigue_increment(pair, params) * params.kappa(trust))
}

pub fn human_utility(pair: ActionPair, trust: f64, params: &GameParams) -> Result<f64, GameError> {
    Ok(human_reward(pair.human, params) - perceived_cost(pair, trust, params)?)
}

/// Follower's best response. Ties go to `High` effort when the cobot helps
/// and to `Normal` effort otherwise.
pub fn human_best_response(
    collab: CollabLevel,
    trust: f64,
    params: &GameParams,
) -> Result<EffortLevel, GameError> {
    let high = human_utility(ActionPair::new(collab, EffortLevel::High), trust, params)?;
    let normal = human_utility(ActionPair::new(collab, EffortLevel::Normal), trust, params)?;
    Ok(if (high - normal).abs() <= TIE_EPSILON {
        match collab {
            CollabLevel::High => EffortLevel::High,
            CollabLevel::Low => EffortLevel::Normal,
        }
    } else if high > normal {
        EffortLevel::High
    } else {
        EffortLevel::Normal
    })
}

/// Cobot utility: the human's reward, minus the penalty when the anticipated
/// (disruption-free) next fatigue strictly exceeds the threshold.
pub fn cobot_utility(pair: ActionPair, state: &HumanState, params: &GameParams) -> f64 {
    let reward = human_reward(pair.human, params);
    let next_fatigue = state.fatigue() + fatigue_increment(pair, params);
    if next_fatigue > params.fatigue_threshold {
        reward - params.penalty_weight
    } else {
        reward
    }
}

/// Solves one stage by backward induction: best response to each leader
/// action, then the leader's utility-maximising commitment.
pub fn solve_stage_game(state: &HumanState, params: &GameParams) -> ActionPair {
    let respond = |collab| {
        // HumanState guarantees trust in [0, 1].
        let effort = human_best_response(collab, state.trust(), params)
            .expect("HumanState trust is always in range");
        ActionPair::new(collab, effort)
    };
    let helping = respond(CollabLevel::High);
    let idle = respond(CollabLevel::Low);
    let u_help = cobot_utility(helping, state, params);
    let u_idle = cobot_utility(idle, state, params);
    if (u_help - u_idle).abs() <= TIE_EPSILON {
        if state.trust() >= params.cobot_tiebreak_trust {
            helping
        } else {
            idle
        }
    } else if u_help > u_idle {
        helping
    } else {
        idle
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CollabLevel as C;
    use EffortLevel as E;

    fn p() -> GameParams {
        GameParams::default()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn rewards() {
        assert_eq!(human_reward(E::Normal, &p()), 1.0);
        assert_eq!(human_reward(E::High, &p()), 2.0);
        let params = GameParams {
            reward_high: 3.0,
            ..p()
        };
        assert_eq!(human_reward(E::High, &params), 3.0);
    }

    #[test]
    fn fatigue_table_entries() {
        assert_eq!(
            fatigue_increment(ActionPair::new(C::Low, E::Normal), &p()),
            1.0
        );
        assert_eq!(
            fatigue_increment(ActionPair::new(C::High, E::Normal), &p()),
            0.5
        );
        assert_eq!(
            fatigue_increment(ActionPair::new(C::Low, E::High), &p()),
            2.5
        );
        assert_eq!(
            fatigue_increment(ActionPair::new(C::High, E::High), &p()),
            1.0
        );
    }

    #[test]
    fn perceived_cost_values() {
        let c = perceived_cost(ActionPair::new(C::Low, E::Normal), 1.0, &p()).unwrap();
        assert!(close(c, 1.6));
        let c = perceived_cost(ActionPair::new(C::High, E::High), 0.6, &p()).unwrap();
        assert!(close(c, 2.0));
        let c = perceived_cost(ActionPair::new(C::High, E::Normal), 0.0, &p()).unwrap();
        assert!(close(c, 1.3));
    }

    #[test]
    fn perceived_cost_rejects_bad_trust() {
        let pair = ActionPair::new(C::Low, E::Normal);
        assert_eq!(
            perceived_cost(pair, 1.2, &p()),
            Err(GameError::TrustOutOfRange(1.2))
        );
        assert!(perceived_cost(pair, -0.01, &p()).is_err());
        assert!(perceived_cost(pair, f64::NAN, &p()).is_err());
    }

    #[test]
    fn human_utility_values() {
        let u = human_utility(ActionPair::new(C::High, E::High), 1.0, &p()).unwrap();
        assert!(close(u, 0.4));
        let a = human_utility(ActionPair::new(C::High, E::Normal), 0.6, &p()).unwrap();
        let b = human_utility(ActionPair::new(C::High, E::High), 0.6, &p()).unwrap();
        assert!(close(a, 0.0) && close(b, 0.0));
        let zero_cost = GameParams {
            cost_kappa_base: 0.0,
            cost_kappa_trust_slope: 0.0,
            ..p()
        };
        let u = human_utility(ActionPair::new(C::Low, E::Normal), 0.3, &zero_cost).unwrap();
        assert_eq!(u, 1.0);
    }

    #[test]
    fn best_response_examples() {
        assert_eq!(human_best_response(C::High, 0.7, &p()).unwrap(), E::High);
        assert_eq!(human_best_response(C::Low, 1.0, &p()).unwrap(), E::Normal);
        assert_eq!(human_best_response(C::High, 0.6, &p()).unwrap(), E::High);
        assert_eq!(human_best_response(C::High, 0.5, &p()).unwrap(), E::Normal);
    }

    #[test]
    fn cobot_utility_penalty_boundary() {
        let s = |f| HumanState::new(f, 0.5).unwrap();
        assert_eq!(
            cobot_utility(ActionPair::new(C::High, E::High), &s(10.0), &p()),
            2.0
        );
        assert_eq!(
            cobot_utility(ActionPair::new(C::Low, E::Normal), &s(79.5), &p()),
            -99.0
        );
        assert_eq!(
            cobot_utility(ActionPair::new(C::High, E::Normal), &s(79.8), &p()),
            -99.0
        );
        assert_eq!(
            cobot_utility(ActionPair::new(C::High, E::Normal), &s(79.4), &p()),
            1.0
        );
        // landing exactly on the threshold is not a crossing
        assert_eq!(
            cobot_utility(ActionPair::new(C::Low, E::Normal), &s(79.0), &p()),
            1.0
        );
    }

    #[test]
    fn stage_game_examples() {
        let solve = |f, t| solve_stage_game(&HumanState::new(f, t).unwrap(), &p());
        assert_eq!(solve(0.0, 0.5), ActionPair::new(C::High, E::Normal));
        assert_eq!(solve(0.0, 0.45), ActionPair::new(C::Low, E::Normal));
        assert_eq!(solve(0.0, 0.8), ActionPair::new(C::High, E::High));
    }

    #[test]
    fn stage_game_avoids_threshold_at_low_trust() {
        // Only the helping path (0.5 fatigue) stays under 80.
        let s = HumanState::new(79.2, 0.1).unwrap();
        assert_eq!(
            solve_stage_game(&s, &p()),
            ActionPair::new(C::High, E::Normal)
        );
    }

    #[test]
    fn state_rejects_invalid() {
        assert!(HumanState::new(-1.0, 0.5).is_err());
        assert!(HumanState::new(f64::INFINITY, 0.5).is_err());
        assert!(HumanState::new(0.0, 1.5).is_err());
    }

    #[test]
    fn default_params_valid() {
        assert!(p().validate().is_ok());
        let bad = GameParams {
            cost_kappa_base: 0.9,
            ..p()
        };
        assert_eq!(bad.validate().unwrap_err().0, "game.cost_kappa_base");
        let bad = GameParams {
            penalty_weight: 1.5,
            ..p()
        };
        assert_eq!(bad.validate().unwrap_err().0, "game.penalty_weight");
    }

    #[test]
    fn best_response_is_optimal_on_grid() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            for collab in C::ALL {
                let chosen = human_best_response(collab, t, &p()).unwrap();
                let other = if chosen == E::High {
                    E::Normal
                } else {
                    E::High
                };
                let u = |e| human_utility(ActionPair::new(collab, e), t, &p()).unwrap();
                assert!(u(chosen) >= u(other) - TIE_EPSILON, "T={t} collab={collab}");
            }
        }
    }

    #[test]
    fn effort_switch_threshold() {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let high = human_best_response(C::High, t, &p()).unwrap() == E::High;
            assert_eq!(high, i >= 60, "T={t}");
            assert_eq!(human_best_response(C::Low, t, &p()).unwrap(), E::Normal);
        }
    }

    #[test]
    fn effort_gain_increases_with_trust() {
        for collab in C::ALL {
            let gap = |t: f64| {
                human_utility(ActionPair::new(collab, E::High), t, &p()).unwrap()
                    - human_utility(ActionPair::new(collab, E::Normal), t, &p()).unwrap()
            };
            for i in 0..100 {
                let (a, b) = (i as f64 / 100.0, (i + 1) as f64 / 100.0);
                assert!(gap(b) > gap(a));
            }
        }
    }

    #[test]
    fn penalty_dominance() {
        for fi in 0..=90 {
            for ti in 0..=20 {
                let s = HumanState::new(fi as f64 * 0.9, ti as f64 / 20.0).unwrap();
                let pick = |c| {
                    let e = human_best_response(c, s.trust(), &p()).unwrap();
                    ActionPair::new(c, e)
                };
                let crosses =
                    |pair| s.fatigue() + fatigue_increment(pair, &p()) > p().fatigue_threshold;
                let (h, l) = (pick(C::High), pick(C::Low));
                if crosses(h) != crosses(l) {
                    let expected = if crosses(h) { l } else { h };
                    assert_eq!(solve_stage_game(&s, &p()), expected);
                }
            }
        }
    }
}
