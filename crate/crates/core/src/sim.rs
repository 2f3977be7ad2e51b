//! Shift loop, model variants, KPIs and seed ensembles.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::disruption::{sample_disruption, DisruptionEvent, DisruptionParams, RandomStream};
use crate::dynamics::{
    classify_interaction, update_fatigue, update_trust, InteractionOutcome, TrustParams, TrustRule,
};
use crate::game::{
    human_best_response, human_reward, solve_stage_game, ActionPair, CollabLevel, EffortLevel,
    GameParams, HumanState,
};
use crate::repair::ApologyController;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidConfig { key: &'static str, reason: String },
    #[error("turn {turn} is outside the trajectory (1..={len})")]
    TurnOutOfRange { turn: usize, len: usize },
    #[error("turn {0} is not a severe failure")]
    NotSevere(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelVariant {
    /// Naive trust rule.
    V1_0,
    /// Refined trust rule.
    V1_1,
    /// Refined rule with random disruptions.
    V1_2,
    /// Disruptions plus apology mode.
    V1_3,
}

impl ModelVariant {
    pub const ALL: [ModelVariant; 4] = [Self::V1_0, Self::V1_1, Self::V1_2, Self::V1_3];

    pub fn trust_rule(self) -> TrustRule {
        match self {
            ModelVariant::V1_0 => TrustRule::Naive,
            _ => TrustRule::Refined,
        }
    }

    pub fn has_disruptions(self) -> bool {
        matches!(self, ModelVariant::V1_2 | ModelVariant::V1_3)
    }

    pub fn has_apology(self) -> bool {
        self == ModelVariant::V1_3
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelVariant::V1_0 => "v1.0",
            ModelVariant::V1_1 => "v1.1",
            ModelVariant::V1_2 => "v1.2",
            ModelVariant::V1_3 => "v1.3",
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase();
        let s = s.strip_prefix('v').unwrap_or(&s);
        match s.replace('_', ".").as_str() {
            "1.0" => Ok(Self::V1_0),
            "1.1" => Ok(Self::V1_1),
            "1.2" => Ok(Self::V1_2),
            "1.3" => Ok(Self::V1_3),
            _ => Err(format!(
                "unknown variant `{s}` (expected v1.0, v1.1, v1.2 or v1.3)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig {
    pub horizon: usize,
    pub game: GameParams,
    pub trust: TrustParams,
    pub disruption: DisruptionParams,
    pub apology_duration: u32,
    pub variant: ModelVariant,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            horizon: 50,
            game: GameParams::default(),
            trust: TrustParams::default(),
            disruption: DisruptionParams::default(),
            apology_duration: 3,
            variant: ModelVariant::V1_1,
            seed: 0,
        }
    }
}

impl ModelConfig {
    pub fn for_variant(variant: ModelVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let invalid = |(key, reason)| SimError::InvalidConfig { key, reason };
        if self.horizon == 0 {
            return Err(invalid(("horizon", "must be >= 1".to_string())));
        }
        if self.apology_duration == 0 {
            return Err(invalid(("apology.duration", "must be >= 1".to_string())));
        }
        self.game.validate().map_err(invalid)?;
        self.trust.validate().map_err(invalid)?;
        self.disruption.validate().map_err(invalid)?;
        Ok(())
    }
}

/// Audit of one turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// 1-based turn index.
    pub step: usize,
    pub trust_pre: f64,
    pub fatigue_pre: f64,
    pub cobot_action: CollabLevel,
    pub human_action: EffortLevel,
    pub disruption: DisruptionEvent,
    pub outcome: InteractionOutcome,
    pub items_picked: f64,
    pub extra_fatigue: f64,
    pub trust_post: f64,
    pub fatigue_post: f64,
    pub apology_remaining: u32,
}

/// Steps until trust regains its pre-failure level, or censored when the
/// shift ends first. `Censored` orders above every finite time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RecoveryTime {
    Steps(u32),
    Censored,
}

impl RecoveryTime {
    pub fn steps(self) -> Option<u32> {
        match self {
            RecoveryTime::Steps(k) => Some(k),
            RecoveryTime::Censored => None,
        }
    }

    /// Numeric value with censored times replaced by `cap`.
    pub fn capped(self, cap: f64) -> f64 {
        self.steps().map_or(cap, f64::from)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recovery {
    pub turn: usize,
    pub time: RecoveryTime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSummary {
    pub seed: u64,
    pub productivity: f64,
    pub final_fatigue: f64,
    pub final_trust: f64,
    pub peak_fatigue: f64,
    pub high_effort_turns: usize,
    pub severe_failure_turns: Vec<usize>,
    pub recovery_times: Vec<Recovery>,
}

impl ShiftSummary {
    pub fn first_recovery(&self) -> Option<RecoveryTime> {
        self.recovery_times.first().map(|r| r.time)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRun {
    pub records: Vec<StepRecord>,
    pub summary: ShiftSummary,
    /// Uniforms consumed from the random stream.
    pub draws: u64,
}

/// Plays one turn. Order: apology override, leader move, follower move,
/// disruption draw, fatigue, classification and trust, apology bookkeeping.
pub fn run_step(
    step: usize,
    state: HumanState,
    ctrl: ApologyController,
    stream: &mut RandomStream,
    cfg: &ModelConfig,
) -> (StepRecord, HumanState, ApologyController) {
    let game = &cfg.game;
    let trust = state.trust();

    let forced = if cfg.variant.has_apology() {
        ctrl.leader_override()
    } else {
        None
    };
    let pair = match forced {
        Some(collab) => {
            let effort = human_best_response(collab, trust, game)
                .expect("HumanState trust is always in range");
            ActionPair::new(collab, effort)
        }
        None => solve_stage_game(&state, game),
    };

    let event = if cfg.variant.has_disruptions() {
        sample_disruption(stream, &cfg.disruption)
    } else {
        DisruptionEvent::None
    };
    let severe = event == DisruptionEvent::CobotFailure;

    // A failed cobot provides no assistance that turn.
    let charged = if severe {
        ActionPair::new(CollabLevel::Low, pair.human)
    } else {
        pair
    };
    let extra = if event == DisruptionEvent::DifficultPick {
        cfg.disruption.difficult_pick_fatigue
    } else {
        0.0
    };
    let fatigue_post = update_fatigue(state.fatigue(), charged, extra, game);

    let outcome = classify_interaction(cfg.variant.trust_rule(), pair, severe, game);
    let trust_post = update_trust(trust, outcome, &cfg.trust);

    let mut ctrl = ctrl;
    if cfg.variant.has_apology() {
        if forced.is_some() {
            ctrl = ctrl.tick();
        }
        ctrl = ctrl.on_outcome(outcome);
    }

    let record = StepRecord {
        step,
        trust_pre: trust,
        fatigue_pre: state.fatigue(),
        cobot_action: pair.cobot,
        human_action: pair.human,
        disruption: event,
        outcome,
        items_picked: human_reward(pair.human, game),
        extra_fatigue: extra,
        trust_post,
        fatigue_post,
        apology_remaining: ctrl.remaining(),
    };
    let next = HumanState::new(fatigue_post, trust_post).expect("updates preserve state bounds");
    (record, next, ctrl)
}

pub fn run_shift(cfg: &ModelConfig) -> Result<ShiftRun, SimError> {
    cfg.validate()?;
    let mut state = HumanState::new(cfg.trust.initial_fatigue, cfg.trust.initial_trust)
        .expect("validated initial state");
    let mut ctrl = ApologyController::new(cfg.apology_duration);
    let mut stream = RandomStream::new(cfg.seed);
    let mut records = Vec::with_capacity(cfg.horizon);
    for step in 1..=cfg.horizon {
        let (rec, s, c) = run_step(step, state, ctrl, &mut stream, cfg);
        records.push(rec);
        state = s;
        ctrl = c;
    }
    let summary = summarize(&records, cfg);
    Ok(ShiftRun {
        records,
        summary,
        draws: stream.draws(),
    })
}

fn summarize(records: &[StepRecord], cfg: &ModelConfig) -> ShiftSummary {
    let last = records.last().expect("horizon >= 1");
    let severe_failure_turns: Vec<usize> = records
        .iter()
        .filter(|r| r.outcome == InteractionOutcome::SevereFailure)
        .map(|r| r.step)
        .collect();
    let recovery_times = severe_failure_turns
        .iter()
        .map(|&turn| Recovery {
            turn,
            time: recovery_time(records, turn, cfg.horizon).expect("turn is a severe failure"),
        })
        .collect();
    ShiftSummary {
        seed: cfg.seed,
        productivity: records.iter().map(|r| r.items_picked).sum(),
        final_fatigue: last.fatigue_post,
        final_trust: last.trust_post,
        peak_fatigue: records
            .iter()
            .map(|r| r.fatigue_post)
            .fold(cfg.trust.initial_fatigue, f64::max),
        high_effort_turns: records
            .iter()
            .filter(|r| r.human_action == EffortLevel::High)
            .count(),
        severe_failure_turns,
        recovery_times,
    }
}

/// Smallest `k >= 1` such that trust after turn `severe_turn + k` is back to
/// at least the trust held before `severe_turn`. Turns are 1-based.
pub fn recovery_time(
    records: &[StepRecord],
    severe_turn: usize,
    horizon: usize,
) -> Result<RecoveryTime, SimError> {
    if severe_turn == 0 || severe_turn > records.len() {
        return Err(SimError::TurnOutOfRange {
            turn: severe_turn,
            len: records.len(),
        });
    }
    let failed = &records[severe_turn - 1];
    if failed.outcome != InteractionOutcome::SevereFailure {
        return Err(SimError::NotSevere(severe_turn));
    }
    let last = horizon.min(records.len());
    Ok(records[severe_turn..last]
        .iter()
        .position(|r| r.trust_post >= failed.trust_pre)
        .map_or(RecoveryTime::Censored, |i| {
            RecoveryTime::Steps(i as u32 + 1)
        }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: f64,
    pub median: f64,
}

impl Aggregate {
    fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = values.into_iter().collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        };
        Self { mean, median }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSummary {
    pub variant: ModelVariant,
    pub horizon: usize,
    pub base_seed: u64,
    pub runs: Vec<ShiftSummary>,
    pub productivity: Aggregate,
    pub final_trust: Aggregate,
    pub final_fatigue: Aggregate,
    /// Recovery time after each run's first severe failure (runs without one
    /// are skipped).
    pub first_recoveries: Vec<RecoveryTime>,
    pub censoring_count: usize,
    /// Median of `first_recoveries`; `None` when there were no severe failures.
    pub median_first_recovery: Option<RecoveryTime>,
}

impl EnsembleSummary {
    pub fn n_seeds(&self) -> usize {
        self.runs.len()
    }

    pub fn runs_with_severe(&self) -> usize {
        self.first_recoveries.len()
    }
}

/// Median with censored entries ranked as +infinity. With an even count the
/// two middle values are averaged, or the result is censored if either is.
pub fn median_recovery(times: &[RecoveryTime]) -> Option<RecoveryTime> {
    if times.is_empty() {
        return None;
    }
    let mut v = times.to_vec();
    v.sort();
    let n = v.len();
    if n % 2 == 1 {
        return Some(v[n / 2]);
    }
    Some(match (v[n / 2 - 1], v[n / 2]) {
        (RecoveryTime::Steps(a), RecoveryTime::Steps(b)) if a == b => RecoveryTime::Steps(a),
        (RecoveryTime::Steps(_), RecoveryTime::Steps(_)) => {
            // Half steps cannot be represented; report the upper middle.
            v[n / 2]
        }
        _ => RecoveryTime::Censored,
    })
}

/// Median first-recovery time as a number, censored entries counted as `cap`.
pub fn median_recovery_capped(times: &[RecoveryTime], cap: f64) -> Option<f64> {
    if times.is_empty() {
        return None;
    }
    Some(Aggregate::of(times.iter().map(|t| t.capped(cap))).median)
}

/// Runs seeds `base_seed, base_seed + 1, ...` in parallel and aggregates.
pub fn run_ensemble(
    cfg: &ModelConfig,
    n_seeds: usize,
    base_seed: u64,
) -> Result<EnsembleSummary, SimError> {
    assert!(n_seeds >= 1, "ensemble needs at least one seed");
    cfg.validate()?;
    let runs: Vec<ShiftSummary> = (0..n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            let seeded = ModelConfig {
                seed: base_seed.wrapping_add(i),
                ..*cfg
            };
            run_shift(&seeded).map(|r| r.summary)
        })
        .collect::<Result<_, _>>()?;
    let first_recoveries: Vec<RecoveryTime> = runs
        .iter()
        .filter_map(ShiftSummary::first_recovery)
        .collect();
    Ok(EnsembleSummary {
        variant: cfg.variant,
        horizon: cfg.horizon,
        base_seed,
        productivity: Aggregate::of(runs.iter().map(|r| r.productivity)),
        final_trust: Aggregate::of(runs.iter().map(|r| r.final_trust)),
        final_fatigue: Aggregate::of(runs.iter().map(|r| r.final_fatigue)),
        censoring_count: first_recoveries
            .iter()
            .filter(|t| **t == RecoveryTime::Censored)
            .count(),
        median_first_recovery: median_recovery(&first_recoveries),
        first_recoveries,
        runs,
    })
}
