//! Flat `key = value` configuration files.
//!
//! One pair per line, `#` starts a comment, keys are dotted paths such as
//! `trust.gain` or `disruption.chance`. Anything not set keeps its default.

use thiserror::Error;

use crate::sim::{ModelConfig, ModelVariant, SimError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("{}invalid `{key}`: {reason}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invariant {
        line: Option<usize>,
        key: String,
        reason: String,
    },
}

/// Every accepted key, in rendering order.
pub const KEYS: &[&str] = &[
    "variant",
    "seed",
    "horizon",
    "game.reward_normal",
    "game.reward_high",
    "game.fatigue_normal_low",
    "game.fatigue_normal_high",
    "game.fatigue_high_low",
    "game.fatigue_high_high",
    "game.cost_kappa_base",
    "game.cost_kappa_trust_slope",
    "game.fatigue_threshold",
    "game.penalty_weight",
    "game.cobot_tiebreak_trust",
    "trust.gain",
    "trust.loss",
    "trust.severe_loss",
    "trust.initial",
    "trust.initial_fatigue",
    "disruption.chance",
    "disruption.severe_share",
    "disruption.difficult_pick_fatigue",
    "apology.duration",
];

fn real_slot<'a>(cfg: &'a mut ModelConfig, key: &str) -> Option<&'a mut f64> {
    let g = &mut cfg.game;
    Some(match key {
        "game.reward_normal" => &mut g.reward_normal,
        "game.reward_high" => &mut g.reward_high,
        "game.fatigue_normal_low" => &mut g.fatigue_table.normal_low,
        "game.fatigue_normal_high" => &mut g.fatigue_table.normal_high,
        "game.fatigue_high_low" => &mut g.fatigue_table.high_low,
        "game.fatigue_high_high" => &mut g.fatigue_table.high_high,
        "game.cost_kappa_base" => &mut g.cost_kappa_base,
        "game.cost_kappa_trust_slope" => &mut g.cost_kappa_trust_slope,
        "game.fatigue_threshold" => &mut g.fatigue_threshold,
        "game.penalty_weight" => &mut g.penalty_weight,
        "game.cobot_tiebreak_trust" => &mut g.cobot_tiebreak_trust,
        "trust.gain" => &mut cfg.trust.gain,
        "trust.loss" => &mut cfg.trust.loss,
        "trust.severe_loss" => &mut cfg.trust.severe_loss,
        "trust.initial" => &mut cfg.trust.initial_trust,
        "trust.initial_fatigue" => &mut cfg.trust.initial_fatigue,
        "disruption.chance" => &mut cfg.disruption.chance,
        "disruption.severe_share" => &mut cfg.disruption.severe_share,
        "disruption.difficult_pick_fatigue" => &mut cfg.disruption.difficult_pick_fatigue,
        _ => return None,
    })
}

/// Applies a single `key = value` override. `line` is only used for error
/// reporting.
pub fn apply_override(
    cfg: &mut ModelConfig,
    key: &str,
    value: &str,
    line: usize,
) -> Result<(), ConfigError> {
    let bad = |reason: String| ConfigError::InvalidValue {
        line,
        key: key.to_string(),
        value: value.to_string(),
        reason,
    };
    match key {
        "variant" => cfg.variant = value.parse::<ModelVariant>().map_err(bad)?,
        "seed" => cfg.seed = value.parse::<u64>().map_err(|e| bad(e.to_string()))?,
        "horizon" => cfg.horizon = value.parse::<usize>().map_err(|e| bad(e.to_string()))?,
        "apology.duration" => {
            cfg.apology_duration = value.parse::<u32>().map_err(|e| bad(e.to_string()))?
        }
        _ => {
            let slot = real_slot(cfg, key).ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            })?;
            *slot = value.parse::<f64>().map_err(|e| bad(e.to_string()))?;
        }
    }
    Ok(())
}

/// Maps a validation failure back to the line that set the offending key.
pub fn revalidate(cfg: &ModelConfig, lines: &[(String, usize)]) -> Result<(), ConfigError> {
    match cfg.validate() {
        Ok(()) => Ok(()),
        Err(SimError::InvalidConfig { key, reason }) => Err(ConfigError::Invariant {
            line: lines.iter().rev().find(|(k, _)| k == key).map(|(_, l)| *l),
            key: key.to_string(),
            reason,
        }),
        Err(other) => unreachable!("validate only reports config errors: {other}"),
    }
}

/// Reads overrides on top of `base`.
pub fn parse_config_onto(base: ModelConfig, text: &str) -> Result<ModelConfig, ConfigError> {
    let mut cfg = base;
    let mut seen = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            text: raw.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        apply_override(&mut cfg, key, value, line)?;
        seen.push((key.to_string(), line));
    }
    revalidate(&cfg, &seen)?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<ModelConfig, ConfigError> {
    parse_config_onto(ModelConfig::default(), text)
}

/// Renders every key so that `parse_config(render_config(c)) == c`.
pub fn render_config(cfg: &ModelConfig) -> String {
    let mut out = String::new();
    let mut scratch = *cfg;
    for &key in KEYS {
        let value = match key {
            "variant" => cfg.variant.to_string(),
            "seed" => cfg.seed.to_string(),
            "horizon" => cfg.horizon.to_string(),
            "apology.duration" => cfg.apology_duration.to_string(),
            _ => real_slot(&mut scratch, key)
                .map(|v| v.to_string())
                .unwrap_or_default(),
        };
        out.push_str(&format!("{key} = {value}\n"));
    }
    out
}
