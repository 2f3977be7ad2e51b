//! CSV trajectories and JSON summaries.

use serde::Serialize;

use crate::sim::{EnsembleSummary, RecoveryTime, ShiftSummary, StepRecord};

pub const CSV_HEADER: &str = "step,trust_pre,fatigue_pre,cobot_action,human_action,disruption,\
outcome,items,trust_post,fatigue_post,apology_remaining";

/// One row per step, LF terminated. Reals use the shortest representation
/// that parses back to the same `f64`.
pub fn emit_trajectory_csv(records: &[StepRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.step,
            r.trust_pre,
            r.fatigue_pre,
            r.cobot_action,
            r.human_action,
            r.disruption,
            r.outcome,
            r.items_picked,
            r.trust_post,
            r.fatigue_post,
            r.apology_remaining
        ));
    }
    out
}

#[derive(Serialize)]
struct RecoveryJson {
    turn: usize,
    steps: Option<u32>,
    censored: bool,
}

#[derive(Serialize)]
struct ShiftJson {
    seed: u64,
    productivity: f64,
    final_fatigue: f64,
    final_trust: f64,
    peak_fatigue: f64,
    severe_failures: Vec<usize>,
    recovery_times: Vec<RecoveryJson>,
}

impl From<&ShiftSummary> for ShiftJson {
    fn from(s: &ShiftSummary) -> Self {
        Self {
            seed: s.seed,
            productivity: s.productivity,
            final_fatigue: s.final_fatigue,
            final_trust: s.final_trust,
            peak_fatigue: s.peak_fatigue,
            severe_failures: s.severe_failure_turns.clone(),
            recovery_times: s
                .recovery_times
                .iter()
                .map(|r| RecoveryJson {
                    turn: r.turn,
                    steps: r.time.steps(),
                    censored: r.time == RecoveryTime::Censored,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct Kpis {
    productivity: f64,
    final_trust: f64,
    final_fatigue: f64,
}

#[derive(Serialize)]
struct FirstRecoveryJson {
    runs_with_severe: usize,
    censoring_count: usize,
    /// `null` when censored or when no run had a severe failure.
    median_steps: Option<u32>,
    median_censored: bool,
    /// Censored entries counted as the horizon.
    median_capped: Option<f64>,
    distribution: Vec<Option<u32>>,
}

#[derive(Serialize)]
struct EnsembleJson {
    variant: String,
    n_seeds: usize,
    base_seed: u64,
    horizon: usize,
    means: Kpis,
    medians: Kpis,
    censoring_count: usize,
    first_recovery: FirstRecoveryJson,
    runs: Vec<ShiftJson>,
}

pub fn emit_summary_json(summary: &ShiftSummary) -> String {
    serde_json::to_string_pretty(&ShiftJson::from(summary)).expect("summary serializes") + "\n"
}

pub fn emit_ensemble_json(e: &EnsembleSummary) -> String {
    let median = e.median_first_recovery;
    let json = EnsembleJson {
        variant: e.variant.to_string(),
        n_seeds: e.n_seeds(),
        base_seed: e.base_seed,
        horizon: e.horizon,
        means: Kpis {
            productivity: e.productivity.mean,
            final_trust: e.final_trust.mean,
            final_fatigue: e.final_fatigue.mean,
        },
        medians: Kpis {
            productivity: e.productivity.median,
            final_trust: e.final_trust.median,
            final_fatigue: e.final_fatigue.median,
        },
        censoring_count: e.censoring_count,
        first_recovery: FirstRecoveryJson {
            runs_with_severe: e.runs_with_severe(),
            censoring_count: e.censoring_count,
            median_steps: median.and_then(RecoveryTime::steps),
            median_censored: median == Some(RecoveryTime::Censored),
            median_capped: crate::sim::median_recovery_capped(
                &e.first_recoveries,
                e.horizon as f64,
            ),
            distribution: e.first_recoveries.iter().map(|t| t.steps()).collect(),
        },
        runs: e.runs.iter().map(ShiftJson::from).collect(),
    };
    serde_json::to_string_pretty(&json).expect("summary serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_ensemble, run_shift, ModelConfig, ModelVariant};

    #[test]
    fn opening_rows() {
        let r = run_shift(&ModelConfig::for_variant(ModelVariant::V1_1)).unwrap();
        let csv = emit_trajectory_csv(&r.records);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("1,0.5,0,high,normal,none,success,1,0.55,0.5,0")
        );
        assert_eq!(csv.lines().count(), 51);
        assert!(!csv.contains('\r'));

        let r = run_shift(&ModelConfig::for_variant(ModelVariant::V1_0)).unwrap();
        let csv = emit_trajectory_csv(&r.records);
        assert_eq!(
            csv.lines().nth(1),
            Some("1,0.5,0,high,normal,none,minor_failure,1,0.4,0.5,0")
        );
    }

    #[test]
    fn shift_json_keys() {
        let r = run_shift(&ModelConfig::for_variant(ModelVariant::V1_1)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&emit_summary_json(&r.summary)).unwrap();
        assert_eq!(v["productivity"], 98.0);
        assert_eq!(v["final_trust"], 1.0);
        let r = run_shift(&ModelConfig::for_variant(ModelVariant::V1_0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&emit_summary_json(&r.summary)).unwrap();
        assert_eq!(v["final_trust"], 0.0);
        let text = emit_summary_json(&r.summary);
        let order: Vec<usize> = [
            "productivity",
            "final_fatigue",
            "final_trust",
            "peak_fatigue",
            "severe_failures",
            "recovery_times",
        ]
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap())
        .collect();
        assert!(order.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_seed_ensemble_matches_shift() {
        let cfg = ModelConfig {
            seed: 42,
            ..ModelConfig::for_variant(ModelVariant::V1_3)
        };
        let single = run_shift(&cfg).unwrap().summary;
        let e = run_ensemble(&cfg, 1, 42).unwrap();
        let v: serde_json::Value = serde_json::from_str(&emit_ensemble_json(&e)).unwrap();
        assert_eq!(v["n_seeds"], 1);
        for key in ["means", "medians"] {
            assert_eq!(v[key]["productivity"], single.productivity);
            assert_eq!(v[key]["final_trust"], single.final_trust);
            assert_eq!(v[key]["final_fatigue"], single.final_fatigue);
        }
    }
}
