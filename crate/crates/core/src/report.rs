//! KPI table across the four variants and the paired v1.2/v1.3 comparison.

use std::fmt::Write;

use crate::sim::{
    median_recovery_capped, run_ensemble, run_shift, EnsembleSummary, ModelConfig, ModelVariant,
    RecoveryTime, ShiftSummary, SimError,
};

pub const DEFAULT_ENSEMBLE_SEEDS: usize = 1000;

fn fmt_recovery(t: Option<RecoveryTime>) -> String {
    match t {
        None => "-".into(),
        Some(RecoveryTime::Steps(k)) => k.to_string(),
        Some(RecoveryTime::Censored) => "censored".into(),
    }
}

/// Median first-recovery times (censored = horizon) and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryComparison {
    pub median_brittle: f64,
    pub median_repair: f64,
    pub ratio: f64,
}

impl RecoveryComparison {
    pub fn from_ensembles(brittle: &EnsembleSummary, repair: &EnsembleSummary) -> Option<Self> {
        let cap = brittle.horizon as f64;
        let median_brittle = median_recovery_capped(&brittle.first_recoveries, cap)?;
        let median_repair = median_recovery_capped(&repair.first_recoveries, cap)?;
        Some(Self {
            median_brittle,
            median_repair,
            ratio: median_repair / median_brittle,
        })
    }

    /// Fractional reduction in recovery time.
    pub fn reduction(&self) -> f64 {
        1.0 - self.ratio
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table2 {
    pub naive: ShiftSummary,
    pub refined: ShiftSummary,
    pub brittle: EnsembleSummary,
    pub repair: EnsembleSummary,
    pub recovery: Option<RecoveryComparison>,
}

pub fn table2(base: &ModelConfig, n_seeds: usize, base_seed: u64) -> Result<Table2, SimError> {
    let with = |variant| ModelConfig { variant, ..*base };
    let brittle = run_ensemble(&with(ModelVariant::V1_2), n_seeds, base_seed)?;
    let repair = run_ensemble(&with(ModelVariant::V1_3), n_seeds, base_seed)?;
    Ok(Table2 {
        naive: run_shift(&with(ModelVariant::V1_0))?.summary,
        refined: run_shift(&with(ModelVariant::V1_1))?.summary,
        recovery: RecoveryComparison::from_ensembles(&brittle, &repair),
        brittle,
        repair,
    })
}

impl Table2 {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<8} | {:>13} | {:>13} | {:>11} | Trust behavior / recovery",
            "Model", "Productivity", "Final Fatigue", "Final Trust"
        );
        let _ = writeln!(out, "{}", "-".repeat(86));
        let behaviour = |s: &ShiftSummary| {
            if s.final_trust <= 0.0 {
                "trust collapses"
            } else if s.final_trust >= 1.0 {
                "stable at maximum"
            } else {
                "intermediate"
            }
        };
        for (name, s) in [("v1.0", &self.naive), ("v1.1", &self.refined)] {
            let _ = writeln!(
                out,
                "{name:<8} | {:>13} | {:>13.1} | {:>11.2} | {}",
                s.productivity,
                s.final_fatigue,
                s.final_trust,
                behaviour(s)
            );
        }
        for (name, e) in [("v1.2", &self.brittle), ("v1.3", &self.repair)] {
            let _ = writeln!(
                out,
                "{name:<8} | {:>12.2}* | {:>12.2}* | {:>10.3}* | median first recovery {} ({} of {} censored)",
                e.productivity.mean,
                e.final_fatigue.mean,
                e.final_trust.mean,
                fmt_recovery(e.median_first_recovery),
                e.censoring_count,
                e.runs_with_severe()
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "* ensemble means over {} seeds starting at {}; single-seed values vary widely.",
            self.brittle.n_seeds(),
            self.brittle.base_seed
        );
        match &self.recovery {
            Some(r) => {
                let _ = writeln!(
                    out,
                    "recovery ratio v1.3/v1.2 (censored = {}): {:.3} / {:.3} = {:.3} (reduction {:.1}%)",
                    self.brittle.horizon,
                    r.median_repair,
                    r.median_brittle,
                    r.ratio,
                    100.0 * r.reduction()
                );
            }
            None => {
                let _ = writeln!(out, "recovery ratio: no severe failures observed");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedRow {
    pub seed: u64,
    pub first_severe: Option<usize>,
    pub brittle: ShiftSummary,
    pub repair: ShiftSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<PairedRow>,
    pub brittle: EnsembleSummary,
    pub repair: EnsembleSummary,
    pub recovery: Option<RecoveryComparison>,
}

/// Runs v1.2 and v1.3 on the same seeds. Both variants consume the same
/// draws per turn, so each seed sees the same disruption schedule.
pub fn compare(base: &ModelConfig, n_seeds: usize, base_seed: u64) -> Result<Comparison, SimError> {
    assert!(n_seeds >= 2, "comparison needs at least two seeds");
    let brittle = run_ensemble(
        &ModelConfig {
            variant: ModelVariant::V1_2,
            ..*base
        },
        n_seeds,
        base_seed,
    )?;
    let repair = run_ensemble(
        &ModelConfig {
            variant: ModelVariant::V1_3,
            ..*base
        },
        n_seeds,
        base_seed,
    )?;
    let rows = brittle
        .runs
        .iter()
        .zip(&repair.runs)
        .map(|(b, r)| PairedRow {
            seed: b.seed,
            first_severe: b.severe_failure_turns.first().copied(),
            brittle: b.clone(),
            repair: r.clone(),
        })
        .collect();
    Ok(Comparison {
        rows,
        recovery: RecoveryComparison::from_ensembles(&brittle, &repair),
        brittle,
        repair,
    })
}

impl Comparison {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>20} | {:>6} | {:>10} | {:>10} | {:>9} | {:>9} | {:>9} | {:>9}",
            "seed", "severe", "rec v1.2", "rec v1.3", "trust1.2", "trust1.3", "fat1.2", "fat1.3"
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{:>20} | {:>6} | {:>10} | {:>10} | {:>9.2} | {:>9.2} | {:>9.1} | {:>9.1}",
                row.seed,
                row.first_severe.map_or("-".into(), |t| t.to_string()),
                fmt_recovery(row.brittle.first_recovery()),
                fmt_recovery(row.repair.first_recovery()),
                row.brittle.final_trust,
                row.repair.final_trust,
                row.brittle.final_fatigue,
                row.repair.final_fatigue
            );
        }
        let _ = writeln!(out);
        for (name, e) in [("v1.2", &self.brittle), ("v1.3", &self.repair)] {
            let _ = writeln!(
                out,
                "{name}: runs with severe failure {}, censored {}, median first recovery {}, mean final trust {:.3}, mean final fatigue {:.2}",
                e.runs_with_severe(),
                e.censoring_count,
                fmt_recovery(e.median_first_recovery),
                e.final_trust.mean,
                e.final_fatigue.mean
            );
        }
        if let Some(r) = &self.recovery {
            let _ = writeln!(
                out,
                "median recovery (censored = {}): v1.2 {:.1}, v1.3 {:.1}, ratio {:.3}, reduction {:.1}%",
                self.brittle.horizon,
                r.median_brittle,
                r.median_repair,
                r.ratio,
                100.0 * r.reduction()
            );
        }
        out
    }
}
