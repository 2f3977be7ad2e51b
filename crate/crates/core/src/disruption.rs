//! Random disruptions: difficult picks and cobot failures.
//!
//! Draws come from a splitmix64 stream so a trajectory is reproducible from
//! its seed on any platform. Each turn consumes exactly one uniform when no
//! disruption occurs and exactly two when one does.

use std::fmt;

use serde::Serialize;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DisruptionEvent {
    None,
    DifficultPick,
    CobotFailure,
}

impl DisruptionEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            DisruptionEvent::None => "none",
            DisruptionEvent::DifficultPick => "difficult_pick",
            DisruptionEvent::CobotFailure => "cobot_failure",
        }
    }
}

impl fmt::Display for DisruptionEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisruptionParams {
    /// Per-turn probability of any disruption.
    pub chance: f64,
    /// Probability that a disruption is a cobot failure.
    pub severe_share: f64,
    pub difficult_pick_fatigue: f64,
}

impl Default for DisruptionParams {
    fn default() -> Self {
        Self {
            chance: 0.10,
            severe_share: 0.5,
            difficult_pick_fatigue: 5.0,
        }
    }
}

impl DisruptionParams {
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if !(0.0..=1.0).contains(&self.chance) {
            return Err((
                "disruption.chance",
                format!("must be in [0, 1], got {}", self.chance),
            ));
        }
        if !(0.0..=1.0).contains(&self.severe_share) {
            return Err((
                "disruption.severe_share",
                format!("must be in [0, 1], got {}", self.severe_share),
            ));
        }
        if !(self.difficult_pick_fatigue.is_finite() && self.difficult_pick_fatigue >= 0.0) {
            return Err((
                "disruption.difficult_pick_fatigue",
                format!(
                    "must be finite and >= 0, got {}",
                    self.difficult_pick_fatigue
                ),
            ));
        }
        Ok(())
    }
}

/// splitmix64 generator. Counts the uniforms it has produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomStream {
    state: u64,
    draws: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            draws: 0,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1): the raw output divided by 2^64.
    pub fn next_uniform(&mut self) -> f64 {
        let u = self.next_u64() as f64 / TWO_POW_64;
        // Outputs within 2^10 of u64::MAX round up to 1.0 in the conversion.
        if u < 1.0 {
            u
        } else {
            1.0 - f64::EPSILON / 2.0
        }
    }

    /// Number of uniforms drawn so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }
}

pub fn sample_disruption(stream: &mut RandomStream, dp: &DisruptionParams) -> DisruptionEvent {
    if stream.next_uniform() >= dp.chance {
        return DisruptionEvent::None;
    }
    if stream.next_uniform() < dp.severe_share {
        DisruptionEvent::CobotFailure
    } else {
        DisruptionEvent::DifficultPick
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_first_draw() {
        let mut s = RandomStream::new(0);
        assert_eq!(s.clone().next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(s.next_uniform(), 0.8833108082136427);
        assert_eq!(s.draws(), 1);
    }

    #[test]
    fn mean_of_thousand_draws() {
        let mut s = RandomStream::new(0);
        let mean = (0..1000).map(|_| s.next_uniform()).sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn same_seed_same_sequence() {
        let mut a = RandomStream::new(0xDEAD_BEEF);
        let mut b = RandomStream::new(0xDEAD_BEEF);
        for _ in 0..100 {
            assert_eq!(a.next_uniform().to_bits(), b.next_uniform().to_bits());
        }
    }

    #[test]
    fn zero_chance_never_disrupts() {
        let dp = DisruptionParams {
            chance: 0.0,
            ..Default::default()
        };
        let mut s = RandomStream::new(7);
        for i in 1..=1000 {
            assert_eq!(sample_disruption(&mut s, &dp), DisruptionEvent::None);
            assert_eq!(s.draws(), i);
        }
    }

    #[test]
    fn certain_failure() {
        let dp = DisruptionParams {
            chance: 1.0,
            severe_share: 1.0,
            ..Default::default()
        };
        let mut s = RandomStream::new(7);
        for i in 1..=1000 {
            assert_eq!(
                sample_disruption(&mut s, &dp),
                DisruptionEvent::CobotFailure
            );
            assert_eq!(s.draws(), 2 * i);
        }
    }

    #[test]
    fn draw_count_depends_only_on_occurrence() {
        let dp = DisruptionParams::default();
        let mut s = RandomStream::new(3);
        for _ in 0..10_000 {
            let before = s.draws();
            let ev = sample_disruption(&mut s, &dp);
            let used = s.draws() - before;
            assert_eq!(used, if ev == DisruptionEvent::None { 1 } else { 2 });
        }
    }

    #[test]
    fn event_frequencies() {
        let dp = DisruptionParams::default();
        let mut s = RandomStream::new(0);
        let n = 100_000;
        let mut any = 0usize;
        let mut severe = 0usize;
        for _ in 0..n {
            match sample_disruption(&mut s, &dp) {
                DisruptionEvent::None => {}
                DisruptionEvent::DifficultPick => any += 1,
                DisruptionEvent::CobotFailure => {
                    any += 1;
                    severe += 1
                }
            }
        }
        let nf = n as f64;
        assert!((severe as f64 / nf - 0.05).abs() <= 0.005);
        let sigma = (0.1 * 0.9 / nf).sqrt();
        assert!((any as f64 / nf - 0.1).abs() <= 3.0 * sigma);
    }
}
