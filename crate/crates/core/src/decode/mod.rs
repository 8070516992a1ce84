//! Detector error models, matching graphs and exact MWPM decoding, plus
//! Monte Carlo estimation of logical error rates.

pub mod decoder;
pub mod dem;
pub mod graph;
pub mod matching;

use rayon::prelude::*;

pub use decoder::{mwpm_decode, Decoder, Prediction};
pub use dem::{build_dem, merge_probability, DetectorErrorModel, Mechanism};
pub use graph::{decompose_to_graphlike, edge_weight, Edge, MatchingGraph};

use crate::circuit::NoisyCircuit;
use crate::error::{Error, Result};
use crate::sim::{FrameSimulator, BATCH_SHOTS};
use crate::stats::wilson_interval;

/// Failure counts and per-round rates from one Monte Carlo run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalErrorEstimate {
    pub shots: u64,
    pub failures: u64,
    pub rounds: usize,
    pub p_total: f64,
    pub p_round: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl LogicalErrorEstimate {
    pub fn from_counts(shots: u64, failures: u64, rounds: usize) -> Self {
        let p_total = if shots == 0 {
            0.0
        } else {
            failures as f64 / shots as f64
        };
        let (lo, hi) = wilson_interval(failures, shots, 1.959_963_984_540_054);
        LogicalErrorEstimate {
            shots,
            failures,
            rounds,
            p_total,
            p_round: per_round_rate(p_total, rounds),
            ci_low: per_round_rate(lo, rounds),
            ci_high: per_round_rate(hi, rounds),
        }
    }

    /// Relative standard error of the failure fraction.
    pub fn relative_error(&self) -> f64 {
        if self.failures == 0 {
            f64::INFINITY
        } else {
            ((1.0 - self.p_total) / self.failures as f64).sqrt()
        }
    }
}

/// Per-round rate whose `rounds`-fold repetition flips with probability `p_total`.
pub fn per_round_rate(p_total: f64, rounds: usize) -> f64 {
    if p_total >= 0.5 {
        return 0.5;
    }
    0.5 * (1.0 - (1.0 - 2.0 * p_total).powf(1.0 / rounds as f64))
}

/// `T_L = -t_cycle / ln(1 - 2 p_L)`; infinite at `p_L = 0`.
pub fn logical_coherence_time(p_round: f64, t_cycle: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&p_round) || !(t_cycle > 0.0) {
        return Err(Error::invalid(format!(
            "need 0 <= p_L < 1/2 and t_cycle > 0, got p_L={p_round}, t_cycle={t_cycle}"
        )));
    }
    if p_round == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-t_cycle / (-2.0 * p_round).ln_1p())
}

/// Sampler and decoder for one circuit, reusable across runs.
pub struct MemoryExperiment {
    sim: FrameSimulator,
    decoder: Decoder,
    rounds: usize,
}

impl MemoryExperiment {
    pub fn new(circuit: &NoisyCircuit) -> Result<Self> {
        let graph = decompose_to_graphlike(&build_dem(circuit))?;
        Ok(MemoryExperiment {
            sim: FrameSimulator::new(circuit),
            decoder: Decoder::new(&graph),
            rounds: circuit.rounds,
        })
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    fn failures_in_batches(&self, seed: u64, first: u64, last: u64, shots: u64) -> Result<u64> {
        (first..last)
            .into_par_iter()
            .map(|b| {
                let size = (shots - b * BATCH_SHOTS as u64).min(BATCH_SHOTS as u64) as usize;
                let raw = self.sim.sample_batch(seed, b, size);
                let mut fails = 0u64;
                for (lane, flipped) in raw.flipped_per_shot().iter().enumerate() {
                    if self.decoder.predict(flipped)? != raw.observable_flip(lane) {
                        fails += 1;
                    }
                }
                Ok(fails)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }

    pub fn run(&self, shots: u64, seed: u64) -> Result<LogicalErrorEstimate> {
        let batches = shots.div_ceil(BATCH_SHOTS as u64);
        let failures = self.failures_in_batches(seed, 0, batches, shots)?;
        Ok(LogicalErrorEstimate::from_counts(
            shots,
            failures,
            self.rounds,
        ))
    }

    /// Sample until `target_failures` failures or `max_shots` shots. The
    /// stopping check happens every `chunk` batches, so the result is still
    /// independent of the worker count.
    pub fn run_until(
        &self,
        max_shots: u64,
        target_failures: u64,
        seed: u64,
    ) -> Result<LogicalErrorEstimate> {
        const CHUNK: u64 = 16;
        let total_batches = max_shots.div_ceil(BATCH_SHOTS as u64);
        let mut failures = 0;
        let mut next = 0;
        while next < total_batches && failures < target_failures {
            let last = (next + CHUNK).min(total_batches);
            failures += self.failures_in_batches(seed, next, last, max_shots)?;
            next = last;
        }
        let shots = (next * BATCH_SHOTS as u64).min(max_shots);
        Ok(LogicalErrorEstimate::from_counts(
            shots,
            failures,
            self.rounds,
        ))
    }
}

pub fn estimate_logical_error_rate(
    circuit: &NoisyCircuit,
    shots: u64,
    seed: u64,
) -> Result<LogicalErrorEstimate> {
    MemoryExperiment::new(circuit)?.run(shots, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherence_time_values() {
        assert_eq!(logical_coherence_time(0.0, 3.0).unwrap(), f64::INFINITY);
        let p = 0.5 * (1.0 - (-1.0f64).exp());
        assert!((logical_coherence_time(p, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((logical_coherence_time(1e-3, 9.0).unwrap() - 4495.4985).abs() < 1e-3);
        assert!(logical_coherence_time(0.5, 1.0).is_err());
    }

    #[test]
    fn per_round_inverts_repetition() {
        let p: f64 = 0.01;
        let total = 0.5 * (1.0 - (1.0 - 2.0 * p).powi(7));
        assert!((per_round_rate(total, 7) - p).abs() < 1e-14);
        assert_eq!(per_round_rate(0.0, 5), 0.0);
    }
}
