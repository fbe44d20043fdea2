//! Seeded Monte Carlo measurement of an ensemble.
//!
//! Each system is measured independently in the eigenbasis of the observable
//! and yields outcome `i` with probability `|c_i|^2`. The frequency of label
//! `j` across the record is the quantity the frequency operator predicts.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::Fraction;
use crate::error::{Error, Result};
use crate::hilbert::StateVector;
use crate::par::Exec;

pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.10) via SeedableRng::seed_from_u64";

/// Odd multiplier of the per-trial stream derivation.
pub const STREAM_MULTIPLIER: u64 = 0x9E37_79B9_7F4A_7C15;

pub const STREAM_RULE: &str =
    "stream_seed = master_seed XOR (trial_index * 0x9E3779B97F4A7C15 mod 2^64)";

/// Seed of the stream owned by trial `trial`.
pub fn stream_seed(master: u64, trial: u64) -> u64 {
    master ^ trial.wrapping_mul(STREAM_MULTIPLIER)
}

/// Inverse-CDF sampler over `{|c_i|^2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BornSampler {
    cumulative: Vec<f64>,
}

impl BornSampler {
    pub fn new(state: &StateVector) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = state
            .probabilities()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        // Pin the last boundary to exactly 1.
        let total = acc;
        cumulative.iter_mut().for_each(|c| *c /= total);
        Self { cumulative }
    }

    /// Outcome for `u` in `(0, 1]`: the smallest `i` with `u <= F(i)`, so a
    /// value on a boundary goes to the lower index and zero-probability
    /// labels are never returned.
    pub fn outcome(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c < u);
        i.min(self.cumulative.len() - 1)
    }

    pub fn draw<R: RngExt>(&self, rng: &mut R) -> usize {
        self.outcome(1.0 - rng.random::<f64>())
    }
}

/// Outcomes of measuring each of `n` systems once.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRecord {
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub outcomes: Vec<usize>,
}

impl OutcomeRecord {
    pub fn new(dim: usize, outcomes: Vec<usize>, seed: u64) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if let Some(&index) = outcomes.iter().find(|&&o| o >= dim) {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(Self {
            dim,
            n: outcomes.len(),
            seed,
            outcomes,
        })
    }

    /// Fraction of outcomes equal to `j`.
    pub fn empirical_frequency(&self, j: usize) -> Result<Fraction> {
        if j >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: self.dim,
            });
        }
        Ok(Fraction {
            count: self.outcomes.iter().filter(|&&o| o == j).count(),
            n: self.n,
        })
    }

    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim];
        for &o in &self.outcomes {
            counts[o] += 1;
        }
        counts
    }
}

pub fn sample_outcomes(state: &StateVector, n: usize, seed: u64) -> Result<OutcomeRecord> {
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let sampler = BornSampler::new(state);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let outcomes = (0..n).map(|_| sampler.draw(&mut rng)).collect();
    OutcomeRecord::new(state.dim(), outcomes, seed)
}

/// Frequencies of label `j` over independent repetitions of the ensemble.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub trials: usize,
    pub n: usize,
    pub j: usize,
    pub seed: u64,
    pub rng: &'static str,
    pub stream_rule: &'static str,
    pub mean_frequency: f64,
    /// Unbiased (`M - 1`) sample variance of the per-trial frequencies.
    pub sample_variance: f64,
    pub frequencies: Vec<f64>,
}

pub fn run_trials(
    state: &StateVector,
    n: usize,
    j: usize,
    trials: usize,
    seed: u64,
) -> Result<TrialSummary> {
    run_trials_with(state, n, j, trials, seed, Exec::default())
}

pub fn run_trials_with(
    state: &StateVector,
    n: usize,
    j: usize,
    trials: usize,
    seed: u64,
    exec: Exec,
) -> Result<TrialSummary> {
    if trials < 2 {
        return Err(Error::InvalidArgument(format!(
            "at least 2 trials required, got {trials}"
        )));
    }
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if j >= state.dim() {
        return Err(Error::IndexOutOfRange {
            index: j,
            dim: state.dim(),
        });
    }
    let sampler = BornSampler::new(state);
    let frequencies = exec.map_range(trials, |t| {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, t as u64));
        let hits = (0..n).filter(|_| sampler.draw(&mut rng) == j).count();
        hits as f64 / n as f64
    });
    let m = trials as f64;
    let mean_frequency = frequencies.iter().sum::<f64>() / m;
    let sample_variance = frequencies
        .iter()
        .map(|f| (f - mean_frequency).powi(2))
        .sum::<f64>()
        / (m - 1.0);
    Ok(TrialSummary {
        trials,
        n,
        j,
        seed,
        rng: RNG_ALGORITHM,
        stream_rule: STREAM_RULE,
        mean_frequency,
        sample_variance,
        frequencies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_state_always_yields_its_label() {
        let s = StateVector::basis(2, 1).unwrap();
        for seed in [0, 1, 42, u64::MAX] {
            let r = sample_outcomes(&s, 100, seed).unwrap();
            assert!(r.outcomes.iter().all(|&o| o == 1));
        }
    }

    #[test]
    fn large_sample_frequency_concentrates() {
        let s = StateVector::two_level(0.36).unwrap();
        let r = sample_outcomes(&s, 1_000_000, 2024).unwrap();
        let f = r.empirical_frequency(0).unwrap().value();
        assert!((f - 0.36).abs() <= 0.0024, "f = {f}");
    }

    #[test]
    fn same_seed_same_record() {
        let s = StateVector::uniform(3).unwrap();
        assert_eq!(
            sample_outcomes(&s, 500, 9).unwrap(),
            sample_outcomes(&s, 500, 9).unwrap()
        );
        assert_ne!(
            sample_outcomes(&s, 500, 9).unwrap(),
            sample_outcomes(&s, 500, 10).unwrap()
        );
    }

    #[test]
    fn empirical_frequency_examples() {
        let r = OutcomeRecord::new(3, vec![0, 1, 0, 0], 0).unwrap();
        assert_eq!(r.empirical_frequency(0).unwrap().value(), 0.75);
        assert_eq!(
            r.empirical_frequency(2).unwrap(),
            Fraction { count: 0, n: 4 }
        );
        let total: usize = (0..3)
            .map(|j| r.empirical_frequency(j).unwrap().count)
            .sum();
        assert_eq!(total, r.n);
        assert!(r.empirical_frequency(3).is_err());
        assert!(OutcomeRecord::new(2, vec![2], 0).is_err());
    }

    #[test]
    fn inverse_cdf_boundaries() {
        let s = StateVector::from_real(&[0.0, 0.5f64.sqrt(), 0.0, 0.5f64.sqrt()]).unwrap();
        let b = BornSampler::new(&s);
        assert_eq!(b.outcome(f64::MIN_POSITIVE), 1);
        let boundary = b.cumulative[1];
        assert_eq!(b.outcome(boundary), 1);
        assert_eq!(b.outcome(1.0), 3);
    }

    #[test]
    fn trials_examples() {
        let s = StateVector::two_level(0.5).unwrap();
        let t = run_trials(&s, 100, 0, 10_000, 7).unwrap();
        assert!((t.mean_frequency - 0.5).abs() <= 5.0 * 0.05 / 100.0);
        assert!((t.sample_variance / 0.0025 - 1.0).abs() <= 0.10);

        let one = StateVector::two_level(1.0).unwrap();
        let t = run_trials(&one, 20, 0, 5, 3).unwrap();
        assert_eq!(t.mean_frequency, 1.0);
        assert_eq!(t.sample_variance, 0.0);

        assert!(run_trials(&s, 10, 0, 1, 0).is_err());
        assert!(run_trials(&s, 10, 2, 5, 0).is_err());
    }

    #[test]
    fn trial_variance_halves_when_n_doubles() {
        let s = StateVector::two_level(0.3).unwrap();
        let a = run_trials(&s, 100, 0, 10_000, 11).unwrap();
        let b = run_trials(&s, 200, 0, 10_000, 11).unwrap();
        let ratio = b.sample_variance / a.sample_variance;
        assert!((ratio - 0.5).abs() <= 0.5 * 0.15, "ratio = {ratio}");
    }

    #[test]
    fn strategies_are_bitwise_identical() {
        let s = StateVector::uniform(3).unwrap();
        let a = run_trials_with(&s, 50, 2, 300, 5, Exec::Sequential).unwrap();
        let b = run_trials_with(&s, 50, 2, 300, 5, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stream_zero_uses_master_seed() {
        assert_eq!(stream_seed(123, 0), 123);
        assert_ne!(stream_seed(123, 1), stream_seed(123, 2));
    }
}
