//! Closed-form frequency statistics for any ensemble size.
//!
//! The operator touches only the first `N` factors of an ensemble state and
//! every factor has unit norm, so each inner product involving the ensemble
//! equals its value on `|psi>^N`. All results below are finite-`N` values.

use serde::Serialize;

use crate::binomial;
use crate::dense::Fraction;
use crate::error::{Error, Result};
use crate::hilbert::EnsembleSpec;
use crate::par::Exec;

/// Largest ensemble size accepted by [`spectral_weights`].
pub const WEIGHT_LIMIT: usize = 1_000_000;

/// Weights below this are reported as exactly zero.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Moments of `F^j_N` on `|psi>^N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyStatistics {
    pub n: usize,
    /// `<F> = |c_j|^2`.
    pub expectation: f64,
    /// `(ΔF)^2`.
    pub variance: f64,
    /// `|| F|psi^N> - |c_j|^2 |psi^N> ||^2`, identical to `variance`.
    pub distance_sq: f64,
    /// `<F psi^N | F psi^N>`.
    pub gram: f64,
}

impl FrequencyStatistics {
    pub fn uncertainty(&self) -> f64 {
        self.variance.sqrt()
    }
}

pub fn expectation(spec: &EnsembleSpec) -> f64 {
    spec.p()
}

/// `p(1 - p) / N`.
pub fn variance(spec: &EnsembleSpec) -> f64 {
    let p = spec.p();
    p * (1.0 - p) / spec.n() as f64
}

/// `sqrt(p(1 - p) / N)`.
pub fn uncertainty(spec: &EnsembleSpec) -> f64 {
    variance(spec).sqrt()
}

/// `p(1 - p) / N`.
pub fn distance_sq(spec: &EnsembleSpec) -> f64 {
    variance(spec)
}

/// `(p / N^2)(N + N(N - 1) p)`: `N` diagonal overlaps `<j|j> = 1` and
/// `N(N - 1)` cross terms `|<psi|j>|^2 = p`.
pub fn gram(spec: &EnsembleSpec) -> f64 {
    let p = spec.p();
    let n = spec.n() as f64;
    p / (n * n) * (n + n * (n - 1.0) * p)
}

pub fn statistics(spec: &EnsembleSpec) -> FrequencyStatistics {
    FrequencyStatistics {
        n: spec.n(),
        expectation: expectation(spec),
        variance: variance(spec),
        distance_sq: distance_sq(spec),
        gram: gram(spec),
    }
}

/// Distribution of `|psi>^N` over the eigenspaces `{k/N}` of `F^j_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralWeights {
    pub n: usize,
    pub p: f64,
    /// `weights[k]` is the mass on eigenvalue `k/N`.
    pub weights: Vec<f64>,
}

impl SpectralWeights {
    pub fn weight(&self, k: usize) -> f64 {
        self.weights.get(k).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_k (k/N) w_k`.
    pub fn mean(&self) -> f64 {
        let n = self.n as f64;
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| k as f64 / n * w)
            .sum()
    }

    /// `sum_k (k/N - p)^2 w_k`.
    pub fn variance_about(&self, center: f64) -> f64 {
        let n = self.n as f64;
        self.weights
            .iter()
            .enumerate()
            .map(|(k, w)| (k as f64 / n - center).powi(2) * w)
            .sum()
    }

    /// Heaviest eigenspace; the lowest `k` wins ties.
    pub fn peak(&self) -> (Fraction, f64) {
        let (k, w) =
            self.weights
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &w)| {
                    if w > best.1 {
                        (k, w)
                    } else {
                        best
                    }
                });
        (
            Fraction {
                count: k,
                n: self.n,
            },
            w,
        )
    }

    pub fn max_weight(&self) -> f64 {
        self.peak().1
    }

    /// `1 - max_k w_k`.
    pub fn off_peak_mass(&self) -> f64 {
        1.0 - self.max_weight()
    }
}

pub fn spectral_weights(spec: &EnsembleSpec) -> Result<SpectralWeights> {
    spectral_weights_with(spec, Exec::default())
}

/// Binomial weights `C(N,k) p^k (1-p)^(N-k)`, `p = |c_j|^2`.
pub fn spectral_weights_with(spec: &EnsembleSpec, exec: Exec) -> Result<SpectralWeights> {
    let n = spec.n();
    if n > WEIGHT_LIMIT {
        return Err(Error::WeightOverflow {
            n,
            limit: WEIGHT_LIMIT,
        });
    }
    let p = spec.p();
    let q = 1.0 - p;
    let weights = exec.map_range(n + 1, |k| {
        let w = binomial::pmf(k as u64, n as u64, p, q);
        if w < WEIGHT_FLOOR {
            0.0
        } else {
            w
        }
    });
    Ok(SpectralWeights { n, p, weights })
}

/// How far `|psi>^N` is from being a frequency eigenstate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonCollapseMetrics {
    pub n: usize,
    pub distance_sq: f64,
    pub peak: Fraction,
    pub max_weight: f64,
    pub off_peak_mass: f64,
}

pub fn noncollapse_metrics(spec: &EnsembleSpec) -> Result<NonCollapseMetrics> {
    let weights = spectral_weights(spec)?;
    let (peak, max_weight) = weights.peak();
    Ok(NonCollapseMetrics {
        n: spec.n(),
        distance_sq: distance_sq(spec),
        peak,
        max_weight,
        off_peak_mass: 1.0 - max_weight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::StateVector;

    fn spec(p: f64, n: usize) -> EnsembleSpec {
        EnsembleSpec::new(StateVector::two_level(p).unwrap(), n, 0).unwrap()
    }

    #[test]
    fn expectation_examples() {
        assert_eq!(expectation(&spec(0.36, 5)), 0.36f64.sqrt().powi(2));
        assert!((expectation(&spec(0.36, 5)) - 0.36).abs() < 1e-15);
        let u = EnsembleSpec::new(StateVector::uniform(4).unwrap(), 3, 2).unwrap();
        assert!((expectation(&u) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn uncertainty_examples() {
        assert!((uncertainty(&spec(0.5, 10)) - 0.158_113_883).abs() < 1e-9);
        assert_eq!(uncertainty(&spec(1.0, 17)), 0.0);
        let ratio = uncertainty(&spec(0.3, 40)) / uncertainty(&spec(0.3, 10));
        assert!((ratio - 0.5).abs() < 1e-15);
    }

    #[test]
    fn distance_and_gram_examples() {
        assert!((distance_sq(&spec(0.5, 10)) - 0.025).abs() < 1e-15);
        assert!((distance_sq(&spec(0.36, 100)) - 0.002304).abs() < 1e-15);
        assert!((gram(&spec(0.5, 2)) - 0.375).abs() < 1e-15);
        assert!((gram(&spec(0.5, 10)) - 0.275).abs() < 1e-15);
        for p in [0.0, 1.0] {
            assert_eq!(distance_sq(&spec(p, 9)), 0.0);
        }
    }

    #[test]
    fn expansion_reconstructs_distance() {
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            for n in [1, 2, 7, 100, 12345] {
                let s = spec(p, n);
                let pp = s.p();
                let rebuilt = gram(&s) - 2.0 * pp * expectation(&s) + pp * pp;
                assert!((rebuilt - distance_sq(&s)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn spectral_weight_examples() {
        let w = spectral_weights(&spec(0.5, 2)).unwrap();
        assert_eq!(w.weights.len(), 3);
        for (got, want) in w.weights.iter().zip([0.25, 0.5, 0.25]) {
            assert!((got - want).abs() < 1e-15);
        }

        let w = spectral_weights(&spec(1.0, 6)).unwrap();
        assert_eq!(w.weights, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);

        let w = spectral_weights(&spec(0.5, 1000)).unwrap();
        let (peak, max) = w.peak();
        assert_eq!(peak.count, 500);
        // prod_{i=1}^{500} (500 + i) / (4 i) = C(1000, 500) / 2^1000
        let exact: f64 = (1..=500)
            .map(|i| (500 + i) as f64 / (4 * i) as f64)
            .product();
        assert!((max / exact - 1.0).abs() < 1e-12);
        assert!((max - 0.02523).abs() < 5e-6);

        assert!(matches!(
            spectral_weights(&spec(0.5, WEIGHT_LIMIT + 1)),
            Err(Error::WeightOverflow { .. })
        ));
    }

    #[test]
    fn noncollapse_examples() {
        let m = noncollapse_metrics(&spec(0.5, 100)).unwrap();
        assert!((m.distance_sq - 0.0025).abs() < 1e-15);
        assert!((m.off_peak_mass - 0.9204).abs() < 1e-4);
        assert_eq!(
            noncollapse_metrics(&spec(1.0, 50)).unwrap().off_peak_mass,
            0.0
        );
        let m400 = noncollapse_metrics(&spec(0.5, 400)).unwrap();
        assert!(m400.max_weight < m.max_weight);
    }

    #[test]
    fn weights_floor_tiny_values() {
        let w = spectral_weights(&spec(0.999, 1_000_000)).unwrap();
        assert_eq!(w.weight(0), 0.0);
        assert!(w.weights.iter().all(|&x| x == 0.0 || x >= WEIGHT_FLOOR));
        assert!((w.total() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exec_strategies_agree() {
        let s = spec(0.37, 5000);
        let a = spectral_weights_with(&s, Exec::Sequential).unwrap();
        let b = spectral_weights_with(&s, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
