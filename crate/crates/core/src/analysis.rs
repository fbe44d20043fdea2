//! Sweeps over ensemble size: the `1/N` decay of the distance to the
//! Born-scaled state and the spread of spectral mass that persists anyway.

use serde::{Serialize, Serializer};

use crate::analytic::{self, NonCollapseMetrics};
use crate::dense::{self, Fraction};
use crate::error::{Error, Result};
use crate::hilbert::{check_scale, EnsembleSpec, StateVector, VECTOR_LIMIT};
use crate::par::Exec;
use crate::sampler;

/// Largest `N` for which rows carry a brute-force cross-check.
pub const DENSE_CHECK_MAX_N: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplingConfig {
    pub trials: usize,
    /// Master seed, shared by every row of a sweep.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub distance_sq: f64,
    pub uncertainty: f64,
    pub max_weight: f64,
    pub sampled_mean: Option<f64>,
    pub sampled_variance: Option<f64>,
    /// Brute-force `||F|psi^N> - p|psi^N>||^2`, for small `N` only.
    pub dense_distance_sq: Option<f64>,
}

/// Least-squares slope of `ln distance_sq` against `ln N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slope {
    Fitted(f64),
    /// Some distance was zero, or fewer than two rows.
    Undefined,
}

impl Slope {
    pub fn value(self) -> Option<f64> {
        match self {
            Slope::Fitted(s) => Some(s),
            Slope::Undefined => None,
        }
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Slope::Fitted(s) => serializer.serialize_f64(*s),
            Slope::Undefined => serializer.serialize_str("undefined"),
        }
    }
}

pub fn fit_log_log_slope(points: &[(usize, f64)]) -> Slope {
    if points.len() < 2 || points.iter().any(|&(_, y)| y <= 0.0 || !y.is_finite()) {
        return Slope::Undefined;
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Slope::Fitted(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSweep {
    pub j: usize,
    pub p: f64,
    pub rows: Vec<ConvergenceRow>,
    pub slope: Slope,
    /// Largest `|dense - closed form|` over rows with a dense check.
    pub dense_max_deviation: Option<f64>,
}

fn check_n_list(n_list: &[usize]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble-size list".into()));
    }
    if n_list[0] == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "ensemble sizes must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub fn convergence_sweep(
    state: &StateVector,
    j: usize,
    n_list: &[usize],
    sampling: Option<SamplingConfig>,
) -> Result<ConvergenceSweep> {
    check_n_list(n_list)?;
    let base = EnsembleSpec::new(state.clone(), n_list[0], j)?;
    let rows = Exec::default()
        .map_range(n_list.len(), |i| {
            convergence_row(&base, n_list[i], sampling)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let slope = fit_log_log_slope(
        &rows
            .iter()
            .map(|r| (r.n, r.distance_sq))
            .collect::<Vec<_>>(),
    );
    let dense_max_deviation = rows
        .iter()
        .filter_map(|r| r.dense_distance_sq.map(|d| (d - r.distance_sq).abs()))
        .reduce(f64::max);
    Ok(ConvergenceSweep {
        j,
        p: base.p(),
        rows,
        slope,
        dense_max_deviation,
    })
}

fn convergence_row(
    base: &EnsembleSpec,
    n: usize,
    sampling: Option<SamplingConfig>,
) -> Result<ConvergenceRow> {
    let spec = base.with_n(n)?;
    let weights = analytic::spectral_weights(&spec)?;
    let sampled = sampling
        .map(|cfg| sampler::run_trials(spec.state(), n, spec.j(), cfg.trials, cfg.seed))
        .transpose()?;
    let dense_distance_sq = if n <= DENSE_CHECK_MAX_N
        && check_scale("dense check", spec.dim(), n, VECTOR_LIMIT).is_ok()
    {
        Some(dense::distance_sq_dense(&spec)?)
    } else {
        None
    };
    Ok(ConvergenceRow {
        n,
        distance_sq: analytic::distance_sq(&spec),
        uncertainty: analytic::uncertainty(&spec),
        max_weight: weights.max_weight(),
        sampled_mean: sampled.as_ref().map(|s| s.mean_frequency),
        sampled_variance: sampled.as_ref().map(|s| s.sample_variance),
        dense_distance_sq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonCollapseRow {
    pub n: usize,
    pub distance_sq: f64,
    pub max_weight: f64,
    pub off_peak_mass: f64,
    /// Eigenvalue `k/N` carrying the most weight.
    pub peak: Fraction,
    /// `max_weight * sqrt(N)`; tends to `1/sqrt(2π p(1-p))`.
    pub scaled_max_weight: f64,
}

impl From<NonCollapseMetrics> for NonCollapseRow {
    fn from(m: NonCollapseMetrics) -> Self {
        Self {
            n: m.n,
            distance_sq: m.distance_sq,
            max_weight: m.max_weight,
            off_peak_mass: m.off_peak_mass,
            peak: m.peak,
            scaled_max_weight: m.max_weight * (m.n as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonCollapseReport {
    pub j: usize,
    pub p: f64,
    pub exact_eigenstate: bool,
    pub rows: Vec<NonCollapseRow>,
    pub verdict: String,
}

pub fn noncollapse_report(
    state: &StateVector,
    j: usize,
    n_list: &[usize],
) -> Result<NonCollapseReport> {
    check_n_list(n_list)?;
    let base = EnsembleSpec::new(state.clone(), n_list[0], j)?;
    let p = base.p();
    let rows = Exec::default()
        .map_range(n_list.len(), |i| {
            base.with_n(n_list[i])
                .and_then(|s| analytic::noncollapse_metrics(&s))
                .map(NonCollapseRow::from)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let exact_eigenstate = rows.iter().all(|r| r.off_peak_mass == 0.0);
    let verdict = verdict(j, p, exact_eigenstate, &rows);
    Ok(NonCollapseReport {
        j,
        p,
        exact_eigenstate,
        rows,
        verdict,
    })
}

fn verdict(j: usize, p: f64, exact: bool, rows: &[NonCollapseRow]) -> String {
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    if exact {
        let eigenvalue = if p >= 0.5 { 1 } else { 0 };
        return format!(
            "exact eigenstate: |psi>^N is an eigenvector of F^{j}_N with eigenvalue {eigenvalue} for every N"
        );
    }
    format!(
        "not an eigenstate: from N={} to N={} distance_sq falls {:.6e} -> {:.6e} \
         while off-peak spectral mass goes {:.6} -> {:.6} and the largest eigenspace \
         weight is {:.6e}; the mass spreads over ~sqrt(N) eigenvalues around p={:.6}",
        first.n,
        last.n,
        first.distance_sq,
        last.distance_sq,
        first.off_peak_mass,
        last.off_peak_mass,
        last.max_weight,
        p
    )
}
