//! Single-system states and the product basis of the N-fold ensemble space.
//!
//! Basis labels are 0-based: label `i` here is the eigenvalue `a_{i+1}` of the
//! measured observable. Product basis strings `(i_1, ..., i_N)` are encoded as
//! row-major mixed-radix integers with `i_1` most significant.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use num_complex::Complex64 as Complex;

/// Tolerance on `|<psi|psi> - 1|` accepted without renormalization.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Largest ensemble dimension `d^N` for which product vectors are built.
pub const VECTOR_LIMIT: usize = 1 << 20;

/// A normalized amplitude vector `c_i = <i|psi>`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex>,
}

impl StateVector {
    /// Accepts `amplitudes` only if already normalized to within [`NORM_TOLERANCE`].
    pub fn new(amplitudes: Vec<Complex>) -> Result<Self> {
        Self::from_amplitudes(amplitudes, false)
    }

    /// Scales `amplitudes` to unit norm.
    pub fn renormalized(amplitudes: Vec<Complex>) -> Result<Self> {
        Self::from_amplitudes(amplitudes, true)
    }

    pub fn from_amplitudes(mut amplitudes: Vec<Complex>, renormalize: bool) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyState);
        }
        if let Some(index) = amplitudes.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        let norm_sq: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if renormalize {
            if norm_sq == 0.0 {
                return Err(Error::ZeroVector);
            }
            let scale = norm_sq.sqrt().recip();
            amplitudes.iter_mut().for_each(|c| *c *= scale);
        } else if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(Self { amplitudes })
    }

    /// Real amplitudes, for convenience.
    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// The coordinate vector `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyState);
        }
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amplitudes = vec![Complex::new(0.0, 0.0); dim];
        amplitudes[index] = Complex::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    /// Equal real amplitudes `1/sqrt(d)`.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyState);
        }
        let a = (dim as f64).sqrt().recip();
        Self::renormalized(vec![Complex::new(a, 0.0); dim])
    }

    /// `sqrt(p)|0> + sqrt(1-p)|1>`.
    pub fn two_level(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "two-level probability {p} outside [0, 1]"
            )));
        }
        Self::new(vec![
            Complex::new(p.sqrt(), 0.0),
            Complex::new((1.0 - p).sqrt(), 0.0),
        ])
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Result<Complex> {
        self.amplitudes
            .get(index)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            })
    }

    /// `|c_index|^2`, always computed as `re^2 + im^2`.
    pub fn probability(&self, index: usize) -> Result<f64> {
        self.amplitude(index).map(|c| c.re * c.re + c.im * c.im)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .map(|c| c.re * c.re + c.im * c.im)
            .collect()
    }

    pub fn to_record(&self) -> StateRecord {
        StateRecord {
            dim: self.dim(),
            amplitudes: self
                .amplitudes
                .iter()
                .map(|c| AmplitudeRecord { re: c.re, im: c.im })
                .collect(),
        }
    }

    pub fn from_record(record: &StateRecord, renormalize: bool) -> Result<Self> {
        if record.amplitudes.len() != record.dim {
            return Err(Error::DimensionMismatch {
                left: record.dim,
                right: record.amplitudes.len(),
            });
        }
        Self::from_amplitudes(
            record
                .amplitudes
                .iter()
                .map(|a| Complex::new(a.re, a.im))
                .collect(),
            renormalize,
        )
    }
}

/// On-disk state format: `{"dim": d, "amplitudes": [{"re": x, "im": y}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub dim: usize,
    pub amplitudes: Vec<AmplitudeRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRecord {
    pub re: f64,
    pub im: f64,
}

/// `<a|b> = sum_i conj(a_i) b_i`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex> {
    inner_product_raw(a.amplitudes(), b.amplitudes())
}

/// Inner product on raw amplitude slices, summed in ascending index order.
pub fn inner_product_raw(a: &[Complex], b: &[Complex]) -> Result<Complex> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter()
        .zip(b)
        .fold(Complex::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y))
}

pub fn norm_sq(v: &[Complex]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// A product basis label `(i_1, ..., i_N)` with each `i_alpha < dim`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisString {
    dim: usize,
    indices: Vec<usize>,
}

impl BasisString {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyState);
        }
        if indices.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if let Some(&index) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(Self { dim, indices })
    }

    /// Decodes a mixed-radix index into an `n`-site string.
    pub fn from_index(index: usize, dim: usize, n: usize) -> Result<Self> {
        let total = ensemble_dim(dim, n).ok_or(Error::ScaleExceeded {
            what: "basis index",
            dim,
            n,
            limit: usize::MAX,
        })?;
        if index >= total {
            return Err(Error::IndexOutOfRange { index, dim: total });
        }
        let mut indices = vec![0; n];
        let mut rest = index;
        for slot in indices.iter_mut().rev() {
            *slot = rest % dim;
            rest /= dim;
        }
        Self::new(indices, dim)
    }

    pub fn to_index(&self) -> usize {
        self.indices.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Number of sites carrying label `j`.
    pub fn count(&self, j: usize) -> usize {
        self.indices.iter().filter(|&&i| i == j).count()
    }
}

/// `d^N`, or `None` on overflow.
pub fn ensemble_dim(dim: usize, n: usize) -> Option<usize> {
    u32::try_from(n).ok().and_then(|n| dim.checked_pow(n))
}

/// Returns `d^N` if it is within `limit`, otherwise a scale error.
pub fn check_scale(what: &'static str, dim: usize, n: usize, limit: usize) -> Result<usize> {
    match ensemble_dim(dim, n) {
        Some(total) if total <= limit => Ok(total),
        _ => Err(Error::ScaleExceeded {
            what,
            dim,
            n,
            limit,
        }),
    }
}

/// State, ensemble size and target label: the arguments of every frequency
/// statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    state: StateVector,
    n: usize,
    j: usize,
}

impl EnsembleSpec {
    pub fn new(state: StateVector, n: usize, j: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        if j >= state.dim() {
            return Err(Error::IndexOutOfRange {
                index: j,
                dim: state.dim(),
            });
        }
        Ok(Self { state, n, j })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> usize {
        self.j
    }

    /// `c_j`.
    pub fn amplitude(&self) -> Complex {
        self.state.amplitudes()[self.j]
    }

    /// `p = |c_j|^2`, clamped to `[0, 1]` against rounding in the norm.
    pub fn p(&self) -> f64 {
        let c = self.amplitude();
        (c.re * c.re + c.im * c.im).min(1.0)
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::new(self.state.clone(), n, self.j)
    }
}

/// Kronecker product of two vectors, `a` as the more significant factor.
pub fn kron(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

/// `|psi>_1 |psi>_2 ... |psi>_N` in the product basis.
pub fn product_state_vector(spec: &EnsembleSpec) -> Result<Vec<Complex>> {
    product_of_factors(&vec![spec.state().amplitudes(); spec.n()])
}

/// Tensor product of per-site vectors, site 1 most significant.
pub fn product_of_factors(factors: &[&[Complex]]) -> Result<Vec<Complex>> {
    let dim = factors.first().map_or(0, |f| f.len());
    check_scale("product vector", dim, factors.len(), VECTOR_LIMIT)?;
    let mut out = vec![Complex::new(1.0, 0.0)];
    for f in factors {
        out = kron(&out, f);
    }
    Ok(out)
}
