//! Brute-force construction of the frequency operator `F^j_N` on the full
//! `d^N`-dimensional ensemble space.
//!
//! Everything here works with explicit vectors and matrices so it can act as
//! an oracle for the closed forms in [`crate::analytic`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{
    check_scale, inner_product_raw, norm_sq, product_of_factors, product_state_vector, BasisString,
    Complex, EnsembleSpec, VECTOR_LIMIT,
};
use crate::par::Exec;

/// Largest `d^N` for which a full `d^N x d^N` matrix is materialized.
pub const MATRIX_LIMIT: usize = 1 << 12;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// An eigenvalue `count / n` of a frequency operator, kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub count: usize,
    pub n: usize,
}

impl Fraction {
    pub fn value(self) -> f64 {
        self.count as f64 / self.n as f64
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<Complex>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    /// `|k><k|` on a `dim`-dimensional space.
    pub fn projector(dim: usize, k: usize) -> Self {
        let mut m = Self::zeros(dim);
        m.entries[k * dim + k] = ONE;
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<Complex> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn matvec(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        self.matvec_with(v, Exec::default())
    }

    pub fn matvec_with(&self, v: &[Complex], exec: Exec) -> Result<Vec<Complex>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.len(),
            });
        }
        let mut out = vec![ZERO; self.dim];
        exec.for_each_indexed(&mut out, |r, y| {
            let row = &self.entries[r * self.dim..(r + 1) * self.dim];
            *y = row.iter().zip(v).fold(ZERO, |acc, (a, x)| acc + a * x);
        });
        Ok(out)
    }

    /// Matrix product `self * other`. Zero entries of `self` are skipped.
    pub fn matmul(&self, other: &Self, exec: Exec) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim;
        let mut out = Self::zeros(d);
        if d == 0 {
            return Ok(out);
        }
        exec.for_each_chunk(&mut out.entries, d, |r, row| {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                let b = &other.entries[k * d..(k + 1) * d];
                for (y, x) in row.iter_mut().zip(b) {
                    *y += a * x;
                }
            }
        });
        Ok(out)
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Self, exec: Exec) -> Result<Self> {
        let ab = self.matmul(other, exec)?;
        let ba = other.matmul(self, exec)?;
        ab.sub(&ba)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add_scaled(&mut self, other: &Self, scale: f64) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += b * scale;
        }
        Ok(())
    }

    /// Kronecker product, `self` as the more significant factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        let dim = m * n;
        let mut entries = vec![ZERO; dim * dim];
        for r1 in 0..m {
            for c1 in 0..m {
                let a = self.get(r1, c1);
                if a == ZERO {
                    continue;
                }
                for r2 in 0..n {
                    let row = (r1 * n + r2) * dim + c1 * n;
                    for c2 in 0..n {
                        entries[row + c2] = a * other.get(r2, c2);
                    }
                }
            }
        }
        Self { dim, entries }
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ab - conj(A_ba)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for a in 0..d {
            for b in a..d {
                worst = worst.max((self.get(a, b) - self.get(b, a).conj()).norm());
            }
        }
        worst
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_max(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in (0..d).filter(|&c| c != r) {
                worst = worst.max(self.get(r, c).norm());
            }
        }
        worst
    }
}

fn validate(dim: usize, n: usize, j: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::EmptyState);
    }
    if n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if j >= dim {
        return Err(Error::IndexOutOfRange { index: j, dim });
    }
    Ok(())
}

/// Number of sites equal to `j` for every product basis string, by basis index.
pub fn frequency_counts(dim: usize, n: usize, j: usize, exec: Exec) -> Result<Vec<u32>> {
    validate(dim, n, j)?;
    let total = check_scale("frequency diagonal", dim, n, VECTOR_LIMIT)?;
    Ok(exec.map_range(total, |index| {
        let mut rest = index;
        let mut count = 0;
        for _ in 0..n {
            count += u32::from(rest % dim == j);
            rest /= dim;
        }
        count
    }))
}

/// Builds `F^j_N` as a sum over product basis strings of `f_j |s><s|`, with
/// `f_j` the fraction of sites of `s` equal to `j`.
pub fn build_frequency_operator(dim: usize, n: usize, j: usize) -> Result<DenseOperator> {
    validate(dim, n, j)?;
    let total = check_scale("dense operator", dim, n, MATRIX_LIMIT)?;
    let mut op = DenseOperator::zeros(total);
    for index in 0..total {
        let s = BasisString::from_index(index, dim, n)?;
        let f = s.indices().iter().filter(|&&i| i == j).count() as f64 / n as f64;
        // |s><s| has a single nonzero entry at (s, s).
        op.entries[index * total + index] += f;
    }
    Ok(op)
}

/// Builds `F^j_N` as `(1/N) sum_alpha |j><j|_alpha`, each term an explicit
/// Kronecker product of identities with one site projector.
pub fn build_from_site_projectors(dim: usize, n: usize, j: usize) -> Result<DenseOperator> {
    validate(dim, n, j)?;
    let total = check_scale("dense operator", dim, n, MATRIX_LIMIT)?;
    let identity = DenseOperator::identity(dim);
    let projector = DenseOperator::projector(dim, j);
    let mut op = DenseOperator::zeros(total);
    for alpha in 0..n {
        let mut term = DenseOperator::identity(1);
        for site in 0..n {
            term = term.kron(if site == alpha { &projector } else { &identity });
        }
        op.add_scaled(&term, 1.0 / n as f64)?;
    }
    Ok(op)
}

/// The frequency operator stored diagonally, for spaces too large to
/// materialize as a matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator {
    n: usize,
    counts: Vec<u32>,
}

impl DiagonalOperator {
    pub fn new(dim: usize, n: usize, j: usize, exec: Exec) -> Result<Self> {
        Ok(Self {
            n,
            counts: frequency_counts(dim, n, j, exec)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn eigenvalue(&self, index: usize) -> Fraction {
        Fraction {
            count: self.counts[index] as usize,
            n: self.n,
        }
    }

    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.counts.len() {
            return Err(Error::DimensionMismatch {
                left: self.counts.len(),
                right: v.len(),
            });
        }
        let n = self.n as f64;
        Ok(v.iter()
            .zip(&self.counts)
            .map(|(x, &k)| x * (k as f64 / n))
            .collect())
    }
}

/// `F^j_N` in whichever representation its size allows.
#[derive(Debug, Clone, PartialEq)]
pub enum FrequencyOperator {
    Matrix(DenseOperator),
    Diagonal(DiagonalOperator),
}

impl FrequencyOperator {
    /// A full matrix when `d^N <= MATRIX_LIMIT`, otherwise the diagonal form.
    pub fn build(dim: usize, n: usize, j: usize) -> Result<Self> {
        validate(dim, n, j)?;
        match check_scale("dense operator", dim, n, MATRIX_LIMIT) {
            Ok(_) => build_frequency_operator(dim, n, j).map(Self::Matrix),
            Err(_) => DiagonalOperator::new(dim, n, j, Exec::default()).map(Self::Diagonal),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Matrix(m) => m.dim(),
            Self::Diagonal(d) => d.dim(),
        }
    }

    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        match self {
            Self::Matrix(m) => m.matvec(v),
            Self::Diagonal(d) => d.apply(v),
        }
    }
}

/// Outcome of applying an operator to a product basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenCheck {
    pub eigenvalue: Fraction,
    pub residual: f64,
}

/// Applies `op` to `|s>` and measures `||op|s> - f_j(s)|s>||`.
pub fn eigenrelation_check(op: &DenseOperator, s: &BasisString, j: usize) -> Result<EigenCheck> {
    let total = check_scale("basis vector", s.dim(), s.n(), MATRIX_LIMIT)?;
    if op.dim() != total {
        return Err(Error::OperatorMismatch {
            expected: total,
            actual: op.dim(),
        });
    }
    let index = s.to_index();
    let mut e = vec![ZERO; total];
    e[index] = ONE;
    let image = op.matvec_with(&e, Exec::Sequential)?;
    let eigenvalue = Fraction {
        count: s.count(j),
        n: s.n(),
    };
    e[index] = Complex::new(eigenvalue.value(), 0.0);
    let residual = norm_sq(&image.iter().zip(&e).map(|(a, b)| a - b).collect::<Vec<_>>()).sqrt();
    Ok(EigenCheck {
        eigenvalue,
        residual,
    })
}

/// Largest eigenrelation residual over every product basis string.
pub fn eigenrelation_sweep(
    op: &DenseOperator,
    dim: usize,
    n: usize,
    j: usize,
    exec: Exec,
) -> Result<f64> {
    let total = check_scale("basis vector", dim, n, MATRIX_LIMIT)?;
    let residuals = exec.map_range(total, |index| {
        BasisString::from_index(index, dim, n)
            .and_then(|s| eigenrelation_check(op, &s, j))
            .map(|c| c.residual)
    });
    residuals
        .into_iter()
        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))
}

/// Dimension of each eigenspace `k/N`, by counting basis strings.
pub fn eigenspace_multiplicities(dim: usize, n: usize, j: usize) -> Result<Vec<usize>> {
    let counts = frequency_counts(dim, n, j, Exec::default())?;
    let mut mult = vec![0; n + 1];
    for k in counts {
        mult[k as usize] += 1;
    }
    Ok(mult)
}

/// `F^j_N |psi>^N` computed two ways.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAction {
    /// Operator applied to the product vector.
    pub via_operator: Vec<Complex>,
    /// `(c_j/N) sum_alpha |psi>...|j>_alpha...|psi>`.
    pub via_structure: Vec<Complex>,
    /// Largest per-component discrepancy between the two.
    pub max_deviation: f64,
}

pub fn apply_to_product(spec: &EnsembleSpec) -> Result<ProductAction> {
    let op = FrequencyOperator::build(spec.dim(), spec.n(), spec.j())?;
    apply_to_product_with(&op, spec)
}

pub fn apply_to_product_with(op: &FrequencyOperator, spec: &EnsembleSpec) -> Result<ProductAction> {
    let psi = product_state_vector(spec)?;
    let via_operator = op.apply(&psi)?;
    let via_structure = structural_action(spec)?;
    let max_deviation = via_operator
        .iter()
        .zip(&via_structure)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ProductAction {
        via_operator,
        via_structure,
        max_deviation,
    })
}

/// Sum of the `N` product vectors in which site `alpha` is replaced by
/// `c_j |j>`, scaled by `1/N`.
pub fn structural_action(spec: &EnsembleSpec) -> Result<Vec<Complex>> {
    let psi = spec.state().amplitudes();
    let mut site_j = vec![ZERO; spec.dim()];
    site_j[spec.j()] = spec.amplitude();
    let scale = 1.0 / spec.n() as f64;
    let mut sum: Option<Vec<Complex>> = None;
    for alpha in 0..spec.n() {
        let factors: Vec<&[Complex]> = (0..spec.n())
            .map(|site| if site == alpha { &site_j[..] } else { psi })
            .collect();
        let term = product_of_factors(&factors)?;
        match sum.as_mut() {
            None => sum = Some(term.into_iter().map(|x| x * scale).collect()),
            Some(acc) => acc.iter_mut().zip(term).for_each(|(a, t)| *a += t * scale),
        }
    }
    Ok(sum.unwrap_or_default())
}

/// Frequency statistics of `|psi>^N` obtained directly from vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DenseStatistics {
    /// `<psi^N| F |psi^N>`.
    pub expectation: f64,
    /// `<F psi^N | F psi^N>`.
    pub gram: f64,
    /// `|| F|psi^N> - p|psi^N> ||^2`.
    pub distance_sq: f64,
    /// Imaginary part of the expectation; zero up to rounding.
    pub expectation_im: f64,
}

pub fn dense_statistics(spec: &EnsembleSpec) -> Result<DenseStatistics> {
    let op = FrequencyOperator::build(spec.dim(), spec.n(), spec.j())?;
    dense_statistics_with(&op, spec)
}

pub fn dense_statistics_with(
    op: &FrequencyOperator,
    spec: &EnsembleSpec,
) -> Result<DenseStatistics> {
    let psi = product_state_vector(spec)?;
    let image = op.apply(&psi)?;
    let expectation = inner_product_raw(&psi, &image)?;
    let gram = norm_sq(&image);
    let p = spec.p();
    let residual: Vec<Complex> = image.iter().zip(&psi).map(|(f, x)| f - x * p).collect();
    Ok(DenseStatistics {
        expectation: expectation.re,
        gram,
        distance_sq: norm_sq(&residual),
        expectation_im: expectation.im,
    })
}

pub fn expectation_dense(spec: &EnsembleSpec) -> Result<f64> {
    dense_statistics(spec).map(|s| s.expectation)
}

pub fn gram_dense(spec: &EnsembleSpec) -> Result<f64> {
    dense_statistics(spec).map(|s| s.gram)
}

pub fn distance_sq_dense(spec: &EnsembleSpec) -> Result<f64> {
    dense_statistics(spec).map(|s| s.distance_sq)
}

/// Mass of `|psi>^N` on each eigenspace of `F^j_N`, by projecting the explicit
/// product vector: `w_k = sum over strings with k copies of j of |<s|psi^N>|^2`.
pub fn eigenspace_weights(spec: &EnsembleSpec) -> Result<Vec<f64>> {
    let psi = product_state_vector(spec)?;
    let counts = frequency_counts(spec.dim(), spec.n(), spec.j(), Exec::default())?;
    let mut weights = vec![0.0; spec.n() + 1];
    for (x, k) in psi.iter().zip(counts) {
        weights[k as usize] += x.norm_sqr();
    }
    Ok(weights)
}

/// Maximum deviations found by [`verify_operator_algebra`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraReport {
    pub dim: usize,
    pub n: usize,
    /// `max |sum_j F^j - I|`.
    pub identity: f64,
    /// `max_{j<k} max |[F^j, F^k]|`.
    pub commutator: f64,
    pub hermiticity: f64,
    /// Off-diagonal mass plus distance of diagonal entries from `{0, 1/N, ..., 1}`.
    pub spectrum: f64,
    /// String-sum construction against the site-projector construction.
    pub construction: f64,
    /// Largest eigenrelation residual over all basis strings and all `j`.
    pub eigenrelation: f64,
}

impl AlgebraReport {
    pub fn max_deviation(&self) -> f64 {
        [
            self.identity,
            self.commutator,
            self.hermiticity,
            self.spectrum,
            self.construction,
            self.eigenrelation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_deviation() <= tolerance
    }
}

/// Distance of a diagonal entry from the nearest admissible eigenvalue `k/N`.
fn spectrum_defect(x: Complex, n: usize) -> f64 {
    let k = (x.re * n as f64).round().clamp(0.0, n as f64);
    (x - Complex::new(k / n as f64, 0.0)).norm()
}

/// Checks the algebra of `{F^j_N : j < d}` on explicit matrices.
pub fn verify_operator_algebra(dim: usize, n: usize) -> Result<AlgebraReport> {
    verify_operator_algebra_with(dim, n, Exec::default())
}

pub fn verify_operator_algebra_with(dim: usize, n: usize, exec: Exec) -> Result<AlgebraReport> {
    validate(dim, n, 0)?;
    let total = check_scale("dense operator", dim, n, MATRIX_LIMIT)?;
    let mut ops = Vec::with_capacity(dim);
    let mut report = AlgebraReport {
        dim,
        n,
        identity: 0.0,
        commutator: 0.0,
        hermiticity: 0.0,
        spectrum: 0.0,
        construction: 0.0,
        eigenrelation: 0.0,
    };
    let mut sum = DenseOperator::zeros(total);
    for j in 0..dim {
        let op = build_frequency_operator(dim, n, j)?;
        let alt = build_from_site_projectors(dim, n, j)?;
        report.construction = report.construction.max(op.sub(&alt)?.max_abs());
        report.hermiticity = report.hermiticity.max(op.hermiticity_defect());
        let diag_defect = op
            .diagonal()
            .into_iter()
            .map(|x| spectrum_defect(x, n))
            .fold(0.0, f64::max);
        report.spectrum = report.spectrum.max(diag_defect).max(op.off_diagonal_max());
        report.eigenrelation = report
            .eigenrelation
            .max(eigenrelation_sweep(&op, dim, n, j, exec)?);
        sum.add_scaled(&op, 1.0)?;
        ops.push(op);
    }
    report.identity = sum.sub(&DenseOperator::identity(total))?.max_abs();
    for a in 0..dim {
        for b in a + 1..dim {
            let c = ops[a].commutator(&ops[b], exec)?;
            report.commutator = report.commutator.max(c.max_abs());
        }
    }
    Ok(report)
}
