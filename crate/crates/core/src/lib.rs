//! Frequency operators on N-fold tensor-product Hilbert spaces.
//!
//! For an observable with eigenbasis `{|i>}` and a single-system state
//! `|psi> = sum_i c_i |i>`, the frequency operator `F^j_N` on the ensemble
//! space `H^N` has each product basis vector `|i_1>...|i_N>` as an
//! eigenvector, with eigenvalue the fraction of sites equal to `j`.
//!
//! - [`hilbert`]: states, inner products, product vectors, basis strings.
//! - [`dense`]: explicit matrices and vectors on `d^N` dimensions.
//! - [`analytic`]: closed forms for any `N`, and spectral weights of `|psi>^N`.
//! - [`sampler`]: seeded Monte Carlo measurement of the ensemble.
//! - [`analysis`]: sweeps over `N` and the non-collapse report.
//!
//! Data-parallel kernels use rayon behind the default `parallel` feature; see
//! [`par::Exec`].

pub mod analysis;
pub mod analytic;
mod binomial;
pub mod dense;
pub mod error;
pub mod hilbert;
pub mod par;
pub mod sampler;

pub use error::{Error, Result};
pub use hilbert::{BasisString, Complex, EnsembleSpec, StateVector};
