//! Pauli spectra and stabilizer entropies of many-qubit state vectors.
//!
//! The crate covers the full pipeline from states to magic measures:
//!
//! * [`pauli`] and [`statevec`]: symplectic Pauli strings, dense state vectors
//!   and the O(d) expectation kernel;
//! * [`ensembles`]: Haar states, brick-wall circuits, random stabilizer
//!   states, product states and subspace phase states;
//! * [`spectrum`]: exact Pauli spectra via a fast transform, histograms and
//!   stabilizer Rényi entropies (plain and filtered);
//! * [`sampler`]: Metropolis–Hastings estimates for larger systems;
//! * [`analytics`]: Gaussian-typicality and exact Haar predictions;
//! * [`hamiltonians`]: Ising chains, mid-spectrum eigenstates, level and
//!   ETH statistics, disorder scans.

// Negated float comparisons are used on purpose so that NaN fails validation;
// `is_multiple_of` postdates the supported toolchain.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

extern crate openblas_src;

pub mod analytics;
pub mod ensembles;
pub mod error;
pub mod hamiltonians;
pub mod linalg;
pub mod pauli;
pub mod sampler;
pub mod spectrum;
pub mod statevec;
pub mod stats;

pub use num_complex::Complex64 as C64;

pub use analytics::{EnsembleKind, EntropyPair, Typicality};
pub use ensembles::{CircuitSpec, Group, SpsSpec};
pub use error::{Error, Result};
pub use hamiltonians::{Center, EigenSelection, Eigenstates, HamiltonianSpec};
pub use pauli::{Pauli, PauliString};
pub use sampler::{ChainRecord, SamplerConfig};
pub use spectrum::{EntropyReport, Histogram, HistogramOptions, Method, PauliSpectrum, PointMass};
pub use statevec::{StateVector, TwoQubitGate};

/// Library version recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
