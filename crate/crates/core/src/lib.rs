//! # gcap-core
//!
//! Moment-level toolkit for bosonic Gaussian states and Gaussian channels.
//!
//! Everything here is a pure function of its inputs and works under `no_std`
//! with `alloc`. Floating point functions come from `num-traits` (backed by `libm`)
//! where `core` lacks them.
//!
//! ## Layout
//!
//! - [`linalg`]: small dense real/complex matrices and a cyclic Jacobi
//!   symmetric eigensolver. Everything else is built on it.
//! - [`symplectic`]: the symplectic form, membership tests, the `K(n) ≅ U(n)`
//!   isomorphism, Euler decomposition and seeded random generators.
//! - [`williamson`]: symplectic eigenvalues and the Williamson normal form.
//! - [`state`]: Gaussian states (covariance, displacement, mode frequencies),
//!   physicality and purity, energy, Schatten-p traces and entropy.
//! - [`channel`]: Gaussian channels `γ ↦ XᵀγX + Y` with a complete-positivity
//!   certificate, classical/thermal/lossy constructors and tensor products.
//! - [`functionals`]: maximal output p-norm, minimal output entropy,
//!   energy-constrained Gaussian Holevo capacity, and the
//!   multiplicativity/additivity checks.
//! - [`majorization`]: majorization predicates, the Schur diagonal check and
//!   randomized trial harnesses for the symplectic trace bound and the
//!   weak-supermajorization inequality.
//! - [`optimize`]: a budgeted, restarted Nelder–Mead minimizer.
//! - [`rng`]: seeded ChaCha20 streams.
//!
//! ## Conventions
//!
//! Quadratures are ordered `(q₁, p₁, …, qₙ, pₙ)` and scaled by the mode
//! frequencies, so covariance matrices are dimensionless; the vacuum is the
//! identity. Symplectic spectra are always reported in ascending order.

#![no_std]
#![forbid(unsafe_code)]
// `!(x >= t)` is deliberate: NaN must fail a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod error;
pub mod functionals;
pub mod linalg;
pub mod majorization;
pub mod optimize;
pub mod param;
pub mod rng;
pub mod state;
pub mod symplectic;
pub mod tolerance;
pub mod williamson;

pub use channel::{ChannelKind, GaussianChannel};
pub use error::{Error, Result};
pub use linalg::{CMatrix, Matrix};
pub use state::{CovarianceMatrix, GaussianState, ModeEnergy};
pub use symplectic::{ComplexUnitary, SymplecticMatrix, TruncatedSymplectic};
pub use tolerance::Tolerances;
pub use williamson::{SymplecticSpectrum, WilliamsonDecomposition};
