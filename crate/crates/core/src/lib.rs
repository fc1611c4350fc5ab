//! Monotone-metric volume elements on density matrices.
//!
//! This crate computes Riemannian volume elements of the two extreme
//! monotone metrics (the minimal, fidelity-based metric and the maximal,
//! left-inverse-based metric) over parameterized families of density
//! matrices, normalizes them into Bayesian priors, and uses those priors
//! for two downstream purposes:
//!
//! * **Thermodynamics** — treating the normalized volume element as a
//!   density of states and computing partition-function ratios, mean
//!   energies, and energy variances for linear energy functions.
//! * **Bayesian inference** — computing expected Kullback–Leibler
//!   information gains of measurements against these priors.
//!
//! The crate is organized bottom-up:
//!
//! * [`specfun`] — Bessel `I`, scaled error function `erfi`, complete
//!   elliptic integrals, Langevin/Brillouin functions.
//! * [`matrixcore`] — Hermitian matrices, Pauli words, affine matrix
//!   families, and a deterministic Jacobi eigensolver.
//! * [`measure`] — adaptive tanh–sinh quadrature over mapped regions,
//!   normalized priors, marginals, and tabulated densities.
//! * [`metric`] — metric tensors and volume elements for the minimal and
//!   maximal monotone metrics, with independent cross-checks.
//! * [`thermo`] — partition functions, moments, and closed-form registry.
//! * [`scenarios`] — the built-in catalog of parameterized families.
//! * [`bayes`] — measurement models, posteriors, and information gains.
//! * [`validation`] — the end-to-end check suite driven by the CLI and
//!   the acceptance test.

pub mod bayes;
pub mod cli;
pub mod matrixcore;
pub mod measure;
pub mod metric;
pub mod scenarios;
pub mod specfun;
pub mod thermo;
pub mod validation;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A matrix or family failed a structural precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// An iterative numerical routine failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A requested integral does not converge (improper prior).
    #[error("divergent integral: {0}")]
    Divergent(String),
    /// A named scenario or closed form is not in the registry.
    #[error("unknown scenario: {0}")]
    UnknownScenario(String),
    /// I/O or serialization failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
