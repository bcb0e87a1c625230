use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "invalid sector: L={sites}, n_up={n_up}, n_down={n_down} (need 1 <= L <= 16, 0 <= n <= L)"
    )]
    InvalidSector {
        sites: usize,
        n_up: usize,
        n_down: usize,
    },

    #[error("site {site} out of range 1..={sites}")]
    SiteOutOfRange { site: usize, sites: usize },

    #[error("sites must differ (got i = j = {site})")]
    EqualSites { site: usize },

    #[error("hopping amplitude must be positive (got t = {t})")]
    NonPositiveHopping { t: f64 },

    #[error("basis has L = {basis_sites} sites but parameters have L = {param_sites}")]
    SiteCountMismatch {
        basis_sites: usize,
        param_sites: usize,
    },

    #[error("estimated matrix storage {needed} bytes exceeds budget {budget} bytes")]
    MemoryBudget { needed: usize, budget: usize },

    #[error("vector length {got} does not match dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension {dim} exceeds dense solver threshold {threshold}")]
    DenseTooLarge { dim: usize, threshold: usize },

    #[error("matrix is not symmetric (max |H - H^T| = {max_asym})")]
    NotSymmetric { max_asym: f64 },

    #[error("dimension {dim} too small for Lanczos (need >= 2)")]
    DimensionTooSmall { dim: usize },

    #[error("matrix trace {trace} deviates from 1 beyond tolerance")]
    TraceNotOne { trace: f64 },

    #[error("density matrix has eigenvalue {eigenvalue} below the negativity floor")]
    NegativeEigenvalue { eigenvalue: f64 },

    #[error("probability {value} outside [0, 1/2]")]
    ProbabilityOutOfRange { value: f64 },

    #[error("state continuation lost at U = {u} (best overlap {overlap} < 0.5)")]
    TrackingDiscontinuity { u: f64, overlap: f64 },

    #[error("sector is not at half filling (L={sites}, n_up={n_up}, n_down={n_down})")]
    NotHalfFilling {
        sites: usize,
        n_up: usize,
        n_down: usize,
    },

    #[error("projection leakage {leakage} exceeds 0.5; state is not confined")]
    NotConfined { leakage: f64 },

    #[error("oracle supports L <= {max} (got L = {sites})")]
    OracleTooLarge { sites: usize, max: usize },

    #[error("half-filling sweeps need an even site count (got L = {sites})")]
    OddSites { sites: usize },

    #[error("coupling values must be >= 0 (got {u})")]
    NegativeCoupling { u: f64 },

    #[error("ground state did not converge (residual {residual} > tol {tol})")]
    NotConverged { residual: f64, tol: f64 },

    #[error("ground state flagged degenerate (gap = {gap})")]
    Degenerate { gap: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
