//! Numerical tolerances shared across the crate.

/// Max entrywise |M − M†| accepted for a Hermitian operator.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated for a PSD operator; also the square-root clamp window.
pub const PSD_TOL: f64 = 1e-9;
/// |Tr ρ − 1| accepted for a density operator.
pub const TRACE_TOL: f64 = 1e-9;
/// Spectral reconstruction and eigenvector orthonormality target.
pub const EIG_TOL: f64 = 1e-9;
pub const MAX_JACOBI_SWEEPS: usize = 100;

/// Largest operator dimension any construction may allocate.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Per-setting POVM completeness residual.
pub const POVM_COMPLETENESS_TOL: f64 = 1e-9;
/// Idempotence / orthogonality residual for the projective flag.
pub const PROJECTIVE_TOL: f64 = 1e-8;

pub const GAME_NORMALIZATION_TOL: f64 = 1e-12;
pub const CORRELATION_NEGATIVITY_TOL: f64 = 1e-12;
pub const CORRELATION_NORMALIZATION_TOL: f64 = 1e-9;
pub const DEFAULT_NONSIGNALING_TOL: f64 = 1e-9;

/// Upper limit on nX^nA · nY^nB for exhaustive classical-value enumeration.
pub const ENUMERATION_BUDGET: u128 = 100_000_000;

pub const DEFAULT_DIST_TOL: f64 = 1e-7;
pub const DEFAULT_DIST_MAX_ITERS: usize = 5000;
/// Feasibility slack allowed on returned POVMs and dual certificates.
pub const CERTIFICATE_TOL: f64 = 1e-8;
