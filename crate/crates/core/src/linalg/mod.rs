//! Dense complex linear algebra: Kronecker products, partial traces, Jacobi
//! spectral decomposition, PSD square roots and trace norms.
//!
//! All functions are pure; nothing here holds global state.

mod eigen;
mod hermitian;
mod matrix;
mod ops;

pub use eigen::{herm_eig_matrix, herm_eig_with, Eigen};
pub use hermitian::{herm_eig, psd_inv_sqrt, psd_sqrt, trace_norm, DensityOperator, HermitianOperator};
pub use matrix::{ComplexMatrix, ONE, ZERO};
pub use ops::{embed, partial_trace, tensor, tensor_all, tensor_with_limit};

pub use num_complex::Complex64;
