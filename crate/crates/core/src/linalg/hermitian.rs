use std::ops::Deref;

use crate::error::{Error, Result};
use crate::linalg::eigen::{herm_eig_matrix, Eigen};
use crate::linalg::matrix::ComplexMatrix;
use crate::tolerances::{HERMITIAN_TOL, PSD_TOL, TRACE_TOL};

/// Square matrix equal to its adjoint within [`HERMITIAN_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let defect = matrix.hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { matrix })
    }

    /// Takes the Hermitian part of a square matrix known to be Hermitian up to rounding.
    pub(crate) fn from_hermitian_part(matrix: &ComplexMatrix) -> Self {
        Self {
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn eig(&self) -> Result<Eigen> {
        herm_eig(self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(herm_eig(self)?.min())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    /// `a · self · a†`, Hermitian for any `a`.
    pub fn conjugate_by(&self, a: &ComplexMatrix) -> Self {
        Self::from_hermitian_part(&self.matrix.conjugate_by(a))
    }

    /// Real part of Tr(self · other).
    pub fn inner(&self, other: &Self) -> f64 {
        self.matrix.trace_product(&other.matrix).re
    }

    pub fn sum<'a>(dim: usize, ops: impl IntoIterator<Item = &'a Self>) -> Self {
        ops.into_iter()
            .fold(Self::zeros(dim), |acc, op| acc.add(op))
    }
}

impl Deref for HermitianOperator {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let min = op.min_eigenvalue()?;
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        let trace = op.trace_re();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace is {trace}, expected 1")));
        }
        Ok(Self { op })
    }

    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(matrix)?)
    }

    /// Normalized projector onto a (not necessarily normalized) vector.
    pub fn pure(vector: &[num_complex::Complex64]) -> Result<Self> {
        let norm2: f64 = vector.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == 0.0 {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let p = ComplexMatrix::projector(vector).scale(1.0 / norm2);
        Ok(Self {
            op: HermitianOperator::from_hermitian_part(&p),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: HermitianOperator::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }
}

impl Deref for DensityOperator {
    type Target = HermitianOperator;

    fn deref(&self) -> &HermitianOperator {
        &self.op
    }
}

/// Eigenvalues ascending with unitary eigenvectors.
pub fn herm_eig(h: &HermitianOperator) -> Result<Eigen> {
    herm_eig_matrix(h.matrix())
}

/// Principal square root of a PSD operator; eigenvalues in `[-PSD_TOL, 0)` are clamped to zero.
pub fn psd_sqrt(p: &HermitianOperator) -> Result<HermitianOperator> {
    let e = herm_eig(p)?;
    if e.min() < -PSD_TOL {
        return Err(Error::NotPsd(e.min()));
    }
    Ok(HermitianOperator::from_hermitian_part(&e.apply(|l| l.max(0.0).sqrt())))
}

/// Pseudo-inverse square root on the eigenspaces with eigenvalue above `cutoff`, plus
/// the projector onto that support.
pub fn psd_inv_sqrt(p: &HermitianOperator, cutoff: f64) -> Result<(HermitianOperator, HermitianOperator)> {
    let e = herm_eig(p)?;
    let inv = e.apply(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 });
    let support = e.spectral_projector(|l| l > cutoff);
    Ok((
        HermitianOperator::from_hermitian_part(&inv),
        HermitianOperator::from_hermitian_part(&support),
    ))
}

/// Schatten-1 norm of a Hermitian operator: the sum of absolute eigenvalues.
pub fn trace_norm(h: &HermitianOperator) -> Result<f64> {
    Ok(herm_eig(h)?.values.iter().map(|l| l.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn plus() -> Vec<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)]
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn density_checks() {
        let not_psd = HermitianOperator::new(ComplexMatrix::diag_real(&[1.5, -0.5])).unwrap();
        assert!(matches!(DensityOperator::new(not_psd), Err(Error::NotPsd(_))));
        let bad_trace = HermitianOperator::new(ComplexMatrix::diag_real(&[0.5, 0.25])).unwrap();
        assert!(DensityOperator::new(bad_trace).is_err());
        assert!(DensityOperator::from_matrix(ComplexMatrix::diag_real(&[0.5, 0.5])).is_ok());
    }

    #[test]
    fn sqrt_examples() {
        let d = HermitianOperator::new(ComplexMatrix::diag_real(&[4.0, 9.0])).unwrap();
        assert!(psd_sqrt(&d).unwrap().max_abs_diff(&ComplexMatrix::diag_real(&[2.0, 3.0])) < 1e-14);
        let i = HermitianOperator::identity(3);
        assert!(psd_sqrt(&i).unwrap().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
        let p = HermitianOperator::new(ComplexMatrix::projector(&plus())).unwrap();
        assert!(psd_sqrt(&p).unwrap().max_abs_diff(p.matrix()) < 1e-14);
    }

    #[test]
    fn sqrt_clamps_tiny_negative_and_rejects_real_negative() {
        let tiny = HermitianOperator::new(ComplexMatrix::diag_real(&[1.0, -1e-12])).unwrap();
        let r = psd_sqrt(&tiny).unwrap();
        assert_eq!(r[(1, 1)], Complex64::new(0.0, 0.0));
        let neg = HermitianOperator::new(ComplexMatrix::diag_real(&[1.0, -1e-6])).unwrap();
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd(_))));
    }

    #[test]
    fn trace_norm_examples() {
        let d = HermitianOperator::new(ComplexMatrix::diag_real(&[1.0, -2.0])).unwrap();
        assert!((trace_norm(&d).unwrap() - 3.0).abs() < 1e-15);

        let rho = DensityOperator::from_matrix(
            ComplexMatrix::from_vec(
                2,
                2,
                vec![
                    Complex64::new(0.3, 0.0),
                    Complex64::new(0.1, 0.2),
                    Complex64::new(0.1, -0.2),
                    Complex64::new(0.7, 0.0),
                ],
            )
            .unwrap(),
        )
        .unwrap();
        assert!((trace_norm(&rho).unwrap() - 1.0).abs() < 1e-14);

        // (|0⟩⟨0| − |+⟩⟨+|)/2 = [[1/4, -1/4], [-1/4, -1/4]], eigenvalues ±√2/4.
        let zero = ComplexMatrix::diag_real(&[1.0, 0.0]);
        let diff = (&zero - &ComplexMatrix::projector(&plus())).scale(0.5);
        let h = HermitianOperator::new(diff).unwrap();
        assert!((trace_norm(&h).unwrap() - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn inverse_sqrt_on_support() {
        let d = HermitianOperator::new(ComplexMatrix::diag_real(&[4.0, 0.0])).unwrap();
        let (inv, support) = psd_inv_sqrt(&d, 1e-12).unwrap();
        assert!(inv.max_abs_diff(&ComplexMatrix::diag_real(&[0.5, 0.0])) < 1e-15);
        assert!(support.max_abs_diff(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
    }
}
