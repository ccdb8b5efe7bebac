//! Cyclic Jacobi diagonalization of complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary, then applies the classical real symmetric Jacobi rotation. Sweeps
//! repeat until the off-diagonal mass is negligible relative to the Frobenius
//! norm.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::tolerances::{EIG_TOL, MAX_JACOBI_SWEEPS};

/// Spectral decomposition `h = V diag(λ) V†` with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `V f(diag λ) V†` for a real spectral function.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fvals: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &fk) in fvals.iter().enumerate() {
            if fk == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fk;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out.hermitian_part()
    }

    /// Orthogonal projector onto the span of eigenvectors whose eigenvalue satisfies `pred`.
    pub fn spectral_projector(&self, pred: impl Fn(f64) -> bool) -> ComplexMatrix {
        self.apply(|l| if pred(l) { 1.0 } else { 0.0 })
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

pub fn herm_eig_matrix(h: &ComplexMatrix) -> Result<Eigen> {
    herm_eig_with(h, MAX_JACOBI_SWEEPS)
}

pub fn herm_eig_with(h: &ComplexMatrix, max_sweeps: usize) -> Result<Eigen> {
    if !h.is_square() {
        return Err(Error::Shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();
    if scale == 0.0 || n == 1 {
        return Ok(finish(a, v));
    }
    let threshold = scale * f64::EPSILON * 0.5;

    for _sweep in 0..max_sweeps {
        if off_diagonal_norm(&a) <= threshold {
            return Ok(finish(a, v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    let residual = off_diagonal_norm(&a);
    if residual <= scale * EIG_TOL * 1e-3 {
        return Ok(finish(a, v));
    }
    Err(Error::Numerical {
        message: format!("Jacobi eigensolver did not converge in {max_sweeps} sweeps"),
        residual,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that would not change the diagonal at working precision.
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) · [[c, s], [-s, c]] acting on (p, q).
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = phase.conj() * (-s);
    let u_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

fn finish(a: ComplexMatrix, v: ComplexMatrix) -> Eigen {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new)] = v[(i, old)];
        }
    }
    Eigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &Eigen) -> ComplexMatrix {
        e.apply(|l| l)
    }

    #[test]
    fn diagonal_input_sorted() {
        let e = herm_eig_matrix(&ComplexMatrix::diag_real(&[3.0, 1.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
    }

    #[test]
    fn pauli_x_eigenpairs() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = herm_eig_matrix(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |v_-| ∝ (|0⟩ - |1⟩)/√2 up to a global phase
        let v0 = e.vectors.column(0);
        let overlap = (v0[0] * h - v0[1] * h).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        let v1 = e.vectors.column(1);
        let overlap = (v1[0] * h + v1[1] * h).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hermitian_reconstructs() {
        let m = ComplexMatrix::from_vec(
            3,
            3,
            vec![
                Complex64::new(2.0, 0.0),
                Complex64::new(1.0, -1.0),
                Complex64::new(0.0, 0.5),
                Complex64::new(1.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.25, 0.0),
                Complex64::new(0.0, -0.5),
                Complex64::new(0.25, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        )
        .unwrap();
        let e = herm_eig_matrix(&m).unwrap();
        assert!(reconstruct(&e).max_abs_diff(&m) < 1e-13);
        let vtv = &e.vectors.adjoint() * &e.vectors;
        assert!(vtv.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn zero_sweeps_reports_residual() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        match herm_eig_with(&x, 0) {
            Err(Error::Numerical { residual, .. }) => assert!(residual > 1.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let e = herm_eig_matrix(&ComplexMatrix::identity(5).scale(2.0)).unwrap();
        assert!(e.values.iter().all(|&l| (l - 2.0).abs() < 1e-15));
    }
}
