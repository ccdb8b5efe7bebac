use crate::error::{Error, Result};
use crate::linalg::matrix::ComplexMatrix;
use crate::tolerances::DEFAULT_MAX_DIM;

/// Kronecker product `a ⊗ b` with the row-major convention: row index `i_a·rows_b + i_b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_with_limit(a, b, DEFAULT_MAX_DIM)
}

pub fn tensor_with_limit(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    max_dim: usize,
) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= max_dim && c <= max_dim => (r, c),
        _ => {
            return Err(Error::Sizing {
                requested: a.rows().saturating_mul(b.rows()).max(a.cols().saturating_mul(b.cols())),
                max_dim,
            })
        }
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let s = a[(ia, ja)];
            if s.re == 0.0 && s.im == 0.0 {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    Ok(out)
}

/// Tensor product of several factors, left to right.
pub fn tensor_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::Shape("tensor of an empty factor list".into()))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, f| tensor(&acc, f))
}

/// Traces out every factor not listed in `keep`. Kept factors stay in their original order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "partial trace needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Shape(format!("invalid factor dimensions {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != m.rows() {
        return Err(Error::Shape(format!(
            "factor dimensions {dims:?} multiply to {total}, matrix is {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::Shape(format!(
            "factor index {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim = total / kept_dim;

    // For each full index, its (kept, traced) sub-indices.
    let mut kept_of = vec![0usize; total];
    let mut traced_of = vec![0usize; total];
    for (full, (kept_slot, traced_slot)) in kept_of.iter_mut().zip(traced_of.iter_mut()).enumerate() {
        let mut rem = full;
        let mut digits = vec![0usize; dims.len()];
        for f in (0..dims.len()).rev() {
            digits[f] = rem % dims[f];
            rem /= dims[f];
        }
        let (mut k, mut t) = (0usize, 0usize);
        for (f, &d) in digits.iter().enumerate() {
            if keep.binary_search(&f).is_ok() {
                k = k * dims[f] + d;
            } else {
                t = t * dims[f] + d;
            }
        }
        *kept_slot = k;
        *traced_slot = t;
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); traced_dim];
    for full in 0..total {
        groups[traced_of[full]].push(full);
    }

    let mut out = ComplexMatrix::zeros(kept_dim, kept_dim);
    for group in &groups {
        for &r in group {
            for &c in group {
                out[(kept_of[r], kept_of[c])] += m[(r, c)];
            }
        }
    }
    Ok(out)
}

/// Embeds `op` acting on factor `site` of a register with factor `dims` (identity elsewhere).
pub fn embed(op: &ComplexMatrix, dims: &[usize], site: usize) -> Result<ComplexMatrix> {
    if site >= dims.len() || op.rows() != dims[site] || !op.is_square() {
        return Err(Error::Shape(format!(
            "cannot embed {}x{} operator at site {site} of {dims:?}",
            op.rows(),
            op.cols()
        )));
    }
    let before: usize = dims[..site].iter().product();
    let after: usize = dims[site + 1..].iter().product();
    let left = tensor(&ComplexMatrix::identity(before), op)?;
    tensor(&left, &ComplexMatrix::identity(after))
}
