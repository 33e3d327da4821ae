//! Vectorization and tensor-product bookkeeping.
//!
//! Vectors are identified with operators through the row-stacking map
//! `|A) = Σ_ij A_ij |i⟩⊗|j⟩`, so component `i·cols + j` of `vec(A)` is `A_ij`.
//! With this ordering `kron(A, B)·vec(M) = vec(A M Bᵀ)`; every index
//! reshuffle elsewhere in the crate relies on that identity.

use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Tensor factor selector for bipartite operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

pub fn vec(a: &ComplexMatrix) -> Vec<C64> {
    a.as_slice().to_vec()
}

pub fn unvec(v: &[C64], rows: usize, cols: usize) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            v.len()
        )));
    }
    ComplexMatrix::from_row_major(rows, cols, v.to_vec())
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

fn check_bipartite(m: &ComplexMatrix, (d1, d2): (usize, usize)) -> Result<()> {
    let n = d1 * d2;
    if m.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "expected a {n}x{n} operator on {d1}⊗{d2}, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Transposes the indices of one tensor factor in the computational basis.
pub fn partial_transpose(m: &ComplexMatrix, which: Factor, dims: (usize, usize)) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (_, d2) = dims;
    Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |r, c| {
        let (i1, i2) = (r / d2, r % d2);
        let (j1, j2) = (c / d2, c % d2);
        match which {
            Factor::First => m[(j1 * d2 + i2, i1 * d2 + j2)],
            Factor::Second => m[(i1 * d2 + j2, j1 * d2 + i2)],
        }
    }))
}

/// Traces out one tensor factor; the result acts on the remaining one.
pub fn partial_trace(m: &ComplexMatrix, which: Factor, dims: (usize, usize)) -> Result<ComplexMatrix> {
    check_bipartite(m, dims)?;
    let (d1, d2) = dims;
    Ok(match which {
        Factor::First => ComplexMatrix::from_fn(d2, d2, |i, j| (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()),
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()),
    })
}

/// Swap operator `E = Σ_ij |ij⟩⟨ji|` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            e[(i * d + j, j * d + i)] = C64::new(1.0, 0.0);
        }
    }
    e
}

/// Unnormalized maximally entangled vector `|I) = Σ_l |l⟩⊗|l⟩`.
pub fn identity_vector(d: usize) -> Vec<C64> {
    vec(&ComplexMatrix::identity(d))
}
