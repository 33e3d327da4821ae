use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{eigh, identity_vector, kron, vec, ComplexMatrix, HERMITIAN_TOL};

pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;

/// Density matrix on `H ⊗ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    matrix: ComplexMatrix,
    d_h: usize,
    d_k: usize,
}

impl BipartiteState {
    /// Validates shape, Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix, d_h: usize, d_k: usize) -> Result<Self> {
        let n = d_h * d_k;
        if n == 0 || matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "state on {d_h}⊗{d_k} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::NotHermitian { deviation: matrix.hermitian_deviation() });
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::NotNormalized { trace: trace.re });
        }
        let min = *eigh(&matrix)?.eigenvalues.last().expect("non-empty");
        if min < -PSD_TOL {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        Ok(Self { matrix: matrix.hermitian_part(), d_h, d_k })
    }

    /// Normalized pure state `|A)(A| / ‖A‖²` for an operator `A: K → H` (shape `d_H × d_K`).
    pub fn pure(a: &ComplexMatrix) -> Result<Self> {
        let norm = a.frobenius_norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero vector does not define a state".into()));
        }
        let v = vec(&a.scale_real(1.0 / norm));
        Self::new(ComplexMatrix::outer(&v, &v), a.rows(), a.cols())
    }

    /// `(1/d)|I)(I|`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let v = identity_vector(d);
        Self::new(ComplexMatrix::outer(&v, &v).scale_real(1.0 / d as f64), d, d)
    }

    /// `ρ_H ⊗ ρ_K`.
    pub fn product(rho_h: &ComplexMatrix, rho_k: &ComplexMatrix) -> Result<Self> {
        Self::new(kron(rho_h, rho_k), rho_h.rows(), rho_k.rows())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn d_h(&self) -> usize {
        self.d_h
    }

    pub fn d_k(&self) -> usize {
        self.d_k
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_h, self.d_k)
    }

    /// `Tr[R²]`.
    pub fn purity(&self) -> f64 {
        self.matrix.hs_inner(&self.matrix).re
    }
}
