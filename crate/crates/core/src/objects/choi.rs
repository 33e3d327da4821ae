use crate::error::{Error, Result};
use crate::linalg::{eigh, kron, partial_trace, unvec, ComplexMatrix, Factor};

use super::Channel;

/// Minimum eigenvalue (relative to `max(1, λ_max)`) still accepted as positive.
pub const CP_TOL: f64 = 1e-10;

/// Unnormalized Choi operator `S = (ℰ ⊗ 𝕀)(|I)(I|)`.
///
/// The factor order is (output system, input copy): the channel acts on the
/// **first** factor. The struct does not enforce positivity, since operators
/// recovered from noisy or partial data are generally not CP; use
/// [`ChoiOperator::is_cp`] to test it.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiOperator {
    matrix: ComplexMatrix,
    d_in: usize,
    d_out: usize,
}

impl ChoiOperator {
    pub fn new(matrix: ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        let n = d_in * d_out;
        if n == 0 || matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "Choi operator for {d_in}→{d_out} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix, d_in, d_out })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// Frobenius distance; channel equality is Choi equality.
    pub fn distance(&self, other: &Self) -> f64 {
        self.matrix.distance(&other.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(*eigh(&self.matrix)?.eigenvalues.last().expect("non-empty"))
    }

    pub fn is_cp(&self, tol: f64) -> bool {
        self.min_eigenvalue().is_ok_and(|m| m >= -tol)
    }

    /// Trace over the output factor equals `I_{d_in}`.
    pub fn is_tp(&self, tol: f64) -> bool {
        partial_trace(&self.matrix, Factor::First, (self.d_out, self.d_in))
            .map(|t| t.distance(&ComplexMatrix::identity(self.d_in)) <= tol)
            .unwrap_or(false)
    }

    /// `ℰ(ρ) = Tr₂[(I ⊗ ρᵀ) S]`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.d_in, self.d_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {0}x{0}, got {1}x{2}",
                self.d_in,
                rho.rows(),
                rho.cols()
            )));
        }
        let lifted = &kron(&ComplexMatrix::identity(self.d_out), &rho.transpose()) * &self.matrix;
        partial_trace(&lifted, Factor::Second, (self.d_out, self.d_in))
    }

    /// Kraus operators `√λ_l · unvec(v_l)` over eigenpairs with `λ_l > rel_tol·λ_max`.
    pub fn to_channel(&self, rel_tol: f64) -> Result<Channel> {
        crate::linalg::check_tol(rel_tol)?;
        let dec = eigh(&self.matrix)?;
        let max = dec.eigenvalues[0];
        let min = *dec.eigenvalues.last().expect("non-empty");
        if min < -CP_TOL * max.abs().max(1.0) {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let kraus: Vec<ComplexMatrix> = dec
            .eigenvalues
            .iter()
            .enumerate()
            .take_while(|&(_, &l)| l > rel_tol * max && l > 0.0)
            .map(|(k, &l)| unvec(&dec.eigenvector(k), self.d_out, self.d_in).map(|m| m.scale_real(l.sqrt())))
            .collect::<Result<_>>()?;
        if kraus.is_empty() {
            return Channel::trace_non_increasing(vec![ComplexMatrix::zeros(self.d_out, self.d_in)]);
        }
        Channel::trace_non_increasing(kraus)
    }

    /// Nearest positive semidefinite operator in Frobenius norm (negative
    /// eigenvalues clipped to zero). Trace preservation is not restored.
    pub fn project_cp(&self) -> Result<Self> {
        let dec = eigh(&self.matrix)?;
        let clipped: Vec<f64> = dec.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
        let v = &dec.eigenvectors;
        let m = &ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * clipped[j]) * &v.adjoint();
        Self::new(m.hermitian_part(), self.d_in, self.d_out)
    }
}
