use crate::error::{Error, Result};
use crate::linalg::{eigh, vec, ComplexMatrix};

use super::ChoiOperator;

/// Tolerance on `‖Σ K†K − I‖` for trace preservation.
pub const TP_TOL: f64 = 1e-10;

/// Completely positive map in Kraus form `ρ ↦ Σ_n K_n ρ K_n†`.
#[derive(Debug, Clone)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
    d_in: usize,
    d_out: usize,
    trace_preserving: bool,
}

impl Channel {
    /// Trace-preserving channel; fails unless `Σ K_n†K_n = I` within [`TP_TOL`].
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        let dev = ch.completeness_deviation();
        if dev > TP_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraus operators are not trace preserving (‖Σ K†K − I‖ = {dev:e})"
            )));
        }
        Ok(ch)
    }

    /// Admits trace-non-increasing maps (`Σ K†K ≤ I`) and records whether the map is TP.
    pub fn trace_non_increasing(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::from_kraus_unchecked(kraus)?;
        let max_eig = eigh(&ch.completeness_operator())?.eigenvalues[0];
        if max_eig > 1.0 + TP_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraus operators increase trace (largest eigenvalue of Σ K†K is {max_eig})"
            )));
        }
        Ok(ch)
    }

    fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus.first().ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
        let (d_out, d_in) = first.shape();
        if d_in == 0 || d_out == 0 {
            return Err(Error::InvalidParameter("Kraus operators must be non-empty".into()));
        }
        if kraus.iter().any(|k| k.shape() != (d_out, d_in)) {
            return Err(Error::DimensionMismatch("Kraus operators have differing shapes".into()));
        }
        let mut ch = Self { kraus, d_in, d_out, trace_preserving: false };
        ch.trace_preserving = ch.completeness_deviation() <= TP_TOL;
        Ok(ch)
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `Σ_n K_n† K_n`.
    pub fn completeness_operator(&self) -> ComplexMatrix {
        self.kraus.iter().map(|k| &k.adjoint() * k).sum()
    }

    pub fn completeness_deviation(&self) -> f64 {
        self.completeness_operator().distance(&ComplexMatrix::identity(self.d_in))
    }

    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        if rho.shape() != (self.d_in, self.d_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {0}x{0}, got {1}x{2}",
                self.d_in,
                rho.rows(),
                rho.cols()
            )));
        }
        Ok(self.kraus.iter().map(|k| &(k * rho) * &k.adjoint()).sum())
    }

    /// `S = Σ_n |K_n)(K_n|`, i.e. the channel applied to the first factor of `|I)(I|`.
    pub fn choi(&self) -> ChoiOperator {
        let n = self.d_out * self.d_in;
        let mut s = ComplexMatrix::zeros(n, n);
        for k in &self.kraus {
            let v = vec(k);
            s = &s + &ComplexMatrix::outer(&v, &v);
        }
        ChoiOperator::new(s, self.d_in, self.d_out).expect("Choi shape is consistent by construction")
    }
}
