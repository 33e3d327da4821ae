//! The operator `Ř = Σ_l A_lᵀ ⊗ A_l†` of a bipartite state and the map
//! `𝓡(S) = Σ_l A_lᵀ S A_l*` it represents, where `R = Σ_l |A_l)(A_l|`.
//!
//! `Ř` acts on `vec(S)` for `S` an operator on `H`, and returns `vec(𝓡(S))`
//! with `𝓡(S)` an operator on `K`; it has shape `d_K² × d_H²`. The state is a
//! faithful probe iff `Ř` is left invertible, i.e. has rank `d_H²`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    check_tol, eigh, kron, partial_transpose, pseudo_inverse_from_svd, row_space_projector, svd, swap_operator, unvec,
    vec, ComplexMatrix, Factor, OperatorBasis, Svd, DEFAULT_REL_TOL,
};
use crate::objects::{BipartiteState, PSD_TOL};

/// Agreement required between the two constructions of `Ř`, relative to `max(1, ‖Ř‖)`.
pub const DUAL_FORM_TOL: f64 = 1e-10;

/// Operators `A_l = √λ_l · unvec(v_l)` (shape `d_H × d_K`) from the eigenpairs
/// of `R` with `λ_l > rel_tol · λ_max`.
pub fn spectral_kraus(state: &BipartiteState, rel_tol: f64) -> Result<Vec<ComplexMatrix>> {
    check_tol(rel_tol)?;
    let dec = eigh(state.matrix())?;
    let max = dec.eigenvalues[0];
    let min = *dec.eigenvalues.last().expect("non-empty");
    if min < -PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    dec.eigenvalues
        .iter()
        .enumerate()
        .take_while(|&(_, &l)| l > rel_tol * max)
        .map(|(k, &l)| unvec(&dec.eigenvector(k), state.d_h(), state.d_k()).map(|a| a.scale_real(l.sqrt())))
        .collect()
}

/// `Σ_l A_lᵀ S A_l*`.
pub fn apply_r_map(operators: &[ComplexMatrix], s: &ComplexMatrix) -> ComplexMatrix {
    let d_k = operators[0].cols();
    let mut out = ComplexMatrix::zeros(d_k, d_k);
    for a in operators {
        out = &out + &(&(&a.transpose() * s) * &a.conj());
    }
    out
}

/// `(E R)^{τ₂} E`, available when `d_H = d_K`.
pub fn r_check_via_swap(state: &BipartiteState) -> Result<ComplexMatrix> {
    let (d_h, d_k) = state.dims();
    if d_h != d_k {
        return Err(Error::DimensionMismatch(format!("swap form needs d_H = d_K, got {d_h} and {d_k}")));
    }
    let e = swap_operator(d_h);
    let er = &e * state.matrix();
    Ok(&partial_transpose(&er, Factor::Second, (d_h, d_h))? * &e)
}

#[derive(Debug, Clone)]
pub struct RCheck {
    matrix: ComplexMatrix,
    operators: Vec<ComplexMatrix>,
    d_h: usize,
    d_k: usize,
    svd: Svd,
    rank: usize,
    rel_tol: f64,
}

/// `r_check_with_tol` at [`DEFAULT_REL_TOL`].
pub fn r_check(state: &BipartiteState) -> Result<RCheck> {
    r_check_with_tol(state, DEFAULT_REL_TOL)
}

/// Builds `Ř` from the spectral decomposition; in the square case it is also
/// built as `(E R)^{τ₂} E` and the two must agree.
pub fn r_check_with_tol(state: &BipartiteState, rel_tol: f64) -> Result<RCheck> {
    let operators = spectral_kraus(state, rel_tol)?;
    let matrix: ComplexMatrix = operators.iter().map(|a| kron(&a.transpose(), &a.adjoint())).sum();
    if state.d_h() == state.d_k() {
        let alt = r_check_via_swap(state)?;
        let dev = matrix.distance(&alt);
        if dev > DUAL_FORM_TOL * matrix.frobenius_norm().max(1.0) {
            return Err(Error::Consistency(format!("spectral and swap forms of Ř differ by {dev:e}")));
        }
    }
    let svd = svd(&matrix);
    let rank = svd.rank(rel_tol);
    Ok(RCheck { matrix, operators, d_h: state.d_h(), d_k: state.d_k(), svd, rank, rel_tol })
}

impl RCheck {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// The operators `A_l` of the spectral decomposition.
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn source_dims(&self) -> (usize, usize) {
        (self.d_h, self.d_k)
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.singular_values
    }

    pub fn svd(&self) -> &Svd {
        &self.svd
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn tolerance(&self) -> f64 {
        self.rel_tol
    }

    pub fn is_faithful(&self) -> bool {
        self.rank == self.d_h * self.d_h
    }

    /// `𝓡(S)` for an operator `S` on `H`.
    pub fn apply(&self, s: &ComplexMatrix) -> Result<ComplexMatrix> {
        if s.shape() != (self.d_h, self.d_h) {
            return Err(Error::DimensionMismatch(format!(
                "𝓡 acts on {0}x{0} operators, got {1}x{2}",
                self.d_h,
                s.rows(),
                s.cols()
            )));
        }
        unvec(&self.matrix.matvec(&vec(s)), self.d_k, self.d_k)
    }

    /// `Ř‡`, shape `d_H² × d_K²`.
    pub fn pseudo_inverse(&self) -> ComplexMatrix {
        pseudo_inverse_from_svd(&self.svd, self.rel_tol)
    }

    /// `Q̌ = Ř‡Ř`, the orthogonal projector onto `Rng(Ř†)`.
    pub fn projector(&self) -> ComplexMatrix {
        row_space_projector(&self.svd, self.rel_tol)
    }

    pub fn measures(&self) -> Measures {
        let frobenius_sq = self.matrix.hs_inner(&self.matrix).re;
        let sv = self.singular_values();
        // left invertibility concerns the d_H² input directions
        let needed = self.d_h * self.d_h;
        let min_singular_value = if sv.len() < needed { 0.0 } else { sv[needed - 1] };
        let condition_number =
            if self.is_faithful() { Conditioning::Finite(sv[0] / min_singular_value) } else { Conditioning::Singular };
        Measures { frobenius_sq, min_singular_value, condition_number }
    }

    pub fn report(&self) -> FaithfulnessReport {
        FaithfulnessReport {
            d_h: self.d_h,
            d_k: self.d_k,
            singular_values: self.singular_values().to_vec(),
            phi: self.rank,
            faithful: self.is_faithful(),
            measures: self.measures(),
            tolerance_used: self.rel_tol,
        }
    }
}

/// Condition number of `Ř`; infinite when it is not left invertible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditioning {
    Finite(f64),
    Singular,
}

impl Conditioning {
    pub fn as_f64(self) -> f64 {
        match self {
            Conditioning::Finite(x) => x,
            Conditioning::Singular => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Conditioning::Finite(_))
    }
}

impl Serialize for Conditioning {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Conditioning::Finite(x) => s.serialize_f64(*x),
            Conditioning::Singular => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Conditioning {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Conditioning::Finite(x)),
            Raw::Str(s) if s == "inf" => Ok(Conditioning::Singular),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("unexpected condition number {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measures {
    /// `Tr[Ř†Ř] = Σ σ²`, equal to the purity `Tr[R²]`.
    pub frobenius_sq: f64,
    pub min_singular_value: f64,
    pub condition_number: Conditioning,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub d_h: usize,
    pub d_k: usize,
    pub singular_values: Vec<f64>,
    pub phi: usize,
    pub faithful: bool,
    pub measures: Measures,
    pub tolerance_used: f64,
}

pub fn is_faithful(state: &BipartiteState, rel_tol: f64) -> Result<bool> {
    Ok(r_check_with_tol(state, rel_tol)?.is_faithful())
}

/// Number of faithfulness: the rank of `Ř`.
pub fn phi(state: &BipartiteState) -> Result<usize> {
    Ok(r_check(state)?.rank())
}

pub fn measures(state: &BipartiteState) -> Result<Measures> {
    Ok(r_check(state)?.measures())
}

pub fn analyze(state: &BipartiteState, rel_tol: f64) -> Result<FaithfulnessReport> {
    Ok(r_check_with_tol(state, rel_tol)?.report())
}

/// Matrix `R_ij = Tr[B'_j† 𝓡(B_i)]` of the map in the given operator bases
/// (`basis_in` on `H`, `basis_out` on `K`). Rows follow `basis_in`.
pub fn map_r_matrix(
    state: &BipartiteState,
    basis_in: &OperatorBasis,
    basis_out: &OperatorBasis,
) -> Result<ComplexMatrix> {
    let (d_h, d_k) = state.dims();
    if (basis_in.dim_in(), basis_in.dim_out()) != (d_h, d_h) || (basis_out.dim_in(), basis_out.dim_out()) != (d_k, d_k)
    {
        return Err(Error::DimensionMismatch(format!("bases must span operators on H ({d_h}) and K ({d_k})")));
    }
    let operators = spectral_kraus(state, DEFAULT_REL_TOL)?;
    let images: Vec<ComplexMatrix> = basis_in.elements().iter().map(|b| apply_r_map(&operators, b)).collect();
    let outs = basis_out.elements();
    Ok(ComplexMatrix::from_fn(images.len(), outs.len(), |i, j| outs[j].hs_inner(&images[i])))
}
