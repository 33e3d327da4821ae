//! Recovering a channel from the output `R_ℰ = (ℰ ⊗ 𝕀)(R)` of a probe state.
//!
//! Since `R_ℰ = (𝕀 ⊗ 𝓡)(S_ℰ)`, inversion works block by block on the second
//! factor: writing an operator on `A ⊗ B` as `Σ_ab |a⟩⟨b| ⊗ X_ab`, a map with
//! matrix `M` (acting on `vec`) sends each block `X_ab` to `unvec(M vec(X_ab))`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faithfulness::{joint_set_state, r_check_with_tol, validate_set, RCheck};
use crate::linalg::{check_tol, kron, partial_trace, pseudo_inverse, svd, unvec, vec, ComplexMatrix, Factor};
use crate::objects::{BipartiteState, Channel, ChoiOperator};

/// Applies the superoperator with `vec`-matrix `map` to the second tensor factor of `x`.
///
/// `x` lives on `C^{d_first} ⊗ C^{d_in}` where `map` is `d_out² × d_in²`.
pub fn apply_to_second_factor(x: &ComplexMatrix, map: &ComplexMatrix, d_first: usize) -> Result<ComplexMatrix> {
    let d_in = isqrt(map.cols())?;
    let d_out = isqrt(map.rows())?;
    if x.shape() != (d_first * d_in, d_first * d_in) {
        return Err(Error::DimensionMismatch(format!("operator is {}x{}, expected {1}x{1}", x.rows(), d_first * d_in)));
    }
    let mut out = ComplexMatrix::zeros(d_first * d_out, d_first * d_out);
    for a in 0..d_first {
        for b in 0..d_first {
            let block = x.block(a * d_in, b * d_in, d_in, d_in);
            let image = unvec(&map.matvec(&vec(&block)), d_out, d_out)?;
            out.set_block(a * d_out, b * d_out, &image);
        }
    }
    Ok(out)
}

fn isqrt(n: usize) -> Result<usize> {
    let r = (n as f64).sqrt().round() as usize;
    if r * r == n {
        Ok(r)
    } else {
        Err(Error::DimensionMismatch(format!("{n} is not a square dimension")))
    }
}

/// First-factor dimension of an operator on `C^{d_first} ⊗ C^{d_second}`.
fn first_dim(x: &ComplexMatrix, d_second: usize) -> Result<usize> {
    if !x.is_square() || x.rows() == 0 || !x.rows().is_multiple_of(d_second) {
        return Err(Error::DimensionMismatch(format!(
            "a {}x{} operator does not factor with a second system of dimension {d_second}",
            x.rows(),
            x.cols()
        )));
    }
    Ok(x.rows() / d_second)
}

/// `(ℰ ⊗ 𝕀)(R)`.
pub fn channel_output(channel: &Channel, probe: &BipartiteState) -> Result<BipartiteState> {
    if channel.d_in() != probe.d_h() {
        return Err(Error::DimensionMismatch(format!(
            "channel input dimension {} does not match probe d_H {}",
            channel.d_in(),
            probe.d_h()
        )));
    }
    let id = ComplexMatrix::identity(probe.d_k());
    let m: ComplexMatrix = channel
        .kraus()
        .iter()
        .map(|k| {
            let lifted = kron(k, &id);
            &(&lifted * probe.matrix()) * &lifted.adjoint()
        })
        .sum();
    BipartiteState::new(m.hermitian_part(), channel.d_out(), probe.d_k())
}

/// The output predicted for `choi` under the probe's map, `(𝕀 ⊗ 𝓡)(S)`.
pub fn predicted_output(rc: &RCheck, choi: &ChoiOperator) -> Result<ComplexMatrix> {
    apply_to_second_factor(choi.matrix(), rc.matrix(), choi.d_out())
}

/// Exact inversion for a faithful probe: `S_ℰ = (𝕀 ⊗ 𝓡⁻¹)(R_ℰ)`.
///
/// `output` is the (possibly noisy) operator `R_ℰ` on `C^{d_out} ⊗ K`.
pub fn reconstruct(probe: &BipartiteState, output: &ComplexMatrix, rel_tol: f64) -> Result<ChoiOperator> {
    let rc = r_check_with_tol(probe, rel_tol)?;
    reconstruct_with(&rc, output)
}

/// [`reconstruct`] with a precomputed `Ř`.
pub fn reconstruct_with(rc: &RCheck, output: &ComplexMatrix) -> Result<ChoiOperator> {
    let (d_h, d_k) = rc.source_dims();
    if !rc.is_faithful() {
        return Err(Error::Unfaithful { phi: rc.rank(), required: d_h * d_h });
    }
    let d_out = first_dim(output, d_k)?;
    let s = apply_to_second_factor(output, &rc.pseudo_inverse(), d_out)?;
    ChoiOperator::new(s.hermitian_part(), d_h, d_out)
}

/// Projected Choi operator recovered through the pseudo-inverse of `Ř`.
#[derive(Debug, Clone)]
pub struct PartialRecovery {
    /// `(𝕀 ⊗ 𝓠)(S_ℰ)`.
    pub s_tilde: ComplexMatrix,
    /// `Q̌ = I − P`, the projector onto `Ker(Ř)^⊥`.
    pub q_check: ComplexMatrix,
    pub phi: usize,
    pub d_in: usize,
    pub d_out: usize,
}

impl PartialRecovery {
    /// The partially recovered map `ρ ↦ Tr₂[(I ⊗ ρᵀ) S̃]`; generally not CP.
    pub fn as_choi(&self) -> ChoiOperator {
        ChoiOperator::new(self.s_tilde.clone(), self.d_in, self.d_out).expect("shape fixed at construction")
    }
}

/// `S̃_ℰ = (𝕀 ⊗ 𝓡‡)(R_ℰ)`. Rank deficiency is expected here.
pub fn pseudo_reconstruct(probe: &BipartiteState, output: &ComplexMatrix, rel_tol: f64) -> Result<PartialRecovery> {
    let rc = r_check_with_tol(probe, rel_tol)?;
    pseudo_reconstruct_with(&rc, output)
}

pub fn pseudo_reconstruct_with(rc: &RCheck, output: &ComplexMatrix) -> Result<PartialRecovery> {
    let (d_h, d_k) = rc.source_dims();
    let d_out = first_dim(output, d_k)?;
    let s_tilde = apply_to_second_factor(output, &rc.pseudo_inverse(), d_out)?.hermitian_part();
    Ok(PartialRecovery { s_tilde, q_check: rc.projector(), phi: rc.rank(), d_in: d_h, d_out })
}

/// Columns `vec(𝓠⁽ⁿ⁾(B_j))` for the elementary basis, i.e. the projectors side by side.
fn stacked_projections(projectors: &[ComplexMatrix]) -> ComplexMatrix {
    let n = projectors[0].rows();
    let mut g = ComplexMatrix::zeros(n, n * projectors.len());
    for (k, q) in projectors.iter().enumerate() {
        g.set_block(0, k * n, q);
    }
    g
}

struct ProbeWork {
    rc: RCheck,
    q_check: ComplexMatrix,
}

fn probe_work(probes: &[&BipartiteState], rel_tol: f64) -> Result<Vec<ProbeWork>> {
    // collect preserves index order regardless of scheduling
    probes
        .par_iter()
        .map(|p| {
            let rc = r_check_with_tol(p, rel_tol)?;
            let q_check = rc.projector();
            Ok(ProbeWork { rc, q_check })
        })
        .collect()
}

fn span_rank(work: &[ProbeWork], rel_tol: f64) -> usize {
    let qs: Vec<ComplexMatrix> = work.iter().map(|w| w.q_check.clone()).collect();
    svd(&stacked_projections(&qs)).rank(rel_tol)
}

/// Probes that carry weight in the set; zero-probability members are ignored.
fn active<'a, T>(items: &'a [T], probs: &[f64]) -> Vec<&'a T> {
    items.iter().zip(probs).filter(|(_, &p)| p > 0.0).map(|(x, _)| x).collect()
}

/// Patches the partial recoveries of a set of probes into the full Choi operator.
///
/// With `B_i = Σ_jn λ_ij⁽ⁿ⁾ 𝓠⁽ⁿ⁾(B_j)` (minimum-norm coefficients),
/// `S_ℰ = Σ_ijn λ_ij⁽ⁿ⁾* Tr₂[(I ⊗ 𝓠⁽ⁿ⁾(B_j)†) S̃⁽ⁿ⁾] ⊗ B_i`.
pub fn patch(
    probes: &[BipartiteState],
    outputs: &[ComplexMatrix],
    probs: &[f64],
    rel_tol: f64,
) -> Result<ChoiOperator> {
    check_tol(rel_tol)?;
    validate_set(probes, probs)?;
    if outputs.len() != probes.len() {
        return Err(Error::DimensionMismatch(format!("{} probes but {} outputs", probes.len(), outputs.len())));
    }
    let (d_h, d_k) = probes[0].dims();
    let d_out = first_dim(&outputs[0], d_k)?;
    if let Some(o) = outputs.iter().find(|o| o.shape() != outputs[0].shape()) {
        return Err(Error::DimensionMismatch(format!("output shapes differ ({}x{})", o.rows(), o.cols())));
    }

    let probes = active(probes, probs);
    let outputs = active(outputs, probs);
    let work = probe_work(&probes, rel_tol)?;
    let n_ops = d_h * d_h;
    let rank = span_rank(&work, rel_tol);
    if rank < n_ops {
        return Err(Error::UnfaithfulSet { rank, required: n_ops });
    }

    let qs: Vec<ComplexMatrix> = work.iter().map(|w| w.q_check.clone()).collect();
    // column i of Λ holds the coefficients λ_i·⁽·⁾ of basis element B_i
    let lambda = pseudo_inverse(&stacked_projections(&qs), rel_tol)?;

    let terms: Vec<ComplexMatrix> = work
        .par_iter()
        .zip(outputs.par_iter())
        .enumerate()
        .map(|(n, (w, out))| -> Result<ComplexMatrix> {
            let s_tilde = apply_to_second_factor(out, &w.rc.pseudo_inverse(), d_out)?;
            let mut acc = ComplexMatrix::zeros(d_out * d_h, d_out * d_h);
            for j in 0..n_ops {
                let row = n * n_ops + j;
                let coeffs: Vec<_> = (0..n_ops).map(|i| lambda[(row, i)].conj()).collect();
                if coeffs.iter().all(|c| c.norm() == 0.0) {
                    continue;
                }
                let q_bj = unvec(&w.q_check.column(j), d_h, d_h)?;
                let lifted = kron(&ComplexMatrix::identity(d_out), &q_bj.adjoint());
                let reduced = partial_trace(&(&lifted * &s_tilde), Factor::Second, (d_out, d_h))?;
                // Σ_i λ* B_i for the elementary basis is unvec of the coefficient row
                acc = &acc + &kron(&reduced, &unvec(&coeffs, d_h, d_h)?);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let s: ComplexMatrix = terms.into_iter().sum();
    ChoiOperator::new(s.hermitian_part(), d_h, d_out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetVerdict {
    pub faithful: bool,
    pub rank: usize,
}

/// Evaluates faithfulness of a probe set both through the rank of the joint
/// labelled state and through the span of the per-probe projections, which
/// must agree.
pub fn faithful_set_check(probes: &[BipartiteState], probs: &[f64], rel_tol: f64) -> Result<SetVerdict> {
    check_tol(rel_tol)?;
    let joint = joint_set_state(probes, probs)?;
    let joint_rc = r_check_with_tol(&joint, rel_tol)?;

    let work = probe_work(&active(probes, probs), rel_tol)?;
    let rank = span_rank(&work, rel_tol);
    let required = probes[0].d_h() * probes[0].d_h();

    if joint_rc.rank() != rank || joint_rc.is_faithful() != (rank == required) {
        return Err(Error::Consistency(format!(
            "joint-state rank {} disagrees with span rank {rank}",
            joint_rc.rank()
        )));
    }
    Ok(SetVerdict { faithful: rank == required, rank })
}

/// Serialized result of a reconstruction run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub d_in: usize,
    pub d_out: usize,
    pub choi: ComplexMatrix,
    /// `‖(𝕀 ⊗ 𝓡)(S) − R_ℰ‖_F` for the recovered `S`.
    pub residual: f64,
    pub phi: usize,
    pub tolerance: f64,
}

impl ReconstructionReport {
    pub fn new(rc: &RCheck, choi: &ChoiOperator, output: &ComplexMatrix) -> Result<Self> {
        let residual = predicted_output(rc, choi)?.distance(output);
        Ok(ReconstructionReport {
            d_in: choi.d_in(),
            d_out: choi.d_out(),
            choi: choi.matrix().clone(),
            residual,
            phi: rc.rank(),
            tolerance: rc.tolerance(),
        })
    }
}
