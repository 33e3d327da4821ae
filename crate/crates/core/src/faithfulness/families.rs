use crate::error::{Error, Result};
use crate::linalg::{identity_vector, kron, swap_operator, ComplexMatrix};
use crate::objects::BipartiteState;

const PROB_SUM_TOL: f64 = 1e-12;

/// Werner state `[(d − f) I + (d f − 1) E] / (d (d² − 1))` with `Tr[R E] = f`.
pub fn werner(d: usize, f: f64) -> Result<BipartiteState> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("Werner states need d ≥ 2, got {d}")));
    }
    if !(-1.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!("Werner parameter {f} outside [-1, 1]")));
    }
    let df = d as f64;
    let norm = df * (df * df - 1.0);
    let m = &ComplexMatrix::identity(d * d).scale_real((df - f) / norm)
        + &swap_operator(d).scale_real((df * f - 1.0) / norm);
    BipartiteState::new(m, d, d)
}

/// Isotropic state `(f/d)|I)(I| + (1 − f)/(d² − 1) · (I − |I)(I|/d)` with
/// fidelity `f` to the maximally entangled state.
pub fn isotropic(d: usize, f: f64) -> Result<BipartiteState> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("isotropic states need d ≥ 2, got {d}")));
    }
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InvalidParameter(format!("isotropic parameter {f} outside [0, 1]")));
    }
    let df = d as f64;
    let v = identity_vector(d);
    let p = ComplexMatrix::outer(&v, &v);
    let w = (1.0 - f) / (df * df - 1.0);
    let m = &p.scale_real(f / df - w / df) + &ComplexMatrix::identity(d * d).scale_real(w);
    BipartiteState::new(m, d, d)
}

/// Labelled mixture `Σ_n p_n R⁽ⁿ⁾ ⊗ |n⟩⟨n|` on `H ⊗ (K ⊗ C^N)`.
pub fn joint_set_state(states: &[BipartiteState], probs: &[f64]) -> Result<BipartiteState> {
    validate_set(states, probs)?;
    let n = states.len();
    let (d_h, d_k) = states[0].dims();
    let mut m = ComplexMatrix::zeros(d_h * d_k * n, d_h * d_k * n);
    for (k, (s, &p)) in states.iter().zip(probs).enumerate() {
        let mut label = ComplexMatrix::zeros(n, n);
        label[(k, k)] = num_complex::Complex64::new(p, 0.0);
        m = &m + &kron(s.matrix(), &label);
    }
    BipartiteState::new(m, d_h, d_k * n)
}

/// Shared preconditions for sets of probes.
pub(crate) fn validate_set(states: &[BipartiteState], probs: &[f64]) -> Result<()> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("empty probe set".into()));
    }
    if states.len() != probs.len() {
        return Err(Error::DimensionMismatch(format!("{} states but {} probabilities", states.len(), probs.len())));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(Error::InvalidParameter(format!("probability {p} is negative")));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
    }
    let dims = states[0].dims();
    if let Some(s) = states.iter().find(|s| s.d_h() != dims.0) {
        return Err(Error::DimensionMismatch(format!("probe d_H {} differs from {}", s.d_h(), dims.0)));
    }
    if let Some(s) = states.iter().find(|s| s.d_k() != dims.1) {
        return Err(Error::DimensionMismatch(format!("probe d_K {} differs from {}", s.d_k(), dims.1)));
    }
    Ok(())
}

/// Uniform distribution over `n` probes.
pub fn uniform(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}
