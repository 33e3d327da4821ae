//! Seeded random channels and states, and the textbook channel families.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{BipartiteState, Channel};
use crate::error::{Error, Result};
use crate::linalg::random::{ginibre, haar_unitary};
use crate::linalg::ComplexMatrix;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn identity_channel(d: usize) -> Result<Channel> {
    Channel::new(vec![ComplexMatrix::identity(d)])
}

pub fn unitary_channel(u: &ComplexMatrix) -> Result<Channel> {
    Channel::new(vec![u.clone()])
}

/// Generalized Pauli (clock-and-shift) operator `X^a Z^b` on `C^d`.
fn weyl(d: usize, a: usize, b: usize) -> ComplexMatrix {
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    let mut w = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        w[((j + a) % d, j)] = C64::from_polar(1.0, omega * (b * j) as f64);
    }
    w
}

/// `ρ ↦ (1 − p) ρ + p Tr[ρ] I/d`, expressed with the `d²` Weyl operators.
pub fn depolarizing(d: usize, p: f64) -> Result<Channel> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("depolarizing probability {p} outside [0, 1]")));
    }
    let d2 = (d * d) as f64;
    let mut kraus = vec![ComplexMatrix::identity(d).scale_real((1.0 - p + p / d2).sqrt())];
    if p > 0.0 {
        let w = p.sqrt() / d as f64;
        for a in 0..d {
            for b in 0..d {
                if (a, b) != (0, 0) {
                    kraus.push(weyl(d, a, b).scale_real(w));
                }
            }
        }
    }
    Channel::new(kraus)
}

/// Qubit amplitude damping with decay probability `γ`.
pub fn amplitude_damping(gamma: f64) -> Result<Channel> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidParameter(format!("damping {gamma} outside [0, 1]")));
    }
    let k0 = ComplexMatrix::from_diagonal(&[1.0, (1.0 - gamma).sqrt()]);
    let mut k1 = ComplexMatrix::zeros(2, 2);
    k1[(0, 1)] = C64::new(gamma.sqrt(), 0.0);
    Channel::new(vec![k0, k1])
}

/// Random TP channel: the first `d_in` columns of a Haar unitary on
/// `C^{d_out·n_kraus}` form an isometry, whose `d_out`-row blocks are the Kraus operators.
pub fn random_channel(d_in: usize, d_out: usize, n_kraus: usize, seed: u64) -> Result<Channel> {
    if d_in == 0 || d_out == 0 || n_kraus == 0 {
        return Err(Error::InvalidParameter("dimensions and Kraus count must be positive".into()));
    }
    let big = d_out * n_kraus;
    if big < d_in {
        return Err(Error::InvalidParameter(format!(
            "{n_kraus} Kraus operators of size {d_out}x{d_in} cannot be trace preserving"
        )));
    }
    let u = haar_unitary(big, &mut rng(seed));
    let kraus = (0..n_kraus).map(|n| u.block(n * d_out, 0, d_out, d_in)).collect();
    Channel::new(kraus)
}

/// Random state `G G† / Tr[G G†]` with `G` a `(d_H d_K) × rank` Ginibre matrix.
pub fn random_state(d_h: usize, d_k: usize, rank: usize, seed: u64) -> Result<BipartiteState> {
    let n = d_h * d_k;
    if n == 0 || rank == 0 || rank > n {
        return Err(Error::InvalidParameter(format!("rank {rank} invalid for a {d_h}⊗{d_k} state")));
    }
    let g = ginibre(n, rank, &mut rng(seed));
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    BipartiteState::new(m.scale_real(1.0 / tr).hermitian_part(), d_h, d_k)
}

/// Random pure state `|A)(A|` whose operator `A` (`d_H × d_K`) has Schmidt rank `k`.
pub fn random_pure_with_schmidt_rank(d_h: usize, d_k: usize, k: usize, seed: u64) -> Result<BipartiteState> {
    if k == 0 || k > d_h.min(d_k) {
        return Err(Error::InvalidParameter(format!("Schmidt rank {k} invalid for {d_h}⊗{d_k}")));
    }
    let mut r = rng(seed);
    let a = &ginibre(d_h, k, &mut r) * &ginibre(k, d_k, &mut r);
    BipartiteState::pure(&a)
}

/// Product probes `|ψ⟩⟨ψ| ⊗ |0⟩⟨0|` with `|ψ⟩ ∈ {|0⟩, |1⟩, |+⟩, |+i⟩}`; each alone has rank-1 `Ř`,
/// together they span the qubit operator space.
pub fn qubit_tomography_probes() -> Vec<BipartiteState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let kets = [
        [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        [C64::new(s, 0.0), C64::new(s, 0.0)],
        [C64::new(s, 0.0), C64::new(0.0, s)],
    ];
    let zero = ComplexMatrix::from_diagonal(&[1.0, 0.0]);
    kets.iter()
        .map(|k| BipartiteState::product(&ComplexMatrix::outer(k, k), &zero).expect("valid product probe"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, partial_trace, Factor};
    use crate::objects::ChoiOperator;

    fn ket(d: usize, i: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        m
    }

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap()
    }

    fn random_density(d: usize, seed: u64) -> ComplexMatrix {
        let g = ginibre(d, d, &mut rng(seed));
        let m = &g * &g.adjoint();
        m.scale_real(1.0 / m.trace().re)
    }

    #[test]
    fn identity_channel_is_noop() {
        let ch = identity_channel(3).unwrap();
        let rho = random_density(3, 1);
        assert!(ch.apply(&rho).unwrap().distance(&rho) < 1e-15);
        let v = crate::linalg::identity_vector(3);
        assert_eq!(ch.choi().matrix(), &ComplexMatrix::outer(&v, &v));
    }

    #[test]
    fn depolarizing_limits() {
        let id = depolarizing(2, 0.0).unwrap();
        assert!(id.choi().distance(&identity_channel(2).unwrap().choi()) < 1e-15);
        let full = depolarizing(2, 1.0).unwrap();
        let out = full.apply(&ket(2, 0)).unwrap();
        assert!(out.distance(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-14);
        assert!(depolarizing(2, 1.5).is_err());
    }

    #[test]
    fn depolarizing_choi_matches_kraus_sum_oracle() {
        // Brute-force Kraus sum over {√(1−3p/4) I, √(p/4) σ_x, σ_y, σ_z}
        let p: f64 = 1.0;
        let i = C64::new(0.0, 1.0);
        let o = C64::new(0.0, 0.0);
        let l = C64::new(1.0, 0.0);
        let paulis = [
            ComplexMatrix::identity(2).scale_real((1.0 - 0.75 * p).sqrt()),
            sigma_x().scale_real((p / 4.0).sqrt()),
            ComplexMatrix::from_rows(&[vec![o, -i], vec![i, o]]).unwrap().scale_real((p / 4.0).sqrt()),
            ComplexMatrix::from_rows(&[vec![l, o], vec![o, -l]]).unwrap().scale_real((p / 4.0).sqrt()),
        ];
        let mut oracle = ComplexMatrix::zeros(4, 4);
        for k in &paulis {
            // Σ_ac K|a⟩⟨c|K† ⊗ |a⟩⟨c|, entrywise S_{(x,a),(y,c)} = K_xa K*_yc
            for x in 0..2 {
                for a in 0..2 {
                    for y in 0..2 {
                        for c in 0..2 {
                            oracle[(x * 2 + a, y * 2 + c)] += k[(x, a)] * k[(y, c)].conj();
                        }
                    }
                }
            }
        }
        let s = depolarizing(2, p).unwrap().choi();
        assert!(s.matrix().distance(&oracle) < 1e-14);
        assert!(s.matrix().distance(&ComplexMatrix::identity(4).scale_real(0.5)) < 1e-14);
    }

    #[test]
    fn depolarizing_qutrit_action() {
        let p = 0.3;
        let ch = depolarizing(3, p).unwrap();
        let rho = random_density(3, 9);
        let expected = &rho.scale_real(1.0 - p) + &ComplexMatrix::identity(3).scale_real(p / 3.0);
        assert!(ch.apply(&rho).unwrap().distance(&expected) < 1e-14);
    }

    #[test]
    fn unitary_flip() {
        let ch = unitary_channel(&sigma_x()).unwrap();
        assert!(ch.apply(&ket(2, 0)).unwrap().distance(&ket(2, 1)) < 1e-15);
        assert!(unitary_channel(&sigma_x().scale_real(2.0)).is_err());
    }

    #[test]
    fn amplitude_damping_decays_excited_state() {
        let ch = amplitude_damping(0.25).unwrap();
        let out = ch.apply(&ket(2, 1)).unwrap();
        assert!(out.distance(&ComplexMatrix::from_diagonal(&[0.25, 0.75])) < 1e-15);
        assert!(amplitude_damping(-0.1).is_err());
    }

    #[test]
    fn random_channels_are_tp_and_deterministic() {
        for seed in 0..100 {
            let (din, dout, n) = (1 + seed as usize % 3, 1 + (seed as usize / 3) % 3, 1 + seed as usize % 4);
            match random_channel(din, dout, n, seed) {
                Ok(ch) => {
                    assert!(ch.is_trace_preserving());
                    assert!(ch.completeness_deviation() < 1e-12);
                }
                Err(_) => assert!(dout * n < din),
            }
        }
        let a = random_channel(2, 2, 3, 5).unwrap();
        let b = random_channel(2, 2, 3, 5).unwrap();
        assert_eq!(a.kraus(), b.kraus());
    }

    #[test]
    fn channel_preserves_trace_on_random_pairs() {
        for seed in 0..50 {
            let ch = random_channel(3, 2, 3, seed).unwrap();
            let rho = random_density(3, seed + 1000);
            let out = ch.apply(&rho).unwrap();
            assert!((out.trace() - rho.trace()).norm() < 1e-12);
            assert!(*eigh(&out).unwrap().eigenvalues.last().unwrap() > -1e-12);
        }
    }

    #[test]
    fn apply_rejects_bad_shape() {
        let ch = identity_channel(2).unwrap();
        assert!(ch.apply(&ComplexMatrix::identity(3)).is_err());
        assert!(ch.choi().apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn choi_trace_and_marginal() {
        for seed in 0..20 {
            let ch = random_channel(3, 2, 2, seed).unwrap();
            let s = ch.choi();
            assert!((s.matrix().trace().re - 3.0).abs() < 1e-12);
            assert!(s.is_cp(1e-10));
            assert!(s.is_tp(1e-10));
            let marg = partial_trace(s.matrix(), Factor::First, (2, 3)).unwrap();
            assert!(marg.distance(&ComplexMatrix::identity(3)) < 1e-12);
        }
    }

    #[test]
    fn choi_duality_with_kraus_action() {
        for seed in 0..30 {
            let (din, dout) = (1 + seed as usize % 4, 1 + (seed as usize / 4) % 4);
            let ch = random_channel(din, dout, din.max(2), seed).unwrap();
            let rho = random_density(din, seed + 7);
            let direct = ch.apply(&rho).unwrap();
            let via = ch.choi().apply(&rho).unwrap();
            assert!(direct.distance(&via) < 1e-10);
        }
    }

    #[test]
    fn apply_via_identity_and_zero_choi() {
        let rho = random_density(2, 3);
        let id = identity_channel(2).unwrap().choi();
        assert!(id.apply(&rho).unwrap().distance(&rho) < 1e-15);
        let zero = ChoiOperator::new(ComplexMatrix::zeros(4, 4), 2, 2).unwrap();
        assert_eq!(zero.apply(&rho).unwrap(), ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn channel_from_identity_choi() {
        let ch = identity_channel(2).unwrap().choi().to_channel(1e-10).unwrap();
        assert_eq!(ch.kraus().len(), 1);
        let k = &ch.kraus()[0];
        // phase-fixed eigenvector: K = I exactly up to rounding
        assert!(k.distance(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn choi_round_trip_through_kraus_extraction() {
        for seed in 0..20 {
            let ch = random_channel(2, 3, 3, seed).unwrap();
            let s = ch.choi();
            let back = s.to_channel(1e-10).unwrap();
            assert!(back.is_trace_preserving());
            assert!(back.choi().distance(&s) < 1e-9);
            let rho = random_density(2, seed + 50);
            assert!(back.apply(&rho).unwrap().distance(&ch.apply(&rho).unwrap()) < 1e-9);
        }
    }

    #[test]
    fn not_cp_choi_is_rejected() {
        let mut m = identity_channel(2).unwrap().choi().into_matrix();
        m[(1, 1)] = C64::new(-1e-3, 0.0);
        let s = ChoiOperator::new(m, 2, 2).unwrap();
        assert!(matches!(s.to_channel(1e-10), Err(Error::NotPositive { .. })));
        assert!(!s.is_cp(1e-10));
        let fixed = s.project_cp().unwrap();
        assert!(fixed.is_cp(1e-12));
    }

    #[test]
    fn relaxed_constructor_flags_non_tp() {
        let k = ComplexMatrix::from_diagonal(&[1.0, 0.5]);
        assert!(Channel::new(vec![k.clone()]).is_err());
        let ch = Channel::trace_non_increasing(vec![k]).unwrap();
        assert!(!ch.is_trace_preserving());
        assert!(Channel::trace_non_increasing(vec![ComplexMatrix::identity(2).scale_real(1.1)]).is_err());
        assert!(Channel::new(vec![]).is_err());
    }

    #[test]
    fn random_states_are_valid() {
        for seed in 0..20 {
            let s = random_state(2, 3, 1 + seed as usize % 6, seed).unwrap();
            assert_eq!(s.dims(), (2, 3));
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-12);
        }
        assert!(random_state(2, 2, 5, 0).is_err());
        assert!(random_pure_with_schmidt_rank(2, 2, 3, 0).is_err());
        let p = random_pure_with_schmidt_rank(3, 3, 2, 1).unwrap();
        assert!((p.purity() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_validation_errors() {
        assert!(matches!(BipartiteState::new(ComplexMatrix::identity(4), 2, 2), Err(Error::NotNormalized { .. })));
        assert!(matches!(
            BipartiteState::new(ComplexMatrix::from_diagonal(&[1.5, -0.5, 0.0, 0.0]), 2, 2),
            Err(Error::NotPositive { .. })
        ));
        let mut m = ComplexMatrix::identity(4).scale_real(0.25);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(BipartiteState::new(m, 2, 2), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            BipartiteState::new(ComplexMatrix::identity(4).scale_real(0.25), 2, 3),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
