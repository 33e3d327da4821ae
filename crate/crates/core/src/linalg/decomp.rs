//! SVD, Hermitian eigendecomposition and pseudo-inversion.
//!
//! The factorizations themselves come from `nalgebra`; this module fixes the
//! output conventions: descending order, and eigen/singular vectors whose first
//! non-negligible component is real and positive.

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Default relative rank tolerance: `σ` counts iff `σ > DEFAULT_REL_TOL · σ_max`.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// Hermiticity tolerance, relative to `max(1, max|M|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const PHASE_EPS: f64 = 1e-12;

/// Thin singular value decomposition `M = U diag(σ) V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `m × k` with orthonormal columns, `k = min(m, n)`.
    pub u: ComplexMatrix,
    /// Descending, non-negative.
    pub singular_values: Vec<f64>,
    /// `k × n` with orthonormal rows.
    pub v_adjoint: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let us = ComplexMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.singular_values[j]);
        &us * &self.v_adjoint
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        numerical_rank(&self.singular_values, rel_tol)
    }
}

/// Number of values above `rel_tol · max`.
pub fn numerical_rank(singular_values: &[f64], rel_tol: f64) -> usize {
    let max = singular_values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s > rel_tol * max).count()
}

fn phase_of_first_component(v: impl Iterator<Item = C64>) -> C64 {
    for x in v {
        let n = x.norm();
        if n > PHASE_EPS {
            return x.conj() / n;
        }
    }
    C64::new(1.0, 0.0)
}

pub fn svd(m: &ComplexMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            u: ComplexMatrix::zeros(rows, 0),
            singular_values: vec![],
            v_adjoint: ComplexMatrix::zeros(0, cols),
        };
    }
    let dec = m.to_nalgebra().svd(true, true);
    let u = dec.u.expect("left singular vectors requested");
    let v_t = dec.v_t.expect("right singular vectors requested");
    let sv = dec.singular_values;

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let mut out_u = ComplexMatrix::zeros(rows, k);
    let mut out_vt = ComplexMatrix::zeros(k, cols);
    let mut values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        // v column = conj of v_t row; make its first significant entry real positive.
        let phase = phase_of_first_component((0..cols).map(|j| v_t[(src, j)].conj()));
        for j in 0..cols {
            out_vt[(dst, j)] = v_t[(src, j)] * phase.conj();
        }
        for i in 0..rows {
            out_u[(i, dst)] = u[(i, src)] * phase;
        }
        values.push(sv[src].max(0.0));
    }
    Svd { u: out_u, singular_values: values, v_adjoint: out_vt }
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows().min(m.cols()) == 0 {
        return vec![];
    }
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().map(|s| s.max(0.0)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Hermitian eigendecomposition with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns.
    pub eigenvectors: ComplexMatrix,
}

impl Eigh {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvector(k);
            out = &out + &ComplexMatrix::outer(&v, &v).scale_real(lambda);
        }
        out
    }
}

pub fn eigh(h: &ComplexMatrix) -> Result<Eigh> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!("eigh needs a square matrix, got {}x{}", h.rows(), h.cols())));
    }
    if !h.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian { deviation: h.hermitian_deviation() });
    }
    let n = h.rows();
    let dec = SymmetricEigen::new(h.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.eigenvalues[b].total_cmp(&dec.eigenvalues[a]));

    let mut vecs = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let phase = phase_of_first_component((0..n).map(|i| dec.eigenvectors[(i, src)]));
        for i in 0..n {
            vecs[(i, dst)] = dec.eigenvectors[(i, src)] * phase;
        }
        values.push(dec.eigenvalues[src]);
    }
    Ok(Eigh { eigenvalues: values, eigenvectors: vecs })
}

/// Moore–Penrose pseudo-inverse, discarding `σ ≤ rel_tol · σ_max`.
pub fn pseudo_inverse(m: &ComplexMatrix, rel_tol: f64) -> Result<ComplexMatrix> {
    check_tol(rel_tol)?;
    Ok(pseudo_inverse_from_svd(&svd(m), rel_tol))
}

pub fn pseudo_inverse_from_svd(dec: &Svd, rel_tol: f64) -> ComplexMatrix {
    let r = dec.rank(rel_tol);
    let (rows, cols) = (dec.u.rows(), dec.v_adjoint.cols());
    // V Σ⁺ U†
    ComplexMatrix::from_fn(cols, rows, |i, j| {
        (0..r).map(|k| dec.v_adjoint[(k, i)].conj() * dec.u[(j, k)].conj() / dec.singular_values[k]).sum()
    })
}

/// Orthogonal projector onto the span of the leading `rank` right singular vectors.
pub fn row_space_projector(dec: &Svd, rel_tol: f64) -> ComplexMatrix {
    let r = dec.rank(rel_tol);
    let n = dec.v_adjoint.cols();
    ComplexMatrix::from_fn(n, n, |i, j| (0..r).map(|k| dec.v_adjoint[(k, i)].conj() * dec.v_adjoint[(k, j)]).sum())
}

pub(crate) fn check_tol(rel_tol: f64) -> Result<()> {
    if rel_tol.is_finite() && rel_tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("relative tolerance must be positive, got {rel_tol}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::{random_hermitian, random_matrix};

    fn rel_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.distance(b) / a.frobenius_norm().max(1e-300)
    }

    #[test]
    fn svd_of_identity_and_diagonal() {
        assert_eq!(svd(&ComplexMatrix::identity(3)).singular_values, vec![1.0, 1.0, 1.0]);
        let d = svd(&ComplexMatrix::from_diagonal(&[3.0, 0.0]));
        assert!((d.singular_values[0] - 3.0).abs() < 1e-15);
        assert!(d.singular_values[1].abs() < 1e-15);
        let d = svd(&ComplexMatrix::from_diagonal(&[0.0, 3.0]));
        assert!((d.singular_values[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn svd_reassembles_random_matrices() {
        for seed in 0..20 {
            for (r, c) in [(6, 4), (4, 6), (16, 16), (9, 3)] {
                let m = random_matrix(r, c, seed);
                let dec = svd(&m);
                assert!(rel_residual(&m, &dec.reconstruct()) < 1e-10);
                assert!(dec.singular_values.windows(2).all(|w| w[0] >= w[1]));
                let uu = &dec.u.adjoint() * &dec.u;
                assert!(uu.distance(&ComplexMatrix::identity(r.min(c))) < 1e-10);
                assert_eq!(singular_values(&m).len(), r.min(c));
            }
        }
    }

    #[test]
    fn svd_is_deterministic() {
        let m = random_matrix(5, 5, 42);
        let a = svd(&m);
        let b = svd(&m);
        assert_eq!(a.u, b.u);
        assert_eq!(a.v_adjoint, b.v_adjoint);
    }

    #[test]
    fn eigh_identity_and_pauli_z() {
        let e = eigh(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
        let z = ComplexMatrix::from_diagonal(&[1.0, -1.0]);
        let e = eigh(&z).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15 && (e.eigenvalues[1] + 1.0).abs() < 1e-15);
        assert!((e.eigenvector(0)[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((e.eigenvector(1)[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eigh_reassembles_random_hermitian() {
        for seed in 0..20 {
            for n in [9, 16] {
                let h = random_hermitian(n, seed);
                let e = eigh(&h).unwrap();
                assert!(rel_residual(&h, &e.reconstruct()) < 1e-10);
                let vv = &e.eigenvectors.adjoint() * &e.eigenvectors;
                assert!(vv.distance(&ComplexMatrix::identity(n)) < 1e-10);
                assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
                for k in 0..n {
                    let first = e.eigenvector(k).into_iter().find(|x| x.norm() > PHASE_EPS).unwrap();
                    assert!(first.im.abs() < 1e-14 && first.re > 0.0);
                }
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = random_matrix(3, 3, 1);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(eigh(&random_matrix(2, 3, 1)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn pseudo_inverse_simple_cases() {
        assert!(
            pseudo_inverse(&ComplexMatrix::identity(3), 1e-10).unwrap().distance(&ComplexMatrix::identity(3)) < 1e-15
        );
        let p = pseudo_inverse(&ComplexMatrix::from_diagonal(&[2.0, 0.0]), 1e-10).unwrap();
        assert!(p.distance(&ComplexMatrix::from_diagonal(&[0.5, 0.0])) < 1e-15);
        assert!(pseudo_inverse(&ComplexMatrix::identity(2), 0.0).is_err());
        assert_eq!(pseudo_inverse(&ComplexMatrix::zeros(2, 3), 1e-10).unwrap(), ComplexMatrix::zeros(3, 2));
    }

    #[test]
    fn penrose_identities_on_rank_deficient() {
        for seed in 0..20 {
            // rank 3 matrix of shape 7x5
            let m = &random_matrix(7, 3, seed) * &random_matrix(3, 5, seed + 100);
            let p = pseudo_inverse(&m, 1e-10).unwrap();
            let mpm = &(&m * &p) * &m;
            let pmp = &(&p * &m) * &p;
            assert!(mpm.distance(&m) < 1e-9 * m.frobenius_norm());
            assert!(pmp.distance(&p) < 1e-9 * p.frobenius_norm());
            let mp = &m * &p;
            let pm = &p * &m;
            assert!(mp.hermitian_deviation() < 1e-9);
            assert!(pm.hermitian_deviation() < 1e-9);
            assert_eq!(svd(&m).rank(1e-10), 3);
            let q = row_space_projector(&svd(&m), 1e-10);
            assert!(q.distance(&pm) < 1e-9);
        }
    }

    #[test]
    fn numerical_rank_is_relative() {
        assert_eq!(numerical_rank(&[1e6, 1e-3], 1e-10), 2);
        assert_eq!(numerical_rank(&[1e6, 1e-5], 1e-10), 1);
        assert_eq!(numerical_rank(&[1.0, 1e-11], 1e-10), 1);
        assert_eq!(numerical_rank(&[0.0, 0.0], 1e-10), 0);
    }
}
