use num_complex::Complex64 as C64;

use super::{decomp, ComplexMatrix};
use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-12;

/// Orthonormal basis of the `d_out × d_in` operator space under `Tr[A†B]`.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    dim_in: usize,
    dim_out: usize,
    elements: Vec<ComplexMatrix>,
}

impl OperatorBasis {
    /// Validates shape, orthonormality and completeness.
    pub fn new(dim_in: usize, dim_out: usize, elements: Vec<ComplexMatrix>) -> Result<Self> {
        let n = dim_in * dim_out;
        if elements.len() != n {
            return Err(Error::DimensionMismatch(format!("basis needs {n} elements, got {}", elements.len())));
        }
        if let Some(bad) = elements.iter().find(|b| b.shape() != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "basis element is {}x{}, expected {dim_out}x{dim_in}",
                bad.rows(),
                bad.cols()
            )));
        }
        let basis = Self { dim_in, dim_out, elements };
        let gram = basis.gram();
        let dev = gram.distance(&ComplexMatrix::identity(n));
        if dev > ORTHONORMAL_TOL * n as f64 {
            return Err(Error::InvalidParameter(format!("basis is not orthonormal (Gram deviation {dev:e})")));
        }
        // completeness follows from orthonormality with n elements; checked anyway
        let rank = decomp::svd(&gram).rank(decomp::DEFAULT_REL_TOL);
        if rank != n {
            return Err(Error::InvalidParameter(format!("basis spans {rank} of {n} dimensions")));
        }
        Ok(basis)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// `G_ij = Tr[B_i† B_j]`.
    pub fn gram(&self) -> ComplexMatrix {
        let n = self.elements.len();
        ComplexMatrix::from_fn(n, n, |i, j| self.elements[i].hs_inner(&self.elements[j]))
    }

    /// Coefficients `Tr[B_i† S]`.
    pub fn coefficients(&self, s: &ComplexMatrix) -> Vec<C64> {
        self.elements.iter().map(|b| b.hs_inner(s)).collect()
    }

    /// `Σ_i c_i B_i`.
    pub fn assemble(&self, coefficients: &[C64]) -> ComplexMatrix {
        assert_eq!(coefficients.len(), self.elements.len());
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_in);
        for (c, b) in coefficients.iter().zip(&self.elements) {
            out = &out + &b.scale(*c);
        }
        out
    }
}

/// Matrix units `|i⟩⟨j|` of shape `d_out × d_in`, `i` slow and `j` fast.
pub fn elementary_basis(d_in: usize, d_out: usize) -> OperatorBasis {
    let elements = (0..d_out)
        .flat_map(|i| {
            (0..d_in).map(move |j| {
                let mut b = ComplexMatrix::zeros(d_out, d_in);
                b[(i, j)] = C64::new(1.0, 0.0);
                b
            })
        })
        .collect();
    OperatorBasis { dim_in: d_in, dim_out: d_out, elements }
}

/// Hermitian orthonormal basis of `d × d` operators: `I/√d` first, followed by
/// the traceless generalized Gell-Mann matrices (symmetric, antisymmetric, then
/// diagonal), all normalized to unit Hilbert–Schmidt norm.
pub fn hermitian_basis(d: usize) -> OperatorBasis {
    let mut elements = Vec::with_capacity(d * d);
    elements.push(ComplexMatrix::identity(d).scale_real(1.0 / (d as f64).sqrt()));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(j, k)] = C64::new(s, 0.0);
            sym[(k, j)] = C64::new(s, 0.0);
            elements.push(sym);
            let mut asym = ComplexMatrix::zeros(d, d);
            asym[(j, k)] = C64::new(0.0, -s);
            asym[(k, j)] = C64::new(0.0, s);
            elements.push(asym);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        diag[..l].fill(norm);
        diag[l] = -(l as f64) * norm;
        elements.push(ComplexMatrix::from_diagonal(&diag));
    }
    OperatorBasis { dim_in: d, dim_out: d, elements }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::testutil::random_matrix;

    #[test]
    fn elementary_basis_order() {
        let b = elementary_basis(2, 2);
        let positions: Vec<(usize, usize)> = b
            .elements()
            .iter()
            .map(|m| {
                let k = m.as_slice().iter().position(|x| x.re == 1.0).unwrap();
                (k / 2, k % 2)
            })
            .collect();
        assert_eq!(positions, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn elementary_gram_is_exact_identity() {
        for (di, dout) in [(1, 1), (2, 3), (3, 2), (4, 4)] {
            let b = elementary_basis(di, dout);
            assert_eq!(b.gram(), ComplexMatrix::identity(di * dout));
            assert!(OperatorBasis::new(di, dout, b.elements().to_vec()).is_ok());
        }
    }

    #[test]
    fn expansion_reproduces_operator() {
        for seed in 0..10 {
            let s = random_matrix(3, 2, seed);
            let b = elementary_basis(2, 3);
            assert!(b.assemble(&b.coefficients(&s)).distance(&s) < 1e-12);
            let s = random_matrix(4, 4, seed);
            let h = hermitian_basis(4);
            assert!(h.assemble(&h.coefficients(&s)).distance(&s) < 1e-12);
        }
    }

    #[test]
    fn hermitian_basis_is_valid() {
        for d in 1..=5 {
            let h = hermitian_basis(d);
            assert!(OperatorBasis::new(d, d, h.elements().to_vec()).is_ok());
            assert!(h.elements().iter().all(|m| m.hermitian_deviation() == 0.0));
            assert!(h.elements().iter().skip(1).all(|m| m.trace().norm() < 1e-15));
        }
    }

    #[test]
    fn rejects_non_orthonormal() {
        let mut els = elementary_basis(2, 2).elements().to_vec();
        els[0] = els[0].scale_real(2.0);
        assert!(OperatorBasis::new(2, 2, els).is_err());
        assert!(OperatorBasis::new(2, 2, vec![ComplexMatrix::identity(2)]).is_err());
    }
}
