//! Operators on `A ⊗ B` with the basis convention `|i_A j_B⟩ ↦ i·dim_b + j`.

use super::eigen::eigvals_hermitian;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// A square matrix acting on `A ⊗ B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    dim_a: usize,
    dim_b: usize,
    matrix: ComplexMatrix,
}

impl BipartiteOperator {
    pub fn new(dim_a: usize, dim_b: usize, matrix: ComplexMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::DimensionMismatch("local dimensions must be positive".into()));
        }
        let n = dim_a * dim_b;
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix does not act on {dim_a}⊗{dim_b}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { dim_a, dim_b, matrix })
    }

    pub fn zeros(dim_a: usize, dim_b: usize) -> Self {
        let n = dim_a * dim_b;
        Self { dim_a, dim_b, matrix: ComplexMatrix::zeros(n, n) }
    }

    pub fn identity(dim_a: usize, dim_b: usize) -> Self {
        Self { dim_a, dim_b, matrix: ComplexMatrix::identity(dim_a * dim_b) }
    }

    /// `|ψ⟩⟨ψ|` for a ket given in the product basis.
    pub fn projector(dim_a: usize, dim_b: usize, ket: &[C64]) -> Result<Self> {
        if ket.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!("ket of length {} on {dim_a}⊗{dim_b}", ket.len())));
        }
        Self::new(dim_a, dim_b, ComplexMatrix::projector_onto(ket))
    }

    /// The swap operator on `d ⊗ d`.
    pub fn swap(d: usize) -> Self {
        let n = d * d;
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..d {
            for j in 0..d {
                m[(i * d + j, j * d + i)] = C64::new(1.0, 0.0);
            }
        }
        Self { dim_a: d, dim_b: d, matrix: m }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn same_dims(&self, other: &Self) -> bool {
        self.dim_a == other.dim_a && self.dim_b == other.dim_b
    }

    pub(crate) fn check_dims(&self, other: &Self) -> Result<()> {
        if self.same_dims(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}⊗{} vs {}⊗{}",
                self.dim_a, self.dim_b, other.dim_a, other.dim_b
            )))
        }
    }

    /// Same local dimensions, new matrix.
    pub fn with_matrix(&self, matrix: ComplexMatrix) -> Result<Self> {
        Self::new(self.dim_a, self.dim_b, matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim_a: self.dim_a, dim_b: self.dim_b, matrix: self.matrix.scale(s) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self { dim_a: self.dim_a, dim_b: self.dim_b, matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self { dim_a: self.dim_a, dim_b: self.dim_b, matrix: &self.matrix - &other.matrix })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dims(other)?;
        Ok(Self { dim_a: self.dim_a, dim_b: self.dim_b, matrix: self.matrix.matmul(&other.matrix)? })
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Transposes the `B` indices: `⟨i l| X^{T_B} |k j⟩ = ⟨i j| X |k l⟩`.
    pub fn partial_transpose(&self) -> Self {
        let (da, db) = (self.dim_a, self.dim_b);
        let n = da * db;
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..da {
            for j in 0..db {
                for k in 0..da {
                    for l in 0..db {
                        out[(i * db + l, k * db + j)] = self.matrix[(i * db + j, k * db + l)];
                    }
                }
            }
        }
        Self { dim_a: da, dim_b: db, matrix: out }
    }

    /// Tensor product on `(A A') ⊗ (B B')`: Alice's systems are grouped before Bob's,
    /// so the result is again a bipartite operator across the joint cut.
    pub fn kron(&self, other: &Self) -> Self {
        let (a1, b1) = (self.dim_a, self.dim_b);
        let (a2, b2) = (other.dim_a, other.dim_b);
        let (da, db) = (a1 * a2, b1 * b2);
        let n = da * db;
        let mut out = ComplexMatrix::zeros(n, n);
        let index = |x1: usize, x2: usize, y1: usize, y2: usize| (x1 * a2 + x2) * db + y1 * b2 + y2;
        for r1 in 0..a1 * b1 {
            let (ra1, rb1) = (r1 / b1, r1 % b1);
            for c1 in 0..a1 * b1 {
                let x = self.matrix[(r1, c1)];
                if x.norm_sqr() == 0.0 {
                    continue;
                }
                let (ca1, cb1) = (c1 / b1, c1 % b1);
                for r2 in 0..a2 * b2 {
                    let (ra2, rb2) = (r2 / b2, r2 % b2);
                    let row = index(ra1, ra2, rb1, rb2);
                    for c2 in 0..a2 * b2 {
                        let (ca2, cb2) = (c2 / b2, c2 % b2);
                        out[(row, index(ca1, ca2, cb1, cb2))] = x * other.matrix[(r2, c2)];
                    }
                }
            }
        }
        Self { dim_a: da, dim_b: db, matrix: out }
    }

    /// `P X P + (1-P) X (1-P)`.
    pub fn pinch(&self, projector: &Self) -> Result<Self> {
        self.check_dims(projector)?;
        let p = &projector.matrix;
        let q = &ComplexMatrix::identity(self.dim()) - p;
        let inside = &(p * &self.matrix) * p;
        let outside = &(&q * &self.matrix) * &q;
        Ok(Self { dim_a: self.dim_a, dim_b: self.dim_b, matrix: &inside + &outside })
    }
}

/// `Σ|λ_i|` of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals_hermitian(m)?.iter().map(|l| l.abs()).sum())
}

/// `max|λ_i|` of a Hermitian matrix.
pub fn op_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigvals_hermitian(m)?.iter().map(|l| l.abs()).fold(0.0, f64::max))
}

/// Free-function form of [`BipartiteOperator::partial_transpose`].
pub fn partial_transpose(x: &BipartiteOperator) -> BipartiteOperator {
    x.partial_transpose()
}

/// Free-function form of [`BipartiteOperator::kron`].
pub fn kron(x: &BipartiteOperator, y: &BipartiteOperator) -> BipartiteOperator {
    x.kron(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket(dim: usize, idx: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); dim];
        v[idx] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn partial_transpose_moves_b_indices() {
        // |01⟩⟨10| -> |00⟩⟨11|
        let m = BipartiteOperator::new(2, 2, ComplexMatrix::outer(&ket(4, 1), &ket(4, 2))).unwrap();
        let pt = m.partial_transpose();
        let expected = ComplexMatrix::outer(&ket(4, 0), &ket(4, 3));
        assert_eq!(pt.matrix(), &expected);
        assert_eq!(pt.partial_transpose(), m);
    }

    #[test]
    fn maxent_transpose_is_half_swap() {
        let mut phi = vec![C64::new(0.0, 0.0); 4];
        phi[0] = C64::new(0.5f64.sqrt(), 0.0);
        phi[3] = C64::new(0.5f64.sqrt(), 0.0);
        let rho = BipartiteOperator::projector(2, 2, &phi).unwrap();
        let pt = rho.partial_transpose();
        let half_swap = BipartiteOperator::swap(2).scale(0.5);
        assert!(pt.matrix().max_abs_diff(half_swap.matrix()) < 1e-15);
        let vals = eigvals_hermitian(pt.matrix()).unwrap();
        let expected = [0.5, 0.5, 0.5, -0.5];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn kron_orders_alice_before_bob() {
        // |0_A 1_B⟩ ⊗ |1_A' 0_B'⟩ lives at |01⟩_{AA'} |10⟩_{BB'} in the 4⊗4 product.
        let x = BipartiteOperator::projector(2, 2, &ket(4, 1)).unwrap();
        let y = BipartiteOperator::projector(2, 2, &ket(4, 2)).unwrap();
        let xy = x.kron(&y);
        assert_eq!((xy.dim_a(), xy.dim_b()), (4, 4));
        let idx = 1 * 4 + 2;
        assert_eq!(xy.matrix()[(idx, idx)], C64::new(1.0, 0.0));
        assert!((xy.trace() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn kron_with_identity_repeats_blocks() {
        let z = BipartiteOperator::new(1, 2, ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 2.0, 3.0]).unwrap()).unwrap();
        let id = BipartiteOperator::identity(1, 1);
        assert_eq!(id.kron(&z), z);
        assert_eq!(z.kron(&id), z);
    }

    #[test]
    fn pinch_rejects_dimension_mismatch() {
        let a = BipartiteOperator::identity(2, 2);
        let b = BipartiteOperator::identity(3, 3);
        assert!(matches!(a.pinch(&b), Err(Error::DimensionMismatch(_))));
    }
}
