//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation zeroes one off-diagonal pair with a unitary of the form
//! `D R D†`, where `D` removes the phase of the pivot and `R` is a real Givens
//! rotation. Sweeps stop once the off-diagonal mass falls below machine
//! precision relative to the Frobenius norm.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const HERMITIAN_TOL: f64 = 1e-10;

/// Spectrum and eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Unitary whose columns are the matching eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// Rebuilds `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = ZERO;
            for k in 0..n {
                if fv[k] != 0.0 {
                    acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k];
                }
            }
            acc
        })
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix (tolerance 1e-10 on the symmetry check).
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    eig_hermitian_with_tol(m, HERMITIAN_TOL)
}

pub fn eig_hermitian_with_tol(m: &ComplexMatrix, tol: f64) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermiticity_defect();
    if defect > tol * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let total: f64 = a.frobenius_norm();
    if total == 0.0 {
        return Ok(HermitianEigen { values: vec![0.0; n], vectors: v });
    }
    let target = f64::EPSILON * total * 0.5;

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= target {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweep += 1;
        // Skip pivots that are negligible against the diagonal during early sweeps.
        let threshold = if sweep < 4 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 || mag <= threshold {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if sweep > 4 && mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotate(&mut a, &mut v, p, q, apq, mag, app, aqq);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].total_cmp(&diag[x]).then(x.cmp(&y)));
    let values = order.iter().map(|&k| diag[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, descending.
pub fn eigvals_hermitian(m: &ComplexMatrix) -> Result<Vec<f64>> {
    eig_hermitian(m).map(|e| e.values)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

#[allow(clippy::too_many_arguments)]
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, mag: f64, app: f64, aqq: f64) {
    let n = a.rows();
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let t = if tau == 0.0 { 1.0 } else { t };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = phase * s; // G_pq
    let sq = -phase.conj() * s; // G_qp

    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * sq;
        a[(k, q)] = akp * sp + akq * c;
    }
    // A <- G† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * sq.conj();
        a[(q, k)] = apk * sp.conj() + aqk * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(app - t * mag, 0.0);
    a[(q, q)] = C64::new(aqq + t * mag, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * sq;
        v[(k, q)] = vkp * sp + vkq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_decomposition(m: &ComplexMatrix) {
        let e = eig_hermitian(m).unwrap();
        let n = m.rows();
        let back = e.reconstruct_with(|x| x);
        assert!(back.max_abs_diff(m) < 1e-12 * m.max_abs().max(1.0));
        let vv = &e.vectors.adjoint() * &e.vectors;
        assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn identity_spectrum() {
        let e = eig_hermitian(&ComplexMatrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_y() {
        let y = ComplexMatrix::from_vec(2, 2, vec![ZERO, -C64::i(), C64::i(), ZERO]).unwrap();
        let e = eig_hermitian(&y).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        check_decomposition(&y);
    }

    #[test]
    fn complex_dense_matrix() {
        let n = 7;
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            let re = (a * 0.7 + b * 1.3).sin();
            let im = if i == j { 0.0 } else { (a * 2.1 - b * 0.4).cos() * if i < j { 1.0 } else { -1.0 } };
            C64::new(re, im)
        });
        check_decomposition(&m);
    }

    #[test]
    fn degenerate_spectrum() {
        // Projector of rank 3 in dimension 6 rotated by a dense unitary-ish basis.
        let n = 6;
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..3 {
            let v: Vec<C64> = (0..n).map(|i| C64::new(((i + 1) * (k + 2)) as f64, (i as f64 - k as f64) * 0.5)).collect();
            m = &m + &ComplexMatrix::projector_onto(&v);
        }
        check_decomposition(&m);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian(_))));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eig_hermitian(&r), Err(Error::NotSquare { .. })));
    }
}
