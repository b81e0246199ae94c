//! Real dense square matrices and the factorizations the solver needs.

use crate::error::{Error, Result};
use crate::par::Execution;

/// Square real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = s;
        }
        m
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.n, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| x * s).collect() }
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: f64, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let n = self.n;
        debug_assert_eq!(n, rhs.n);
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let o = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let r = &rhs.data[k * n..(k + 1) * n];
                for (x, y) in o.iter_mut().zip(r) {
                    *x += a * y;
                }
            }
        }
        Self { n, data: out }
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `tr(self · rhs)`.
    pub fn trace_product(&self, rhs: &Self) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * rhs.data[k * n + i];
            }
        }
        acc
    }

    /// Frobenius inner product `Σ a_ij b_ij`.
    pub fn dot(&self, rhs: &Self) -> f64 {
        self.data.iter().zip(&rhs.data).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Largest absolute row sum, an upper bound on the spectral norm of a symmetric matrix.
    pub fn max_row_sum(&self) -> f64 {
        (0..self.n).map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Lower Cholesky factor, or `None` when the matrix is not numerically positive definite.
    pub fn cholesky(&self) -> Option<Cholesky> {
        let n = self.n;
        let mut l = self.data.clone();
        for j in 0..n {
            let mut d = l[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = l[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
            for i in 0..j {
                l[i * n + j] = 0.0;
            }
        }
        Some(Cholesky { n, l })
    }

    /// Symmetric eigendecomposition, eigenvalues ascending.
    pub fn symmetric_eigen(&self) -> Result<SymmetricEigen> {
        tridiagonal_ql(self)
    }
}

/// `A = L Lᵀ` with `L` lower triangular, stored dense row-major.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.l[i * self.n + j]
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let s: f64 = row.iter().zip(&b[..i]).map(|(a, x)| a * x).sum();
            b[i] = (b[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    pub fn inverse(&self) -> RealMatrix {
        let n = self.n;
        // L⁻¹ by forward substitution, then A⁻¹ = L⁻ᵀ L⁻¹.
        let mut linv = vec![0.0; n * n];
        for j in 0..n {
            linv[j * n + j] = 1.0 / self.l(j, j);
            for i in (j + 1)..n {
                let mut s = 0.0;
                for k in j..i {
                    s += self.l(i, k) * linv[k * n + j];
                }
                linv[i * n + j] = -s / self.l(i, i);
            }
        }
        let mut out = RealMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = 0.0;
                for k in i..n {
                    s += linv[k * n + i] * linv[k * n + j];
                }
                out.set(i, j, s);
                out.set(j, i, s);
            }
        }
        out
    }

    /// `L⁻¹ M L⁻ᵀ`, symmetrized.
    pub fn congruence_inverse(&self, m: &RealMatrix) -> RealMatrix {
        let n = self.n;
        // Z = L⁻¹ M (column-wise forward substitution on rows).
        let mut z = m.as_slice().to_vec();
        for i in 0..n {
            for k in 0..i {
                let lik = self.l(i, k);
                if lik != 0.0 {
                    for j in 0..n {
                        z[i * n + j] -= lik * z[k * n + j];
                    }
                }
            }
            let d = self.l(i, i);
            for j in 0..n {
                z[i * n + j] /= d;
            }
        }
        // W = Z L⁻ᵀ, i.e. Wᵀ = L⁻¹ Zᵀ.
        let mut w = RealMatrix::from_fn(n, |i, j| z[j * n + i]);
        for i in 0..n {
            for k in 0..i {
                let lik = self.l(i, k);
                if lik != 0.0 {
                    for j in 0..n {
                        let v = w.get(k, j);
                        w.add_at(i, j, -lik * v);
                    }
                }
            }
            let d = self.l(i, i);
            for j in 0..n {
                let v = w.get(i, j);
                w.set(i, j, v / d);
            }
        }
        w.symmetrized()
    }
}

/// In-place blocked Cholesky of a dense symmetric positive definite matrix.
///
/// Only the lower triangle of `a` is read; on success it holds `L`. Returns the index
/// of the first failing pivot otherwise. Rows of the trailing update are independent
/// and may be processed in parallel.
pub fn cholesky_blocked(a: &mut [f64], n: usize, exec: Execution) -> std::result::Result<(), usize> {
    const NB: usize = 64;
    let mut panel = vec![0.0; n * NB];
    let mut k0 = 0;
    while k0 < n {
        let k1 = (k0 + NB).min(n);
        let w = k1 - k0;
        // Diagonal block.
        for j in k0..k1 {
            let mut d = a[j * n + j];
            for k in k0..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(j);
            }
            let d = d.sqrt();
            a[j * n + j] = d;
            for i in (j + 1)..k1 {
                let mut s = a[i * n + j];
                for k in k0..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / d;
            }
        }
        // Panel below the diagonal block: rows solve against L_kkᵀ.
        for i in k1..n {
            for j in k0..k1 {
                let mut s = a[i * n + j];
                for k in k0..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / a[j * n + j];
            }
        }
        if k1 == n {
            break;
        }
        // Pack the panel contiguously, width `w`.
        for i in k1..n {
            panel[(i - k1) * w..(i - k1 + 1) * w].copy_from_slice(&a[i * n + k0..i * n + k1]);
        }
        let rows = n - k1;
        let panel_ref = &panel[..rows * w];
        let update_row = |r: usize, row: &mut [f64]| {
            let pi = &panel_ref[r * w..(r + 1) * w];
            for c in 0..=r {
                let pj = &panel_ref[c * w..(c + 1) * w];
                row[k1 + c] -= dot(pi, pj);
            }
        };
        let tail = &mut a[k1 * n..];
        match exec {
            Execution::Sequential => {
                for (r, row) in tail.chunks_mut(n).enumerate() {
                    update_row(r, row);
                }
            }
            Execution::Parallel => parallel_rows(tail, n, &update_row),
        }
        k0 = k1;
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn parallel_rows(tail: &mut [f64], n: usize, f: &(dyn Fn(usize, &mut [f64]) + Sync)) {
    use rayon::prelude::*;
    tail.par_chunks_mut(n).enumerate().for_each(|(r, row)| f(r, row));
}

#[cfg(not(feature = "parallel"))]
fn parallel_rows(tail: &mut [f64], n: usize, f: &(dyn Fn(usize, &mut [f64]) + Sync)) {
    for (r, row) in tail.chunks_mut(n).enumerate() {
        f(r, row);
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// Solves `L Lᵀ x = b` for a factor produced by [`cholesky_blocked`].
pub fn cholesky_solve(l: &[f64], n: usize, b: &mut [f64]) {
    for i in 0..n {
        let s = dot(&l[i * n..i * n + i], &b[..i]);
        b[i] = (b[i] - s) / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

/// Eigenpairs of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: RealMatrix,
}

/// Householder tridiagonalization followed by implicit-shift QL.
fn tridiagonal_ql(a: &RealMatrix) -> Result<SymmetricEigen> {
    let n = a.n();
    if n == 0 {
        return Ok(SymmetricEigen { values: vec![], vectors: RealMatrix::zeros(0) });
    }
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (v[i][j] + v[j][i]);
            v[i][j] = s;
            v[j][i] = s;
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];

    // Householder reduction to tridiagonal form.
    d.copy_from_slice(&v[n - 1]);
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..(n - 1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;

    // Implicit-shift QL on the tridiagonal matrix.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1 = 0.0_f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 200 {
                    return Err(Error::NoConvergence(iter));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for row in v.iter_mut() {
                        let hk = row[i + 1];
                        row[i + 1] = s * row[i] + c * hk;
                        row[i] = c * row[i] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]).then(x.cmp(&y)));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = RealMatrix::from_fn(n, |i, j| v[i][order[j]]);
    Ok(SymmetricEigen { values, vectors })
}
