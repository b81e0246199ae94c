//! Compiles affine Hermitian matrix expressions into real LMI blocks.
//!
//! Hermitian matrix variables are expanded over a fixed basis: `E_ii`,
//! `E_ij + E_ji` and, over the complex field, `i(E_ij − E_ji)`. When all
//! problem data is real the imaginary directions are dropped; averaging any
//! feasible point with its complex conjugate keeps it feasible and leaves the
//! objective unchanged, so nothing is lost.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};
use crate::sdp::{
    solve, verify_solution, LmiBlock, LmiProblem, RealMatrix, SdpSolution, SdpStatus, SolverOptions, SparseSym,
};

const IMAG_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Field {
    Real,
    Complex,
}

impl Field {
    /// Real when every listed matrix is real to within rounding.
    pub(crate) fn for_data(data: &[&ComplexMatrix]) -> Self {
        if data.iter().all(|m| m.is_real(IMAG_TOL)) {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

type Entries = Vec<(usize, usize, C64)>;

/// Handle to an `n × n` Hermitian variable occupying a contiguous range of parameters.
#[derive(Debug, Clone)]
pub(crate) struct HermVar {
    n: usize,
    /// `(parameter index, full-storage entries of its basis matrix)`.
    basis: Vec<(usize, Entries)>,
}

impl HermVar {
    /// `Σ y_i G_i` evaluated at `y`.
    pub(crate) fn value(&self, y: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.n, self.n);
        for (var, entries) in &self.basis {
            for &(i, j, z) in entries {
                m[(i, j)] += z * y[*var];
            }
        }
        m
    }

    /// Parameters reproducing the Hermitian part of `m` (imaginary parts dropped over the real field).
    pub(crate) fn encode(&self, m: &ComplexMatrix, y: &mut [f64]) {
        for (var, entries) in &self.basis {
            let (i, j, z) = entries[0];
            // Basis elements are E_ii, E_ij + E_ji, or i(E_ij − E_ji); read the matching component.
            let v = if i == j {
                m[(i, i)].re
            } else if z.im == 0.0 {
                0.5 * (m[(i, j)].re + m[(j, i)].re)
            } else {
                0.5 * (m[(i, j)].im - m[(j, i)].im)
            };
            y[*var] = v;
        }
    }

    pub(crate) fn expr(&self) -> Expr {
        let mut e = Expr::zero(self.n);
        for (var, entries) in &self.basis {
            e.terms.insert(*var, entries.clone());
        }
        e
    }
}

/// Affine Hermitian expression `C + Σ y_i G_i`.
#[derive(Debug, Clone)]
pub(crate) struct Expr {
    n: usize,
    constant: ComplexMatrix,
    terms: BTreeMap<usize, Entries>,
}

impl Expr {
    pub(crate) fn zero(n: usize) -> Self {
        Self { n, constant: ComplexMatrix::zeros(n, n), terms: BTreeMap::new() }
    }

    pub(crate) fn constant(m: &ComplexMatrix) -> Self {
        Self { n: m.rows(), constant: m.clone(), terms: BTreeMap::new() }
    }

    /// `y_var · c · I_n`.
    pub(crate) fn scalar_identity(var: usize, n: usize, c: f64) -> Self {
        let mut e = Self::zero(n);
        e.terms.insert(var, (0..n).map(|i| (i, i, C64::new(c, 0.0))).collect());
        e
    }

    pub(crate) fn plus(mut self, other: &Expr) -> Self {
        assert_eq!(self.n, other.n, "expression sizes differ");
        self.constant = &self.constant + &other.constant;
        for (var, entries) in &other.terms {
            self.terms.entry(*var).or_default().extend_from_slice(entries);
        }
        self
    }

    pub(crate) fn minus(self, other: &Expr) -> Self {
        self.plus(&other.clone().scaled(-1.0))
    }

    pub(crate) fn plus_constant(mut self, m: &ComplexMatrix) -> Self {
        self.constant = &self.constant + m;
        self
    }

    pub(crate) fn scaled(mut self, s: f64) -> Self {
        self.constant = self.constant.scale(s);
        for entries in self.terms.values_mut() {
            for e in entries.iter_mut() {
                e.2 *= s;
            }
        }
        self
    }

    /// Partial transpose on the second factor of `dim_a ⊗ dim_b`.
    pub(crate) fn partial_transpose(mut self, dim_a: usize, dim_b: usize) -> Self {
        assert_eq!(self.n, dim_a * dim_b, "partial transpose dimensions");
        let map = |r: usize, c: usize| {
            let (i, j) = (r / dim_b, r % dim_b);
            let (k, l) = (c / dim_b, c % dim_b);
            (i * dim_b + l, k * dim_b + j)
        };
        let mut constant = ComplexMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                let (r2, c2) = map(r, c);
                constant[(r2, c2)] = self.constant[(r, c)];
            }
        }
        self.constant = constant;
        for entries in self.terms.values_mut() {
            for e in entries.iter_mut() {
                let (r2, c2) = map(e.0, e.1);
                e.0 = r2;
                e.1 = c2;
            }
        }
        self
    }

    /// `V · E · V†` for a `big × r` matrix `V` given by its `r` columns.
    pub(crate) fn congruence(&self, columns: &[Vec<C64>], big: usize) -> Self {
        assert_eq!(columns.len(), self.n, "congruence needs one column per row of the expression");
        assert!(columns.iter().all(|c| c.len() == big), "column length");
        let lift = |entries: &[(usize, usize, C64)]| -> Entries {
            let mut dense = vec![C64::new(0.0, 0.0); big * big];
            for &(p, q, z) in entries {
                for a in 0..big {
                    let left = columns[p][a] * z;
                    if left == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for b in 0..big {
                        dense[a * big + b] += left * columns[q][b].conj();
                    }
                }
            }
            dense
                .into_iter()
                .enumerate()
                .filter(|(_, z)| z.norm() > 0.0)
                .map(|(k, z)| (k / big, k % big, z))
                .collect()
        };
        let const_entries: Entries = (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.constant[(i, j)]))
            .filter(|e| e.2.norm() > 0.0)
            .collect();
        let mut constant = ComplexMatrix::zeros(big, big);
        for (a, b, z) in lift(&const_entries) {
            constant[(a, b)] = z;
        }
        Self {
            n: big,
            constant,
            terms: self.terms.iter().map(|(var, entries)| (*var, lift(entries))).collect(),
        }
    }

    /// Real linear functional `Re tr(M · expr)` as (constant, per-variable coefficients).
    pub(crate) fn trace_against(&self, m: &ComplexMatrix) -> (f64, Vec<(usize, f64)>) {
        let c = self.constant.trace_product(m).re;
        let coeffs = self
            .terms
            .iter()
            .map(|(var, entries)| (*var, entries.iter().map(|&(p, q, z)| (z * m[(q, p)]).re).sum()))
            .collect();
        (c, coeffs)
    }

    pub(crate) fn trace(&self) -> (f64, Vec<(usize, f64)>) {
        self.trace_against(&ComplexMatrix::identity(self.n))
    }
}

/// Accumulates variables, blocks and a linear objective.
pub(crate) struct Builder {
    field: Field,
    num_vars: usize,
    objective: Vec<f64>,
    blocks: Vec<LmiBlock>,
}

impl Builder {
    pub(crate) fn new(field: Field) -> Self {
        Self { field, num_vars: 0, objective: Vec::new(), blocks: Vec::new() }
    }

    pub(crate) fn scalar(&mut self) -> usize {
        self.num_vars += 1;
        self.objective.push(0.0);
        self.num_vars - 1
    }

    pub(crate) fn hermitian(&mut self, n: usize) -> HermVar {
        let one = C64::new(1.0, 0.0);
        let i_unit = C64::new(0.0, 1.0);
        let mut basis = Vec::new();
        for i in 0..n {
            basis.push((self.scalar(), vec![(i, i, one)]));
        }
        for i in 0..n {
            for j in i + 1..n {
                basis.push((self.scalar(), vec![(i, j, one), (j, i, one)]));
                if self.field == Field::Complex {
                    basis.push((self.scalar(), vec![(i, j, i_unit), (j, i, -i_unit)]));
                }
            }
        }
        HermVar { n, basis }
    }

    /// Adds `Σ c_i y_i` to the maximized objective.
    pub(crate) fn maximize(&mut self, coeffs: &[(usize, f64)]) {
        for &(var, c) in coeffs {
            self.objective[var] += c;
        }
    }

    /// Requires `expr ⪰ 0`.
    pub(crate) fn psd(&mut self, expr: &Expr) -> Result<()> {
        let defect = expr.constant.hermiticity_defect();
        if defect > 1e-9 * expr.constant.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        let realify = self.field == Field::Complex && expr.n > 1;
        let constant = lift_constant(&expr.constant, realify);
        let mut block = LmiBlock::new(constant);
        for (var, entries) in &expr.terms {
            let n = expr.n;
            let mut full = Vec::with_capacity(entries.len() * if realify { 4 } else { 1 });
            // The LMI form is C − Σ y A, so the coefficient enters negated.
            for &(r, c, z) in entries {
                full.push((r, c, -z.re));
                if realify {
                    full.push((r + n, c + n, -z.re));
                    full.push((r, c + n, z.im));
                    full.push((r + n, c, -z.im));
                }
            }
            block.add_term(*var, SparseSym::from_full(full));
        }
        self.blocks.push(block);
        Ok(())
    }

    /// Requires the real scalar `c + Σ a_i y_i ≥ 0`.
    pub(crate) fn nonneg(&mut self, constant: f64, coeffs: &[(usize, f64)]) {
        let mut block = LmiBlock::new(RealMatrix::from_vec(1, vec![constant]));
        for &(var, a) in coeffs {
            block.add_term(var, SparseSym::from_full(vec![(0, 0, -a)]));
        }
        self.blocks.push(block);
    }

    pub(crate) fn build(self) -> Result<LmiProblem> {
        LmiProblem::new(self.objective, self.blocks)
    }
}

fn lift_constant(m: &ComplexMatrix, realify: bool) -> RealMatrix {
    let n = m.rows();
    if !realify {
        return RealMatrix::from_fn(n, |i, j| 0.5 * (m[(i, j)].re + m[(j, i)].re));
    }
    RealMatrix::from_fn(2 * n, |i, j| {
        let z = 0.5 * (m[(i % n, j % n)] + m[(j % n, i % n)].conj());
        match (i < n, j < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Solves and insists on an optimal status with independently verified residuals.
pub(crate) fn solve_checked(problem: &LmiProblem, opts: &SolverOptions, what: &str) -> Result<SdpSolution> {
    let sol = solve(problem, opts);
    if sol.status != SdpStatus::Optimal {
        return Err(Error::SolverFailed(format!(
            "{what}: status {:?} after {} iterations (gap {:.3e}, residuals {:.3e}/{:.3e})",
            sol.status, sol.iterations, sol.gap, sol.primal_residual, sol.dual_residual
        )));
    }
    let report = verify_solution(problem, &sol);
    // The interior point stays strictly inside the cone, so residual slack is tiny;
    // the multiplier check only guards against a corrupted iterate.
    let limit = 100.0 * opts.feas_tol.max(opts.gap_tol) * (1.0 + report.objective.abs());
    if report.max_violation > limit {
        return Err(Error::SolverFailed(format!(
            "{what}: independent check found violation {:.3e}",
            report.max_violation
        )));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_basis_counts() {
        let mut b = Builder::new(Field::Real);
        let v = b.hermitian(3);
        assert_eq!(v.basis.len(), 6);
        let mut b = Builder::new(Field::Complex);
        let v = b.hermitian(3);
        assert_eq!(v.basis.len(), 9);
    }

    #[test]
    fn partial_transpose_matches_linalg() {
        let m = ComplexMatrix::from_fn(6, 6, |i, j| C64::new((i * 6 + j) as f64, (i as f64) - (j as f64)));
        let op = crate::linalg::BipartiteOperator::new(2, 3, m.clone()).unwrap();
        let expected = op.partial_transpose();
        let got = Expr::constant(&m).partial_transpose(2, 3);
        assert_eq!(got.constant.max_abs_diff(expected.matrix()), 0.0);
    }

    #[test]
    fn value_reconstructs_hermitian() {
        let mut b = Builder::new(Field::Complex);
        let v = b.hermitian(2);
        // params: E00, E11, E01+E10, i(E01−E10)
        let m = v.value(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m[(0, 1)], C64::new(3.0, 4.0));
        assert_eq!(m[(1, 0)], C64::new(3.0, -4.0));
    }
}
