//! Infeasible primal-dual path-following interior-point method.
//!
//! The LMI `C − Σ y_i A_i ⪰ 0` is paired with its Lagrangian dual
//! `min Σ tr(C_k X_k)  s.t.  Σ_k tr(A_{k,i} X_k) = b_i, X_k ⪰ 0`.
//! Search directions use the HKM scaling with a Mehrotra predictor-corrector
//! step, and the Schur complement is factored densely once per iteration.

use super::dense::{cholesky_blocked, cholesky_solve, RealMatrix};
use super::problem::{LmiProblem, SparseSym};
use crate::par::Execution;

/// Solver tolerances and limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative duality gap target: `|primal − dual| ≤ gap_tol·(1 + |primal|)`.
    pub gap_tol: f64,
    /// Relative primal and dual residual target.
    pub feas_tol: f64,
    pub max_iter: usize,
    pub execution: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { gap_tol: 1e-8, feas_tol: 1e-8, max_iter: 200, execution: Execution::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// The LMI has no feasible `y`; `dual_matrix_blocks` holds the certificate.
    Infeasible,
    /// `b·y` is unbounded above; `y` holds the improving ray.
    Unbounded,
    NumericalTrouble,
}

/// Final iterate of [`solve`].
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// `b·y`.
    pub primal_value: f64,
    /// `Σ tr(C_k X_k)`.
    pub dual_value: f64,
    pub y: Vec<f64>,
    /// `S_k = C_k − Σ y_i A_{k,i}`.
    pub slack_blocks: Vec<RealMatrix>,
    /// Lagrange multipliers `X_k`.
    pub dual_matrix_blocks: Vec<RealMatrix>,
    /// `|dual − primal|`.
    pub gap: f64,
    /// `‖C − Σ y A − S‖_F / (1 + ‖C‖_F)`.
    pub primal_residual: f64,
    /// `‖b − A(X)‖ / (1 + ‖b‖)`.
    pub dual_residual: f64,
    /// `Σ tr(X_k S_k)`.
    pub complementarity: f64,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    pub fn relative_gap(&self) -> f64 {
        self.gap / (1.0 + self.primal_value.abs())
    }
}

struct Iterate {
    x: Vec<RealMatrix>,
    s: Vec<RealMatrix>,
    y: Vec<f64>,
}

struct Direction {
    dx: Vec<RealMatrix>,
    ds: Vec<RealMatrix>,
    dy: Vec<f64>,
}

const STEP_FRACTION: f64 = 0.95;

/// Solves `maximize b·y  s.t.  C_k − Σ y_i A_{k,i} ⪰ 0`.
pub fn solve(problem: &LmiProblem, opts: &SolverOptions) -> SdpSolution {
    let m = problem.num_vars();
    let b = problem.objective();
    let blocks = problem.blocks();
    let total_dim: usize = blocks.iter().map(|bl| bl.size()).sum();
    let b_norm = norm2(b);
    let c_norm = blocks.iter().map(|bl| bl.constant().dot(bl.constant())).sum::<f64>().sqrt();

    let mut it = initial_point(problem);

    let mut status = SdpStatus::NumericalTrouble;
    let mut iterations = 0;
    let mut summary;
    loop {
        summary = Summary::of(problem, &it, b_norm, c_norm);
        let converged = summary.rel_gap() <= opts.gap_tol
            && summary.primal_residual <= opts.feas_tol
            && summary.dual_residual <= opts.feas_tol;
        if converged {
            status = SdpStatus::Optimal;
            break;
        }
        if let Some(s) = detect_infeasibility(problem, &it, b_norm, c_norm) {
            status = s;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }

        let s_inv: Vec<RealMatrix> = match it.s.iter().map(|s| s.cholesky().map(|c| c.inverse())).collect() {
            Some(v) => v,
            None => break,
        };
        let rd: Vec<RealMatrix> = blocks
            .iter()
            .zip(&it.s)
            .map(|(bl, s)| bl.slack(&it.y).sub(s))
            .collect();
        let rp: Vec<f64> = b.iter().zip(problem.adjoint_map(&it.x)).map(|(bi, ax)| bi - ax).collect();

        let Some(schur) = factor_schur(problem, &it.x, &s_inv, opts.execution) else {
            break;
        };
        let mu = summary.complementarity / total_dim as f64;

        // Predictor: target μ = 0.
        let r_aff: Vec<RealMatrix> = it.x.iter().map(|x| x.scale(-1.0)).collect();
        let aff = direction(problem, &it, &s_inv, &rd, &rp, &r_aff, &schur, m);
        let ap = max_step(&it.x, &aff.dx).min(1.0);
        let ad = max_step(&it.s, &aff.ds).min(1.0);
        let mut mu_aff = 0.0;
        for k in 0..blocks.len() {
            let mut xk = it.x[k].clone();
            xk.axpy(ap, &aff.dx[k]);
            let mut sk = it.s[k].clone();
            sk.axpy(ad, &aff.ds[k]);
            mu_aff += xk.trace_product(&sk);
        }
        mu_aff /= total_dim as f64;
        let sigma = if mu > 0.0 { (mu_aff / mu).max(0.0).powi(3).min(1.0) } else { 0.0 };

        // Corrector: R = σμ S⁻¹ − X − dX_aff dS_aff S⁻¹.
        let r_cc: Vec<RealMatrix> = (0..blocks.len())
            .map(|k| {
                let mut r = s_inv[k].scale(sigma * mu);
                r.axpy(-1.0, &it.x[k]);
                let second = aff.dx[k].matmul(&aff.ds[k]).matmul(&s_inv[k]);
                r.axpy(-1.0, &second);
                r
            })
            .collect();
        let dir = direction(problem, &it, &s_inv, &rd, &rp, &r_cc, &schur, m);
        let ap = (STEP_FRACTION * max_step(&it.x, &dir.dx)).min(1.0);
        let ad = (STEP_FRACTION * max_step(&it.s, &dir.ds)).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        for k in 0..blocks.len() {
            it.x[k].axpy(ap, &dir.dx[k]);
            it.s[k].axpy(ad, &dir.ds[k]);
        }
        for (yi, di) in it.y.iter_mut().zip(&dir.dy) {
            *yi += ad * di;
        }
        iterations += 1;
    }

    SdpSolution {
        status,
        primal_value: summary.pobj,
        dual_value: summary.dobj,
        y: it.y,
        slack_blocks: it.s,
        dual_matrix_blocks: it.x,
        gap: (summary.dobj - summary.pobj).abs(),
        primal_residual: summary.primal_residual,
        dual_residual: summary.dual_residual,
        complementarity: summary.complementarity,
        iterations,
    }
}

struct Summary {
    pobj: f64,
    dobj: f64,
    primal_residual: f64,
    dual_residual: f64,
    complementarity: f64,
}

impl Summary {
    fn of(problem: &LmiProblem, it: &Iterate, b_norm: f64, c_norm: f64) -> Self {
        let b = problem.objective();
        let pobj: f64 = b.iter().zip(&it.y).map(|(a, c)| a * c).sum();
        let mut dobj = 0.0;
        let mut rd2 = 0.0;
        let mut comp = 0.0;
        for (k, bl) in problem.blocks().iter().enumerate() {
            dobj += bl.constant().dot(&it.x[k]);
            let rd = bl.slack(&it.y).sub(&it.s[k]);
            rd2 += rd.dot(&rd);
            comp += it.x[k].dot(&it.s[k]);
        }
        let ax = problem.adjoint_map(&it.x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, a)| bi - a).collect();
        Self {
            pobj,
            dobj,
            primal_residual: rd2.sqrt() / (1.0 + c_norm),
            dual_residual: norm2(&rp) / (1.0 + b_norm),
            complementarity: comp,
        }
    }

    fn rel_gap(&self) -> f64 {
        (self.dobj - self.pobj).abs() / (1.0 + self.pobj.abs())
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn initial_point(problem: &LmiProblem) -> Iterate {
    let blocks = problem.blocks();
    let b = problem.objective();
    let mut xi: f64 = 10.0;
    let mut eta: f64 = 10.0;
    for bl in blocks {
        let n = bl.size() as f64;
        xi = xi.max(n.sqrt());
        eta = eta.max(n.sqrt()).max(bl.constant().frobenius_norm());
        for (var, a) in bl.terms() {
            let a_norm = a.entries().iter().map(|e| e.2 * e.2).sum::<f64>().sqrt();
            xi = xi.max(n.sqrt() * (1.0 + b[*var].abs()) / (1.0 + a_norm));
            eta = eta.max(a_norm);
        }
    }
    Iterate {
        x: blocks.iter().map(|bl| RealMatrix::scaled_identity(bl.size(), xi)).collect(),
        s: blocks.iter().map(|bl| RealMatrix::scaled_identity(bl.size(), eta)).collect(),
        y: vec![0.0; problem.num_vars()],
    }
}

/// Dense Cholesky factor of `M_ij = Σ_k tr(A_{k,i} X_k A_{k,j} S_k⁻¹)`.
struct SchurFactor {
    l: Vec<f64>,
    m: usize,
}

impl SchurFactor {
    fn solve(&self, rhs: &mut [f64]) {
        cholesky_solve(&self.l, self.m, rhs);
    }
}

fn factor_schur(problem: &LmiProblem, x: &[RealMatrix], s_inv: &[RealMatrix], exec: Execution) -> Option<SchurFactor> {
    let m = problem.num_vars();
    let mut mat = assemble_schur(problem, x, s_inv, exec);
    let max_diag = (0..m).map(|i| mat[i * m + i]).fold(0.0, f64::max).max(1e-300);
    let base = mat.clone();
    for attempt in 0..4 {
        if attempt > 0 {
            // Regularize: the Schur complement loses definiteness near the optimum of
            // degenerate problems.
            mat.copy_from_slice(&base);
            let shift = max_diag * 1e-14 * 100f64.powi(attempt - 1);
            for i in 0..m {
                mat[i * m + i] += shift;
            }
        }
        if cholesky_blocked(&mut mat, m, exec).is_ok() {
            return Some(SchurFactor { l: mat, m });
        }
    }
    None
}

/// Coefficients with more than `2n` nonzeros are handled through a dense `X A S⁻¹`.
fn is_heavy(a: &SparseSym, n: usize) -> bool {
    a.nnz() > 2 * n
}

pub(crate) fn assemble_schur(problem: &LmiProblem, x: &[RealMatrix], s_inv: &[RealMatrix], exec: Execution) -> Vec<f64> {
    let m = problem.num_vars();
    let blocks = problem.blocks();

    // position of each variable in each block's term list
    let positions: Vec<Vec<Option<usize>>> = blocks
        .iter()
        .map(|bl| {
            let mut pos = vec![None; m];
            for (t, (var, _)) in bl.terms().iter().enumerate() {
                pos[*var] = Some(t);
            }
            pos
        })
        .collect();

    let heavy: Vec<Vec<Option<RealMatrix>>> = blocks
        .iter()
        .enumerate()
        .map(|(k, bl)| {
            let n = bl.size();
            bl.terms()
                .iter()
                .map(|(_, a)| {
                    if is_heavy(a, n) {
                        let xa = x[k].matmul(&a.to_dense(n));
                        Some(xa.matmul(&s_inv[k]))
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();

    let mut mat = vec![0.0; m * m];
    let fill_row = |i: usize, row: &mut [f64]| {
        for (k, bl) in blocks.iter().enumerate() {
            let Some(ta) = positions[k][i] else { continue };
            let terms = bl.terms();
            let a = &terms[ta].1;
            let xk = &x[k];
            let sk = &s_inv[k];
            for tb in ta..terms.len() {
                let (var_b, bmat) = &terms[tb];
                let v = if let Some(g) = &heavy[k][tb] {
                    a.trace_with(g)
                } else if let Some(g) = &heavy[k][ta] {
                    bmat.trace_with(g)
                } else {
                    let mut acc = 0.0;
                    for &(p, q, av) in a.entries() {
                        let xrow = xk.row(q);
                        for &(r, s, bv) in bmat.entries() {
                            acc += av * bv * xrow[r] * sk.get(s, p);
                        }
                    }
                    acc
                };
                row[*var_b] += v;
            }
        }
    };
    match exec {
        Execution::Sequential => {
            for (i, row) in mat.chunks_mut(m).enumerate() {
                fill_row(i, row);
            }
        }
        Execution::Parallel => fill_rows_parallel(&mut mat, m, &fill_row),
    }
    // Only the upper triangle was filled; mirror it.
    for i in 0..m {
        for j in 0..i {
            mat[i * m + j] = mat[j * m + i];
        }
    }
    mat
}

#[cfg(feature = "parallel")]
fn fill_rows_parallel(mat: &mut [f64], m: usize, f: &(dyn Fn(usize, &mut [f64]) + Sync)) {
    use rayon::prelude::*;
    if m == 0 {
        return;
    }
    mat.par_chunks_mut(m).enumerate().for_each(|(i, row)| f(i, row));
}

#[cfg(not(feature = "parallel"))]
fn fill_rows_parallel(mat: &mut [f64], m: usize, f: &(dyn Fn(usize, &mut [f64]) + Sync)) {
    if m == 0 {
        return;
    }
    for (i, row) in mat.chunks_mut(m).enumerate() {
        f(i, row);
    }
}

/// Solves the Newton system for a given complementarity right-hand side `R`:
/// `dX = sym(R − X dS S⁻¹)`, `dS = R_d − Σ dy_i A_i`, `A(dX) = r_p`.
#[allow(clippy::too_many_arguments)]
fn direction(
    problem: &LmiProblem,
    it: &Iterate,
    s_inv: &[RealMatrix],
    rd: &[RealMatrix],
    rp: &[f64],
    r: &[RealMatrix],
    schur: &SchurFactor,
    m: usize,
) -> Direction {
    let blocks = problem.blocks();
    // G = R − X R_d S⁻¹, rhs = r_p − A(G)
    let g: Vec<RealMatrix> = (0..blocks.len())
        .map(|k| {
            let mut gk = r[k].clone();
            gk.axpy(-1.0, &it.x[k].matmul(&rd[k]).matmul(&s_inv[k]));
            gk
        })
        .collect();
    let ag = problem.adjoint_map(&g);
    let mut dy: Vec<f64> = rp.iter().zip(&ag).map(|(a, b)| a - b).collect();
    debug_assert_eq!(dy.len(), m);
    schur.solve(&mut dy);

    let mut ds = Vec::with_capacity(blocks.len());
    let mut dx = Vec::with_capacity(blocks.len());
    for (k, bl) in blocks.iter().enumerate() {
        let dsk = rd[k].sub(&bl.combination(&dy));
        let mut dxk = r[k].clone();
        dxk.axpy(-1.0, &it.x[k].matmul(&dsk).matmul(&s_inv[k]));
        dx.push(dxk.symmetrized());
        ds.push(dsk);
    }
    Direction { dx, ds, dy }
}

/// Largest `α` with `M + α dM ⪰ 0` for every block (`f64::INFINITY` if unbounded).
fn max_step(m: &[RealMatrix], dm: &[RealMatrix]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (mk, dk) in m.iter().zip(dm) {
        let Some(chol) = mk.cholesky() else {
            return 0.0;
        };
        let w = chol.congruence_inverse(dk);
        let lmin = match w.symmetric_eigen() {
            Ok(e) => e.values[0],
            Err(_) => return 0.0,
        };
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

/// Recognizes diverging iterates that carry an infeasibility or unboundedness certificate.
fn detect_infeasibility(problem: &LmiProblem, it: &Iterate, b_norm: f64, c_norm: f64) -> Option<SdpStatus> {
    let blocks = problem.blocks();
    let x_scale: f64 = it.x.iter().map(RealMatrix::trace).sum();
    if x_scale > 1e8 * (1.0 + b_norm) {
        // X/tr X with A(X) ≈ 0 and tr(C X) < 0 proves the LMI empty.
        let xhat: Vec<RealMatrix> = it.x.iter().map(|x| x.scale(1.0 / x_scale)).collect();
        let ax = problem.adjoint_map(&xhat);
        let cx: f64 = blocks.iter().zip(&xhat).map(|(bl, x)| bl.constant().dot(x)).sum();
        if norm2(&ax) <= 1e-6 && cx < -1e-8 {
            return Some(SdpStatus::Infeasible);
        }
    }
    let y_norm = norm2(&it.y);
    if y_norm > 1e8 * (1.0 + c_norm) {
        // y/‖y‖ with Σ d_i A_i ⪯ 0 and b·d > 0 is an improving ray.
        let d: Vec<f64> = it.y.iter().map(|v| v / y_norm).collect();
        let bd: f64 = problem.objective().iter().zip(&d).map(|(a, b)| a * b).sum();
        let mut worst: f64 = f64::NEG_INFINITY;
        for bl in blocks {
            if let Ok(e) = bl.combination(&d).symmetric_eigen() {
                worst = worst.max(*e.values.last().unwrap_or(&0.0));
            }
        }
        if bd > 1e-8 && worst <= 1e-6 {
            return Some(SdpStatus::Unbounded);
        }
    }
    None
}
