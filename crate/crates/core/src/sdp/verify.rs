//! Residual checks that recompute everything from the problem data.

use super::dense::RealMatrix;
use super::problem::LmiProblem;
use super::solver::SdpSolution;

/// Violations of a candidate `(y, X)` pair, all recomputed from scratch.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// `max_k max(0, −λ_min(C_k − Σ y_i A_{k,i}))`.
    pub lmi_violation: f64,
    /// `max_k max(0, −λ_min(X_k))`, zero when no multipliers are supplied.
    pub multiplier_psd_violation: f64,
    /// `‖b − A(X)‖_∞`, zero when no multipliers are supplied.
    pub equality_residual: f64,
    /// `b·y` recomputed.
    pub objective: f64,
    /// `|Σ tr(C_k X_k) − b·y| / (1 + |b·y|)`, zero without multipliers.
    pub relative_gap: f64,
    pub max_violation: f64,
}

impl FeasibilityReport {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

fn min_eigenvalue(m: &RealMatrix) -> f64 {
    match m.symmetrized().symmetric_eigen() {
        Ok(e) => e.values.first().copied().unwrap_or(0.0),
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Checks only the LMI side for a fixed `y`.
pub fn verify_point(problem: &LmiProblem, y: &[f64]) -> FeasibilityReport {
    assert_eq!(y.len(), problem.num_vars(), "y has the wrong length");
    let lmi_violation = problem
        .blocks()
        .iter()
        .map(|bl| {
            // Direct dense evaluation, independent of the solver's sparse bookkeeping.
            let mut s = bl.constant().clone();
            for (var, a) in bl.terms() {
                let dense = a.to_dense(bl.size());
                s.axpy(-y[*var], &dense);
            }
            (-min_eigenvalue(&s)).max(0.0)
        })
        .fold(0.0, f64::max);
    let objective = problem.objective().iter().zip(y).map(|(b, v)| b * v).sum();
    FeasibilityReport {
        lmi_violation,
        multiplier_psd_violation: 0.0,
        equality_residual: 0.0,
        objective,
        relative_gap: 0.0,
        max_violation: lmi_violation,
    }
}

/// Checks `y` against the LMI and, when present, the multipliers `X` against the dual.
pub fn verify_solution(problem: &LmiProblem, s: &SdpSolution) -> FeasibilityReport {
    let mut report = verify_point(problem, &s.y);
    if s.dual_matrix_blocks.len() == problem.blocks().len() {
        let x = &s.dual_matrix_blocks;
        report.multiplier_psd_violation = x.iter().map(|xk| (-min_eigenvalue(xk)).max(0.0)).fold(0.0, f64::max);
        let mut ax = vec![0.0; problem.num_vars()];
        let mut cx = 0.0;
        for (bl, xk) in problem.blocks().iter().zip(x) {
            let n = bl.size();
            cx += bl.constant().trace_product(xk);
            for (var, a) in bl.terms() {
                ax[*var] += a.to_dense(n).trace_product(xk);
            }
        }
        report.equality_residual =
            problem.objective().iter().zip(&ax).map(|(b, a)| (b - a).abs()).fold(0.0, f64::max);
        report.relative_gap = (cx - report.objective).abs() / (1.0 + report.objective.abs());
    }
    report.max_violation = report
        .lmi_violation
        .max(report.multiplier_psd_violation)
        .max(report.equality_residual)
        .max(report.relative_gap);
    report
}
