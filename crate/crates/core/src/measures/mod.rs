//! Entanglement bounds compiled to LMIs.
//!
//! Every quantity here is reported in bits (logarithms base 2).

mod builder;
mod report;

use builder::{solve_checked, Builder, Expr, Field, HermVar};
pub use report::{full_report, BoundReport, ReportOptions, IRREVERSIBILITY_MARGIN};

use crate::error::{Error, Result};
use crate::linalg::{
    partial_transpose, trace_norm, BipartiteOperator, ComplexMatrix, DensityMatrix, SupportProjector,
};
use crate::sdp::{LmiProblem, SdpSolution, SolverOptions};

/// `log₂ ‖ρ^{T_B}‖₁`.
pub fn log_negativity(rho: &DensityMatrix) -> Result<f64> {
    Ok(trace_norm(partial_transpose(rho.op()).matrix())?.log2())
}

/// Optimal point of the `η` minimization: `−Y ⪯ P^{T_B} ⪯ Y`, `‖Y^{T_B}‖_∞ ≤ t`.
#[derive(Debug, Clone)]
pub struct EtaPrimal {
    pub eta: f64,
    /// `−log₂ η`.
    pub e_eta: f64,
    pub y: BipartiteOperator,
    pub solution: SdpSolution,
}

/// Optimal point of the `η` maximization over `(V, F, W, X)`.
#[derive(Debug, Clone)]
pub struct EtaDual {
    pub eta: f64,
    pub e_eta: f64,
    pub v: BipartiteOperator,
    pub f: BipartiteOperator,
    pub w: BipartiteOperator,
    pub x: BipartiteOperator,
    pub solution: SdpSolution,
}

/// One-copy deterministic distillation value and the operator `R` achieving it.
#[derive(Debug, Clone)]
pub struct OneCopyDistill {
    pub value: f64,
    pub r: BipartiteOperator,
    pub solution: SdpSolution,
}

fn op(dim_a: usize, dim_b: usize, m: ComplexMatrix) -> Result<BipartiteOperator> {
    BipartiteOperator::new(dim_a, dim_b, m.hermitian_part())
}

fn pt_matrix(m: &BipartiteOperator) -> ComplexMatrix {
    m.partial_transpose().into_matrix()
}

/// The compiled `η` minimization for one projector, with the map between `(Y, t)` and solver variables.
#[derive(Debug, Clone)]
pub struct EtaPrimalProgram {
    problem: LmiProblem,
    dims: (usize, usize),
    t: usize,
    y: HermVar,
}

impl EtaPrimalProgram {
    /// `min t  s.t.  −Y ⪯ P^{T_B} ⪯ Y,  −tI ⪯ Y^{T_B} ⪯ tI`, as `max −t`.
    pub fn new(p: &SupportProjector) -> Result<Self> {
        let (da, db, n) = (p.dim_a(), p.dim_b(), p.dim());
        let pt = pt_matrix(p.op());
        let mut b = Builder::new(Field::for_data(&[&pt]));
        let t = b.scalar();
        let y = b.hermitian(n);
        let ye = y.expr();
        let yt = ye.clone().partial_transpose(da, db);
        let ti = Expr::scalar_identity(t, n, 1.0);
        b.psd(&ye.clone().plus_constant(&pt.scale(-1.0)))?;
        b.psd(&ye.plus_constant(&pt))?;
        b.psd(&ti.clone().minus(&yt))?;
        b.psd(&ti.plus(&yt))?;
        b.maximize(&[(t, -1.0)]);
        Ok(Self { problem: b.build()?, dims: (da, db), t, y })
    }

    pub fn problem(&self) -> &LmiProblem {
        &self.problem
    }

    /// Solver variables for a candidate `(Y, t)`.
    pub fn encode(&self, y: &BipartiteOperator, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.problem.num_vars()];
        v[self.t] = t;
        self.y.encode(y.matrix(), &mut v);
        v
    }

    /// `(Y, t)` from solver variables.
    pub fn decode(&self, v: &[f64]) -> Result<(BipartiteOperator, f64)> {
        Ok((op(self.dims.0, self.dims.1, self.y.value(v))?, v[self.t]))
    }
}

/// `η(P) = min t  s.t.  −Y ⪯ P^{T_B} ⪯ Y,  −tI ⪯ Y^{T_B} ⪯ tI`; `E_η = −log₂ η`.
pub fn e_eta_primal(p: &SupportProjector, opts: &SolverOptions) -> Result<EtaPrimal> {
    let program = EtaPrimalProgram::new(p)?;
    let sol = solve_checked(program.problem(), opts, "eta primal")?;
    let (y, eta) = program.decode(&sol.y)?;
    Ok(EtaPrimal { eta, e_eta: -eta.log2(), y, solution: sol })
}

/// `η(P) = max tr P(V − F)^{T_B}  s.t.  V + F ⪯ (W − X)^{T_B},  tr(W + X) ≤ 1,  V, F, W, X ⪰ 0`.
pub fn e_eta_dual(p: &SupportProjector, opts: &SolverOptions) -> Result<EtaDual> {
    let (da, db, n) = (p.dim_a(), p.dim_b(), p.dim());
    let pt = pt_matrix(p.op());
    let mut b = Builder::new(Field::for_data(&[&pt]));
    let v = b.hermitian(n);
    let f = b.hermitian(n);
    let w = b.hermitian(n);
    let x = b.hermitian(n);
    let (ve, fe, we, xe) = (v.expr(), f.expr(), w.expr(), x.expr());
    for e in [&ve, &fe, &we, &xe] {
        b.psd(e)?;
    }
    b.psd(&we.clone().minus(&xe).partial_transpose(da, db).minus(&ve).minus(&fe))?;
    let (c, coeffs) = we.plus(&xe).trace();
    let neg: Vec<(usize, f64)> = coeffs.iter().map(|&(i, a)| (i, -a)).collect();
    b.nonneg(1.0 - c, &neg);
    // tr P (V−F)^{T_B} = tr P^{T_B} (V−F)
    let (_, obj) = ve.minus(&fe).trace_against(&pt);
    b.maximize(&obj);
    let problem = b.build()?;
    let sol = solve_checked(&problem, opts, "eta dual")?;
    let eta = sol.primal_value;
    Ok(EtaDual {
        eta,
        e_eta: -eta.log2(),
        v: op(da, db, v.value(&sol.y))?,
        f: op(da, db, f.value(&sol.y))?,
        w: op(da, db, w.value(&sol.y))?,
        x: op(da, db, x.value(&sol.y))?,
        solution: sol,
    })
}

/// `max −log₂ ‖R^{T_B}‖_∞  s.t.  P ⪯ R ⪯ I`.
///
/// For a projector `P` the constraints force `R = P + V Z V†` with `V` spanning the
/// complement of `P` and `0 ⪯ Z ⪯ I`. Solving over `Z` keeps the program strictly
/// feasible, which the direct form is not.
pub fn e1_deterministic_distill(p: &SupportProjector, opts: &SolverOptions) -> Result<OneCopyDistill> {
    let (da, db, n) = (p.dim_a(), p.dim_b(), p.dim());
    let pm = p.matrix();
    let complement = complement_basis(p)?;
    let k = complement.len();
    let vmat = ComplexMatrix::from_fn(n, k, |i, c| complement[c][i]);
    let mut b = Builder::new(Field::for_data(&[pm, &vmat]));
    let s = b.scalar();
    let z = b.hermitian(k);
    let ze = z.expr();
    let re = ze.congruence(&complement, n).plus_constant(pm);
    let rt = re.partial_transpose(da, db);
    let si = Expr::scalar_identity(s, n, 1.0);
    b.psd(&si.clone().minus(&rt))?;
    b.psd(&si.plus(&rt))?;
    if k > 0 {
        b.psd(&ze)?;
        b.psd(&Expr::constant(&ComplexMatrix::identity(k)).minus(&ze))?;
    }
    b.maximize(&[(s, -1.0)]);
    let problem = b.build()?;
    let sol = solve_checked(&problem, opts, "one-copy distillation")?;
    let zv = z.value(&sol.y);
    let lifted = vmat.matmul(&zv)?.matmul(&vmat.adjoint())?;
    let r = pm + &lifted;
    Ok(OneCopyDistill { value: -sol.y[s].log2(), r: op(da, db, r)?, solution: sol })
}

/// Orthonormal basis of the kernel of `P`.
fn complement_basis(p: &SupportProjector) -> Result<Vec<Vec<crate::linalg::C64>>> {
    if p.rank() == p.dim() {
        return Ok(Vec::new());
    }
    let q = BipartiteOperator::identity(p.dim_a(), p.dim_b()).sub(p.op())?;
    SupportProjector::new(q)?.range_basis()
}

/// `min log₂ ‖X^{T_B}‖₁  s.t.  X ⪰ ρ`, via `X^{T_B} = A − B` with `A, B ⪰ 0`.
pub fn e_w(rho: &DensityMatrix, opts: &SolverOptions) -> Result<f64> {
    Ok(e_w_with_solution(rho, opts)?.0)
}

pub fn e_w_with_solution(rho: &DensityMatrix, opts: &SolverOptions) -> Result<(f64, SdpSolution)> {
    let (da, db, n) = (rho.dim_a(), rho.dim_b(), rho.dim());
    let mut b = Builder::new(Field::for_data(&[rho.matrix()]));
    let a = b.hermitian(n);
    let bm = b.hermitian(n);
    let (ae, be) = (a.expr(), bm.expr());
    b.psd(&ae)?;
    b.psd(&be)?;
    b.psd(&ae.clone().minus(&be).partial_transpose(da, db).plus_constant(&rho.matrix().scale(-1.0)))?;
    let (_, tr) = ae.plus(&be).trace();
    let neg: Vec<(usize, f64)> = tr.iter().map(|&(i, c)| (i, -c)).collect();
    b.maximize(&neg);
    let problem = b.build()?;
    let sol = solve_checked(&problem, opts, "E_W")?;
    Ok(((-sol.primal_value).log2(), sol))
}

/// `max tr Pσ  s.t.  σ ⪰ 0,  σ^{T_B} ⪰ 0,  tr σ ≤ 1`.
///
/// The optimum always saturates the trace, so this equals the maximum over PPT states.
pub fn max_ppt_overlap(p: &SupportProjector, opts: &SolverOptions) -> Result<f64> {
    let (da, db, n) = (p.dim_a(), p.dim_b(), p.dim());
    let pm = p.matrix();
    let mut b = Builder::new(Field::for_data(&[pm]));
    let sigma = b.hermitian(n);
    let se = sigma.expr();
    b.psd(&se)?;
    b.psd(&se.clone().partial_transpose(da, db))?;
    let (_, tr) = se.trace();
    let neg: Vec<(usize, f64)> = tr.iter().map(|&(i, c)| (i, -c)).collect();
    b.nonneg(1.0, &neg);
    let (_, obj) = se.trace_against(pm);
    b.maximize(&obj);
    let problem = b.build()?;
    Ok(solve_checked(&problem, opts, "max PPT overlap")?.primal_value)
}

/// Smallest `E_W` over all states supported on `P`.
///
/// States are parametrized as `V σ V†` with `V` an orthonormal basis of the range of `P`;
/// `tr σ ≥ 1` replaces `tr σ = 1` since shrinking `σ` can only lower the objective.
pub fn e_w_subspace(p: &SupportProjector, opts: &SolverOptions) -> Result<f64> {
    let (da, db, n) = (p.dim_a(), p.dim_b(), p.dim());
    let basis = p.range_basis()?;
    let vmat = ComplexMatrix::from_fn(n, basis.len(), |i, k| basis[k][i]);
    let mut b = Builder::new(Field::for_data(&[p.matrix(), &vmat]));
    let a = b.hermitian(n);
    let bm = b.hermitian(n);
    let sigma = b.hermitian(basis.len());
    let (ae, be, se) = (a.expr(), bm.expr(), sigma.expr());
    b.psd(&ae)?;
    b.psd(&be)?;
    b.psd(&se)?;
    let rho = se.congruence(&basis, n);
    b.psd(&ae.clone().minus(&be).partial_transpose(da, db).minus(&rho))?;
    let (_, tr_sigma) = se.trace();
    b.nonneg(-1.0, &tr_sigma);
    let (_, tr) = ae.plus(&be).trace();
    let neg: Vec<(usize, f64)> = tr.iter().map(|&(i, c)| (i, -c)).collect();
    b.maximize(&neg);
    let problem = b.build()?;
    let sol = solve_checked(&problem, opts, "subspace E_W")?;
    Ok((-sol.primal_value).log2())
}

/// The norm programs are compared with eigenvalue norms in absolute terms, so their
/// relative tolerances are capped here.
const NORM_TOL: f64 = 1e-10;

fn norm_options(opts: &SolverOptions) -> SolverOptions {
    SolverOptions { gap_tol: opts.gap_tol.min(NORM_TOL), feas_tol: opts.feas_tol.min(NORM_TOL), ..*opts }
}

/// `‖M‖_∞ = min t  s.t.  −tI ⪯ M ⪯ tI`.
pub fn op_norm_lmi(m: &ComplexMatrix, opts: &SolverOptions) -> Result<f64> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut b = Builder::new(Field::for_data(&[m]));
    let t = b.scalar();
    let ti = Expr::scalar_identity(t, n, 1.0);
    b.psd(&ti.clone().plus_constant(&m.scale(-1.0)))?;
    b.psd(&ti.plus_constant(m))?;
    b.maximize(&[(t, -1.0)]);
    let problem = b.build()?;
    Ok(solve_checked(&problem, &norm_options(opts), "operator norm")?.y[t])
}

/// `‖M‖₁ = min tr(A + B)  s.t.  A − B = M,  A, B ⪰ 0`, with `B` eliminated.
pub fn trace_norm_lmi(m: &ComplexMatrix, opts: &SolverOptions) -> Result<f64> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut b = Builder::new(Field::for_data(&[m]));
    let a = b.hermitian(n);
    let ae = a.expr();
    b.psd(&ae)?;
    b.psd(&ae.clone().plus_constant(&m.scale(-1.0)))?;
    // tr(A + B) = 2 tr A − tr M
    let (_, tr) = ae.trace();
    let neg: Vec<(usize, f64)> = tr.iter().map(|&(i, c)| (i, -2.0 * c)).collect();
    b.maximize(&neg);
    let problem = b.build()?;
    let sol = solve_checked(&problem, &norm_options(opts), "trace norm")?;
    Ok(-sol.primal_value - m.trace().re)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let defect = m.hermiticity_defect();
    if defect > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}
