//! Command implementations behind the `ppt-bounds` binary.
//!
//! Every command writes to caller-supplied streams and returns its exit code,
//! so the same code paths are exercised by the binary and by the tests.

pub mod cli;
pub mod format;
pub mod statefile;

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::certificates::{
    alpha_witness, combine_dual, combine_primal, cost_witness_rho_v, cost_witness_rho_v_with, cost_witness_y,
    distill_witness_rho_v, ranktwo_witness, EtaDualPoint, WitnessCheck,
};
use crate::error::Error;
use crate::linalg::{BipartiteOperator, C64};
use crate::measures::{
    e_eta_dual, e_eta_primal, e_w, full_report, log_negativity, BoundReport, ReportOptions, IRREVERSIBILITY_MARGIN,
};
use crate::par::Execution;
use crate::sdp::SolverOptions;
use crate::states::{make_rho_alpha, make_rho_v, parse_state_spec, NamedState};
use cli::{Cli, Command, GlobalOpts, StateCommand};
use format::{fmt_g9, round_json};
use statefile::{read_state, StateFile, FILE_TOL};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_CERTIFICATE: u8 = 4;

/// Runs a parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let g = &cli.global;
    let result = match &cli.command {
        Command::Bounds { state, json } => cmd_bounds(g, state, json.as_deref(), out, err),
        Command::ScanAlpha { from, to, steps, out: path } => {
            cmd_scan_alpha(g, *from, *to, *steps, path.as_deref(), out, err)
        }
        Command::Verify { tolerance, out: path, inject_corrupt } => {
            cmd_verify(g, *tolerance, path.as_deref(), *inject_corrupt, out)
        }
        Command::Additivity { state1, state2, max_dim } => cmd_additivity(g, state1, state2, *max_dim, out),
        Command::State(StateCommand::Emit { state, out: path }) => cmd_state_emit(g, state, path.as_deref(), out),
        Command::State(StateCommand::Check { path, tolerance }) => cmd_state_check(g, path, *tolerance, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

/// A failed command: what to print and which exit code to use.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn io_error(e: std::io::Error) -> Failure {
    input_error(format!("i/o: {e}"))
}

fn classify(e: Error) -> Failure {
    let code = match e {
        Error::SolverFailed(_) | Error::NoConvergence(_) => EXIT_SOLVER,
        Error::InfeasibleInput(_) => EXIT_CERTIFICATE,
        _ => EXIT_INPUT,
    };
    Failure { code, message: e.to_string() }
}

type CmdResult = Result<u8, Failure>;

impl GlobalOpts {
    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions { gap_tol: self.gap_tol, feas_tol: self.feas_tol, execution: self.execution(), ..Default::default() }
    }

    pub fn report(&self) -> ReportOptions {
        ReportOptions { solver: self.solver(), execution: self.execution(), ..Default::default() }
    }
}

/// Resolves a state name, or reads a state file when the argument names an existing file.
pub fn resolve_state(spec: &str, support_cutoff: f64) -> Result<NamedState, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let rho = read_state(path, FILE_TOL).map_err(|e| input_error(e.to_string()))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("file");
        return NamedState::from_state(stem, vec![], rho, support_cutoff).map_err(classify);
    }
    parse_state_spec(spec).map_err(|e| input_error(format!("{e} (and no file named '{spec}')")))
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(io_error),
        None => out.write_all(text.as_bytes()).map_err(io_error),
    }
}

fn rounded_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report serializes");
    round_json(&mut v);
    serde_json::to_string_pretty(&v).expect("json value serializes") + "\n"
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), fmt_g9)
}

/// Human-readable table of a report.
pub fn render_report(r: &BoundReport) -> String {
    let mut s = String::new();
    let rows = [
        ("state", r.state.clone()),
        ("dims", format!("{}x{}", r.dim_a, r.dim_b)),
        ("E_N", opt(r.e_n)),
        ("E_W", opt(r.e_w)),
        ("E_eta (primal)", opt(r.e_eta_primal)),
        ("E_eta (dual)", opt(r.e_eta_dual)),
        ("E1_0DPPT", opt(r.e1_0dppt)),
        ("-log max overlap", opt(r.max_overlap)),
        ("eta", opt(r.eta_value)),
        ("gap E_eta - E_W", opt(r.gap())),
    ];
    for (k, v) in rows {
        s.push_str(&format!("{k:<18} {v}\n"));
    }
    for c in &r.certificates {
        let mark = if c.passed { "pass" } else { "FAIL" };
        s.push_str(&format!("{:<18} {mark} {} (max violation {})\n", "certificate", c.name, fmt_g9(c.max_violation())));
    }
    for v in &r.invariant_violations {
        s.push_str(&format!("{:<18} {v}\n", "invariant"));
    }
    for e in &r.errors {
        s.push_str(&format!("{:<18} {e}\n", "error"));
    }
    let verdict = if r.irreversible { "IRREVERSIBLE" } else { "NOT ESTABLISHED" };
    s.push_str(&format!("{:<18} {verdict}\n", "verdict"));
    s
}

pub fn cmd_bounds(g: &GlobalOpts, spec: &str, json: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let state = resolve_state(spec, g.support_cutoff)?;
    let report = full_report(&state, &g.report());
    out.write_all(render_report(&report).as_bytes()).map_err(io_error)?;
    if let Some(p) = json {
        fs::write(p, rounded_json(&report)).map_err(io_error)?;
    }
    if !report.is_complete() {
        let _ = writeln!(err, "error: {} bound(s) failed", report.errors.len());
        return Ok(EXIT_SOLVER);
    }
    if !report.invariant_violations.is_empty() {
        let _ = writeln!(err, "error: report invariants violated");
        return Ok(EXIT_SOLVER);
    }
    Ok(EXIT_OK)
}

/// One row of the α scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub alpha: f64,
    pub e_n: f64,
    pub e_w: f64,
    pub e_eta: f64,
    /// `−log₂(1−α)`.
    pub eta_lower: f64,
    pub gap: f64,
    pub irreversible: bool,
}

impl ScanRow {
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.e_w > self.e_n + 1e-6 {
            v.push(format!("alpha={}: E_W {} > E_N {}", self.alpha, self.e_w, self.e_n));
        }
        if self.e_eta < self.eta_lower - 1e-6 {
            v.push(format!("alpha={}: E_eta {} < -log(1-alpha) {}", self.alpha, self.e_eta, self.eta_lower));
        }
        v
    }
}

/// Evenly spaced grid including both endpoints.
pub fn alpha_grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect()
}

pub fn scan_row(alpha: f64, opts: &SolverOptions) -> crate::Result<ScanRow> {
    let s = make_rho_alpha(alpha)?;
    let e_n = log_negativity(&s.state)?;
    let e_w = e_w(&s.state, opts)?;
    let e_eta = e_eta_primal(&s.projector, opts)?.e_eta;
    Ok(ScanRow {
        alpha,
        e_n,
        e_w,
        e_eta,
        eta_lower: -(1.0 - alpha).log2(),
        gap: e_eta - e_w,
        irreversible: e_w + IRREVERSIBILITY_MARGIN < e_eta,
    })
}

/// Rows are computed in parallel and emitted in α order.
pub fn scan_alpha(from: f64, to: f64, steps: usize, opts: &SolverOptions, exec: Execution) -> Vec<(f64, crate::Result<ScanRow>)> {
    let grid = alpha_grid(from, to, steps);
    exec.map(&grid, |&a| (a, scan_row(a, opts)))
}

pub fn scan_csv(rows: &[(f64, crate::Result<ScanRow>)]) -> String {
    let with_status = rows.iter().any(|(_, r)| r.is_err());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["alpha", "e_n", "e_w", "e_eta", "eta_lower", "gap", "irreversible"];
    if with_status {
        header.push("status");
    }
    w.write_record(&header).expect("in-memory csv");
    for (alpha, r) in rows {
        let mut rec = match r {
            Ok(r) => vec![
                fmt_g9(r.alpha),
                fmt_g9(r.e_n),
                fmt_g9(r.e_w),
                fmt_g9(r.e_eta),
                fmt_g9(r.eta_lower),
                fmt_g9(r.gap),
                r.irreversible.to_string(),
            ],
            Err(_) => {
                let mut v = vec![fmt_g9(*alpha)];
                v.extend(std::iter::repeat_n(String::new(), 6));
                v
            }
        };
        if with_status {
            rec.push(match r {
                Ok(_) => "ok".into(),
                Err(e) => format!("failed: {e}"),
            });
        }
        w.write_record(&rec).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8 csv")
}

pub fn cmd_scan_alpha(
    g: &GlobalOpts,
    from: f64,
    to: f64,
    steps: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    if !(from > 0.0 && from <= to && to < 1.0) {
        return Err(input_error(format!("need 0 < from <= to < 1, got from={from}, to={to}")));
    }
    if steps < 2 {
        return Err(input_error(format!("need at least 2 steps, got {steps}")));
    }
    let rows = scan_alpha(from, to, steps, &g.solver(), g.execution());
    write_output(path, &scan_csv(&rows), out)?;
    let mut code = EXIT_OK;
    for (alpha, r) in &rows {
        match r {
            Ok(row) => {
                for v in row.violations() {
                    let _ = writeln!(err, "error: {v}");
                    code = EXIT_SOLVER;
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: alpha={alpha}: {e}");
                code = EXIT_SOLVER;
            }
        }
    }
    Ok(code)
}

/// The 10×10 `(p, θ)` grid on `(0,1) × [0, π/2]`.
pub fn ranktwo_grid() -> Vec<(f64, f64)> {
    let mut g = Vec::with_capacity(100);
    for i in 0..10 {
        for j in 0..10 {
            let p = (i as f64 + 1.0) / 11.0;
            let theta = std::f64::consts::FRAC_PI_2 * j as f64 / 9.0;
            g.push((p, theta));
        }
    }
    g
}

/// α values checked by `verify`: a coarse sweep of `(0, 1/2]` plus the 17-point window.
pub fn verify_alpha_grid() -> Vec<f64> {
    let mut g: Vec<f64> = (1..=10).map(|k| 0.05 * k as f64).collect();
    g.extend(alpha_grid(0.42, 0.50, 17));
    g
}

/// Every certificate `verify` runs, judged at `tol`.
pub fn all_certificates(opts: &SolverOptions, exec: Execution, tol: f64) -> Vec<crate::Result<WitnessCheck>> {
    let mut checks: Vec<crate::Result<WitnessCheck>> = vec![Ok(cost_witness_rho_v()), Ok(distill_witness_rho_v())];
    checks.extend(exec.map(&verify_alpha_grid(), |&a| alpha_witness(a)));
    checks.extend(exec.map(&ranktwo_grid(), |&(p, t)| ranktwo_witness(p, t)));

    let p = make_rho_v().projector;
    let y = cost_witness_y();
    checks.push(combine_primal(&y, 0.5, &p, &y, 0.5, &p).map(|c| c.check));
    checks.push(e_eta_dual(&p, opts).and_then(|d| {
        let point = EtaDualPoint { v: d.v, f: d.f, w: d.w, x: d.x };
        combine_dual(&point, &p, &point, &p).map(|c| c.check)
    }));
    checks
        .into_iter()
        .map(|c| {
            c.map(|c| {
                // Combination checks carry a tolerance widened by their inputs' own violations.
                let t = if c.name.starts_with("combine") { c.tolerance.max(tol) } else { tol };
                c.with_tolerance(t)
            })
        })
        .collect()
}

/// A copy of the first witness with one entry perturbed by `1e-6`.
fn corrupted_witness() -> WitnessCheck {
    let mut m = cost_witness_y().into_matrix();
    m[(0, 0)] += C64::new(1e-6, 0.0);
    let y = BipartiteOperator::new(3, 3, m).expect("same shape");
    let mut c = cost_witness_rho_v_with(&y);
    c.name = "corrupted cost_witness_rho_v".into();
    c
}

pub fn cmd_verify(g: &GlobalOpts, tol: f64, path: Option<&Path>, inject_corrupt: bool, out: &mut dyn Write) -> CmdResult {
    if !(tol >= 0.0) {
        return Err(input_error(format!("tolerance must be non-negative, got {tol}")));
    }
    let mut results = all_certificates(&g.solver(), g.execution(), tol);
    if inject_corrupt {
        results.push(Ok(corrupted_witness().with_tolerance(tol)));
    }
    let mut failed = 0;
    let mut checks = Vec::new();
    for r in results {
        match r {
            Ok(c) => {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{mark} {} (max violation {})", c.name, fmt_g9(c.max_violation())).map_err(io_error)?;
                if !c.passed {
                    failed += 1;
                    for claim in c.failed_claims() {
                        writeln!(out, "    {}: {}", claim.description, fmt_g9(claim.violation)).map_err(io_error)?;
                    }
                }
                checks.push(c);
            }
            Err(e) => {
                failed += 1;
                writeln!(out, "FAIL {e}").map_err(io_error)?;
            }
        }
    }
    if let Some(p) = path {
        fs::write(p, rounded_json(&checks)).map_err(io_error)?;
    }
    if failed == 0 {
        writeln!(out, "ALL PASS ({} checks)", checks.len()).map_err(io_error)?;
        Ok(EXIT_OK)
    } else {
        writeln!(out, "{failed} check(s) failed").map_err(io_error)?;
        Ok(EXIT_CERTIFICATE)
    }
}

/// `E_η` of two states and of their product.
#[derive(Debug, Clone, Serialize)]
pub struct AdditivityReport {
    pub state1: String,
    pub state2: String,
    pub e_eta1: f64,
    pub e_eta2: f64,
    pub e_eta_product: f64,
    /// `|E_η(ρ₁⊗ρ₂) − E_η(ρ₁) − E_η(ρ₂)|`.
    pub defect: f64,
}

/// Defect allowed before additivity is reported as a numerical failure.
pub const ADDITIVITY_TOL: f64 = 1e-4;

pub fn additivity(s1: &NamedState, s2: &NamedState, max_dim: usize, opts: &SolverOptions) -> crate::Result<AdditivityReport> {
    let dim = s1.state.dim() * s2.state.dim();
    if dim > max_dim {
        return Err(Error::DimensionGuard(dim, max_dim));
    }
    let product = s1.kron(s2)?;
    let e1 = e_eta_primal(&s1.projector, opts)?.e_eta;
    let e2 = e_eta_primal(&s2.projector, opts)?.e_eta;
    let e12 = e_eta_primal(&product.projector, opts)?.e_eta;
    Ok(AdditivityReport {
        state1: s1.label(),
        state2: s2.label(),
        e_eta1: e1,
        e_eta2: e2,
        e_eta_product: e12,
        defect: (e12 - e1 - e2).abs(),
    })
}

pub fn cmd_additivity(g: &GlobalOpts, spec1: &str, spec2: &str, max_dim: usize, out: &mut dyn Write) -> CmdResult {
    let s1 = resolve_state(spec1, g.support_cutoff)?;
    let s2 = resolve_state(spec2, g.support_cutoff)?;
    let r = additivity(&s1, &s2, max_dim, &g.solver()).map_err(classify)?;
    let lines = [
        (format!("E_eta({})", r.state1), r.e_eta1),
        (format!("E_eta({})", r.state2), r.e_eta2),
        ("E_eta(product)".to_string(), r.e_eta_product),
        ("defect".to_string(), r.defect),
    ];
    for (k, v) in lines {
        writeln!(out, "{k:<24} {}", fmt_g9(v)).map_err(io_error)?;
    }
    if r.defect > ADDITIVITY_TOL {
        return Err(Failure { code: EXIT_SOLVER, message: format!("additivity defect {} exceeds {ADDITIVITY_TOL}", r.defect) });
    }
    Ok(EXIT_OK)
}

pub fn cmd_state_emit(g: &GlobalOpts, spec: &str, path: Option<&Path>, out: &mut dyn Write) -> CmdResult {
    let s = resolve_state(spec, g.support_cutoff)?;
    write_output(path, &(StateFile::from_state(&s.state).to_json() + "\n"), out)?;
    Ok(EXIT_OK)
}

pub fn cmd_state_check(g: &GlobalOpts, path: &Path, tol: f64, out: &mut dyn Write) -> CmdResult {
    let rho = read_state(path, tol).map_err(|e| input_error(e.to_string()))?;
    let s = NamedState::from_state("file", vec![], rho, g.support_cutoff).map_err(classify)?;
    let e_n = log_negativity(&s.state).map_err(classify)?;
    writeln!(out, "ok {}x{} rank {} E_N {}", s.state.dim_a(), s.state.dim_b(), s.projector.rank(), fmt_g9(e_n))
        .map_err(io_error)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = alpha_grid(0.42, 0.5, 17);
        assert_eq!(g.len(), 17);
        assert_eq!(g[0], 0.42);
        assert!((g[16] - 0.5).abs() < 1e-15);
        let r = ranktwo_grid();
        assert_eq!(r.len(), 100);
        assert!(r.iter().all(|&(p, t)| p > 0.0 && p < 1.0 && (0.0..=std::f64::consts::FRAC_PI_2).contains(&t)));
    }

    #[test]
    fn csv_header_and_status_column() {
        let row = ScanRow { alpha: 0.5, e_n: 0.75, e_w: 0.7, e_eta: 1.0, eta_lower: 1.0, gap: 0.3, irreversible: true };
        let ok = scan_csv(&[(0.5, Ok(row))]);
        assert!(ok.starts_with("alpha,e_n,e_w,e_eta,eta_lower,gap,irreversible\n0.5,0.75,0.7,1,1,0.3,true\n"));
        let bad = scan_csv(&[(0.5, Err(Error::SolverFailed("x".into())))]);
        assert!(bad.starts_with("alpha,e_n,e_w,e_eta,eta_lower,gap,irreversible,status\n"));
    }
}
