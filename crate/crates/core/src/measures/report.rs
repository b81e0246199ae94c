use std::time::Instant;

use serde::Serialize;

use super::{e1_deterministic_distill, e_eta_dual, e_eta_primal, e_w, log_negativity, max_ppt_overlap};
use crate::certificates::{
    alpha_witness, check_distill, check_eta_dual, check_eta_primal, cost_witness_rho_v, distill_witness_rho_v,
    ranktwo_witness, EtaDualPoint, WitnessCheck,
};
use crate::error::Result;
use crate::par::Execution;
use crate::sdp::SolverOptions;
use crate::states::NamedState;

/// `E_W + margin < E_η` is required before declaring irreversibility.
pub const IRREVERSIBILITY_MARGIN: f64 = 1e-6;

/// Slack allowed between bounds that must be ordered.
pub const ORDERING_TOL: f64 = 1e-6;

/// Solver-produced witnesses are interior-point iterates, so they are judged at this looser level.
pub const SOLVER_WITNESS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub struct ReportOptions {
    pub solver: SolverOptions,
    /// How the independent bounds are scheduled.
    pub execution: Execution,
    /// The `(V, F, W, X)` program has four times the variables of the primal; skip it above this dimension.
    pub dual_max_dim: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), execution: Execution::default(), dual_max_dim: 36 }
    }
}

/// All bounds for one state. Missing values mean the corresponding solve failed or was skipped.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub state: String,
    pub dim_a: usize,
    pub dim_b: usize,
    pub e_n: Option<f64>,
    pub e_w: Option<f64>,
    pub e_eta_primal: Option<f64>,
    pub e_eta_dual: Option<f64>,
    pub e1_0dppt: Option<f64>,
    /// `−log₂ max tr Pσ` over PPT states.
    pub max_overlap: Option<f64>,
    /// `η = 2^{−E_η}` from the primal program.
    pub eta_value: Option<f64>,
    pub certificates: Vec<WitnessCheck>,
    pub irreversible: bool,
    pub invariant_violations: Vec<String>,
    pub errors: Vec<String>,
    /// Wall-clock seconds per bound; excluded from serialized output to keep it reproducible.
    #[serde(skip)]
    pub timings: Vec<(String, f64)>,
}

impl BoundReport {
    /// `E_η − E_W`, when both are known.
    pub fn gap(&self) -> Option<f64> {
        Some(self.e_eta_primal? - self.e_w?)
    }

    pub fn is_complete(&self) -> bool {
        self.errors.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Negativity,
    Ew,
    EtaPrimal,
    EtaDual,
    OneCopy,
    Overlap,
}

enum Outcome {
    Value(f64),
    Eta(f64, f64, WitnessCheck),
    EtaDual(f64, WitnessCheck),
    OneCopy(f64, WitnessCheck),
    Skipped,
}

fn evaluate(bound: Bound, s: &NamedState, opts: &ReportOptions) -> Result<Outcome> {
    let p = &s.projector;
    let so = &opts.solver;
    Ok(match bound {
        Bound::Negativity => Outcome::Value(log_negativity(&s.state)?),
        Bound::Ew => Outcome::Value(e_w(&s.state, so)?),
        Bound::EtaPrimal => {
            let r = e_eta_primal(p, so)?;
            let check = check_eta_primal("solver eta primal", p.op(), &r.y, r.eta)?.with_tolerance(SOLVER_WITNESS_TOL);
            Outcome::Eta(r.e_eta, r.eta, check)
        }
        Bound::EtaDual if p.dim() > opts.dual_max_dim => Outcome::Skipped,
        Bound::EtaDual => {
            let r = e_eta_dual(p, so)?;
            let point = EtaDualPoint { v: r.v, f: r.f, w: r.w, x: r.x };
            let check = check_eta_dual("solver eta dual", p.op(), &point)?.with_tolerance(SOLVER_WITNESS_TOL);
            Outcome::EtaDual(r.e_eta, check)
        }
        Bound::OneCopy => {
            let r = e1_deterministic_distill(p, so)?;
            let s_val = 2f64.powf(-r.value);
            let check = check_distill("solver one-copy distillation", p.op(), &r.r, s_val)?
                .with_tolerance(SOLVER_WITNESS_TOL);
            Outcome::OneCopy(r.value, check)
        }
        Bound::Overlap => Outcome::Value(-max_ppt_overlap(p, so)?.log2()),
    })
}

/// Closed-form witnesses that apply to the state's family, if any.
fn family_certificates(s: &NamedState) -> Vec<Result<WitnessCheck>> {
    match (s.name.as_str(), s.params.as_slice()) {
        ("rho_v", []) => vec![Ok(cost_witness_rho_v()), Ok(distill_witness_rho_v())],
        ("rho_alpha", [a]) if *a <= 0.5 => vec![alpha_witness(*a)],
        ("ranktwo", [p, theta]) => vec![ranktwo_witness(*p, *theta)],
        _ => Vec::new(),
    }
}

/// Computes every bound, checks the witnesses and the ordering invariants.
///
/// Individual failures are recorded in `errors` instead of aborting the report.
pub fn full_report(s: &NamedState, opts: &ReportOptions) -> BoundReport {
    let jobs = [Bound::Negativity, Bound::Ew, Bound::EtaPrimal, Bound::EtaDual, Bound::OneCopy, Bound::Overlap];
    let results = opts.execution.map(&jobs, |&b| {
        let start = Instant::now();
        let r = evaluate(b, s, opts);
        (b, r, start.elapsed().as_secs_f64())
    });

    let mut report = BoundReport {
        state: s.label(),
        dim_a: s.state.dim_a(),
        dim_b: s.state.dim_b(),
        e_n: None,
        e_w: None,
        e_eta_primal: None,
        e_eta_dual: None,
        e1_0dppt: None,
        max_overlap: None,
        eta_value: None,
        certificates: Vec::new(),
        irreversible: false,
        invariant_violations: Vec::new(),
        errors: Vec::new(),
        timings: Vec::new(),
    };
    for (bound, result, secs) in results {
        report.timings.push((format!("{bound:?}"), secs));
        match result {
            Err(e) => report.errors.push(format!("{bound:?}: {e}")),
            Ok(Outcome::Skipped) => {}
            Ok(Outcome::Value(v)) => match bound {
                Bound::Negativity => report.e_n = Some(v),
                Bound::Ew => report.e_w = Some(v),
                Bound::Overlap => report.max_overlap = Some(v),
                _ => unreachable!("scalar outcome for {bound:?}"),
            },
            Ok(Outcome::Eta(e, eta, check)) => {
                report.e_eta_primal = Some(e);
                report.eta_value = Some(eta);
                report.certificates.push(check);
            }
            Ok(Outcome::EtaDual(e, check)) => {
                report.e_eta_dual = Some(e);
                report.certificates.push(check);
            }
            Ok(Outcome::OneCopy(v, check)) => {
                report.e1_0dppt = Some(v);
                report.certificates.push(check);
            }
        }
    }
    for c in family_certificates(s) {
        match c {
            Ok(c) => report.certificates.push(c),
            Err(e) => report.errors.push(format!("certificate: {e}")),
        }
    }

    if let (Some(w), Some(eta)) = (report.e_w, report.e_eta_primal) {
        report.irreversible = w + IRREVERSIBILITY_MARGIN < eta;
    }
    report.invariant_violations = invariant_violations(&report);
    report
}

fn invariant_violations(r: &BoundReport) -> Vec<String> {
    let mut out = Vec::new();
    let mut le = |what: &str, a: Option<f64>, b: Option<f64>| {
        if let (Some(a), Some(b)) = (a, b) {
            if a > b + ORDERING_TOL {
                out.push(format!("{what}: {a} > {b}"));
            }
        }
    };
    le("E1 <= E_W", r.e1_0dppt, r.e_w);
    le("E_W <= E_N", r.e_w, r.e_n);
    le("E_eta <= -log max overlap", r.e_eta_primal, r.max_overlap);
    if let (Some(a), Some(b)) = (r.e_eta_primal, r.e_eta_dual) {
        if (a - b).abs() > ORDERING_TOL {
            out.push(format!("primal/dual E_eta disagree: {a} vs {b}"));
        }
    }
    for c in &r.certificates {
        if !c.passed {
            out.push(format!("certificate {} failed (max violation {:.3e})", c.name, c.max_violation()));
        }
    }
    out
}
