//! Acceptance checks, one line per criterion. Runs without the libtest harness.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{random_full_rank, random_hermitian, random_rank_two, rng};
use ppt_bounds::app::{additivity, ranktwo_grid, scan_alpha};
use ppt_bounds::certificates::{cost_witness_rho_v, ranktwo_witness};
use ppt_bounds::linalg::{op_norm, relative_entropy, trace_norm, DensityMatrix};
use ppt_bounds::measures::{
    e1_deterministic_distill, e_eta_dual, e_eta_primal, e_w, full_report, log_negativity, op_norm_lmi,
    trace_norm_lmi, ReportOptions,
};
use ppt_bounds::par::Execution;
use ppt_bounds::sdp::SolverOptions;
use ppt_bounds::states::{make_antisymmetric_state, make_ranktwo_antisym, make_rho_v, make_tau, parse_state_spec};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() <= tol, || format!("{what} = {got:.12}, expected {want:.12} within {tol:e}"))
}

fn e_rho_v_eta() -> Outcome {
    let s = make_rho_v();
    let opts = SolverOptions::default();
    let p = e_eta_primal(&s.projector, &opts).map_err(|e| e.to_string())?;
    let d = e_eta_dual(&s.projector, &opts).map_err(|e| e.to_string())?;
    close("primal E_eta", p.e_eta, 1.0, 1e-6)?;
    close("dual E_eta", d.e_eta, 1.0, 1e-6)?;
    let w = cost_witness_rho_v();
    ensure(w.max_violation() <= 1e-10, || format!("witness violation {:e}", w.max_violation()))?;
    Ok(format!("primal {:.9} dual {:.9} witness {:.1e}", p.e_eta, d.e_eta, w.max_violation()))
}

fn e_rho_v_negativity() -> Outcome {
    let s = make_rho_v();
    let want = (1.0 + 0.5f64.sqrt()).log2();
    let en = log_negativity(&s.state).map_err(|e| e.to_string())?;
    close("E_N", en, want, 1e-9)?;
    let e1 = e1_deterministic_distill(&s.projector, &SolverOptions::default()).map_err(|e| e.to_string())?.value;
    close("E1", e1, want, 1e-6)?;
    Ok(format!("E_N {en:.9} E1 {e1:.9}"))
}

fn e_rho_v_report() -> Outcome {
    let r = full_report(&make_rho_v(), &ReportOptions::default());
    ensure(r.errors.is_empty(), || format!("errors {:?}", r.errors))?;
    let gap = r.gap().unwrap_or(f64::NAN);
    ensure(r.irreversible && gap >= 0.22, || format!("irreversible {} gap {gap}", r.irreversible))?;
    Ok(format!("gap {gap:.9}"))
}

fn e_scan() -> Outcome {
    const GOLDEN: [(f64, f64); 17] = [
        (0.763834032, 0.785875194),
        (0.764776353, 0.798366138),
        (0.765655971, 0.810966174),
        (0.766473277, 0.823677225),
        (0.76722863, 0.836501265),
        (0.76792236, 0.84944032),
        (0.76855477, 0.862496472),
        (0.769126135, 0.875671861),
        (0.769636701, 0.888968683),
        (0.770086687, 0.9023892),
        (0.770476288, 0.915935732),
        (0.77080567, 0.929610671),
        (0.771074973, 0.943416471),
        (0.771284313, 0.957355662),
        (0.771433777, 0.971430846),
        (0.771523431, 0.985644695),
        (0.771553311, 0.999999998),
    ];
    let rows = scan_alpha(0.42, 0.50, 17, &SolverOptions::default(), Execution::default());
    let mut min_gap = f64::INFINITY;
    for ((alpha, row), (gw, geta)) in rows.iter().zip(GOLDEN) {
        let row = row.as_ref().map_err(|e| format!("alpha {alpha}: {e}"))?;
        let en = (1.0 + (2.0 * alpha * (1.0 - alpha)).sqrt()).log2();
        ensure(row.e_w <= en + 1e-6, || format!("alpha {alpha}: E_W {} > E_N {en}", row.e_w))?;
        ensure(row.e_eta >= -(1.0 - alpha).log2() - 1e-6, || format!("alpha {alpha}: E_eta {}", row.e_eta))?;
        ensure(row.e_w < row.e_eta, || format!("alpha {alpha}: no gap"))?;
        close(&format!("E_W({alpha})"), row.e_w, gw, 1e-7)?;
        close(&format!("E_eta({alpha})"), row.e_eta, geta, 1e-7)?;
        min_gap = min_gap.min(row.e_eta - row.e_w);
    }
    Ok(format!("{} rows, min gap {min_gap:.9}", rows.len()))
}

fn e_antisymmetric() -> Outcome {
    let s = make_antisymmetric_state();
    let eta = e_eta_primal(&s.projector, &SolverOptions::default()).map_err(|e| e.to_string())?.e_eta;
    close("E_eta", eta, 1.5f64.log2(), 1e-6)?;
    let en = log_negativity(&s.state).map_err(|e| e.to_string())?;
    close("E_N", en, (5.0f64 / 3.0).log2(), 1e-9)?;
    Ok(format!("E_eta {eta:.9} E_N {en:.9}"))
}

fn e_additivity() -> Outcome {
    let started = Instant::now();
    let names = ["rho_v", "rho_alpha:0.45", "maxent:2", "product:2"];
    let states: Vec<_> = names.iter().map(|n| parse_state_spec(n).unwrap()).collect();
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for i in 0..states.len() {
        for j in i..states.len() {
            if states[i].state.dim() * states[j].state.dim() > 36 {
                continue;
            }
            let r = additivity(&states[i], &states[j], 36, &opts).map_err(|e| e.to_string())?;
            ensure(r.defect <= 1e-5, || format!("{} x {}: defect {:e}", names[i], names[j], r.defect))?;
            worst = worst.max(r.defect);
            pairs += 1;
        }
    }
    let small = started.elapsed();
    ensure(small < Duration::from_secs(60), || format!("small pairs took {small:?}"))?;
    let v = make_rho_v();
    let r = additivity(&v, &v, 81, &opts).map_err(|e| e.to_string())?;
    ensure(r.defect <= 1e-4, || format!("rho_v x rho_v: defect {:e}", r.defect))?;
    Ok(format!("{pairs} pairs max defect {worst:.1e} in {:.1}s; rho_v x rho_v defect {:.1e}", small.as_secs_f64(), r.defect))
}

fn e_ranktwo_grid() -> Outcome {
    let grid = ranktwo_grid();
    let mut worst_norm: f64 = 0.0;
    for &(p, theta) in &grid {
        let w = ranktwo_witness(p, theta).map_err(|e| e.to_string())?;
        ensure(w.passed, || format!("p {p} theta {theta}: {:?}", w.failed_claims()))?;
        let s = make_ranktwo_antisym(p, theta).map_err(|e| e.to_string())?;
        let tn = trace_norm(s.state.op().partial_transpose().matrix()).map_err(|e| e.to_string())?;
        ensure(tn < 2.0 - 1e-9, || format!("p {p} theta {theta}: trace norm {tn}"))?;
        worst_norm = worst_norm.max(tn);
    }
    Ok(format!("{} points, max trace norm {worst_norm:.9}", grid.len()))
}

fn e_random() -> Outcome {
    let opts = SolverOptions::default();
    let mut r = rng(2024);
    let states: Vec<_> = (0..50).map(|_| random_rank_two(&mut r)).collect();
    let results = Execution::default().map(&states, |s| -> Result<(), String> {
        let err = |e: ppt_bounds::Error| e.to_string();
        let p = e_eta_primal(&s.projector, &opts).map_err(err)?.e_eta;
        let d = e_eta_dual(&s.projector, &opts).map_err(err)?.e_eta;
        close("primal - dual", p, d, 1e-6)?;
        let e1 = e1_deterministic_distill(&s.projector, &opts).map_err(err)?.value;
        let ew = e_w(&s.state, &opts).map_err(err)?;
        let en = log_negativity(&s.state).map_err(err)?;
        ensure(e1 <= ew + 1e-6 && ew <= en + 1e-6, || format!("ordering E1 {e1} E_W {ew} E_N {en}"))
    });
    results.into_iter().collect::<Result<Vec<_>, _>>()?;

    for _ in 0..20 {
        let m = random_hermitian(&mut r, 9);
        let err = |e: ppt_bounds::Error| e.to_string();
        close("op norm", op_norm_lmi(&m, &opts).map_err(err)?, op_norm(&m).map_err(err)?, 1e-7)?;
        close("trace norm", trace_norm_lmi(&m, &opts).map_err(err)?, trace_norm(&m).map_err(err)?, 1e-7)?;
    }

    for k in 0..100 {
        let rho = random_full_rank(&mut r, 3, 3);
        let sigma = random_full_rank(&mut r, 3, 3);
        let p = random_rank_two(&mut r).projector;
        let pinched = |d: &DensityMatrix| DensityMatrix::new(d.op().pinch(p.op()).unwrap()).unwrap();
        let before = relative_entropy(&rho, &sigma).map_err(|e| e.to_string())?;
        let after = relative_entropy(&pinched(&rho), &pinched(&sigma)).map_err(|e| e.to_string())?;
        ensure(after <= before + 1e-8, || format!("pair {k}: {after} > {before}"))?;
    }
    Ok("50 rank-2 states, 20 norm pairs, 100 pinching pairs".into())
}

fn e_relative_entropy() -> Outcome {
    let s = relative_entropy(&make_rho_v().state, &make_tau()).map_err(|e| e.to_string())?;
    close("S(rho_v||tau)", s, 1.0, 1e-9)?;
    Ok(format!("S = {s:.12}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("E_eta(rho_v) = 1 by primal, dual and exact witness", e_rho_v_eta, 1),
        ("E_N(rho_v) = E1(rho_v) = log2(1 + 1/sqrt 2)", e_rho_v_negativity, 1),
        ("rho_v report is irreversible with gap >= 0.22", e_rho_v_report, 60),
        ("alpha scan over [0.42, 0.50] at 17 points", e_scan, 30),
        ("antisymmetric state E_eta and E_N", e_antisymmetric, 60),
        ("E_eta additivity on products", e_additivity, 600),
        ("rank-two 10x10 grid witnesses", e_ranktwo_grid, 10),
        ("random states, LMI norms and pinching", e_random, 120),
        ("S(rho_v || Q/4) = 1", e_relative_entropy, 60),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let outcome = outcome.and_then(|d| {
            if secs <= *budget as f64 {
                Ok(d)
            } else {
                Err(format!("{d}; took {secs:.2}s, budget {budget}s"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL [{}] {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
