use ppt_bounds::app::{all_certificates, ranktwo_grid, verify_alpha_grid};
use ppt_bounds::certificates::{
    alpha_witness, alpha_witness_y, check_eta_dual, combine_dual, combine_primal, cost_witness_rho_v,
    cost_witness_rho_v_with, cost_witness_y, distill_witness_rho_v, distill_witness_rho_v_with, distill_witness_r,
    ranktwo_witness, EtaDualPoint, WITNESS_TOL,
};
use ppt_bounds::linalg::{op_norm, trace_norm};
use ppt_bounds::measures::{e1_deterministic_distill, e_eta_dual, e_eta_primal};
use ppt_bounds::par::Execution;
use ppt_bounds::sdp::SolverOptions;
use ppt_bounds::states::{make_max_entangled, make_rho_alpha, make_rho_v, NamedState};
use ppt_bounds::Error;

fn dual_point(s: &NamedState) -> EtaDualPoint {
    let d = e_eta_dual(&s.projector, &SolverOptions::default()).unwrap();
    EtaDualPoint { v: d.v, f: d.f, w: d.w, x: d.x }
}

#[test]
fn closed_form_witnesses_hold_exactly() {
    let cost = cost_witness_rho_v();
    assert!(cost.passed && cost.max_violation() <= WITNESS_TOL, "{cost:?}");
    assert_eq!(cost.implied_bound, Some(1.0));
    let pt_norm = op_norm(cost_witness_y().partial_transpose().matrix()).unwrap();
    assert!((pt_norm - 0.5).abs() < 1e-12);

    let distill = distill_witness_rho_v();
    assert!(distill.passed, "{distill:?}");
    let r_norm = op_norm(distill_witness_r().partial_transpose().matrix()).unwrap();
    assert!((r_norm - (2.0 - 2f64.sqrt())).abs() < 1e-12);
}

#[test]
fn solver_points_satisfy_the_rho_v_claims() {
    let s = make_rho_v();
    let opts = SolverOptions::default();
    let primal = e_eta_primal(&s.projector, &opts).unwrap();
    assert!(cost_witness_rho_v_with(&primal.y).with_tolerance(1e-7).passed);
    let r = e1_deterministic_distill(&s.projector, &opts).unwrap().r;
    assert!(distill_witness_rho_v_with(&r).with_tolerance(1e-7).passed);
}

#[test]
fn perturbed_witnesses_fail() {
    let mut y = cost_witness_y();
    y = y.scale(0.999);
    let c = cost_witness_rho_v_with(&y);
    assert!(!c.passed && !c.failed_claims().is_empty());

    let r = distill_witness_r().scale(0.99);
    assert!(!distill_witness_rho_v_with(&r).passed);
}

#[test]
fn alpha_witness_over_the_grid() {
    for a in verify_alpha_grid() {
        let c = alpha_witness(a).unwrap();
        assert!(c.passed, "alpha {a}: {}", c.max_violation());
        assert!((c.implied_bound.unwrap() + (1.0 - a).log2()).abs() < 1e-12);
    }
    assert!(matches!(alpha_witness(0.6), Err(Error::BadParameter(_))));
    assert!(matches!(alpha_witness(0.0), Err(Error::BadParameter(_))));
    assert!(alpha_witness_y(0.5).matrix().max_abs_diff(cost_witness_y().matrix()) < 1e-12);
}

#[test]
fn ranktwo_witness_on_the_grid() {
    let grid = ranktwo_grid();
    assert_eq!(grid.len(), 100);
    for (p, theta) in grid {
        let c = ranktwo_witness(p, theta).unwrap();
        assert!(c.passed, "p {p} theta {theta}: {:?}", c.failed_claims());
        let s = ppt_bounds::states::make_ranktwo_antisym(p, theta).unwrap();
        assert!(trace_norm(s.state.op().partial_transpose().matrix()).unwrap() < 2.0 - 1e-9);
    }
}

#[test]
fn combined_primal_witnesses() {
    let v = make_rho_v();
    let a = make_rho_alpha(0.42).unwrap();
    let c = combine_primal(&cost_witness_y(), 0.5, &v.projector, &alpha_witness_y(0.42), 0.58, &a.projector).unwrap();
    assert!(c.check.passed, "{:?}", c.check.failed_claims());
    assert!((c.t - 0.29).abs() < 1e-15);

    let c = combine_primal(&cost_witness_y(), 0.5, &v.projector, &cost_witness_y(), 0.5, &v.projector).unwrap();
    assert!(c.check.passed);
    assert_eq!(c.check.implied_bound, Some(2.0));
}

#[test]
fn combined_primal_upper_bounds_the_direct_solve() {
    let v = make_rho_v();
    let phi = make_max_entangled(2).unwrap();
    let opts = SolverOptions::default();
    let (pv, pp) = (e_eta_primal(&v.projector, &opts).unwrap(), e_eta_primal(&phi.projector, &opts).unwrap());
    let c = combine_primal(&pv.y, pv.eta, &v.projector, &pp.y, pp.eta, &phi.projector).unwrap();
    assert!(c.check.passed, "{:?}", c.check.failed_claims());
    let direct = e_eta_primal(&v.kron(&phi).unwrap().projector, &opts).unwrap();
    assert!(direct.eta <= c.t + 1e-6);
    assert!((direct.eta - 0.25).abs() < 1e-6);
}

#[test]
fn combined_dual_lower_bounds_the_product() {
    let v = make_rho_v();
    let phi = make_max_entangled(2).unwrap();
    let c = combine_dual(&dual_point(&v), &v.projector, &dual_point(&phi), &phi.projector).unwrap();
    assert!(c.check.passed, "{:?}", c.check.failed_claims());
    assert!((c.objective - 0.25).abs() < 1e-6);
    let product = v.kron(&phi).unwrap();
    assert!(check_eta_dual("product", product.projector.op(), &c.point).unwrap().max_violation() < 1e-6);
}

#[test]
fn infeasible_inputs_are_rejected() {
    let v = make_rho_v();
    let bad = combine_primal(&cost_witness_y(), 0.4, &v.projector, &cost_witness_y(), 0.5, &v.projector);
    assert!(matches!(bad, Err(Error::InfeasibleInput(_))));

    let mut d = EtaDualPoint::zeros(3, 3);
    d.w = cost_witness_y().scale(10.0);
    let bad = combine_dual(&d, &v.projector, &dual_point(&v), &v.projector);
    assert!(matches!(bad, Err(Error::InfeasibleInput(_))));
}

#[test]
fn full_certificate_suite_passes_in_both_schedules() {
    let opts = SolverOptions::default();
    for exec in [Execution::Sequential, Execution::Parallel] {
        let checks = all_certificates(&opts, exec, WITNESS_TOL);
        assert!(!checks.is_empty());
        for c in checks {
            let c = c.unwrap();
            assert!(c.passed, "{}: {:?}", c.name, c.failed_claims());
        }
    }
}
