//! The fixed-point iteration on small grids: trivial data, contraction,
//! linear scaling in epsilon and controlled failure on stress data.

mod common;

use std::f64::consts::PI;

use common::{cube, reference_background, reference_profiles};
use subsonic_core::domain::{BackgroundState, BoundaryProfiles, CrossField, GridSpec, Profile, ScalarField3};
use subsonic_core::flow::{FlowField, Perturbation};
use subsonic_core::solver::{apply_lambda, low_order_norm, solve, solve_incompressible, SolveResult, SolverConfig, SolverError};

fn run(bg: &BackgroundState, grid: GridSpec, eps: f64, cfg: &SolverConfig) -> SolveResult {
    let data = reference_profiles().sample(grid.cross(), eps).unwrap();
    solve(bg, &data, cfg, grid).unwrap()
}

fn incompressible_background(grid: GridSpec) -> BackgroundState {
    BackgroundState::incompressible(1.0, CrossField::constant(grid.cross(), 0.5)).unwrap()
}

/// Max over `u1 - u0`, `u2`, `u3` and `rho - rho0`.
fn perturbation_size(flow: &FlowField, bg: &BackgroundState) -> f64 {
    let p = flow.primitives().unwrap();
    let m = flow.grid().cross_len();
    let du1 = (0..p.u1.values.len()).map(|n| (p.u1.values[n] - bg.u0.values[n % m]).abs()).fold(0.0, f64::max);
    let drho = p.rho.values.iter().map(|r| (r - bg.rho0).abs()).fold(0.0, f64::max);
    du1.max(p.u2.max_abs()).max(p.u3.max_abs()).max(drho)
}

#[test]
fn zero_epsilon_is_a_one_step_fixed_point() {
    let g = cube(16);
    for bg in [reference_background(g), incompressible_background(g)] {
        let r = run(&bg, g, 0.0, &SolverConfig::default());
        assert!(r.converged, "{:?}", r.failure);
        assert_eq!(r.trace.len(), 1);
        assert!(r.perturbation.components().iter().all(|c| c.max_abs() == 0.0));
        assert_eq!(r.flow, FlowField::background(&bg, g));
    }
}

#[test]
fn lambda_with_zero_data_is_quadratic_in_the_iterate() {
    // F1 is quadratic in the iterate, so only the zero iterate maps to zero
    let g = cube(16);
    let bg = reference_background(g);
    let data = reference_profiles().sample(g.cross(), 0.0).unwrap();
    let cfg = SolverConfig::default();
    let zero = apply_lambda(&Perturbation::zeros(g), &bg, &data, &cfg).unwrap();
    assert!(zero.components().iter().all(|c| c.max_abs() == 0.0));
    let shape = |a: f64| Perturbation {
        primary: ScalarField3::from_fn(g, |x1, x2, x3| a * (1.0 - x1) * (PI * x2).cos() * (PI * x3).cos()),
        beta2: ScalarField3::from_fn(g, |_, x2, x3| a * (PI * x2).sin() * (PI * x3).cos()),
        beta3: ScalarField3::zeros(g),
        bernoulli: ScalarField3::zeros(g),
    };
    let big = apply_lambda(&shape(0.002), &bg, &data, &cfg).unwrap();
    let small = apply_lambda(&shape(0.001), &bg, &data, &cfg).unwrap();
    let ratio = big.primary.max_abs() / small.primary.max_abs();
    assert!((ratio - 4.0).abs() < 0.3, "{ratio}");
}

#[test]
fn iteration_contracts_and_converges() {
    let g = cube(16);
    let bg = reference_background(g);
    for eps in [0.01, 0.005] {
        let r = run(&bg, g, eps, &SolverConfig::default());
        assert!(r.converged, "{:?}", r.failure);
        assert!(r.trace.len() <= 50);
        for rec in r.trace.records.iter().skip(1) {
            assert!(rec.ratio.unwrap() < 1.0, "iteration {} ratio {:?}", rec.iteration, rec.ratio);
        }
        assert!(r.trace.records.last().unwrap().max_diff() <= 1e-10);
    }
}

#[test]
fn converged_state_is_a_fixed_point() {
    let g = cube(16);
    let bg = reference_background(g);
    let data = reference_profiles().sample(g.cross(), 0.01).unwrap();
    let cfg = SolverConfig::default();
    let r = solve(&bg, &data, &cfg, g).unwrap();
    assert!(r.converged);
    let again = apply_lambda(&r.perturbation, &bg, &data, &cfg).unwrap();
    let d = again.difference(&r.perturbation);
    let worst = d.components().iter().map(|c| low_order_norm(c)).fold(0.0, f64::max);
    // a contraction with ratio well below 1 keeps this close to tol_fixed
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn perturbation_scales_linearly_with_epsilon() {
    let g = cube(16);
    let cfg = SolverConfig::default();
    for bg in [reference_background(g), incompressible_background(g)] {
        let a = run(&bg, g, 0.01, &cfg);
        let b = run(&bg, g, 0.005, &cfg);
        assert!(a.converged && b.converged);
        let ratio = perturbation_size(&a.flow, &bg) / perturbation_size(&b.flow, &bg);
        assert!((1.7..=2.3).contains(&ratio), "{ratio}");
    }
}

#[test]
fn incompressible_solver_converges() {
    let g = cube(16);
    let bg = incompressible_background(g);
    let data = reference_profiles().sample(g.cross(), 0.01).unwrap();
    let r = solve_incompressible(&bg, &data, &SolverConfig::default(), g).unwrap();
    assert!(r.converged, "{:?}", r.failure);
    // exit pressure is p0 + eps p_e
    let i = g.n1 - 1;
    for j in 0..g.n2 {
        for k in 0..g.n3 {
            assert!((r.flow.primary.at(i, j, k) - (1.0 + 0.01 * data.exit.at(j, k))).abs() < 1e-12);
        }
    }
    assert!(matches!(
        solve_incompressible(&reference_background(g), &data, &SolverConfig::default(), g),
        Err(SolverError::Setup(_))
    ));
}

fn steep_profiles() -> BoundaryProfiles {
    BoundaryProfiles {
        beta2_in: Profile::builtin("sin_cos", &[3.0, 2.0]).unwrap(),
        beta3_in: Profile::builtin("cos_sin", &[2.0, 3.0]).unwrap(),
        b_in: Profile::builtin("cos_cos", &[3.0, 3.0]).unwrap(),
        exit: Profile::builtin("cos_cos", &[2.0, 3.0]).unwrap(),
    }
}

#[test]
fn stress_data_fail_in_a_controlled_way() {
    let g = cube(12);
    let bg = reference_background(g);
    let cfg = SolverConfig { max_iter: 30, ..SolverConfig::default() };
    for eps in [0.5, 2.0] {
        let data = steep_profiles().sample(g.cross(), eps).unwrap();
        let r = solve(&bg, &data, &cfg, g).unwrap();
        assert!(!r.converged);
        assert!(r.flow.primary.is_finite());
        if let Some(e) = &r.failure {
            assert!(e.is_sonic_or_stagnation() || matches!(e, SolverError::DeltaExceeded { .. } | SolverError::NonFinite { .. }));
        }
    }
}

#[test]
fn tight_ball_is_reported() {
    let g = cube(12);
    let bg = reference_background(g);
    let cfg = SolverConfig { delta_max: Some(1e-6), ..SolverConfig::default() };
    let r = run(&bg, g, 0.01, &cfg);
    assert!(!r.converged);
    assert!(matches!(r.failure, Some(SolverError::DeltaExceeded { .. })));
    assert!(r.trace.len() >= 1);
}

#[test]
fn iteration_cap_is_reported_without_failure() {
    let g = cube(12);
    let bg = reference_background(g);
    let cfg = SolverConfig { max_iter: 2, ..SolverConfig::default() };
    let r = run(&bg, g, 0.01, &cfg);
    assert!(!r.converged && r.failure.is_none());
    assert_eq!(r.trace.len(), 2);
}

#[test]
fn invalid_configuration_is_rejected() {
    let g = cube(12);
    let bg = reference_background(g);
    for cfg in [
        SolverConfig { tol_fixed: 0.0, ..SolverConfig::default() },
        SolverConfig { max_iter: 0, ..SolverConfig::default() },
        SolverConfig { relaxation: 1.5, ..SolverConfig::default() },
    ] {
        let data = reference_profiles().sample(g.cross(), 0.01).unwrap();
        assert!(matches!(solve(&bg, &data, &cfg, g), Err(SolverError::Setup(_))));
    }
}
