//! Derived quantities and identity residuals: exact cases, non-vacuity on
//! fields that do not solve the flow equations, and the integrating factors
//! against their quadrature definitions.

mod common;

use common::{cube, reference_background};
use proptest::prelude::*;
use std::f64::consts::PI;
use subsonic_core::domain::{BackgroundState, CrossField, FlowKind, GridSpec, ScalarField3};
use subsonic_core::flow::FlowField;
use subsonic_core::gas::GasModel;
use subsonic_core::invariants::quadrature::{
    integrating_factor, integrating_factor_incompressible, integrating_factor_incompressible_quadrature,
    integrating_factor_quadrature, log_integrating_factor_quadrature, q_potential, q_potential_incompressible,
    q_potential_incompressible_quadrature, q_potential_quadrature,
};
use subsonic_core::invariants::residuals::{helicity_identity, residual_constant_b_laws};
use subsonic_core::invariants::{
    compute_derived, diagnose, scaled_helicity, verify_appendix_chain, AppendixFields, DiagnoseOptions,
    InvariantError, TrigField,
};

fn gas() -> GasModel {
    GasModel::new(1.4).unwrap()
}

#[test]
fn w_is_minus_two_for_a_rigid_twist() {
    let g = GridSpec::new(9, 16, 16).unwrap();
    let w = scaled_helicity(&ScalarField3::from_fn(g, |_, _, x3| x3), &ScalarField3::from_fn(g, |_, x2, _| -x2));
    // centred differences of linear data are exact off the periodic seam
    for i in 0..g.n1 {
        for j in 1..g.n2 - 1 {
            for k in 1..g.n3 - 1 {
                assert!((w.at(i, j, k) + 2.0).abs() < 1e-13, "{}", w.at(i, j, k));
            }
        }
    }
    let c = ScalarField3::constant(g, 0.3);
    assert!(scaled_helicity(&c, &ScalarField3::constant(g, -0.2)).max_abs() < 1e-15);
}

#[test]
fn background_flows_have_zero_residuals() {
    let g = cube(8);
    let varying = BackgroundState::compressible(
        gas(),
        1.0,
        CrossField::from_fn(g.cross(), |x2, x3| 0.5 + 0.05 * (PI * x2).cos() * (PI * x3).cos()),
        1e-6,
    )
    .unwrap();
    let incompressible = BackgroundState::incompressible(1.0, CrossField::constant(g.cross(), 0.5)).unwrap();
    for bg in [reference_background(g), varying, incompressible] {
        let report = diagnose(&FlowField::background(&bg, g), &DiagnoseOptions::default()).unwrap();
        for e in &report.entries {
            // d2(B d3 u0) - d3(B d2 u0) cancels only up to O(h^2) when u0 varies
            let tol = if e.name == "bernoulli_vorticity_divergence" { 1e-3 } else { 1e-12 };
            assert!(e.max_norm < tol, "{} = {:e}", e.name, e.max_norm);
        }
    }
}

/// A smooth field that satisfies none of the flow equations.
fn generic_flow(g: GridSpec, kind: FlowKind) -> FlowField {
    let primary = match kind {
        FlowKind::Compressible(_) => ScalarField3::from_fn(g, |x1, x2, x3| 0.1 * x1 * (PI * x2).cos() * (PI * x3).cos()),
        FlowKind::Incompressible => ScalarField3::from_fn(g, |x1, x2, _| 1.0 + 0.1 * (PI * x1).sin() * (PI * x2).cos()),
    };
    let level = match kind {
        FlowKind::Compressible(gas) => gas.enthalpy(1.0),
        FlowKind::Incompressible => 1.0,
    };
    FlowField {
        kind,
        primary,
        beta2: ScalarField3::from_fn(g, |x1, x2, x3| 0.2 * (PI * x1).sin() * (PI * x2).sin() * (PI * x3).cos()),
        beta3: ScalarField3::from_fn(g, |x1, x2, x3| 0.15 * x1 * (PI * x2).cos() * (PI * x3).sin()),
        bernoulli: ScalarField3::from_fn(g, |x1, x2, x3| level + 0.2 + 0.05 * (PI * x1).cos() * (PI * x2).cos() * (PI * x3).cos()),
    }
}

#[test]
fn residuals_are_not_vacuous() {
    for kind in [FlowKind::Compressible(gas()), FlowKind::Incompressible] {
        let coarse = diagnose(&generic_flow(cube(16), kind), &DiagnoseOptions::default()).unwrap();
        let fine = diagnose(&generic_flow(cube(32), kind), &DiagnoseOptions::default()).unwrap();
        let mut names = vec![
            "primitive_mass",
            "angle_system_continuity",
            "angle_system_beta2",
            "bernoulli_transport",
            "w_transport",
            "bernoulli_vorticity_divergence",
            "weighted_k_divergence",
        ];
        if matches!(kind, FlowKind::Compressible(_)) {
            names.push("helicity_transport");
        }
        for name in names {
            let (c, f) = (coarse.get(name).unwrap().max_norm, fine.get(name).unwrap().max_norm);
            assert!(f > 1e-3, "{name} = {f:e}");
            assert!(c / f < 1.5, "{name} falls from {c:e} to {f:e}");
        }
        // pointwise identities do hold on any field
        assert!(fine.get("k_unit_length").unwrap().max_norm < 1e-14);
        let order = fine.clone().with_orders(&coarse).get("helicity_identity").unwrap().order.unwrap();
        assert!(order >= 1.8, "{order}");
    }
}

#[test]
fn helicity_identity_is_second_order() {
    let errs: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| {
            let f = generic_flow(cube(n), FlowKind::Compressible(gas()));
            helicity_identity(&compute_derived(&f, None).unwrap()).max_abs()
        })
        .collect();
    assert!((errs[1] / errs[2]).log2() >= 1.8, "{errs:?}");
}

#[test]
fn constant_b_laws_require_constant_b() {
    let f = generic_flow(cube(8), FlowKind::Compressible(gas()));
    let d = compute_derived(&f, None).unwrap();
    assert!(matches!(residual_constant_b_laws(&f, &d, 1e-8), Err(InvariantError::NonConstantBernoulli { .. })));
    let report = diagnose(&f, &DiagnoseOptions::default()).unwrap();
    assert!(report.get("mass_like").is_none() && report.get("riccati").is_none());
}

#[test]
fn stagnant_flow_is_reported() {
    let mut f = generic_flow(cube(8), FlowKind::Compressible(gas()));
    f.bernoulli.values[40] = 0.0;
    assert!(matches!(compute_derived(&f, None), Err(InvariantError::Flow(_))));
}

#[test]
fn integrating_factor_spot_values() {
    let g2 = GasModel::new(2.0).unwrap();
    assert!((integrating_factor_quadrature(&g2, 1.0, 2.0, 1e-12).unwrap() - 2f64.sqrt()).abs() < 1e-9);
    assert!((q_potential_quadrature(&g2, 1.0, 2.0, 1e-12).unwrap() - 0.125).abs() < 1e-9);
    assert!((integrating_factor(&g2, 1.0, 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    assert!((q_potential(&g2, 1.0, 2.0).unwrap() - 0.125).abs() < 1e-15);
    // B must exceed h on the whole segment
    assert!(integrating_factor(&g2, 1.0, 0.9).is_err());
    assert!(integrating_factor_quadrature(&g2, 1.0, 1.0, 1e-10).is_err());
}

#[test]
fn log_derivative_of_the_integrating_factor() {
    // I'/I = c^2 / (2 rho (B - h)) by centred differences of both evaluations
    let g = gas();
    for &(rho, b) in &[(0.5, 3.0), (1.0, 2.6), (1.7, 4.5)] {
        let d = 1e-5;
        let exact = g.sound_speed_sq(rho) / (2.0 * rho * (b - g.enthalpy(rho)));
        let closed = ((integrating_factor(&g, rho + d, b).unwrap()).ln()
            - (integrating_factor(&g, rho - d, b).unwrap()).ln())
            / (2.0 * d);
        let quad = (log_integrating_factor_quadrature(&g, rho + d, b, 1e-13).unwrap()
            - log_integrating_factor_quadrature(&g, rho - d, b, 1e-13).unwrap())
            / (2.0 * d);
        assert!((closed - exact).abs() < 1e-8 * exact, "{closed} {exact}");
        assert!((quad - exact).abs() < 1e-6 * exact, "{quad} {exact}");
    }
    // incompressible: I'/I = 1 / (2 (B - p))
    let (p_ref, b) = (0.2, 2.0);
    for p in [0.5, 1.0, 1.5] {
        let d = 1e-5;
        let l = |x: f64| integrating_factor_incompressible(x, p_ref, b).unwrap().ln();
        let fd = (l(p + d) - l(p - d)) / (2.0 * d);
        assert!((fd - 0.5 / (b - p)).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn closed_forms_match_quadrature(gamma in 1.1f64..2.9, rho in 0.1f64..3.0, extra in 0.05f64..3.0) {
        let g = GasModel::new(gamma).unwrap();
        let b = g.enthalpy(rho) + extra;
        let i = integrating_factor(&g, rho, b).unwrap();
        let iq = integrating_factor_quadrature(&g, rho, b, 1e-12).unwrap();
        prop_assert!((i - iq).abs() < 1e-8 * i, "{} {}", i, iq);
        let q = q_potential(&g, rho, b).unwrap();
        let qq = q_potential_quadrature(&g, rho, b, 1e-11).unwrap();
        prop_assert!((q - qq).abs() < 1e-8 * q.abs().max(1e-3), "{} {}", q, qq);
    }

    #[test]
    fn incompressible_closed_forms_match_quadrature(p_ref in -1.0f64..1.0, dp in 0.0f64..2.0, extra in 0.05f64..3.0) {
        let p = p_ref + dp;
        let b = p + extra;
        let i = integrating_factor_incompressible(p, p_ref, b).unwrap();
        let iq = integrating_factor_incompressible_quadrature(p, p_ref, b, 1e-12).unwrap();
        prop_assert!((i - iq).abs() < 1e-9 * i);
        let q = q_potential_incompressible(p, p_ref, b).unwrap();
        let qq = q_potential_incompressible_quadrature(p, p_ref, b, 1e-12).unwrap();
        prop_assert!((q - qq).abs() < 1e-9 * q.abs().max(1e-3));
    }
}

#[test]
fn appendix_chain() {
    let fields = AppendixFields::reference();
    let coarse = verify_appendix_chain(&fields, cube(16));
    let fine = verify_appendix_chain(&fields, cube(32));
    assert!(fine.get("j31_minus_gz").unwrap().max_norm < 1e-12);
    assert!(fine.get("commutator_identity").unwrap().max_norm < 1e-12);
    let factor = fine.reduction_factor(&coarse, "j_chain").unwrap();
    assert!(factor >= 3.5, "{factor}");
    assert!(fine.get("w_magnitude").unwrap().max_norm > 0.1);

    let zero = AppendixFields { beta2: TrigField::zero(), beta3: TrigField::zero(), k: TrigField::zero() };
    let r = verify_appendix_chain(&zero, cube(8));
    assert!(r.entries.iter().all(|e| e.max_norm == 0.0), "{r:?}");
}

#[test]
fn report_orders_and_uniqueness() {
    let f = generic_flow(cube(8), FlowKind::Compressible(gas()));
    let r = diagnose(&f, &DiagnoseOptions::default()).unwrap();
    let mut names = r.names();
    let n = names.len();
    names.sort();
    names.dedup();
    assert_eq!(names.len(), n);
    let with = r.clone().with_orders(&r);
    assert!(with.entries.iter().filter(|e| e.max_norm > 0.0).all(|e| e.order == Some(0.0)));
}
