//! Thermodynamics and the change of variables, checked against finite
//! differences, an independent composite-Simpson quadrature and round trips.

use proptest::prelude::*;
use subsonic_core::gas::{
    axial_speed_sq_incompressible, to_primitive_incompressible, GasError, GasModel, NewVarsPoint, PrimitivePoint,
};

/// `int_0^rho t^(gamma-2) dt`: exact power head on `[0, t0]`, composite
/// Simpson on a geometrically graded mesh over `[t0, rho]`.
fn enthalpy_oracle(gamma: f64, rho: f64) -> f64 {
    let f = |t: f64| t.powf(gamma - 2.0);
    let t0 = 1e-12 * rho;
    let head = t0.powf(gamma - 1.0) / (gamma - 1.0);
    let cells = 4000;
    let ratio = (rho / t0).powf(1.0 / cells as f64);
    let mut a = t0;
    let mut sum = 0.0;
    for _ in 0..cells {
        let b = a * ratio;
        sum += (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
        a = b;
    }
    head + sum
}

#[test]
fn thermo_spot_values() {
    let g = GasModel::new(1.4).unwrap();
    let t = g.thermo(1.0).unwrap();
    assert!((t.p - 0.714286).abs() < 1e-6);
    assert_eq!(t.c2, 1.0);
    assert!((t.h - enthalpy_oracle(1.4, 1.0)).abs() < 1e-8);
    assert!((t.h - 2.5).abs() < 1e-14);
    let g2 = GasModel::new(2.0).unwrap();
    let t = g2.thermo(1.0).unwrap();
    assert_eq!((t.p, t.c2, t.h), (0.5, 1.0, 1.0));
    assert!((enthalpy_oracle(2.0, 1.0) - 1.0).abs() < 1e-8);
    let z = g.thermo(0.0).unwrap();
    assert_eq!((z.p, z.c2, z.h), (0.0, 0.0, 0.0));
    assert!(matches!(g.thermo(-0.5), Err(GasError::NegativeDensity(_))));
}

#[test]
fn axial_speed_examples() {
    let g = GasModel::new(1.4).unwrap();
    let s_of_h = |h: f64| g.density_from_enthalpy(h).ln();
    let p = NewVarsPoint { s: s_of_h(0.5), beta2: 0.0, beta3: 0.0, bernoulli: 1.0 };
    assert!((g.axial_speed_sq(&p).unwrap() - 1.0).abs() < 1e-14);
    let p = NewVarsPoint { s: s_of_h(1.0), beta2: 1.0, beta3: 1.0, bernoulli: 2.0 };
    assert!((g.axial_speed_sq(&p).unwrap() - 2.0 / 3.0).abs() < 1e-14);
    let p = NewVarsPoint { s: s_of_h(1.0), beta2: 0.3, beta3: 0.0, bernoulli: g.enthalpy(g.density_from_enthalpy(1.0)) };
    assert!(matches!(g.axial_speed_sq(&p), Err(GasError::Stagnation { .. })));

    assert_eq!(axial_speed_sq_incompressible(0.0, 0.0, 0.0, 0.5).unwrap(), 1.0);
    assert_eq!(axial_speed_sq_incompressible(1.0, 1.0, 0.0, 2.0).unwrap(), 1.0);
    assert!(axial_speed_sq_incompressible(2.0, 0.4, -0.1, 1.0).is_err());
    let pr = to_primitive_incompressible(1.0, 1.0, 0.0, 2.0).unwrap();
    assert_eq!((pr.rho, pr.u1, pr.u2, pr.u3), (1.0, 1.0, 1.0, 0.0));
}

#[test]
fn to_primitive_examples() {
    let g = GasModel::new(1.4).unwrap();
    let p = g.to_primitive(&NewVarsPoint { s: 0.0, beta2: 0.0, beta3: 0.0, bernoulli: 2.625 }).unwrap();
    assert_eq!(p.rho, 1.0);
    assert!((p.u1 - 0.5).abs() < 1e-14 && p.u2 == 0.0 && p.u3 == 0.0);
    let p = g.to_primitive(&NewVarsPoint { s: 0.0, beta2: 1.0, beta3: 0.0, bernoulli: 3.5 }).unwrap();
    assert!((p.u1 - 1.0).abs() < 1e-14 && (p.u2 - 1.0).abs() < 1e-14);
    assert!(g.from_primitive(&PrimitivePoint { rho: 1.0, u1: -0.1, u2: 0.0, u3: 0.0 }).is_err());
}

#[test]
fn is_subsonic_examples() {
    let g = GasModel::new(1.4).unwrap();
    let pt = |u1| PrimitivePoint { rho: 1.0, u1, u2: 0.0, u3: 0.0 };
    assert!(g.is_subsonic(&pt(0.5), 0.0));
    assert!(!g.is_subsonic(&pt(1.2), 0.0));
    assert!(!g.is_subsonic(&pt(1.0), 0.0));
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

prop_compose! {
    fn subsonic_state()(gamma in 1.05f64..2.95, rho in 0.2f64..4.0, mach in 0.01f64..0.99,
                        b2 in -1.5f64..1.5, b3 in -1.5f64..1.5) -> (GasModel, PrimitivePoint) {
        let g = GasModel::new(gamma).unwrap();
        let speed = mach * g.sound_speed_sq(rho).sqrt();
        let u1 = speed / (1.0 + b2 * b2 + b3 * b3).sqrt();
        (g, PrimitivePoint { rho, u1, u2: b2 * u1, u3: b3 * u1 })
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn primitive_round_trip((g, p) in subsonic_state()) {
        let v = g.from_primitive(&p).unwrap();
        let back = g.to_primitive(&v).unwrap();
        // u1 comes back through B - h, so rounding B costs a factor B / (|u|^2/2)
        let kappa = (v.bernoulli / (0.5 * p.speed_sq())).max(1.0);
        prop_assert!(rel(back.rho, p.rho) < 1e-12);
        prop_assert!(rel(back.u1, p.u1) < 1e-12 * kappa);
        prop_assert!((back.u2 - p.u2).abs() < 1e-12 * kappa * p.u1.max(p.u2.abs()));
        prop_assert!((back.u3 - p.u3).abs() < 1e-12 * kappa * p.u1.max(p.u3.abs()));
        prop_assert!(g.is_subsonic(&p, 0.0));
    }

    #[test]
    fn new_vars_round_trip((g, p) in subsonic_state()) {
        let v = g.from_primitive(&p).unwrap();
        let again = g.from_primitive(&g.to_primitive(&v).unwrap()).unwrap();
        prop_assert!((again.s - v.s).abs() < 1e-12 * v.s.abs().max(1.0));
        prop_assert!((again.beta2 - v.beta2).abs() < 1e-12 * v.beta2.abs().max(1.0));
        prop_assert!((again.beta3 - v.beta3).abs() < 1e-12 * v.beta3.abs().max(1.0));
        prop_assert!(rel(again.bernoulli, v.bernoulli) < 1e-12);
    }

    #[test]
    fn sound_speed_is_pressure_derivative(gamma in 1.05f64..2.95, rho in 0.1f64..5.0) {
        let g = GasModel::new(gamma).unwrap();
        let d = 1e-5 * rho;
        let fd = (g.pressure(rho + d) - g.pressure(rho - d)) / (2.0 * d);
        prop_assert!(rel(fd, g.sound_speed_sq(rho)) < 1e-8);
    }

    #[test]
    fn enthalpy_matches_quadrature(gamma in 1.05f64..2.95, rho in 0.1f64..5.0) {
        let g = GasModel::new(gamma).unwrap();
        prop_assert!(rel(enthalpy_oracle(gamma, rho), g.enthalpy(rho)) < 1e-8);
    }

    #[test]
    fn pressure_and_enthalpy_increase(gamma in 1.05f64..2.95, rho in 0.01f64..5.0, step in 1e-6f64..1.0) {
        let g = GasModel::new(gamma).unwrap();
        prop_assert!(g.pressure(rho + step) > g.pressure(rho));
        prop_assert!(g.enthalpy(rho + step) > g.enthalpy(rho));
    }

    #[test]
    fn axial_speed_decreases_with_angle(s in -1.0f64..1.0, extra in 0.01f64..3.0,
                                        b in 0.0f64..2.0, db in 1e-3f64..1.0) {
        let g = GasModel::new(1.4).unwrap();
        let bern = g.enthalpy(s.exp()) + extra;
        let lo = g.axial_speed_sq(&NewVarsPoint { s, beta2: b, beta3: 0.0, bernoulli: bern }).unwrap();
        let hi = g.axial_speed_sq(&NewVarsPoint { s, beta2: b + db, beta3: 0.0, bernoulli: bern }).unwrap();
        prop_assert!(lo > 0.0 && hi > 0.0 && hi < lo);
    }
}
