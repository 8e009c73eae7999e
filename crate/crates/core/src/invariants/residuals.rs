//! Residual fields of the flow equations and of the derived identities.

use super::{compute_derived, divergence, pointwise, transport_derivative, DerivedFields, DiagnosticsReport, InvariantError};
use crate::domain::stencil::{d1, gradient};
use crate::domain::{FlowKind, ScalarField3};
use crate::flow::{FlowField, PrimitiveFields};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnoseOptions {
    /// Lower limit of the incompressible integrals; `None` picks the default.
    pub reference_pressure: Option<f64>,
    /// Largest `max B - min B` for which the constant-B identities apply.
    pub constant_b_tol: f64,
}

impl Default for DiagnoseOptions {
    fn default() -> Self {
        Self { reference_pressure: None, constant_b_tol: 1e-8 }
    }
}

/// `div(rho u)` and `div(rho u_i u) + d_i p` (density 1 when incompressible).
pub fn primitive_residuals(prim: &PrimitiveFields) -> [ScalarField3; 4] {
    let u = [&prim.u1, &prim.u2, &prim.u3];
    let m: [ScalarField3; 3] = std::array::from_fn(|c| prim.rho.zip_map(u[c], |r, v| r * v));
    let mass = divergence([&m[0], &m[1], &m[2]]);
    let dp = gradient(&prim.p);
    let momentum: [ScalarField3; 3] = std::array::from_fn(|i| {
        let flux: [ScalarField3; 3] = std::array::from_fn(|j| m[i].zip_map(u[j], |a, b| a * b));
        let div = divergence([&flux[0], &flux[1], &flux[2]]);
        div.zip_map(&dp[i], |a, b| a + b)
    });
    let [m1, m2, m3] = momentum;
    [mass, m1, m2, m3]
}

/// The four rows of the first-order system in the new variables:
/// `Ds - q d1 s + d2 beta2 + d3 beta3` (incompressible: `-q d1 p + ...`),
/// `D beta_i + q (d_i s - beta_i d1 s)` for `i = 2, 3`, and `DB`.
pub fn angle_system_residuals(flow: &FlowField, derived: &DerivedFields) -> [ScalarField3; 4] {
    let g = flow.grid();
    let (b2, b3) = (&flow.beta2, &flow.beta3);
    let u1 = &derived.primitives.u1;
    let q: Vec<f64> = match flow.kind {
        FlowKind::Compressible(gas) => (0..g.len())
            .map(|n| gas.sound_speed_sq(derived.primitives.rho.values[n]) / (u1.values[n] * u1.values[n]))
            .collect(),
        FlowKind::Incompressible => u1.values.iter().map(|v| 1.0 / (v * v)).collect(),
    };
    let s = &flow.primary;
    let [s1, s2, s3] = gradient(s);
    let ds = transport_derivative(s, b2, b3);
    let compressible = matches!(flow.kind, FlowKind::Compressible(_));
    let row1 = pointwise(g, |n| {
        let conv = if compressible { ds.values[n] } else { 0.0 };
        conv - q[n] * s1.values[n] + derived.angle_divergence.values[n]
    });
    let db2 = transport_derivative(b2, b2, b3);
    let db3 = transport_derivative(b3, b2, b3);
    let row2 = pointwise(g, |n| db2.values[n] + q[n] * (s2.values[n] - b2.values[n] * s1.values[n]));
    let row3 = pointwise(g, |n| db3.values[n] + q[n] * (s3.values[n] - b3.values[n] * s1.values[n]));
    [row1, row2, row3, bernoulli_transport(flow)]
}

/// `d1 B + beta2 d2 B + beta3 d3 B`.
pub fn bernoulli_transport(flow: &FlowField) -> ScalarField3 {
    transport_derivative(&flow.bernoulli, &flow.beta2, &flow.beta3)
}

/// `(1, beta2, beta3) . (grad a x grad b)`.
fn triple(flow: &FlowField, a: &ScalarField3, b: &ScalarField3) -> ScalarField3 {
    let (ga, gb) = (gradient(a), gradient(b));
    let (b2, b3) = (&flow.beta2, &flow.beta3);
    pointwise(flow.grid(), |n| {
        let x = [ga[0].values[n], ga[1].values[n], ga[2].values[n]];
        let y = [gb[0].values[n], gb[1].values[n], gb[2].values[n]];
        let c = [x[1] * y[2] - x[2] * y[1], x[2] * y[0] - x[0] * y[2], x[0] * y[1] - x[1] * y[0]];
        c[0] + b2.values[n] * c[1] + b3.values[n] * c[2]
    })
}

/// Transport of `W/(rho G)` with the baroclinic-like source:
/// `D(W/(rho G)) + c^2/(2 rho^2 (B-h)^2) (1, beta) . (grad rho x grad B)`;
/// incompressible: `D(W/G) + 1/(2 (B-p)^2) (1, beta) . (grad p x grad B)`.
pub fn residual_w_transport(flow: &FlowField, derived: &DerivedFields) -> ScalarField3 {
    let g = flow.grid();
    let rho = &derived.primitives.rho;
    let ratio = pointwise(g, |n| derived.w.values[n] / (rho.values[n] * derived.g.values[n]));
    let transport = transport_derivative(&ratio, &flow.beta2, &flow.beta3);
    let b = &flow.bernoulli;
    match flow.kind {
        FlowKind::Compressible(gas) => {
            let t = triple(flow, rho, b);
            pointwise(g, |n| {
                let r = rho.values[n];
                let gap = b.values[n] - gas.enthalpy(r);
                transport.values[n] + gas.sound_speed_sq(r) / (2.0 * r * r * gap * gap) * t.values[n]
            })
        }
        FlowKind::Incompressible => {
            let t = triple(flow, &flow.primary, b);
            pointwise(g, |n| {
                let gap = b.values[n] - flow.primary.values[n];
                transport.values[n] + t.values[n] / (2.0 * gap * gap)
            })
        }
    }
}

/// `D(W/(rho G))` alone, the constant-B form.
pub fn residual_w_transport_constant_b(flow: &FlowField, derived: &DerivedFields) -> ScalarField3 {
    let rho = &derived.primitives.rho;
    let ratio = pointwise(flow.grid(), |n| derived.w.values[n] / (rho.values[n] * derived.g.values[n]));
    transport_derivative(&ratio, &flow.beta2, &flow.beta3)
}

/// `(u.grad)(u.w/(rho |u|^2)) + 2c^2/(rho^2 |u|^4) (|u|^2 (w.grad) rho - (u.w)(u.grad) rho)`.
pub fn residual_helicity_transport(
    flow: &FlowField,
    derived: &DerivedFields,
) -> Result<ScalarField3, InvariantError> {
    let g = flow.grid();
    let prim = &derived.primitives;
    let u = [&prim.u1, &prim.u2, &prim.u3];
    let w = &derived.vorticity;
    let speed2 = pointwise(g, |n| (0..3).map(|c| u[c].values[n].powi(2)).sum());
    if let Some(n) = speed2.values.iter().position(|&v| !(v > 0.0)) {
        return Err(InvariantError::ZeroVelocity(g.ijk(n)));
    }
    let c2: Vec<f64> = match flow.kind {
        FlowKind::Compressible(gas) => prim.rho.values.iter().map(|&r| gas.sound_speed_sq(r)).collect(),
        FlowKind::Incompressible => vec![0.0; g.len()],
    };
    let inner = pointwise(g, |n| derived.helicity_density.values[n] / (prim.rho.values[n] * speed2.values[n]));
    let gi = gradient(&inner);
    let gr = gradient(&prim.rho);
    Ok(pointwise(g, |n| {
        let dot = |a: &[ScalarField3; 3], c: [f64; 3]| (0..3).map(|k| a[k].values[n] * c[k]).sum::<f64>();
        let uu = [u[0].values[n], u[1].values[n], u[2].values[n]];
        let ww = [w[0].values[n], w[1].values[n], w[2].values[n]];
        let (r, s2) = (prim.rho.values[n], speed2.values[n]);
        let uw = derived.helicity_density.values[n];
        dot(&gi, uu) + 2.0 * c2[n] / (r * r * s2 * s2) * (s2 * dot(&gr, ww) - uw * dot(&gr, uu))
    }))
}

/// `W u1^2 - u . w`, two independent evaluations of the same quantity.
pub fn helicity_identity(derived: &DerivedFields) -> ScalarField3 {
    let u1 = &derived.primitives.u1;
    pointwise(u1.grid, |n| derived.w.values[n] * u1.values[n] * u1.values[n] - derived.helicity_density.values[n])
}

/// `div(B curl u)`.
pub fn residual_bernoulli_vortex(flow: &FlowField, derived: &DerivedFields) -> ScalarField3 {
    let b = &flow.bernoulli;
    let f: [ScalarField3; 3] = std::array::from_fn(|c| b.zip_map(&derived.vorticity[c], |x, y| x * y));
    divergence([&f[0], &f[1], &f[2]])
}

/// `div(rho K / I)` with `I(rho, B)` (or `I(p)`) at each node's own `B`.
pub fn residual_conservation_general(derived: &DerivedFields) -> ScalarField3 {
    let rho = &derived.primitives.rho;
    let f: [ScalarField3; 3] = std::array::from_fn(|c| {
        pointwise(rho.grid, |n| rho.values[n] * derived.k[c].values[n] / derived.i_field.values[n])
    });
    divergence([&f[0], &f[1], &f[2]])
}

/// `K1^2 + K2^2 + K3^2 - 1`.
pub fn k_unit_length(derived: &DerivedFields) -> ScalarField3 {
    let k = &derived.k;
    pointwise(k[0].grid, |n| k[0].values[n].powi(2) + k[1].values[n].powi(2) + k[2].values[n].powi(2) - 1.0)
}

pub fn bernoulli_variation(flow: &FlowField) -> f64 {
    let v = &flow.bernoulli.values;
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    hi - lo
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantBLaws {
    /// `div(rho A)`.
    pub mass_like: ScalarField3,
    /// `d_j(rho A_i A_j) + d_i Q`.
    pub momentum_like: [ScalarField3; 3],
    /// `DG - c^2/(B-h) d1 s G^2 + c^2/(B-h) G Ds`; absent for incompressible flows.
    pub riccati: Option<ScalarField3>,
}

pub fn residual_constant_b_laws(
    flow: &FlowField,
    derived: &DerivedFields,
    tol: f64,
) -> Result<ConstantBLaws, InvariantError> {
    let variation = bernoulli_variation(flow);
    if !(variation <= tol) {
        return Err(InvariantError::NonConstantBernoulli { variation, tol });
    }
    let g = flow.grid();
    let rho = &derived.primitives.rho;
    let a = &derived.a;
    let ra: [ScalarField3; 3] = std::array::from_fn(|c| rho.zip_map(&a[c], |r, x| r * x));
    let mass_like = divergence([&ra[0], &ra[1], &ra[2]]);
    let dq = gradient(&derived.q_field);
    let momentum_like: [ScalarField3; 3] = std::array::from_fn(|i| {
        let f: [ScalarField3; 3] = std::array::from_fn(|j| ra[i].zip_map(&a[j], |x, y| x * y));
        divergence([&f[0], &f[1], &f[2]]).zip_map(&dq[i], |x, y| x + y)
    });
    let riccati = match flow.kind {
        FlowKind::Compressible(gas) => {
            let (b2, b3) = (&flow.beta2, &flow.beta3);
            let dg = transport_derivative(&derived.g, b2, b3);
            let ds = transport_derivative(&flow.primary, b2, b3);
            let s1 = d1(&flow.primary);
            Some(pointwise(g, |n| {
                let r = rho.values[n];
                let coef = gas.sound_speed_sq(r) / (flow.bernoulli.values[n] - gas.enthalpy(r));
                let gg = derived.g.values[n];
                dg.values[n] - coef * s1.values[n] * gg * gg + coef * gg * ds.values[n]
            }))
        }
        FlowKind::Incompressible => None,
    };
    Ok(ConstantBLaws { mass_like, momentum_like, riccati })
}

/// All applicable residuals of one flow field.
pub fn diagnose(flow: &FlowField, opts: &DiagnoseOptions) -> Result<DiagnosticsReport, InvariantError> {
    let derived = compute_derived(flow, opts.reference_pressure)?;
    let mut report = DiagnosticsReport::new();
    let prim = primitive_residuals(&derived.primitives);
    report.push("primitive_mass", &prim[0]);
    for (i, r) in prim[1..].iter().enumerate() {
        report.push(&format!("primitive_momentum_{}", i + 1), r);
    }
    let rows = angle_system_residuals(flow, &derived);
    report.push("angle_system_continuity", &rows[0]);
    report.push("angle_system_beta2", &rows[1]);
    report.push("angle_system_beta3", &rows[2]);
    report.push("bernoulli_transport", &rows[3]);
    report.push("w_transport", &residual_w_transport(flow, &derived));
    if matches!(flow.kind, FlowKind::Compressible(_)) {
        report.push("helicity_transport", &residual_helicity_transport(flow, &derived)?);
    }
    report.push("helicity_identity", &helicity_identity(&derived));
    report.push("bernoulli_vorticity_divergence", &residual_bernoulli_vortex(flow, &derived));
    report.push("weighted_k_divergence", &residual_conservation_general(&derived));
    report.push("k_unit_length", &k_unit_length(&derived));
    if bernoulli_variation(flow) <= opts.constant_b_tol {
        report.push("w_transport_constant_b", &residual_w_transport_constant_b(flow, &derived));
        let laws = residual_constant_b_laws(flow, &derived, opts.constant_b_tol)?;
        report.push("mass_like", &laws.mass_like);
        for (i, r) in laws.momentum_like.iter().enumerate() {
            report.push(&format!("momentum_like_{}", i + 1), r);
        }
        if let Some(r) = &laws.riccati {
            report.push("riccati", r);
        }
        report.push("assembled_w_identity", &super::assembled_identity(flow, &derived));
    }
    Ok(report)
}

/// Max-norm of the primitive-system residual and of the new-variable system
/// residual (largest row in each).
pub fn system_residual_norms(report: &DiagnosticsReport) -> (f64, f64) {
    let max_of = |names: &[&str]| {
        names.iter().filter_map(|n| report.get(n)).fold(0.0f64, |m, e| m.max(e.max_norm))
    };
    (
        max_of(&["primitive_mass", "primitive_momentum_1", "primitive_momentum_2", "primitive_momentum_3"]),
        max_of(&["angle_system_continuity", "angle_system_beta2", "angle_system_beta3", "bernoulli_transport"]),
    )
}
