//! The identity chain behind the transport of `W/(rho G)`.
//!
//! With `X = beta2 d1 - d2`, `Y = beta3 d1 - d3` and
//! `J = Y(G^-1 D beta2) - X(G^-1 D beta3)`:
//!
//! - `[Y, X] K = W d1 K` for any `K`,
//! - `J = G^-1 DW + J1 + J2 + J3` with `J1 = G^-1 (W (d2 beta2 + d3 beta3) + Z)`,
//!   `J2 = G^-1 Z`, `J3 = -2 G^-2 (W (beta2 D beta2 + beta3 D beta3) + J31)`,
//! - `J31 = G Z`,
//! - on flows with constant `B`: `J - W d1 K(s) = rho D(W/(rho G))`.
//!
//! The first three are checked on analytic trigonometric fields, the last on
//! grid fields.

use super::{pointwise, scaled_helicity, transport_derivative, DerivedFields, DiagnosticsReport};
use crate::domain::stencil::{d1, d2, d3};
use crate::domain::{FlowKind, GridSpec, ScalarField3};
use crate::flow::FlowField;
use std::f64::consts::PI;

/// Value, gradient and Hessian at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: f64,
    pub d: [f64; 3],
    pub dd: [[f64; 3]; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trig {
    Sin,
    Cos,
    One,
}

/// `amp * prod_a f_a(k_a pi x_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub amp: f64,
    pub factors: [(Trig, f64); 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigField {
    pub terms: Vec<TrigTerm>,
}

impl TrigTerm {
    fn jet(&self, x: [f64; 3]) -> Jet {
        // value and first two derivatives of each one-dimensional factor
        let f: [[f64; 3]; 3] = std::array::from_fn(|a| {
            let (kind, k) = self.factors[a];
            let w = k * PI;
            let t = w * x[a];
            match kind {
                Trig::Sin => [t.sin(), w * t.cos(), -w * w * t.sin()],
                Trig::Cos => [t.cos(), -w * t.sin(), -w * w * t.cos()],
                Trig::One => [1.0, 0.0, 0.0],
            }
        });
        let prod = |o: [usize; 3]| self.amp * f[0][o[0]] * f[1][o[1]] * f[2][o[2]];
        let mut d = [0.0; 3];
        let mut dd = [[0.0; 3]; 3];
        for a in 0..3 {
            let mut o = [0; 3];
            o[a] = 1;
            d[a] = prod(o);
            for b in 0..3 {
                let mut o = [0; 3];
                o[a] += 1;
                o[b] += 1;
                dd[a][b] = prod(o);
            }
        }
        Jet { v: prod([0, 0, 0]), d, dd }
    }
}

impl TrigField {
    pub fn single(amp: f64, factors: [(Trig, f64); 3]) -> Self {
        Self { terms: vec![TrigTerm { amp, factors }] }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn jet(&self, x: [f64; 3]) -> Jet {
        let mut out = Jet { v: 0.0, d: [0.0; 3], dd: [[0.0; 3]; 3] };
        for t in &self.terms {
            let j = t.jet(x);
            out.v += j.v;
            for a in 0..3 {
                out.d[a] += j.d[a];
                for b in 0..3 {
                    out.dd[a][b] += j.dd[a][b];
                }
            }
        }
        out
    }
}

/// Analytic inputs of the chain check: the two angles and an arbitrary `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct AppendixFields {
    pub beta2: TrigField,
    pub beta3: TrigField,
    pub k: TrigField,
}

impl AppendixFields {
    /// `beta2 = sin(pi x1) cos(pi x2)`, `beta3 = cos(pi x3)` and
    /// `K = 0.3 sin(pi x1) sin(pi x2) cos(pi x3)`.
    pub fn reference() -> Self {
        use Trig::*;
        Self {
            beta2: TrigField::single(1.0, [(Sin, 1.0), (Cos, 1.0), (One, 0.0)]),
            beta3: TrigField::single(1.0, [(One, 0.0), (One, 0.0), (Cos, 1.0)]),
            k: TrigField::single(0.3, [(Sin, 1.0), (Sin, 1.0), (Cos, 1.0)]),
        }
    }
}

/// Pointwise quantities of the chain with exact derivatives.
struct Exact {
    g: f64,
    w: f64,
    z: f64,
    j31: f64,
    /// `G^-1 DW + J1 + J2 + J3` with `J31 = G Z` substituted.
    chain: f64,
    commutator: f64,
    w_d1k: f64,
    /// `G^-1 D beta2`, `G^-1 D beta3`.
    inner: [f64; 2],
}

fn exact_point(b2: &Jet, b3: &Jet, k: &Jet) -> Exact {
    let dd = |f: &Jet| f.d[0] + b2.v * f.d[1] + b3.v * f.d[2];
    let xop = |f: &Jet| b2.v * f.d[0] - f.d[1];
    let yop = |f: &Jet| b3.v * f.d[0] - f.d[2];
    let g = 1.0 + b2.v * b2.v + b3.v * b3.v;
    let w = b3.d[1] - b2.d[2] + b3.v * b2.d[0] - b2.v * b3.d[0];
    let z = b3.v * b3.d[0] * b2.d[2] - b3.v * b2.d[0] * b3.d[2] + b2.v * b3.d[0] * b2.d[1]
        - b2.v * b2.d[0] * b3.d[1];
    let (db2, db3) = (dd(b2), dd(b3));
    let j31 = b2.v * xop(b3) * db2 + b3.v * yop(b3) * db2 - b3.v * yop(b2) * db3 - b2.v * xop(b2) * db3;
    let dw: [f64; 3] = std::array::from_fn(|a| {
        b3.dd[1][a] - b2.dd[2][a] + b3.d[a] * b2.d[0] + b3.v * b2.dd[0][a] - b2.d[a] * b3.d[0] - b2.v * b3.dd[0][a]
    });
    let dw_along = dw[0] + b2.v * dw[1] + b3.v * dw[2];
    let varpi = b2.d[1] + b3.d[2];
    let j1 = (w * varpi + z) / g;
    let j2 = z / g;
    let j3 = -2.0 / (g * g) * (w * (b2.v * db2 + b3.v * db3) + g * z);
    // [Y, X] K with X K = beta2 K_1 - K_2, Y K = beta3 K_1 - K_3
    let dxk: [f64; 3] = std::array::from_fn(|a| b2.d[a] * k.d[0] + b2.v * k.dd[0][a] - k.dd[1][a]);
    let dyk: [f64; 3] = std::array::from_fn(|a| b3.d[a] * k.d[0] + b3.v * k.dd[0][a] - k.dd[2][a]);
    let yxk = b3.v * dxk[0] - dxk[2];
    let xyk = b2.v * dyk[0] - dyk[1];
    Exact {
        g,
        w,
        z,
        j31,
        chain: dw_along / g + j1 + j2 + j3,
        commutator: yxk - xyk,
        w_d1k: w * k.d[0],
        inner: [db2 / g, db3 / g],
    }
}

/// `J` from its definition: outer `X`, `Y` by finite differences of the
/// inner fields `phi2 = G^-1 D beta2`, `phi3 = G^-1 D beta3`.
fn j_from_inner(phi2: &ScalarField3, phi3: &ScalarField3, b2: &ScalarField3, b3: &ScalarField3) -> ScalarField3 {
    let (p21, p23) = (d1(phi2), d3(phi2));
    let (p31, p32) = (d1(phi3), d2(phi3));
    pointwise(phi2.grid, |n| {
        b3.values[n] * p21.values[n] - p23.values[n] - b2.values[n] * p31.values[n] + p32.values[n]
    })
}

/// Entries `j31_minus_gz`, `commutator_identity` (exact derivatives) and
/// `j_chain` (finite-difference outer derivatives) on `grid`.
pub fn verify_appendix_chain(fields: &AppendixFields, grid: GridSpec) -> DiagnosticsReport {
    let mut pts = Vec::with_capacity(grid.len());
    for n in 0..grid.len() {
        let (i, j, k) = grid.ijk(n);
        let x = [grid.x1(i), grid.x2(j), grid.x3(k)];
        let e = exact_point(&fields.beta2.jet(x), &fields.beta3.jet(x), &fields.k.jet(x));
        pts.push((e, fields.beta2.jet(x).v, fields.beta3.jet(x).v));
    }
    let j31 = pointwise(grid, |n| pts[n].0.j31 - pts[n].0.g * pts[n].0.z);
    let comm = pointwise(grid, |n| pts[n].0.commutator - pts[n].0.w_d1k);
    let phi2 = pointwise(grid, |n| pts[n].0.inner[0]);
    let phi3 = pointwise(grid, |n| pts[n].0.inner[1]);
    let b2 = pointwise(grid, |n| pts[n].1);
    let b3 = pointwise(grid, |n| pts[n].2);
    let j = j_from_inner(&phi2, &phi3, &b2, &b3);
    let chain = pointwise(grid, |n| j.values[n] - pts[n].0.chain);
    let mut report = DiagnosticsReport::new();
    report.push("j31_minus_gz", &j31);
    report.push("commutator_identity", &comm);
    report.push("j_chain", &chain);
    // keeps the scale of W visible next to the residuals
    let w = pointwise(grid, |n| pts[n].0.w);
    report.push("w_magnitude", &w);
    report
}

/// `J - W d1 K - rho D(W/(rho G))` on grid fields, with `d1 K = k_rate d1 s`
/// (`d1 p` for incompressible flows). Vanishes to truncation error on
/// constant-B solutions.
pub fn assembled_identity(flow: &FlowField, derived: &DerivedFields) -> ScalarField3 {
    let g = flow.grid();
    let (b2, b3) = (&flow.beta2, &flow.beta3);
    let db2 = transport_derivative(b2, b2, b3);
    let db3 = transport_derivative(b3, b2, b3);
    let phi2 = pointwise(g, |n| db2.values[n] / derived.g.values[n]);
    let phi3 = pointwise(g, |n| db3.values[n] / derived.g.values[n]);
    let j = j_from_inner(&phi2, &phi3, b2, b3);
    let w = scaled_helicity(b2, b3);
    let s1 = d1(&flow.primary);
    let rho = match flow.kind {
        FlowKind::Compressible(_) => derived.primitives.rho.clone(),
        FlowKind::Incompressible => ScalarField3::constant(g, 1.0),
    };
    let ratio = pointwise(g, |n| w.values[n] / (rho.values[n] * derived.g.values[n]));
    let transport = transport_derivative(&ratio, b2, b3);
    pointwise(g, |n| {
        j.values[n] - w.values[n] * derived.k_rate.values[n] * s1.values[n] - rho.values[n] * transport.values[n]
    })
}
