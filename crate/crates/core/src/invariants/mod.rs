//! Derived quantities of a flow (W, G, vorticity, helicity, the K variables,
//! integrating factors) and finite-difference residuals of the identities
//! they satisfy.
//!
//! Every residual is a grid field; `DiagnosticsReport` collects their max and
//! discrete L2 norms and, given a coarse-grid report, two-grid orders.

pub mod appendix;
pub mod quadrature;
pub mod residuals;

pub use appendix::{assembled_identity, verify_appendix_chain, AppendixFields, Jet, Trig, TrigField, TrigTerm};
pub use residuals::{diagnose, DiagnoseOptions};

use crate::domain::stencil::{d1, d2, d3};
use crate::domain::{FlowKind, ScalarField3};
use crate::flow::{FlowError, FlowField, PrimitiveFields};
use crate::gas::angle_factor;
use quadrature::QuadratureError;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InvariantError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("quadrature domain violated at node {node:?}: {source}")]
    Quadrature { node: (usize, usize, usize), source: QuadratureError },
    #[error("zero velocity at node {0:?}")]
    ZeroVelocity((usize, usize, usize)),
    #[error("B varies by {variation:e}, above the constant-B tolerance {tol:e}")]
    NonConstantBernoulli { variation: f64, tol: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub name: String,
    pub max_norm: f64,
    pub l2_norm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub entries: Vec<ReportEntry>,
}

impl DiagnosticsReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the norms of a residual field. Names are unique.
    pub fn push(&mut self, name: &str, residual: &ScalarField3) {
        self.push_norms(name, residual.max_abs(), residual.l2_norm());
    }

    pub fn push_norms(&mut self, name: &str, max_norm: f64, l2_norm: f64) {
        assert!(self.get(name).is_none(), "duplicate report entry {name}");
        self.entries.push(ReportEntry { name: name.to_string(), max_norm, l2_norm, order: None });
    }

    pub fn get(&self, name: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    /// Fills `order = log2(coarse max / self max)` for entries present in
    /// both reports; `self` is the report on the grid refined by two.
    pub fn with_orders(mut self, coarse: &DiagnosticsReport) -> Self {
        for e in &mut self.entries {
            if let Some(c) = coarse.get(&e.name) {
                if e.max_norm > 0.0 && c.max_norm > 0.0 {
                    e.order = Some((c.max_norm / e.max_norm).log2());
                }
            }
        }
        self
    }

    /// Coarse-to-fine max-norm ratio for one entry.
    pub fn reduction_factor(&self, coarse: &DiagnosticsReport, name: &str) -> Option<f64> {
        Some(coarse.get(name)?.max_norm / self.get(name)?.max_norm)
    }
}

pub(crate) fn pointwise(grid: crate::domain::GridSpec, f: impl Fn(usize) -> f64) -> ScalarField3 {
    ScalarField3 { grid, values: (0..grid.len()).map(f).collect() }
}

/// `D f = d1 f + beta2 d2 f + beta3 d3 f`.
pub fn transport_derivative(f: &ScalarField3, beta2: &ScalarField3, beta3: &ScalarField3) -> ScalarField3 {
    let (a, b, c) = (d1(f), d2(f), d3(f));
    pointwise(f.grid, |n| a.values[n] + beta2.values[n] * b.values[n] + beta3.values[n] * c.values[n])
}

/// `div (f1, f2, f3)`.
pub fn divergence(f: [&ScalarField3; 3]) -> ScalarField3 {
    let (a, b, c) = (d1(f[0]), d2(f[1]), d3(f[2]));
    pointwise(f[0].grid, |n| a.values[n] + b.values[n] + c.values[n])
}

pub fn curl(u: [&ScalarField3; 3]) -> [ScalarField3; 3] {
    let g = u[0].grid;
    let (d2u3, d3u2) = (d2(u[2]), d3(u[1]));
    let (d3u1, d1u3) = (d3(u[0]), d1(u[2]));
    let (d1u2, d2u1) = (d1(u[1]), d2(u[0]));
    [
        pointwise(g, |n| d2u3.values[n] - d3u2.values[n]),
        pointwise(g, |n| d3u1.values[n] - d1u3.values[n]),
        pointwise(g, |n| d1u2.values[n] - d2u1.values[n]),
    ]
}

/// `W = d2 beta3 - d3 beta2 + beta3 d1 beta2 - beta2 d1 beta3`.
pub fn scaled_helicity(beta2: &ScalarField3, beta3: &ScalarField3) -> ScalarField3 {
    let (d2b3, d3b2, d1b2, d1b3) = (d2(beta3), d3(beta2), d1(beta2), d1(beta3));
    pointwise(beta2.grid, |n| {
        d2b3.values[n] - d3b2.values[n] + beta3.values[n] * d1b2.values[n] - beta2.values[n] * d1b3.values[n]
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFields {
    pub w: ScalarField3,
    pub g: ScalarField3,
    pub vorticity: [ScalarField3; 3],
    /// `u . curl u`.
    pub helicity_density: ScalarField3,
    /// `K1 = G^-1/2`, `Ki = beta_i K1`.
    pub k: [ScalarField3; 3],
    /// `I(rho, B)` or `I(p)` with each node's own `B`.
    pub i_field: ScalarField3,
    pub q_field: ScalarField3,
    /// `A = K / I`.
    pub a: [ScalarField3; 3],
    /// `mu = W / G`.
    pub mu: ScalarField3,
    /// `d2 beta2 + d3 beta3`.
    pub angle_divergence: ScalarField3,
    /// `K'(s) = c^2 / (2 (B - h))`, or `1 / (2 (B - p))` for incompressible
    /// flows, so that `d1 K = k_rate d1 s` (resp. `d1 p`).
    pub k_rate: ScalarField3,
    pub primitives: PrimitiveFields,
    /// Lower limit of the incompressible integrals.
    pub reference_pressure: Option<f64>,
}

/// Default incompressible reference pressure: the field minimum less one
/// grid spacing.
pub fn default_reference_pressure(flow: &FlowField) -> f64 {
    let g = flow.grid();
    let min = flow.primary.values.iter().copied().fold(f64::INFINITY, f64::min);
    min - g.h1().min(g.h2()).min(g.h3())
}

pub fn compute_derived(flow: &FlowField, reference_pressure: Option<f64>) -> Result<DerivedFields, InvariantError> {
    let grid = flow.grid();
    let primitives = flow.primitives()?;
    let (b2, b3, b) = (&flow.beta2, &flow.beta3, &flow.bernoulli);
    let w = scaled_helicity(b2, b3);
    let g = pointwise(grid, |n| angle_factor(b2.values[n], b3.values[n]));
    let vorticity = curl([&primitives.u1, &primitives.u2, &primitives.u3]);
    let u = [&primitives.u1, &primitives.u2, &primitives.u3];
    let helicity_density = pointwise(grid, |n| (0..3).map(|c| u[c].values[n] * vorticity[c].values[n]).sum());
    let k1 = g.map(|v| 1.0 / v.sqrt());
    let k = [k1.clone(), k1.zip_map(b2, |a, c| a * c), k1.zip_map(b3, |a, c| a * c)];

    let mut i_values = Vec::with_capacity(grid.len());
    let mut q_values = Vec::with_capacity(grid.len());
    let mut rate = Vec::with_capacity(grid.len());
    let p_ref = match flow.kind {
        FlowKind::Compressible(_) => None,
        FlowKind::Incompressible => Some(reference_pressure.unwrap_or_else(|| default_reference_pressure(flow))),
    };
    for n in 0..grid.len() {
        let node_err = |source| InvariantError::Quadrature { node: grid.ijk(n), source };
        match flow.kind {
            FlowKind::Compressible(gas) => {
                let rho = primitives.rho.values[n];
                i_values.push(quadrature::integrating_factor(&gas, rho, b.values[n]).map_err(node_err)?);
                q_values.push(quadrature::q_potential(&gas, rho, b.values[n]).map_err(node_err)?);
                rate.push(gas.sound_speed_sq(rho) / (2.0 * (b.values[n] - gas.enthalpy(rho))));
            }
            FlowKind::Incompressible => {
                let (p, pr) = (flow.primary.values[n], p_ref.unwrap_or(0.0));
                i_values.push(quadrature::integrating_factor_incompressible(p, pr, b.values[n]).map_err(node_err)?);
                q_values.push(quadrature::q_potential_incompressible(p, pr, b.values[n]).map_err(node_err)?);
                rate.push(1.0 / (2.0 * (b.values[n] - p)));
            }
        }
    }
    let i_field = ScalarField3 { grid, values: i_values };
    let a = k.clone().map(|kc| kc.zip_map(&i_field, |x, i| x / i));
    let mu = w.zip_map(&g, |a, b| a / b);
    let (d2b2, d3b3) = (d2(b2), d3(b3));
    Ok(DerivedFields {
        angle_divergence: d2b2.zip_map(&d3b3, |a, b| a + b),
        w,
        g,
        vorticity,
        helicity_density,
        k,
        i_field,
        q_field: ScalarField3 { grid, values: q_values },
        a,
        mu,
        k_rate: ScalarField3 { grid, values: rate },
        primitives,
        reference_pressure: p_ref,
    })
}
