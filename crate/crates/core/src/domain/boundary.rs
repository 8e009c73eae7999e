//! Background states and boundary data, with the edge compatibility check
//! that makes the parity extension smooth.

use super::field::CrossField;
use super::grid::CrossGrid;
use super::profile::{Parity, Profile, QuadrantTable};
use super::stencil::{cross_d2, cross_d3, fd_weights};
use super::DomainError;
use crate::gas::GasModel;

/// Shapes of the boundary data before scaling by `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryProfiles {
    pub beta2_in: Profile,
    pub beta3_in: Profile,
    pub b_in: Profile,
    /// Exit log-density perturbation, or exit pressure perturbation in the
    /// incompressible case.
    pub exit: Profile,
}

impl BoundaryProfiles {
    /// `sin_cos`, `cos_sin` and two `cos_cos` shapes with unit wave numbers.
    pub fn reference() -> Self {
        Self {
            beta2_in: Profile::builtin("sin_cos", &[1.0, 1.0]).unwrap(),
            beta3_in: Profile::builtin("cos_sin", &[1.0, 1.0]).unwrap(),
            b_in: Profile::builtin("cos_cos", &[1.0, 1.0]).unwrap(),
            exit: Profile::builtin("cos_cos", &[1.0, 1.0]).unwrap(),
        }
    }

    pub fn sample(&self, grid: CrossGrid, epsilon: f64) -> Result<BoundaryData, DomainError> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(DomainError::ProfileParams(format!("epsilon = {epsilon} must be nonnegative")));
        }
        Ok(BoundaryData {
            beta2_in: self.beta2_in.sample(grid, Parity::Odd, Parity::Even)?,
            beta3_in: self.beta3_in.sample(grid, Parity::Even, Parity::Odd)?,
            b_in: self.b_in.sample(grid, Parity::Even, Parity::Even)?,
            exit: self.exit.sample(grid, Parity::Even, Parity::Even)?,
            epsilon,
        })
    }
}

/// Boundary data on the torus, unscaled; the flow sees `epsilon` times these.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub beta2_in: CrossField,
    pub beta3_in: CrossField,
    pub b_in: CrossField,
    pub exit: CrossField,
    pub epsilon: f64,
}

impl BoundaryData {
    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    pub fn grid(&self) -> CrossGrid {
        self.beta2_in.grid
    }

    /// `epsilon (d2 beta2_in + d3 beta3_in)`, the inlet value of the flux.
    pub fn inlet_flux(&self) -> CrossField {
        let a = cross_d2(&self.beta2_in);
        let b = cross_d3(&self.beta3_in);
        CrossField {
            grid: a.grid,
            values: a.values.iter().zip(&b.values).map(|(x, y)| self.epsilon * (x + y)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowKind {
    Compressible(GasModel),
    Incompressible,
}

/// Background flow `(rho0, u0(x2, x3), 0, 0)` or `(p0, u0, 0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundState {
    pub kind: FlowKind,
    /// Density (1 for incompressible flows).
    pub rho0: f64,
    /// `ln rho0` for compressible flows, `p0` for incompressible ones.
    pub level: f64,
    pub u0: CrossField,
    /// `u0^2/2 + h(rho0)` or `u0^2/2 + p0`.
    pub b0: CrossField,
}

impl BackgroundState {
    pub fn compressible(gas: GasModel, rho0: f64, u0: CrossField, margin: f64) -> Result<Self, DomainError> {
        if !(rho0 > 0.0 && rho0.is_finite()) {
            return Err(DomainError::Background(format!("rho0 = {rho0} must be positive")));
        }
        let c2 = gas.sound_speed_sq(rho0);
        for &u in &u0.values {
            if !(u > 0.0) || !(c2 - u * u > margin) {
                return Err(DomainError::Background(format!(
                    "u0 = {u} is not a positive subsonic axial speed (c^2 = {c2}, margin {margin})"
                )));
            }
        }
        let h = gas.enthalpy(rho0);
        let b0 = u0.map(|u| 0.5 * u * u + h);
        Ok(Self { kind: FlowKind::Compressible(gas), rho0, level: rho0.ln(), u0, b0 })
    }

    pub fn incompressible(p0: f64, u0: CrossField) -> Result<Self, DomainError> {
        if !p0.is_finite() {
            return Err(DomainError::Background(format!("p0 = {p0} must be finite")));
        }
        if let Some(&u) = u0.values.iter().find(|&&u| !(u > 0.0 && u.is_finite())) {
            return Err(DomainError::Background(format!("u0 = {u} must be positive")));
        }
        let b0 = u0.map(|u| 0.5 * u * u + p0);
        Ok(Self { kind: FlowKind::Incompressible, rho0: 1.0, level: p0, u0, b0 })
    }

    pub fn grid(&self) -> CrossGrid {
        self.u0.grid
    }

    pub fn is_compressible(&self) -> bool {
        matches!(self.kind, FlowKind::Compressible(_))
    }
}

/// One entry of a compatibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeCondition {
    pub field: String,
    pub condition: String,
    pub measured: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    pub conditions: Vec<EdgeCondition>,
}

impl CompatibilityReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EdgeCondition> {
        self.conditions.iter().filter(|c| !c.passed)
    }
}

/// Default tolerance for catalog profiles, whose derivatives are exact.
pub const CATALOG_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
enum Axis {
    X2,
    X3,
}

/// Edge norm of `d^order f` on the lines `x = 0` and `x = 1` of the quadrant.
fn edge_norm(profile: &Profile, grid: CrossGrid, axis: Axis, order: usize) -> f64 {
    let (m2, m3) = grid.quadrant_shape();
    let (h2, h3) = (grid.h2(), grid.h3());
    let mut worst: f64 = 0.0;
    match profile {
        Profile::Tabulated(t) => {
            for edge in [0usize, 1] {
                let lines = match axis {
                    Axis::X2 => m3,
                    Axis::X3 => m2,
                };
                for line in 0..lines {
                    let v = tabulated_edge_derivative(t, axis, edge, line, order, h2, h3);
                    worst = worst.max(v.abs());
                }
            }
        }
        p => {
            for edge in [0.0, 1.0] {
                match axis {
                    Axis::X2 => {
                        for b in 0..m3 {
                            let v = p.derivative(order, 0, edge, b as f64 * h3).unwrap();
                            worst = worst.max(v.abs());
                        }
                    }
                    Axis::X3 => {
                        for a in 0..m2 {
                            let v = p.derivative(0, order, a as f64 * h2, edge).unwrap();
                            worst = worst.max(v.abs());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// One-sided fourth-order derivative at a quadrant edge from inside.
fn tabulated_edge_derivative(
    t: &QuadrantTable,
    axis: Axis,
    edge: usize,
    line: usize,
    order: usize,
    h2: f64,
    h3: f64,
) -> f64 {
    let (len, h) = match axis {
        Axis::X2 => (t.m2, h2),
        Axis::X3 => (t.m3, h3),
    };
    let value = |m: usize| match axis {
        Axis::X2 => t.at(m, line),
        Axis::X3 => t.at(line, m),
    };
    let first = if edge == 0 { 0 } else { len - 1 };
    if order == 0 {
        return value(first);
    }
    let npts = (order + 4).min(len);
    let xs: Vec<f64> = (0..npts).map(|m| m as f64 * if edge == 0 { h } else { -h }).collect();
    let w = fd_weights(0.0, &xs, order);
    (0..npts)
        .map(|m| {
            let node = if edge == 0 { m } else { len - 1 - m };
            w[order][m] * value(node)
        })
        .sum()
}

/// Edge conditions for smooth parity extension: odd fields vanish with their
/// second derivative across the symmetry lines, even fields have vanishing
/// first and third derivatives there.
pub fn check_compatibility(profiles: &BoundaryProfiles, grid: CrossGrid, tol: f64) -> CompatibilityReport {
    let mut conditions = Vec::new();
    let mut push = |field: &str, p: &Profile, axis: Axis, order: usize| {
        let measured = edge_norm(p, grid, axis, order);
        let ax = match axis {
            Axis::X2 => "x2",
            Axis::X3 => "x3",
        };
        conditions.push(EdgeCondition {
            field: field.to_string(),
            condition: format!("d{ax}^{order} = 0 at {ax} in {{0, 1}}"),
            measured,
            passed: measured <= tol,
        });
    };
    for j in [0, 2] {
        push("beta2_in", &profiles.beta2_in, Axis::X2, j);
    }
    for j in [0, 2] {
        push("beta3_in", &profiles.beta3_in, Axis::X3, j);
    }
    for (name, p) in [("B_in", &profiles.b_in), ("exit", &profiles.exit)] {
        for axis in [Axis::X2, Axis::X3] {
            for k in [1, 3] {
                push(name, p, axis, k);
            }
        }
    }
    CompatibilityReport { conditions }
}

/// Even-extension smoothness of a background speed profile.
pub fn check_even_profile(name: &str, profile: &Profile, grid: CrossGrid, tol: f64) -> CompatibilityReport {
    let mut conditions = Vec::new();
    for axis in [Axis::X2, Axis::X3] {
        for k in [1, 3] {
            let measured = edge_norm(profile, grid, axis, k);
            let ax = match axis {
                Axis::X2 => "x2",
                Axis::X3 => "x3",
            };
            conditions.push(EdgeCondition {
                field: name.to_string(),
                condition: format!("d{ax}^{k} = 0 at {ax} in {{0, 1}}"),
                measured,
                passed: measured <= tol,
            });
        }
    }
    CompatibilityReport { conditions }
}
