//! Cross-section profiles: a small trigonometric catalog with exact
//! derivatives, constants, and tabulated quadrant data extended by reflection.

use super::field::CrossField;
use super::grid::CrossGrid;
use super::DomainError;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrigKind {
    SinSin,
    SinCos,
    CosSin,
    CosCos,
}

/// Values on the closed quadrant grid `[0,1]^2`, `x2` major.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrantTable {
    pub m2: usize,
    pub m3: usize,
    pub values: Vec<f64>,
}

impl QuadrantTable {
    pub fn new(m2: usize, m3: usize, values: Vec<f64>) -> Result<Self, DomainError> {
        if values.len() != m2 * m3 || m2 < 2 || m3 < 2 {
            return Err(DomainError::GridMismatch(format!(
                "quadrant table of {} values does not match shape {m2} x {m3}",
                values.len()
            )));
        }
        Ok(Self { m2, m3, values })
    }

    pub fn at(&self, a: usize, b: usize) -> f64 {
        self.values[a * self.m3 + b]
    }

    /// Quadrant samples of a function, for the cross-section `grid`.
    pub fn sample(grid: CrossGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let (m2, m3) = grid.quadrant_shape();
        let mut values = Vec::with_capacity(m2 * m3);
        for a in 0..m2 {
            for b in 0..m3 {
                values.push(f(a as f64 * grid.h2(), b as f64 * grid.h3()));
            }
        }
        Self { m2, m3, values }
    }
}

/// Extends quadrant data to the period-2 torus with `f(-x2, x3) = ±f(x2, x3)`
/// and likewise in `x3`.
pub fn extend_reflect(
    table: &QuadrantTable,
    grid: CrossGrid,
    parity2: Parity,
    parity3: Parity,
) -> Result<CrossField, DomainError> {
    if grid.quadrant_shape() != (table.m2, table.m3) {
        return Err(DomainError::GridMismatch(format!(
            "quadrant table {} x {} does not fit cross-section {} x {}",
            table.m2, table.m3, grid.n2, grid.n3
        )));
    }
    let (c2, c3) = (grid.n2 / 2, grid.n3 / 2);
    Ok(CrossField::from_index_fn(grid, |j, k| {
        let (a, s2) = if j >= c2 { (j - c2, 1.0) } else { (c2 - j, parity2.sign()) };
        let (b, s3) = if k >= c3 { (k - c3, 1.0) } else { (c3 - k, parity3.sign()) };
        s2 * s3 * table.at(a, b)
    }))
}

impl CrossField {
    pub fn from_index_fn(grid: CrossGrid, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.n2 {
            for k in 0..grid.n3 {
                values.push(f(j, k));
            }
        }
        Self { grid, values }
    }

    /// Restriction to the closed quadrant `[0,1]^2`.
    pub fn quadrant(&self) -> QuadrantTable {
        let (m2, m3) = self.grid.quadrant_shape();
        let (c2, c3) = (self.grid.n2 / 2, self.grid.n3 / 2);
        let mut values = Vec::with_capacity(m2 * m3);
        for a in 0..m2 {
            for b in 0..m3 {
                values.push(self.at((c2 + a) % self.grid.n2, (c3 + b) % self.grid.n3));
            }
        }
        QuadrantTable { m2, m3, values }
    }
}

/// A boundary or background profile over the cross-section.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `amp * f(k2 pi x2) * g(k3 pi x3) + offset`.
    Trig { kind: TrigKind, k2: f64, k3: f64, amp: f64, offset: f64 },
    Constant(f64),
    Tabulated(QuadrantTable),
}

fn trig_derivative(is_sin: bool, k: f64, order: usize, x: f64) -> f64 {
    // d^n/dx^n sin(w x) = w^n sin(w x + n pi/2), same shift for cos
    let w = k * PI;
    let phase = w * x + order as f64 * PI / 2.0;
    let base = if is_sin { phase.sin() } else { phase.cos() };
    w.powi(order as i32) * base
}

impl Profile {
    /// Catalog lookup. Trigonometric families take `[k2, k3]` with optional
    /// amplitude and offset, `constant` takes `[c]`.
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self, DomainError> {
        let kind = match name {
            "sin_sin" => TrigKind::SinSin,
            "sin_cos" => TrigKind::SinCos,
            "cos_sin" => TrigKind::CosSin,
            "cos_cos" => TrigKind::CosCos,
            "constant" => {
                return match params {
                    [c] if c.is_finite() => Ok(Profile::Constant(*c)),
                    _ => Err(DomainError::ProfileParams(format!("constant expects one value, got {params:?}"))),
                }
            }
            "tabulated" => {
                return Err(DomainError::ProfileParams("tabulated profiles are read from a file".into()))
            }
            other => return Err(DomainError::UnknownProfile(other.to_string())),
        };
        if params.len() < 2 || params.len() > 4 || params.iter().any(|p| !p.is_finite()) {
            return Err(DomainError::ProfileParams(format!(
                "{name} expects [k2, k3, amp?, offset?], got {params:?}"
            )));
        }
        let (k2, k3) = (params[0], params[1]);
        if k2 < 0.0 || k3 < 0.0 || k2.fract() != 0.0 || k3.fract() != 0.0 {
            return Err(DomainError::ProfileParams(format!(
                "{name}: wave numbers must be nonnegative integers for period 2, got {k2}, {k3}"
            )));
        }
        Ok(Profile::Trig {
            kind,
            k2,
            k3,
            amp: params.get(2).copied().unwrap_or(1.0),
            offset: params.get(3).copied().unwrap_or(0.0),
        })
    }

    /// Exact mixed derivative `d2^o2 d3^o3` at a point, when available.
    pub fn derivative(&self, o2: usize, o3: usize, x2: f64, x3: f64) -> Option<f64> {
        match self {
            Profile::Trig { kind, k2, k3, amp, offset } => {
                let (s2, s3) = match kind {
                    TrigKind::SinSin => (true, true),
                    TrigKind::SinCos => (true, false),
                    TrigKind::CosSin => (false, true),
                    TrigKind::CosCos => (false, false),
                };
                let v = amp * trig_derivative(s2, *k2, o2, x2) * trig_derivative(s3, *k3, o3, x3);
                Some(if o2 == 0 && o3 == 0 { v + offset } else { v })
            }
            Profile::Constant(c) => Some(if o2 == 0 && o3 == 0 { *c } else { 0.0 }),
            Profile::Tabulated(_) => None,
        }
    }

    pub fn value(&self, x2: f64, x3: f64) -> Option<f64> {
        self.derivative(0, 0, x2, x3)
    }

    /// Samples on the torus. Tabulated data are extended with the given
    /// parities; analytic profiles already carry theirs.
    pub fn sample(&self, grid: CrossGrid, parity2: Parity, parity3: Parity) -> Result<CrossField, DomainError> {
        match self {
            Profile::Tabulated(t) => extend_reflect(t, grid, parity2, parity3),
            p => Ok(CrossField::from_fn(grid, |x2, x3| p.value(x2, x3).unwrap())),
        }
    }
}
