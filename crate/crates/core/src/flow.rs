//! Grid fields of a flow in the new variables and their primitive form.

use crate::domain::{BackgroundState, FlowKind, GridSpec, ScalarField3};
use crate::gas::angle_factor;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("stagnation at node {node:?} (x = {x:?}): B = {bernoulli}, limit {level}")]
    Stagnation { node: (usize, usize, usize), x: [f64; 3], bernoulli: f64, level: f64 },
    #[error("non-finite value at node {node:?}")]
    NonFinite { node: (usize, usize, usize) },
}

/// Perturbations `(s - s0 or p - p0, beta2, beta3, B - B0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbation {
    pub primary: ScalarField3,
    pub beta2: ScalarField3,
    pub beta3: ScalarField3,
    pub bernoulli: ScalarField3,
}

impl Perturbation {
    pub fn zeros(grid: GridSpec) -> Self {
        let z = ScalarField3::zeros(grid);
        Self { primary: z.clone(), beta2: z.clone(), beta3: z.clone(), bernoulli: z }
    }

    pub fn grid(&self) -> GridSpec {
        self.primary.grid
    }

    pub fn components(&self) -> [&ScalarField3; 4] {
        [&self.primary, &self.beta2, &self.beta3, &self.bernoulli]
    }

    /// `(1 - w) self + w other`.
    pub fn relax(&self, other: &Self, w: f64) -> Self {
        let mix = |a: &ScalarField3, b: &ScalarField3| a.zip_map(b, |x, y| (1.0 - w) * x + w * y);
        Self {
            primary: mix(&self.primary, &other.primary),
            beta2: mix(&self.beta2, &other.beta2),
            beta3: mix(&self.beta3, &other.beta3),
            bernoulli: mix(&self.bernoulli, &other.bernoulli),
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let d = |a: &ScalarField3, b: &ScalarField3| a.zip_map(b, |x, y| x - y);
        Self {
            primary: d(&self.primary, &other.primary),
            beta2: d(&self.beta2, &other.beta2),
            beta3: d(&self.beta3, &other.beta3),
            bernoulli: d(&self.bernoulli, &other.bernoulli),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|c| c.is_finite())
    }
}

/// Full fields `(s or p, beta2, beta3, B)` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    pub kind: FlowKind,
    pub primary: ScalarField3,
    pub beta2: ScalarField3,
    pub beta3: ScalarField3,
    pub bernoulli: ScalarField3,
}

/// `(rho, u1, u2, u3)` and the pressure, node by node.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveFields {
    pub rho: ScalarField3,
    pub u1: ScalarField3,
    pub u2: ScalarField3,
    pub u3: ScalarField3,
    pub p: ScalarField3,
}

impl FlowField {
    pub fn from_perturbation(background: &BackgroundState, pert: &Perturbation) -> Self {
        let g = pert.grid();
        let b0 = ScalarField3::extrude(g, &background.b0);
        Self {
            kind: background.kind,
            primary: pert.primary.map(|v| background.level + v),
            beta2: pert.beta2.clone(),
            beta3: pert.beta3.clone(),
            bernoulli: pert.bernoulli.zip_map(&b0, |v, b| b + v),
        }
    }

    pub fn background(background: &BackgroundState, grid: GridSpec) -> Self {
        Self::from_perturbation(background, &Perturbation::zeros(grid))
    }

    pub fn grid(&self) -> GridSpec {
        self.primary.grid
    }

    pub fn perturbation(&self, background: &BackgroundState) -> Perturbation {
        let b0 = ScalarField3::extrude(self.grid(), &background.b0);
        Perturbation {
            primary: self.primary.map(|v| v - background.level),
            beta2: self.beta2.clone(),
            beta3: self.beta3.clone(),
            bernoulli: self.bernoulli.zip_map(&b0, |v, b| v - b),
        }
    }

    /// Density at every node (1 for incompressible flows).
    pub fn density(&self) -> ScalarField3 {
        match self.kind {
            FlowKind::Compressible(_) => self.primary.map(f64::exp),
            FlowKind::Incompressible => ScalarField3::constant(self.grid(), 1.0),
        }
    }

    /// `h(rho)` (compressible) or `p` (incompressible) at every node.
    pub fn bernoulli_level(&self) -> ScalarField3 {
        match self.kind {
            FlowKind::Compressible(gas) => self.primary.map(|s| gas.enthalpy(s.exp())),
            FlowKind::Incompressible => self.primary.clone(),
        }
    }

    /// Squared axial speed `2 (B - level)/G`, failing at the first stagnant node.
    pub fn axial_speed_sq(&self) -> Result<ScalarField3, FlowError> {
        let g = self.grid();
        let level = self.bernoulli_level();
        let mut out = Vec::with_capacity(g.len());
        for n in 0..g.len() {
            let (b, l) = (self.bernoulli.values[n], level.values[n]);
            let (b2, b3) = (self.beta2.values[n], self.beta3.values[n]);
            if !(b.is_finite() && l.is_finite() && b2.is_finite() && b3.is_finite()) {
                return Err(FlowError::NonFinite { node: g.ijk(n) });
            }
            if !(b > l) {
                let (i, j, k) = g.ijk(n);
                return Err(FlowError::Stagnation {
                    node: (i, j, k),
                    x: [g.x1(i), g.x2(j), g.x3(k)],
                    bernoulli: b,
                    level: l,
                });
            }
            out.push(2.0 * (b - l) / angle_factor(b2, b3));
        }
        Ok(ScalarField3 { grid: g, values: out })
    }

    pub fn primitives(&self) -> Result<PrimitiveFields, FlowError> {
        let u1 = self.axial_speed_sq()?.map(f64::sqrt);
        let p = match self.kind {
            FlowKind::Compressible(gas) => self.primary.map(|s| gas.pressure(s.exp())),
            FlowKind::Incompressible => self.primary.clone(),
        };
        Ok(PrimitiveFields {
            rho: self.density(),
            u2: self.beta2.zip_map(&u1, |b, u| b * u),
            u3: self.beta3.zip_map(&u1, |b, u| b * u),
            u1,
            p,
        })
    }
}
