use super::grid::{CrossGrid, GridSpec};
use super::DomainError;

/// One value per node of a `GridSpec`, x3 fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField3 {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField3 {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_vec(grid: GridSpec, values: Vec<f64>) -> Result<Self, DomainError> {
        if values.len() != grid.len() {
            return Err(DomainError::GridMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n1 {
            let x1 = grid.x1(i);
            for j in 0..grid.n2 {
                let x2 = grid.x2(j);
                for k in 0..grid.n3 {
                    values.push(f(x1, x2, grid.x3(k)));
                }
            }
        }
        Self { grid, values }
    }

    /// Every axial slice equal to `c`.
    pub fn extrude(grid: GridSpec, c: &CrossField) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for _ in 0..grid.n1 {
            values.extend_from_slice(&c.values);
        }
        Self { grid, values }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.idx(i, j, k)]
    }

    pub fn slice(&self, i: usize) -> &[f64] {
        let m = self.grid.cross_len();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn slice_mut(&mut self, i: usize) -> &mut [f64] {
        let m = self.grid.cross_len();
        &mut self.values[i * m..(i + 1) * m]
    }

    pub fn plane(&self, i: usize) -> CrossField {
        CrossField { grid: self.grid.cross(), values: self.slice(i).to_vec() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Discrete L2 norm with the node volume `h1 h2 h3`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.grid.cell_volume()).sqrt()
    }
}

/// One value per cross-section node, periodic in both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossField {
    pub grid: CrossGrid,
    pub values: Vec<f64>,
}

impl CrossField {
    pub fn constant(grid: CrossGrid, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()] }
    }

    pub fn from_fn(grid: CrossGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.n2 {
            for k in 0..grid.n3 {
                values.push(f(grid.x2(j), grid.x3(k)));
            }
        }
        Self { grid, values }
    }

    #[inline]
    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.values[self.grid.idx(j, k)]
    }

    /// Value with periodic index wrap.
    #[inline]
    pub fn at_wrapped(&self, j: isize, k: isize) -> f64 {
        let j = j.rem_euclid(self.grid.n2 as isize) as usize;
        let k = k.rem_euclid(self.grid.n3 as isize) as usize;
        self.at(j, k)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| s * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}
