//! Periodic tensor-product cubic B-spline interpolation on the cross-section.

use super::grid::CrossGrid;

/// Solver for the periodic system `(c[j-1] + 4 c[j] + c[j+1]) / 6 = f[j]`,
/// via Thomas elimination with a Sherman-Morrison corner correction.
#[derive(Debug, Clone)]
pub struct CyclicSolver {
    n: usize,
    cprime: Vec<f64>,
    denom: Vec<f64>,
    z: Vec<f64>,
    z_factor: f64,
}

const GAMMA: f64 = -4.0;

impl CyclicSolver {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3);
        let mut diag = vec![4.0; n];
        diag[0] -= GAMMA;
        diag[n - 1] -= 1.0 / GAMMA;
        let mut cprime = vec![0.0; n];
        let mut denom = vec![0.0; n];
        denom[0] = diag[0];
        cprime[0] = 1.0 / denom[0];
        for i in 1..n {
            denom[i] = diag[i] - cprime[i - 1];
            cprime[i] = 1.0 / denom[i];
        }
        let mut s = Self { n, cprime, denom, z: vec![0.0; n], z_factor: 0.0 };
        let mut u = vec![0.0; n];
        u[0] = GAMMA;
        u[n - 1] = 1.0;
        s.thomas(&mut u);
        s.z_factor = 1.0 + u[0] + u[n - 1] / GAMMA;
        s.z = u;
        s
    }

    fn thomas(&self, r: &mut [f64]) {
        let n = self.n;
        r[0] /= self.denom[0];
        for i in 1..n {
            r[i] = (r[i] - r[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            r[i] -= self.cprime[i] * r[i + 1];
        }
    }

    /// Replaces samples by spline coefficients, in place. `stride` steps
    /// between consecutive entries of the line.
    pub fn solve_strided(&self, data: &mut [f64], offset: usize, stride: usize, buf: &mut Vec<f64>) {
        let n = self.n;
        buf.clear();
        buf.extend((0..n).map(|i| 6.0 * data[offset + i * stride]));
        self.thomas(buf);
        let fact = (buf[0] + buf[n - 1] / GAMMA) / self.z_factor;
        for i in 0..n {
            data[offset + i * stride] = buf[i] - fact * self.z[i];
        }
    }
}

/// Converts cross-section samples (x3 fastest) into B-spline coefficients.
pub struct Prefilter {
    grid: CrossGrid,
    s2: CyclicSolver,
    s3: CyclicSolver,
}

impl Prefilter {
    pub fn new(grid: CrossGrid) -> Self {
        Self { grid, s2: CyclicSolver::new(grid.n2), s3: CyclicSolver::new(grid.n3) }
    }

    pub fn apply(&self, data: &mut [f64]) {
        let (n2, n3) = (self.grid.n2, self.grid.n3);
        let mut buf = Vec::with_capacity(n2.max(n3));
        for j in 0..n2 {
            self.s3.solve_strided(data, j * n3, 1, &mut buf);
        }
        for k in 0..n3 {
            self.s2.solve_strided(data, k, n3, &mut buf);
        }
    }
}

#[inline]
fn basis(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    let s = 1.0 - t;
    [
        s * s * s / 6.0,
        (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0,
        (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0,
        t3 / 6.0,
    ]
}

/// Stencil of a point: 4 x 4 coefficient offsets and their weights.
#[derive(Debug, Clone, Copy)]
pub struct SplineStencil {
    rows: [usize; 4],
    cols: [usize; 4],
    w2: [f64; 4],
    w3: [f64; 4],
}

impl SplineStencil {
    #[inline]
    pub fn new(grid: CrossGrid, y2: f64, y3: f64) -> Self {
        let (rows, w2) = axis_stencil(y2, grid.h2(), grid.n2);
        let (c, w3) = axis_stencil(y3, grid.h3(), grid.n3);
        Self {
            rows: [rows[0] * grid.n3, rows[1] * grid.n3, rows[2] * grid.n3, rows[3] * grid.n3],
            cols: c,
            w2,
            w3,
        }
    }

    #[inline]
    pub fn eval(&self, coeffs: &[f64]) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            let r = self.rows[a];
            let line = self.w3[0] * coeffs[r + self.cols[0]]
                + self.w3[1] * coeffs[r + self.cols[1]]
                + self.w3[2] * coeffs[r + self.cols[2]]
                + self.w3[3] * coeffs[r + self.cols[3]];
            acc += self.w2[a] * line;
        }
        acc
    }
}

#[inline]
fn axis_stencil(y: f64, h: f64, n: usize) -> ([usize; 4], [f64; 4]) {
    let u = (y + 1.0) / h;
    let fl = u.floor();
    let t = u - fl;
    let base = (fl as i64 - 1).rem_euclid(n as i64) as usize;
    let mut idx = [0usize; 4];
    for (m, slot) in idx.iter_mut().enumerate() {
        *slot = (base + m) % n;
    }
    (idx, basis(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn coeffs(grid: CrossGrid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut v: Vec<f64> = (0..grid.n2)
            .flat_map(|j| (0..grid.n3).map(move |k| (j, k)))
            .map(|(j, k)| f(grid.x2(j), grid.x3(k)))
            .collect();
        Prefilter::new(grid).apply(&mut v);
        v
    }

    #[test]
    fn interpolates_nodes() {
        let g = CrossGrid { n2: 12, n3: 10 };
        let f = |a: f64, b: f64| (PI * a).sin() + 0.3 * (PI * b).cos() * (2.0 * PI * a).cos();
        let c = coeffs(g, f);
        for j in 0..g.n2 {
            for k in 0..g.n3 {
                let v = SplineStencil::new(g, g.x2(j), g.x3(k)).eval(&c);
                assert!((v - f(g.x2(j), g.x3(k))).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn fourth_order_off_grid() {
        let f = |a: f64, b: f64| (PI * a).sin() * (PI * b).cos();
        let err = |n: usize| {
            let g = CrossGrid { n2: n, n3: n };
            let c = coeffs(g, f);
            let mut e: f64 = 0.0;
            for m in 0..97 {
                let (y2, y3) = (-1.0 + 0.0203 * m as f64, 0.9 - 0.0187 * m as f64);
                e = e.max((SplineStencil::new(g, y2, y3).eval(&c) - f(y2, y3)).abs());
            }
            e
        };
        let ratio = err(16) / err(32);
        assert!(ratio > 12.0, "ratio {ratio}");
    }
}
