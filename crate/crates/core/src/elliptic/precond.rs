//! Preconditioners for the Krylov solve.

use super::operator::Operator;
use super::EllipticCoefficients;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

pub trait Preconditioner {
    /// `z = M^{-1} r`.
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn new(op: &Operator) -> Self {
        Self { inv_diag: op.diagonal().iter().map(|d| 1.0 / d).collect() }
    }
}

impl Preconditioner for JacobiPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        for ((zi, ri), di) in z.iter_mut().zip(r).zip(&self.inv_diag) {
            *zi = ri * di;
        }
    }
}

/// Exact inverse of the constant-coefficient operator
/// `A11 d11 + A22 d22 + A33 d33` with the averaged diagonal coefficients and
/// the same boundary structure: FFT across the section, tridiagonal solves
/// along the axis.
pub struct SpectralPreconditioner {
    n1: usize,
    n2: usize,
    n3: usize,
    alpha: f64,
    mu: Vec<f64>,
    fwd2: Arc<dyn Fft<f64>>,
    fwd3: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
    inv3: Arc<dyn Fft<f64>>,
}

impl SpectralPreconditioner {
    pub fn new(c: &EllipticCoefficients) -> Self {
        let g = c.grid;
        let mean = |f: &[f64]| f.iter().sum::<f64>() / f.len() as f64;
        let (a11, a22, a33) = (mean(&c.a[0][0].values), mean(&c.a[1][1].values), mean(&c.a[2][2].values));
        let (h1, h2, h3) = (g.h1(), g.h2(), g.h3());
        let mut mu = Vec::with_capacity(g.cross_len());
        for m2 in 0..g.n2 {
            let s2 = (PI * m2 as f64 / g.n2 as f64).sin();
            for m3 in 0..g.n3 {
                let s3 = (PI * m3 as f64 / g.n3 as f64).sin();
                mu.push(4.0 * a22 * s2 * s2 / (h2 * h2) + 4.0 * a33 * s3 * s3 / (h3 * h3));
            }
        }
        let mut planner = FftPlanner::new();
        Self {
            n1: g.n1,
            n2: g.n2,
            n3: g.n3,
            alpha: a11 / (h1 * h1),
            mu,
            fwd2: planner.plan_fft_forward(g.n2),
            fwd3: planner.plan_fft_forward(g.n3),
            inv2: planner.plan_fft_inverse(g.n2),
            inv3: planner.plan_fft_inverse(g.n3),
        }
    }

    fn transform(&self, plane: &mut [Complex<f64>], forward: bool, col: &mut Vec<Complex<f64>>) {
        let (n2, n3) = (self.n2, self.n3);
        let (f3, f2) = if forward { (&self.fwd3, &self.fwd2) } else { (&self.inv3, &self.inv2) };
        for row in plane.chunks_mut(n3) {
            f3.process(row);
        }
        for k in 0..n3 {
            col.clear();
            col.extend((0..n2).map(|j| plane[j * n3 + k]));
            f2.process(col);
            for j in 0..n2 {
                plane[j * n3 + k] = col[j];
            }
        }
    }
}

impl Preconditioner for SpectralPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        let m = self.n2 * self.n3;
        let planes = self.n1 - 1;
        let mut spec: Vec<Complex<f64>> = r.iter().map(|&v| Complex::new(v, 0.0)).collect();
        let mut col = Vec::with_capacity(self.n2);
        for p in 0..planes {
            self.transform(&mut spec[p * m..(p + 1) * m], true, &mut col);
        }
        let a = self.alpha;
        let mut cp = vec![0.0; planes];
        let mut d = vec![Complex::new(0.0, 0.0); planes];
        for q in 0..m {
            // rows: a (x[i+1] - 2x[i] + x[i-1]) - mu x[i], x[-1] = x[1], x[planes] = 0
            let diag = -2.0 * a - self.mu[q];
            let sup = |i: usize| if i == 0 { 2.0 * a } else { a };
            let mut den = diag;
            cp[0] = sup(0) / den;
            d[0] = spec[q] / den;
            for i in 1..planes {
                den = diag - a * cp[i - 1];
                cp[i] = if i + 1 < planes { sup(i) / den } else { 0.0 };
                d[i] = (spec[i * m + q] - d[i - 1] * a) / den;
            }
            spec[(planes - 1) * m + q] = d[planes - 1];
            for i in (0..planes - 1).rev() {
                let next = spec[(i + 1) * m + q];
                spec[i * m + q] = d[i] - next * cp[i];
            }
        }
        let scale = 1.0 / m as f64;
        for p in 0..planes {
            self.transform(&mut spec[p * m..(p + 1) * m], false, &mut col);
        }
        for (zi, s) in z.iter_mut().zip(&spec) {
            *zi = s.re * scale;
        }
    }
}
