//! Matrix-free second-order discretisation.
//!
//! Unknowns are the nodes of the axial planes `i = 0..n1-1` (the exit plane
//! is Dirichlet). Work arrays carry one extra plane in front for the ghost
//! layer that eliminates the inlet conormal condition; coefficients there are
//! extrapolated linearly.

use super::EllipticCoefficients;
use crate::domain::GridSpec;

pub struct Operator {
    grid: GridSpec,
    /// Coefficients on the extended planes `-1..n1`, row-major components.
    a: [Vec<f64>; 9],
    adv: Option<[Vec<f64>; 3]>,
    g_in: Vec<f64>,
    g_out: Vec<f64>,
}

impl Operator {
    pub fn new(c: &EllipticCoefficients) -> Self {
        let g = c.grid;
        let m = g.cross_len();
        let extend = |f: &[f64]| {
            let mut v = Vec::with_capacity(f.len() + m);
            v.extend((0..m).map(|q| 2.0 * f[q] - f[m + q]));
            v.extend_from_slice(f);
            v
        };
        let a = std::array::from_fn(|n| extend(&c.a[n / 3][n % 3].values));
        let adv = c.advection.as_ref().map(|ad| [ad.b2.values.clone(), ad.b3.values.clone(), ad.w.values.clone()]);
        Self { grid: g, a, adv, g_in: c.g_in.values.clone(), g_out: c.g_out.values.clone() }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn unknowns(&self) -> usize {
        (self.grid.n1 - 1) * self.grid.cross_len()
    }

    /// Homogeneous part: zero inlet flux and zero exit values.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_general(x, false, y);
    }

    /// Right-hand side of the linear system: `f1` less the boundary data term.
    pub fn rhs(&self, c: &EllipticCoefficients) -> Vec<f64> {
        let nu = self.unknowns();
        let zero = vec![0.0; nu];
        let mut affine = vec![0.0; nu];
        self.apply_general(&zero, true, &mut affine);
        c.f1.values[..nu].iter().zip(&affine).map(|(f, b)| f - b).collect()
    }

    /// Discrete operator with boundary data, applied to full-grid values
    /// whose exit plane is ignored in favour of `g_out`.
    pub fn apply_with_data(&self, full: &[f64]) -> Vec<f64> {
        let nu = self.unknowns();
        let mut y = vec![0.0; nu];
        self.apply_general(&full[..nu], true, &mut y);
        y
    }

    /// Diagonal of the flux-form part, used by Jacobi preconditioning.
    pub fn diagonal(&self) -> Vec<f64> {
        let g = self.grid;
        let (n2, n3, m) = (g.n2, g.n3, g.cross_len());
        let (h1, h2, h3) = (g.h1(), g.h2(), g.h3());
        let mut d = vec![0.0; self.unknowns()];
        for i in 0..g.n1 - 1 {
            let p = i + 1;
            for j in 0..n2 {
                let (jp, jm) = ((j + 1) % n2, (j + n2 - 1) % n2);
                for k in 0..n3 {
                    let (kp, km) = ((k + 1) % n3, (k + n3 - 1) % n3);
                    let q = j * n3 + k;
                    let a11 = &self.a[0];
                    let a22 = &self.a[4];
                    let a33 = &self.a[8];
                    let at = |v: &Vec<f64>, pp: usize, qq: usize| v[pp * m + qq];
                    d[i * m + q] = -(at(a11, p + 1, q) + 2.0 * at(a11, p, q) + at(a11, p - 1, q)) / (2.0 * h1 * h1)
                        - (at(a22, p, jp * n3 + k) + 2.0 * at(a22, p, q) + at(a22, p, jm * n3 + k)) / (2.0 * h2 * h2)
                        - (at(a33, p, j * n3 + kp) + 2.0 * at(a33, p, q) + at(a33, p, j * n3 + km)) / (2.0 * h3 * h3);
                }
            }
        }
        d
    }

    fn apply_general(&self, x: &[f64], with_data: bool, y: &mut [f64]) {
        let g = self.grid;
        let (n1, n2, n3, m) = (g.n1, g.n2, g.n3, g.cross_len());
        let (h1, h2, h3) = (g.h1(), g.h2(), g.h3());
        let np = n1 + 1;
        let nu = self.unknowns();
        debug_assert_eq!(x.len(), nu);

        let mut u = vec![0.0; np * m];
        u[m..m + nu].copy_from_slice(x);
        if with_data {
            u[n1 * m..].copy_from_slice(&self.g_out);
        }
        // ghost plane from a11 (u1 - u_{-1})/(2 h1) + a12 d2 u0 + a13 d3 u0 = g_in
        for j in 0..n2 {
            let (jp, jm) = ((j + 1) % n2, (j + n2 - 1) % n2);
            for k in 0..n3 {
                let (kp, km) = ((k + 1) % n3, (k + n3 - 1) % n3);
                let q = j * n3 + k;
                let du2 = (u[m + jp * n3 + k] - u[m + jm * n3 + k]) / (2.0 * h2);
                let du3 = (u[m + j * n3 + kp] - u[m + j * n3 + km]) / (2.0 * h3);
                let gin = if with_data { self.g_in[q] } else { 0.0 };
                let (a11, a12, a13) = (self.a[0][m + q], self.a[1][m + q], self.a[2][m + q]);
                u[q] = u[2 * m + q] - 2.0 * h1 / a11 * (gin - a12 * du2 - a13 * du3);
            }
        }

        // centred gradients on the extended planes
        let mut g1 = vec![0.0; np * m];
        let mut g2 = vec![0.0; np * m];
        let mut g3 = vec![0.0; np * m];
        for p in 0..np {
            for j in 0..n2 {
                let (jp, jm) = ((j + 1) % n2, (j + n2 - 1) % n2);
                for k in 0..n3 {
                    let (kp, km) = ((k + 1) % n3, (k + n3 - 1) % n3);
                    let n = p * m + j * n3 + k;
                    g2[n] = (u[p * m + jp * n3 + k] - u[p * m + jm * n3 + k]) / (2.0 * h2);
                    g3[n] = (u[p * m + j * n3 + kp] - u[p * m + j * n3 + km]) / (2.0 * h3);
                    if p >= 1 && p < n1 {
                        g1[n] = (u[n + m] - u[n - m]) / (2.0 * h1);
                    }
                }
            }
        }
        let prod = |c: &Vec<f64>, grad: &Vec<f64>| -> Vec<f64> { c.iter().zip(grad).map(|(a, b)| a * b).collect() };
        let p12 = prod(&self.a[1], &g2);
        let p13 = prod(&self.a[2], &g3);
        let p21 = prod(&self.a[3], &g1);
        let p23 = prod(&self.a[5], &g3);
        let p31 = prod(&self.a[6], &g1);
        let p32 = prod(&self.a[7], &g2);
        let pw = self.adv.as_ref().map(|ad| {
            let mut v = vec![0.0; np * m];
            for n in m..np * m {
                v[n] = ad[2][n - m] * g1[n];
            }
            v
        });

        let (a11, a22, a33) = (&self.a[0], &self.a[4], &self.a[8]);
        for i in 0..n1 - 1 {
            let p = i + 1;
            for j in 0..n2 {
                let (jp, jm) = ((j + 1) % n2, (j + n2 - 1) % n2);
                for k in 0..n3 {
                    let (kp, km) = ((k + 1) % n3, (k + n3 - 1) % n3);
                    let n = p * m + j * n3 + k;
                    let (nj_p, nj_m) = (p * m + jp * n3 + k, p * m + jm * n3 + k);
                    let (nk_p, nk_m) = (p * m + j * n3 + kp, p * m + j * n3 + km);
                    let (ni_p, ni_m) = (n + m, n - m);
                    let uc = u[n];
                    let mut v = ((a11[ni_p] + a11[n]) * (u[ni_p] - uc) - (a11[n] + a11[ni_m]) * (uc - u[ni_m]))
                        / (2.0 * h1 * h1);
                    v += ((a22[nj_p] + a22[n]) * (u[nj_p] - uc) - (a22[n] + a22[nj_m]) * (uc - u[nj_m]))
                        / (2.0 * h2 * h2);
                    v += ((a33[nk_p] + a33[n]) * (u[nk_p] - uc) - (a33[n] + a33[nk_m]) * (uc - u[nk_m]))
                        / (2.0 * h3 * h3);
                    v += (p12[ni_p] - p12[ni_m] + p13[ni_p] - p13[ni_m]) / (2.0 * h1);
                    v += (p21[nj_p] - p21[nj_m] + p23[nj_p] - p23[nj_m]) / (2.0 * h2);
                    v += (p31[nk_p] - p31[nk_m] + p32[nk_p] - p32[nk_m]) / (2.0 * h3);
                    if let (Some(ad), Some(pw)) = (&self.adv, &pw) {
                        let o = n - m;
                        v += ad[0][o] * (pw[nj_p] - pw[nj_m]) / (2.0 * h2);
                        v += ad[1][o] * (pw[nk_p] - pw[nk_m]) / (2.0 * h3);
                    }
                    y[n - m] = v;
                }
            }
        }
    }
}
