//! Second-order finite differences: centred and periodic in the cross-section,
//! centred in the axial interior. At `x1 = 0` and `x1 = 1` the one-sided
//! closure uses four points (third order), so that a derivative of a
//! differenced field stays second order up to the boundary.

use super::field::{CrossField, ScalarField3};

/// Axial derivative.
pub fn d1(f: &ScalarField3) -> ScalarField3 {
    let g = f.grid;
    let m = g.cross_len();
    let inv = 1.0 / (2.0 * g.h1());
    let inv3 = 1.0 / (6.0 * g.h1());
    let v = &f.values;
    let mut out = vec![0.0; g.len()];
    let last = g.n1 - 1;
    for i in 0..g.n1 {
        let row = &mut out[i * m..(i + 1) * m];
        for (c, o) in row.iter_mut().enumerate() {
            let at = |ii: usize| v[ii * m + c];
            *o = if i == 0 {
                (-11.0 * at(0) + 18.0 * at(1) - 9.0 * at(2) + 2.0 * at(3)) * inv3
            } else if i == last {
                (11.0 * at(last) - 18.0 * at(last - 1) + 9.0 * at(last - 2) - 2.0 * at(last - 3)) * inv3
            } else {
                (at(i + 1) - at(i - 1)) * inv
            };
        }
    }
    ScalarField3 { grid: g, values: out }
}

/// Periodic derivative in x2.
pub fn d2(f: &ScalarField3) -> ScalarField3 {
    let g = f.grid;
    let mut out = vec![0.0; g.len()];
    for i in 0..g.n1 {
        periodic_d2_into(f.slice(i), &mut out[i * g.cross_len()..(i + 1) * g.cross_len()], g.n2, g.n3, g.h2());
    }
    ScalarField3 { grid: g, values: out }
}

/// Periodic derivative in x3.
pub fn d3(f: &ScalarField3) -> ScalarField3 {
    let g = f.grid;
    let mut out = vec![0.0; g.len()];
    for i in 0..g.n1 {
        periodic_d3_into(f.slice(i), &mut out[i * g.cross_len()..(i + 1) * g.cross_len()], g.n2, g.n3, g.h3());
    }
    ScalarField3 { grid: g, values: out }
}

/// Derivative along `axis` (0, 1, 2 for x1, x2, x3).
pub fn deriv(f: &ScalarField3, axis: usize) -> ScalarField3 {
    match axis {
        0 => d1(f),
        1 => d2(f),
        _ => d3(f),
    }
}

/// All three first derivatives.
pub fn gradient(f: &ScalarField3) -> [ScalarField3; 3] {
    [d1(f), d2(f), d3(f)]
}

pub fn cross_d2(f: &CrossField) -> CrossField {
    let mut out = vec![0.0; f.values.len()];
    periodic_d2_into(&f.values, &mut out, f.grid.n2, f.grid.n3, f.grid.h2());
    CrossField { grid: f.grid, values: out }
}

pub fn cross_d3(f: &CrossField) -> CrossField {
    let mut out = vec![0.0; f.values.len()];
    periodic_d3_into(&f.values, &mut out, f.grid.n2, f.grid.n3, f.grid.h3());
    CrossField { grid: f.grid, values: out }
}

fn periodic_d2_into(src: &[f64], dst: &mut [f64], n2: usize, n3: usize, h: f64) {
    let inv = 1.0 / (2.0 * h);
    for j in 0..n2 {
        let jp = if j + 1 == n2 { 0 } else { j + 1 };
        let jm = if j == 0 { n2 - 1 } else { j - 1 };
        for k in 0..n3 {
            dst[j * n3 + k] = (src[jp * n3 + k] - src[jm * n3 + k]) * inv;
        }
    }
}

fn periodic_d3_into(src: &[f64], dst: &mut [f64], n2: usize, n3: usize, h: f64) {
    let inv = 1.0 / (2.0 * h);
    for j in 0..n2 {
        let row = &src[j * n3..(j + 1) * n3];
        let out = &mut dst[j * n3..(j + 1) * n3];
        for k in 0..n3 {
            let kp = if k + 1 == n3 { 0 } else { k + 1 };
            let km = if k == 0 { n3 - 1 } else { k - 1 };
            out[k] = (row[kp] - row[km]) * inv;
        }
    }
}

/// Largest forward divided difference over all three directions
/// (periodic wrap in the cross-section).
pub fn max_forward_difference(f: &ScalarField3) -> f64 {
    let g = f.grid;
    let (h1, h2, h3) = (g.h1(), g.h2(), g.h3());
    let mut m: f64 = 0.0;
    for i in 0..g.n1 {
        for j in 0..g.n2 {
            let jp = (j + 1) % g.n2;
            for k in 0..g.n3 {
                let kp = (k + 1) % g.n3;
                let v = f.at(i, j, k);
                if i + 1 < g.n1 {
                    m = m.max(((f.at(i + 1, j, k) - v) / h1).abs());
                }
                m = m.max(((f.at(i, jp, k) - v) / h2).abs());
                m = m.max(((f.at(i, j, kp) - v) / h3).abs());
            }
        }
    }
    m
}

/// Finite-difference weights for derivatives of order `0..=order` at `z` on
/// the nodes `xs` (Fornberg's recursion). `w[d][n]` multiplies `f(xs[n])`.
pub fn fd_weights(z: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}
