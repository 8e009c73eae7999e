//! Backward particle paths of `dx/dtau = (1, beta2, beta3)` and the
//! characteristic updates of the flow angles and the Bernoulli perturbation.
//!
//! Paths are integrated with classical RK4 from `tau = x1` down to `tau = 0`
//! with the axial grid step, so every step starts and ends on a grid slice.
//! Off-grid values come from periodic cubic B-splines in the cross-section and
//! linear interpolation between neighbouring slices. Path integrals ride along
//! as extra components of the RK4 state.

use crate::domain::spline::{Prefilter, SplineStencil};
use crate::domain::stencil::{cross_d2, cross_d3, d1, d2, d3};
use crate::domain::{wrap_periodic, BackgroundState, BoundaryData, CrossField, GridSpec, ScalarField3};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransportError {
    #[error("non-finite {what} at node {node:?}")]
    NonFinite { what: &'static str, node: (usize, usize, usize) },
    #[error("point x1 = {0} outside [0, 1]")]
    OutOfDomain(f64),
}

/// A traced particle path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathTrace {
    pub origin: [f64; 3],
    pub foot2: f64,
    pub foot3: f64,
    /// `(tau, x2, x3)` from `tau = 0` up to `tau = x1`, wrapped into `[-1, 1)`.
    pub samples: Vec<(f64, f64, f64)>,
}

/// B-spline coefficients of `N` fields on every axial slice.
struct SliceInterp<const N: usize> {
    grid: GridSpec,
    coeffs: [Vec<f64>; N],
}

#[derive(Clone, Copy)]
enum Level {
    Slice(usize),
    /// Halfway between slices `i` and `i + 1`.
    Mid(usize),
}

impl<const N: usize> SliceInterp<N> {
    fn new(fields: [&ScalarField3; N]) -> Self {
        let grid = fields[0].grid;
        let pre = Prefilter::new(grid.cross());
        let m = grid.cross_len();
        let coeffs = fields.map(|f| {
            let mut c = f.values.clone();
            c.par_chunks_mut(m).for_each(|slice| pre.apply(slice));
            c
        });
        Self { grid, coeffs }
    }

    #[inline]
    fn eval(&self, level: Level, y2: f64, y3: f64) -> [f64; N] {
        let st = SplineStencil::new(self.grid.cross(), y2, y3);
        let m = self.grid.cross_len();
        let mut out = [0.0; N];
        match level {
            Level::Slice(i) => {
                for (o, c) in out.iter_mut().zip(&self.coeffs) {
                    *o = st.eval(&c[i * m..(i + 1) * m]);
                }
            }
            Level::Mid(i) => {
                for (o, c) in out.iter_mut().zip(&self.coeffs) {
                    *o = 0.5 * (st.eval(&c[i * m..(i + 1) * m]) + st.eval(&c[(i + 1) * m..(i + 2) * m]));
                }
            }
        }
        out
    }
}

/// Periodic spline of inlet data.
struct CrossInterp {
    grid: crate::domain::CrossGrid,
    coeffs: Vec<f64>,
}

impl CrossInterp {
    fn new(f: &CrossField) -> Self {
        let mut coeffs = f.values.clone();
        Prefilter::new(f.grid).apply(&mut coeffs);
        Self { grid: f.grid, coeffs }
    }

    fn eval(&self, y2: f64, y3: f64) -> f64 {
        SplineStencil::new(self.grid, y2, y3).eval(&self.coeffs)
    }
}

fn check_finite(f: &ScalarField3, what: &'static str) -> Result<(), TransportError> {
    match f.values.iter().position(|v| !v.is_finite()) {
        Some(n) => Err(TransportError::NonFinite { what, node: f.grid.ijk(n) }),
        None => Ok(()),
    }
}

/// Footpoint and path integrals of `K` sources for the node at slice `i`,
/// cross-section position `(y2, y3)`. Components `0, 1` of the interpolant
/// are the path velocities; the rest are sources.
#[inline]
fn integrate_node<const N: usize>(
    interp: &SliceInterp<N>,
    i: usize,
    mut y2: f64,
    mut y3: f64,
    mut record: Option<&mut Vec<(f64, f64, f64)>>,
) -> (f64, f64, [f64; N]) {
    let h = interp.grid.h1();
    let mut acc = [0.0; N];
    if let Some(r) = record.as_deref_mut() {
        r.push((i as f64 * h, wrap_periodic(y2), wrap_periodic(y3)));
    }
    for m in (1..=i).rev() {
        let k1 = interp.eval(Level::Slice(m), y2, y3);
        let k2 = interp.eval(Level::Mid(m - 1), y2 - 0.5 * h * k1[0], y3 - 0.5 * h * k1[1]);
        let k3 = interp.eval(Level::Mid(m - 1), y2 - 0.5 * h * k2[0], y3 - 0.5 * h * k2[1]);
        let k4 = interp.eval(Level::Slice(m - 1), y2 - h * k3[0], y3 - h * k3[1]);
        for c in 0..N {
            acc[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        y2 -= acc[0];
        y3 -= acc[1];
        acc[0] = 0.0;
        acc[1] = 0.0;
        if let Some(r) = record.as_deref_mut() {
            r.push(((m - 1) as f64 * h, wrap_periodic(y2), wrap_periodic(y3)));
        }
    }
    (y2, y3, acc)
}

/// Traces the path through `x` backward to the inlet.
pub fn trace_path(x: [f64; 3], beta2: &ScalarField3, beta3: &ScalarField3) -> Result<PathTrace, TransportError> {
    check_finite(beta2, "beta2")?;
    check_finite(beta3, "beta3")?;
    let g = beta2.grid;
    if !(0.0..=1.0).contains(&x[0]) {
        return Err(TransportError::OutOfDomain(x[0]));
    }
    let interp = SliceInterp::new([beta2, beta3]);
    let i = (x[0] / g.h1()).round() as usize;
    let mut samples = Vec::with_capacity(i + 1);
    // off-grid starting levels are snapped to the nearest slice
    let (f2, f3, _) = integrate_node(&interp, i, x[1], x[2], Some(&mut samples));
    samples.reverse();
    Ok(PathTrace { origin: x, foot2: wrap_periodic(f2), foot3: wrap_periodic(f3), samples })
}

/// For every node: `eps * inlet_c(foot) + integral of source_c` along the
/// backward path traced with `(beta2, beta3)`.
fn transport_fields<const N: usize, const K: usize>(
    beta2: &ScalarField3,
    beta3: &ScalarField3,
    sources: [&ScalarField3; K],
    inlet: [&CrossField; K],
    eps: f64,
) -> Result<[ScalarField3; K], TransportError> {
    debug_assert_eq!(N, K + 2);
    check_finite(beta2, "beta2")?;
    check_finite(beta3, "beta3")?;
    for s in &sources {
        check_finite(s, "transport source")?;
    }
    let g = beta2.grid;
    let mut fields: Vec<&ScalarField3> = vec![beta2, beta3];
    fields.extend(sources.iter().copied());
    let arr: [&ScalarField3; N] = fields.try_into().ok().expect("field count");
    let interp = SliceInterp::new(arr);
    let inlet_interp: Vec<CrossInterp> = inlet.iter().map(|f| CrossInterp::new(f)).collect();
    let mut out: Vec<[f64; K]> = vec![[0.0; K]; g.len()];
    out.par_chunks_mut(g.n3).enumerate().for_each(|(line, chunk)| {
        let i = line / g.n2;
        let j = line % g.n2;
        for (k, slot) in chunk.iter_mut().enumerate() {
            if i == 0 {
                for c in 0..K {
                    slot[c] = eps * inlet[c].values[j * g.n3 + k];
                }
                continue;
            }
            let (f2, f3, acc) = integrate_node(&interp, i, g.x2(j), g.x3(k), None);
            for c in 0..K {
                slot[c] = eps * inlet_interp[c].eval(f2, f3) + acc[c + 2];
            }
        }
    });
    let result: [ScalarField3; K] = std::array::from_fn(|c| ScalarField3 {
        grid: g,
        values: out.iter().map(|v| v[c]).collect(),
    });
    for r in &result {
        check_finite(r, "transported value")?;
    }
    Ok(result)
}

/// New flow angles from the new primary perturbation `u` (log-density or
/// pressure) along paths of the iterate angles:
/// `beta_i = eps beta_i_in(foot) + int q (beta_i~ d1 u - d_i u) dtau`, where
/// `q = c^2/u1^2` (or `1/u1^2` for incompressible flows).
pub fn update_beta(
    data: &BoundaryData,
    primary_new: &ScalarField3,
    beta2_iter: &ScalarField3,
    beta3_iter: &ScalarField3,
    q: &ScalarField3,
) -> Result<(ScalarField3, ScalarField3), TransportError> {
    let (u1, u2, u3) = (d1(primary_new), d2(primary_new), d3(primary_new));
    let src2 = ScalarField3 {
        grid: q.grid,
        values: (0..q.values.len())
            .map(|n| q.values[n] * (beta2_iter.values[n] * u1.values[n] - u2.values[n]))
            .collect(),
    };
    let src3 = ScalarField3 {
        grid: q.grid,
        values: (0..q.values.len())
            .map(|n| q.values[n] * (beta3_iter.values[n] * u1.values[n] - u3.values[n]))
            .collect(),
    };
    let [b2, b3] = transport_fields::<4, 2>(
        beta2_iter,
        beta3_iter,
        [&src2, &src3],
        [&data.beta2_in, &data.beta3_in],
        data.epsilon,
    )?;
    Ok((b2, b3))
}

/// New Bernoulli perturbation along paths of the iterate angles, with the
/// source `-beta2 d2 B0 - beta3 d3 B0` built from the new angles.
pub fn update_b(
    data: &BoundaryData,
    background: &BackgroundState,
    beta_new: (&ScalarField3, &ScalarField3),
    beta_iter: (&ScalarField3, &ScalarField3),
) -> Result<ScalarField3, TransportError> {
    let g = beta_new.0.grid;
    let (db2, db3) = (cross_d2(&background.b0), cross_d3(&background.b0));
    let m = g.cross_len();
    let src = ScalarField3 {
        grid: g,
        values: (0..g.len())
            .map(|n| -beta_new.0.values[n] * db2.values[n % m] - beta_new.1.values[n] * db3.values[n % m])
            .collect(),
    };
    let [b] = transport_fields::<3, 1>(beta_iter.0, beta_iter.1, [&src], [&data.b_in], data.epsilon)?;
    Ok(b)
}
