#![allow(dead_code)]

use subsonic_core::domain::{BackgroundState, BoundaryProfiles, CrossField, GridSpec};
use subsonic_core::gas::GasModel;
use subsonic_core::invariants::{Jet, TrigField};

pub fn constant(v: f64) -> Jet {
    Jet { v, d: [0.0; 3], dd: [[0.0; 3]; 3] }
}

pub fn add(a: &Jet, b: &Jet) -> Jet {
    let mut out = *a;
    out.v += b.v;
    for i in 0..3 {
        out.d[i] += b.d[i];
        for j in 0..3 {
            out.dd[i][j] += b.dd[i][j];
        }
    }
    out
}

pub fn scale(a: &Jet, s: f64) -> Jet {
    let mut out = *a;
    out.v *= s;
    for i in 0..3 {
        out.d[i] *= s;
        for j in 0..3 {
            out.dd[i][j] *= s;
        }
    }
    out
}

pub fn mul(a: &Jet, b: &Jet) -> Jet {
    let mut out = constant(a.v * b.v);
    for i in 0..3 {
        out.d[i] = a.d[i] * b.v + a.v * b.d[i];
        for j in 0..3 {
            out.dd[i][j] = a.dd[i][j] * b.v + a.d[i] * b.d[j] + a.d[j] * b.d[i] + a.v * b.dd[i][j];
        }
    }
    out
}

pub fn sub(a: &Jet, b: &Jet) -> Jet {
    add(a, &scale(b, -1.0))
}

pub fn jet(f: &TrigField, x: [f64; 3]) -> Jet {
    f.jet(x)
}

/// Reference background: gamma = 1.4, rho0 = 1, u0 = 0.5.
pub fn reference_background(grid: GridSpec) -> BackgroundState {
    let gas = GasModel::new(1.4).unwrap();
    BackgroundState::compressible(gas, 1.0, CrossField::constant(grid.cross(), 0.5), 1e-6).unwrap()
}

pub fn reference_profiles() -> BoundaryProfiles {
    BoundaryProfiles::reference()
}

pub fn cube(n: usize) -> GridSpec {
    GridSpec::new(n + 1, n, n).unwrap()
}
