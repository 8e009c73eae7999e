//! Characteristic roots and left eigenvectors of the first-order systems in
//! the flow-angle variables.
//!
//! With `U = (s, beta2, beta3, B)` (or `(p, beta2, beta3, B)`) the systems read
//! `M1 dU/dx1 + M2 dU/dx2 + M3 dU/dx3 = 0`. The symbol
//! `det(lambda M1 - xi2 M2 - xi3 M3)` factors into a double transport root
//! `beta . xi` and a quadratic `a1 lambda^2 - 2 a2 lambda + a3` whose roots are
//! complex exactly when the state is subsonic.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharError {
    #[error("wave vector must be nonzero")]
    ZeroWaveVector,
    #[error("degenerate quadratic factor (sonic axial speed, a1 = 0)")]
    DegenerateQuadratic,
    #[error("characteristic state requires q > 0, got {0}")]
    NonPositiveQ(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Compressible,
    Incompressible,
}

/// Pointwise data entering the symbol. `q = c^2/u1^2` for compressible
/// states and `1/u1^2` for incompressible ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharState {
    pub beta2: f64,
    pub beta3: f64,
    pub q: f64,
    pub mode: Mode,
}

impl CharState {
    pub fn compressible(beta2: f64, beta3: f64, q: f64) -> Result<Self, CharError> {
        Self::new(beta2, beta3, q, Mode::Compressible)
    }

    pub fn incompressible(beta2: f64, beta3: f64, q: f64) -> Result<Self, CharError> {
        Self::new(beta2, beta3, q, Mode::Incompressible)
    }

    fn new(beta2: f64, beta3: f64, q: f64, mode: Mode) -> Result<Self, CharError> {
        if !(q > 0.0) {
            return Err(CharError::NonPositiveQ(q));
        }
        Ok(Self { beta2, beta3, q, mode })
    }

    /// The coefficient matrices `[M1, M2, M3]`, row = equation, column = unknown.
    pub fn matrices(&self) -> [[[f64; 4]; 4]; 3] {
        let (b2, b3, q) = (self.beta2, self.beta3, self.q);
        match self.mode {
            Mode::Compressible => [
                [
                    [1.0 - q, 0.0, 0.0, 0.0],
                    [-q * b2, 1.0, 0.0, 0.0],
                    [-q * b3, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                ],
                [
                    [b2, 1.0, 0.0, 0.0],
                    [q, b2, 0.0, 0.0],
                    [0.0, 0.0, b2, 0.0],
                    [0.0, 0.0, 0.0, b2],
                ],
                [
                    [b3, 0.0, 1.0, 0.0],
                    [0.0, b3, 0.0, 0.0],
                    [q, 0.0, b3, 0.0],
                    [0.0, 0.0, 0.0, b3],
                ],
            ],
            Mode::Incompressible => [
                [
                    [-q, 0.0, 0.0, 0.0],
                    [-q * b2, 1.0, 0.0, 0.0],
                    [-q * b3, 0.0, 1.0, 0.0],
                    [0.0, 0.0, 0.0, 1.0],
                ],
                [
                    [0.0, 1.0, 0.0, 0.0],
                    [q, b2, 0.0, 0.0],
                    [0.0, 0.0, b2, 0.0],
                    [0.0, 0.0, 0.0, b2],
                ],
                [
                    [0.0, 0.0, 1.0, 0.0],
                    [0.0, b3, 0.0, 0.0],
                    [q, 0.0, b3, 0.0],
                    [0.0, 0.0, 0.0, b3],
                ],
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharRoots {
    /// Double root `beta . xi`.
    pub lambda_r: f64,
    /// Real part of the complex pair (zero when non-elliptic).
    pub lambda_re: f64,
    /// Imaginary part of the complex pair, always `>= 0`.
    pub lambda_im: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub discriminant: f64,
    /// True when the quadratic factor has a genuinely complex pair.
    pub elliptic: bool,
    /// The two real roots of the quadratic factor in the non-elliptic case.
    pub real_pair: Option<(f64, f64)>,
}

fn check_xi(xi2: f64, xi3: f64) -> Result<(), CharError> {
    if xi2 == 0.0 && xi3 == 0.0 {
        Err(CharError::ZeroWaveVector)
    } else {
        Ok(())
    }
}

fn quadratic_roots(lambda_r: f64, a1: f64, a2: f64, a3: f64) -> CharRoots {
    let discriminant = a1 * a3 - a2 * a2;
    if discriminant > 0.0 {
        CharRoots {
            lambda_r,
            lambda_re: a2 / a1,
            lambda_im: discriminant.sqrt() / a1.abs(),
            a1,
            a2,
            a3,
            discriminant,
            elliptic: true,
            real_pair: None,
        }
    } else {
        let r = (-discriminant).sqrt();
        let (lo, hi) = ((a2 - r) / a1, (a2 + r) / a1);
        CharRoots {
            lambda_r,
            lambda_re: 0.0,
            lambda_im: 0.0,
            a1,
            a2,
            a3,
            discriminant,
            elliptic: false,
            real_pair: Some((lo.min(hi), lo.max(hi))),
        }
    }
}

pub fn compressible_roots(state: &CharState, xi2: f64, xi3: f64) -> Result<CharRoots, CharError> {
    check_xi(xi2, xi3)?;
    let q = state.q;
    let a1 = 1.0 - q;
    if a1 == 0.0 {
        return Err(CharError::DegenerateQuadratic);
    }
    let bx = state.beta2 * xi2 + state.beta3 * xi3;
    let a3 = bx * bx - q * (xi2 * xi2 + xi3 * xi3);
    Ok(quadratic_roots(bx, a1, bx, a3))
}

/// For the incompressible system the quadratic factor is `lambda^2 + |xi|^2`,
/// stored as `a1 = 1, a2 = 0, a3 = |xi|^2`.
pub fn incompressible_roots(state: &CharState, xi2: f64, xi3: f64) -> Result<CharRoots, CharError> {
    check_xi(xi2, xi3)?;
    let bx = state.beta2 * xi2 + state.beta3 * xi3;
    Ok(quadratic_roots(bx, 1.0, 0.0, xi2 * xi2 + xi3 * xi3))
}

pub fn roots(state: &CharState, xi2: f64, xi3: f64) -> Result<CharRoots, CharError> {
    match state.mode {
        Mode::Compressible => compressible_roots(state, xi2, xi3),
        Mode::Incompressible => incompressible_roots(state, xi2, xi3),
    }
}

/// `q [(q - 1)|xi|^2 - (beta . xi)^2]`, equal to `a1 a3 - a2^2`.
pub fn subsonic_discriminant(state: &CharState, xi2: f64, xi3: f64) -> f64 {
    let q = state.q;
    let bx = state.beta2 * xi2 + state.beta3 * xi3;
    q * ((q - 1.0) * (xi2 * xi2 + xi3 * xi3) - bx * bx)
}

/// Left eigenvectors in closed form. The complex one belongs to
/// `lambda_re + i lambda_im` and is `real + i imag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeftEigenvectors {
    pub transport: [[f64; 4]; 2],
    pub complex_real: [f64; 4],
    pub complex_imag: [f64; 4],
}

pub fn left_eigenvectors(state: &CharState, roots: &CharRoots, xi2: f64, xi3: f64) -> LeftEigenvectors {
    let bx = roots.lambda_r;
    let transport = [
        [0.0, xi3 + state.beta3 * bx, -xi2 - state.beta2 * bx, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let first = match state.mode {
        Mode::Compressible => roots.a2 / roots.a1 - roots.a2,
        Mode::Incompressible => -bx,
    };
    LeftEigenvectors {
        transport,
        complex_real: [first, xi2, xi3, 0.0],
        complex_imag: [roots.lambda_im, 0.0, 0.0, 0.0],
    }
}

/// Characteristic state from a primitive point: `beta = (u2, u3)/u1`,
/// `q = c^2/u1^2`.
pub fn state_from_primitive(
    gas: &crate::gas::GasModel,
    p: &crate::gas::PrimitivePoint,
) -> Result<CharState, CharError> {
    CharState::compressible(p.u2 / p.u1, p.u3 / p.u1, gas.sound_speed_sq(p.rho) / (p.u1 * p.u1))
}
