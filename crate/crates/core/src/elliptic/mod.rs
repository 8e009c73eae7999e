//! The linear elliptic problem for the log-density perturbation (or the
//! pressure perturbation of incompressible flows):
//!
//! `sum_ij d_i(a_ij d_j u) + sum_{i=2,3} b_i d_i(w d_1 u) = f1` in `(0,1) x T^2`,
//! `sum_j a_1j d_j u = g_in` at `x1 = 0`, `u = g_out` at `x1 = 1`.
//!
//! The second sum is present only for incompressible flows.

mod krylov;
mod operator;
mod precond;

pub use krylov::{bicgstab, KrylovOutcome};
pub use operator::Operator;
pub use precond::{JacobiPreconditioner, Preconditioner, SpectralPreconditioner};

use crate::domain::stencil::{d1, d2, d3};
use crate::domain::{BackgroundState, BoundaryData, CrossField, FlowKind, GridSpec, ScalarField3};
use crate::flow::Perturbation;
use crate::gas::angle_factor;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("stagnation at node {node:?}: B = {bernoulli} does not exceed {level}")]
    Stagnation { node: (usize, usize, usize), bernoulli: f64, level: f64 },
    #[error("sonic state at node {node:?}: c^2 - |u|^2 = {gap} within margin {margin}")]
    Sonic { node: (usize, usize, usize), gap: f64, margin: f64 },
    #[error("coefficient matrix not positive definite at node {node:?}")]
    Indefinite { node: (usize, usize, usize) },
    #[error("linear solver stagnated after {iterations} iterations, residual {residual:e}")]
    Stagnated { iterations: usize, residual: f64 },
    #[error("non-finite coefficient or data at node {node:?}")]
    NonFinite { node: (usize, usize, usize) },
    #[error("grid mismatch between iterate and boundary data")]
    GridMismatch,
}

/// Extra non-divergence term `sum_{i=2,3} b_i d_i(w d_1 u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Advection {
    pub b2: ScalarField3,
    pub b3: ScalarField3,
    pub w: ScalarField3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticCoefficients {
    pub grid: GridSpec,
    /// `a[i][j]`, row-major.
    pub a: [[ScalarField3; 3]; 3],
    pub advection: Option<Advection>,
    pub f1: ScalarField3,
    pub g_in: CrossField,
    pub g_out: CrossField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSolution {
    /// Values on the full grid, exit plane included.
    pub solution: ScalarField3,
    pub linear_residual: f64,
    pub iterations: usize,
}

/// Which preconditioner the Krylov solve uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PreconditionerKind {
    /// Cross-section FFT with tridiagonal axial solves for the averaged
    /// constant-coefficient operator.
    Spectral,
    /// Inverse diagonal.
    Jacobi,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSolverConfig {
    /// Max-norm tolerance on the residual of the discrete equations.
    pub tol: f64,
    /// Iteration cap; `None` means ten times the unknown count.
    pub max_iter: Option<usize>,
    pub preconditioner: PreconditionerKind,
}

impl Default for LinearSolverConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: None, preconditioner: PreconditionerKind::Spectral }
    }
}

/// `sum_ij a_ij xi_i xi_j` for the symmetric compressible coefficients.
pub fn quadratic_form(q: f64, beta2: f64, beta3: f64, xi: [f64; 3]) -> f64 {
    let a = compressible_matrix(q, beta2, beta3);
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += a[i][j] * xi[i] * xi[j];
        }
    }
    s
}

/// Node coefficients with `q = c^2/u1^2`.
pub fn compressible_matrix(q: f64, beta2: f64, beta3: f64) -> [[f64; 3]; 3] {
    [
        [q - 1.0, -beta2, -beta3],
        [-beta2, q - beta2 * beta2, -beta2 * beta3],
        [-beta3, -beta2 * beta3, q - beta3 * beta3],
    ]
}

/// `(d2 b2)^2 + (d3 b3)^2 + 2 d2 b3 d3 b2`.
fn angle_quadratic(beta2: &ScalarField3, beta3: &ScalarField3) -> ScalarField3 {
    let (b22, b23) = (d2(beta2), d3(beta2));
    let (b32, b33) = (d2(beta3), d3(beta3));
    let mut out = ScalarField3::zeros(beta2.grid);
    for n in 0..out.values.len() {
        out.values[n] = b22.values[n].powi(2) + b33.values[n].powi(2) + 2.0 * b32.values[n] * b23.values[n];
    }
    out
}

fn check_grids(iterate: &Perturbation, background: &BackgroundState, data: &BoundaryData) -> Result<(), EllipticError> {
    let g = iterate.grid().cross();
    if background.grid() != g || data.grid() != g {
        return Err(EllipticError::GridMismatch);
    }
    Ok(())
}

/// Squared axial speed of the frozen iterate, `2 (B - level) / G`.
fn frozen_axial_speed(
    iterate: &Perturbation,
    background: &BackgroundState,
    level_of: impl Fn(f64) -> f64,
    margin: f64,
) -> Result<ScalarField3, EllipticError> {
    let g = iterate.grid();
    let m = g.cross_len();
    let mut out = ScalarField3::zeros(g);
    for n in 0..g.len() {
        let b = background.b0.values[n % m] + iterate.bernoulli.values[n];
        let level = level_of(background.level + iterate.primary.values[n]);
        let gg = angle_factor(iterate.beta2.values[n], iterate.beta3.values[n]);
        if !(b.is_finite() && level.is_finite() && gg.is_finite()) {
            return Err(EllipticError::NonFinite { node: g.ijk(n) });
        }
        if !(b - level > margin) {
            return Err(EllipticError::Stagnation { node: g.ijk(n), bernoulli: b, level });
        }
        out.values[n] = 2.0 * (b - level) / gg;
    }
    Ok(out)
}

/// Coefficients of the compressible problem frozen at the iterate.
pub fn assemble(
    iterate: &Perturbation,
    background: &BackgroundState,
    data: &BoundaryData,
    subsonic_margin: f64,
) -> Result<EllipticCoefficients, EllipticError> {
    check_grids(iterate, background, data)?;
    let gas = match background.kind {
        FlowKind::Compressible(gas) => gas,
        FlowKind::Incompressible => {
            return assemble_incompressible_with_margin(iterate, background, data, subsonic_margin)
        }
    };
    let g = iterate.grid();
    let u1sq = frozen_axial_speed(iterate, background, |s| gas.enthalpy(s.exp()), 0.0)?;
    let mk = || ScalarField3::zeros(g);
    let mut a = [[mk(), mk(), mk()], [mk(), mk(), mk()], [mk(), mk(), mk()]];
    let mut flux_sq = mk();
    let (s1, s2, s3) = (d1(&iterate.primary), d2(&iterate.primary), d3(&iterate.primary));
    for n in 0..g.len() {
        let c2 = gas.sound_speed_sq((background.level + iterate.primary.values[n]).exp());
        let (b2, b3) = (iterate.beta2.values[n], iterate.beta3.values[n]);
        let speed_sq = u1sq.values[n] * angle_factor(b2, b3);
        let gap = c2 - speed_sq;
        if !(gap > subsonic_margin) {
            return Err(EllipticError::Sonic { node: g.ijk(n), gap, margin: subsonic_margin });
        }
        let q = c2 / u1sq.values[n];
        let m = compressible_matrix(q, b2, b3);
        for i in 0..3 {
            for j in 0..3 {
                a[i][j].values[n] = m[i][j];
            }
        }
        let flux = m[0][0] * s1.values[n] + m[0][1] * s2.values[n] + m[0][2] * s3.values[n];
        flux_sq.values[n] = flux * flux;
    }
    let quad = angle_quadratic(&iterate.beta2, &iterate.beta3);
    let f1 = flux_sq.zip_map(&quad, |x, y| x - y);
    Ok(EllipticCoefficients {
        grid: g,
        a,
        advection: None,
        f1,
        g_in: data.inlet_flux(),
        g_out: data.exit.scale(data.epsilon),
    })
}

/// Coefficients of the incompressible pressure problem frozen at the iterate,
/// with `w = 1/u1^2`: principal part `d1(w d1 p) + sum_i [d_i(w d_i p) -
/// d_i(b_i w d1 p)]` and the extra term `sum_i b_i d_i(w d1 p)`.
pub fn assemble_incompressible(
    iterate: &Perturbation,
    background: &BackgroundState,
    data: &BoundaryData,
) -> Result<EllipticCoefficients, EllipticError> {
    assemble_incompressible_with_margin(iterate, background, data, 0.0)
}

/// As `assemble_incompressible`, requiring `B - p > margin` at every node.
pub fn assemble_incompressible_with_margin(
    iterate: &Perturbation,
    background: &BackgroundState,
    data: &BoundaryData,
    margin: f64,
) -> Result<EllipticCoefficients, EllipticError> {
    check_grids(iterate, background, data)?;
    let g = iterate.grid();
    let u1sq = frozen_axial_speed(iterate, background, |p| p, margin)?;
    let w = u1sq.map(|v| 1.0 / v);
    let z = ScalarField3::zeros(g);
    let neg_bw = |b: &ScalarField3| b.zip_map(&w, |x, y| -x * y);
    let a = [
        [w.clone(), z.clone(), z.clone()],
        [neg_bw(&iterate.beta2), w.clone(), z.clone()],
        [neg_bw(&iterate.beta3), z, w.clone()],
    ];
    let f1 = angle_quadratic(&iterate.beta2, &iterate.beta3).map(|v| -v);
    Ok(EllipticCoefficients {
        grid: g,
        a,
        advection: Some(Advection { b2: iterate.beta2.clone(), b3: iterate.beta3.clone(), w }),
        f1,
        g_in: data.inlet_flux(),
        g_out: data.exit.scale(data.epsilon),
    })
}

impl EllipticCoefficients {
    /// Symmetric part of the principal symbol at node `n`.
    pub fn principal_symbol(&self, n: usize) -> [[f64; 3]; 3] {
        let mut p = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                p[i][j] = 0.5 * (self.a[i][j].values[n] + self.a[j][i].values[n]);
            }
        }
        if let Some(adv) = &self.advection {
            let w = adv.w.values[n];
            for (i, b) in [(1usize, adv.b2.values[n]), (2, adv.b3.values[n])] {
                p[i][0] += 0.5 * b * w;
                p[0][i] += 0.5 * b * w;
            }
        }
        p
    }

    /// Sylvester test of the principal symbol at every node.
    pub fn check_definite(&self) -> Result<(), EllipticError> {
        for n in 0..self.grid.len() {
            let p = self.principal_symbol(n);
            let m1 = p[0][0];
            let m2 = p[0][0] * p[1][1] - p[0][1] * p[1][0];
            let m3 = p[0][0] * (p[1][1] * p[2][2] - p[1][2] * p[2][1])
                - p[0][1] * (p[1][0] * p[2][2] - p[1][2] * p[2][0])
                + p[0][2] * (p[1][0] * p[2][1] - p[1][1] * p[2][0]);
            if !(m1 > 0.0 && m2 > 0.0 && m3 > 0.0) {
                return Err(EllipticError::Indefinite { node: self.grid.ijk(n) });
            }
        }
        Ok(())
    }
}

/// Solves the discrete problem to `cfg.tol` in the max norm of the residual.
pub fn solve(coeffs: &EllipticCoefficients, cfg: &LinearSolverConfig) -> Result<EllipticSolution, EllipticError> {
    solve_with_guess(coeffs, cfg, None)
}

/// As `solve`, starting from `guess` (full-grid values).
pub fn solve_with_guess(
    coeffs: &EllipticCoefficients,
    cfg: &LinearSolverConfig,
    guess: Option<&ScalarField3>,
) -> Result<EllipticSolution, EllipticError> {
    coeffs.check_definite()?;
    for (n, v) in coeffs.f1.values.iter().enumerate() {
        if !v.is_finite() {
            return Err(EllipticError::NonFinite { node: coeffs.grid.ijk(n) });
        }
    }
    if !(coeffs.g_in.is_finite() && coeffs.g_out.is_finite()) {
        return Err(EllipticError::NonFinite { node: (0, 0, 0) });
    }
    let op = Operator::new(coeffs);
    let rhs = op.rhs(coeffs);
    let nu = op.unknowns();
    let mut x = match guess {
        Some(gs) => gs.values[..nu].to_vec(),
        None => vec![0.0; nu],
    };
    let max_iter = cfg.max_iter.unwrap_or(10 * nu);
    let outcome = match cfg.preconditioner {
        PreconditionerKind::Spectral => {
            let m = SpectralPreconditioner::new(coeffs);
            bicgstab(&op, &m, &rhs, &mut x, cfg.tol, max_iter)
        }
        PreconditionerKind::Jacobi => {
            let m = JacobiPreconditioner::new(&op);
            bicgstab(&op, &m, &rhs, &mut x, cfg.tol, max_iter)
        }
    };
    if !outcome.converged {
        return Err(EllipticError::Stagnated { iterations: outcome.iterations, residual: outcome.residual });
    }
    let mut values = x;
    values.extend_from_slice(&coeffs.g_out.values);
    Ok(EllipticSolution {
        solution: ScalarField3 { grid: coeffs.grid, values },
        linear_residual: outcome.residual,
        iterations: outcome.iterations,
    })
}
