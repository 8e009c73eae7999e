//! Fixed-point iteration `x <- (1 - w) x + w Lambda(x)` for the perturbation
//! quadruple, starting from the background.
//!
//! One application of `Lambda` freezes the coefficients at the iterate,
//! solves the elliptic problem for the primary perturbation, transports the
//! flow angles and then the Bernoulli perturbation along the iterate's paths.

use crate::domain::stencil::max_forward_difference;
use crate::domain::{BackgroundState, BoundaryData, FlowKind, ScalarField3};
use crate::elliptic::{self, EllipticError, LinearSolverConfig};
use crate::flow::{FlowError, FlowField, Perturbation};
use crate::transport::{self, TransportError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Elliptic,
    FlowAngles,
    Bernoulli,
    Admissibility,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step::Elliptic => "elliptic",
            Step::FlowAngles => "flow-angles",
            Step::Bernoulli => "bernoulli",
            Step::Admissibility => "admissibility",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("sonic state in step {step}: {detail}")]
    Sonic { step: Step, detail: String },
    #[error("stagnation in step {step}: {detail}")]
    Stagnation { step: Step, detail: String },
    #[error("linear solver failure in step {step}: {detail}")]
    Linear { step: Step, detail: String },
    #[error("non-finite values in step {step}: {detail}")]
    NonFinite { step: Step, detail: String },
    #[error("iterate norm {norm:e} left the admissible ball of radius {delta_max:e}")]
    DeltaExceeded { norm: f64, delta_max: f64 },
    #[error("invalid setup: {0}")]
    Setup(String),
}

impl SolverError {
    pub fn step(&self) -> Option<Step> {
        match self {
            SolverError::Sonic { step, .. }
            | SolverError::Stagnation { step, .. }
            | SolverError::Linear { step, .. }
            | SolverError::NonFinite { step, .. } => Some(*step),
            _ => None,
        }
    }

    /// True for losses of subsonicity or of positive axial speed.
    pub fn is_sonic_or_stagnation(&self) -> bool {
        matches!(self, SolverError::Sonic { .. } | SolverError::Stagnation { .. })
    }
}

fn from_elliptic(e: EllipticError) -> SolverError {
    let step = Step::Elliptic;
    let detail = e.to_string();
    match e {
        EllipticError::Sonic { .. } => SolverError::Sonic { step, detail },
        EllipticError::Stagnation { .. } => SolverError::Stagnation { step, detail },
        EllipticError::NonFinite { .. } => SolverError::NonFinite { step, detail },
        EllipticError::GridMismatch => SolverError::Setup(detail),
        EllipticError::Indefinite { .. } => SolverError::Sonic { step, detail },
        EllipticError::Stagnated { .. } => SolverError::Linear { step, detail },
    }
}

fn from_transport(step: Step, e: TransportError) -> SolverError {
    SolverError::NonFinite { step, detail: e.to_string() }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Radius of the admissible ball in the low-order norm; `None` uses ten
    /// times the norm of the first iterate.
    pub delta_max: Option<f64>,
    pub tol_fixed: f64,
    pub max_iter: usize,
    pub relaxation: f64,
    /// Required `c^2 - |u|^2` (compressible) or `B - p` (incompressible).
    pub subsonic_margin: f64,
    pub linear: LinearSolverConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            delta_max: None,
            tol_fixed: 1e-10,
            max_iter: 50,
            relaxation: 1.0,
            subsonic_margin: 1e-6,
            linear: LinearSolverConfig { tol: 1e-12, ..LinearSolverConfig::default() },
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.tol_fixed > 0.0) {
            return Err(SolverError::Setup(format!("tol_fixed = {} must be positive", self.tol_fixed)));
        }
        if self.max_iter < 1 {
            return Err(SolverError::Setup("max_iter must be at least 1".into()));
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(SolverError::Setup(format!("relaxation = {} outside (0, 1]", self.relaxation)));
        }
        if !(self.subsonic_margin >= 0.0) {
            return Err(SolverError::Setup("subsonic_margin must be nonnegative".into()));
        }
        if let Some(d) = self.delta_max {
            if !(d > 0.0) {
                return Err(SolverError::Setup(format!("delta_max = {d} must be positive")));
            }
        }
        if !(self.linear.tol > 0.0) {
            return Err(SolverError::Setup("linear tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// Discrete low-order norm: max of `|v|` plus the max first divided difference.
pub fn low_order_norm(f: &ScalarField3) -> f64 {
    f.max_abs() + max_forward_difference(f)
}

fn component_norms(p: &Perturbation) -> [f64; 4] {
    p.components().map(low_order_norm)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Successive differences of `(primary, beta2, beta3, B)`.
    pub diff: [f64; 4],
    /// Norms of the new iterate.
    pub norm: [f64; 4],
    /// `max diff / previous max diff`, from the second iteration on.
    pub ratio: Option<f64>,
    pub linear_iterations: usize,
}

impl IterationRecord {
    pub fn max_diff(&self) -> f64 {
        self.diff.iter().cloned().fold(0.0, f64::max)
    }
    pub fn max_norm(&self) -> f64 {
        self.norm.iter().cloned().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub flow: FlowField,
    pub perturbation: Perturbation,
    pub trace: IterationTrace,
    pub converged: bool,
    /// Why the iteration stopped early, if it did.
    pub failure: Option<SolverError>,
    pub delta_max: f64,
}

/// Output of one application of `Lambda`.
pub struct LambdaOutput {
    pub next: Perturbation,
    pub linear_iterations: usize,
}

/// `Lambda(iterate)`. `guess` warm-starts the elliptic solve.
pub fn apply_lambda_with_guess(
    iterate: &Perturbation,
    background: &BackgroundState,
    data: &BoundaryData,
    cfg: &SolverConfig,
    guess: Option<&ScalarField3>,
) -> Result<LambdaOutput, SolverError> {
    let coeffs = match background.kind {
        FlowKind::Compressible(_) => elliptic::assemble(iterate, background, data, cfg.subsonic_margin),
        FlowKind::Incompressible => {
            elliptic::assemble_incompressible_with_margin(iterate, background, data, cfg.subsonic_margin)
        }
    }
    .map_err(from_elliptic)?;
    let sol = elliptic::solve_with_guess(&coeffs, &cfg.linear, guess).map_err(from_elliptic)?;
    // a11 = q - 1 (compressible) or q (incompressible), with q the transport weight
    let shift = if background.is_compressible() { 1.0 } else { 0.0 };
    let q = coeffs.a[0][0].map(|v| v + shift);
    let (b2, b3) = transport::update_beta(data, &sol.solution, &iterate.beta2, &iterate.beta3, &q)
        .map_err(|e| from_transport(Step::FlowAngles, e))?;
    let bb = transport::update_b(data, background, (&b2, &b3), (&iterate.beta2, &iterate.beta3))
        .map_err(|e| from_transport(Step::Bernoulli, e))?;
    Ok(LambdaOutput {
        next: Perturbation { primary: sol.solution, beta2: b2, beta3: b3, bernoulli: bb },
        linear_iterations: sol.iterations,
    })
}

pub fn apply_lambda(
    iterate: &Perturbation,
    background: &BackgroundState,
    data: &BoundaryData,
    cfg: &SolverConfig,
) -> Result<Perturbation, SolverError> {
    apply_lambda_with_guess(iterate, background, data, cfg, None).map(|o| o.next)
}

fn check_admissible(flow: &FlowField, margin: f64) -> Result<(), SolverError> {
    let prim = flow.primitives().map_err(|e| match e {
        FlowError::Stagnation { .. } => SolverError::Stagnation { step: Step::Admissibility, detail: e.to_string() },
        FlowError::NonFinite { .. } => SolverError::NonFinite { step: Step::Admissibility, detail: e.to_string() },
    })?;
    if let FlowKind::Compressible(gas) = flow.kind {
        for n in 0..prim.rho.values.len() {
            let sp = prim.u1.values[n].powi(2) + prim.u2.values[n].powi(2) + prim.u3.values[n].powi(2);
            let gap = gas.sound_speed_sq(prim.rho.values[n]) - sp;
            if !(gap > margin) {
                return Err(SolverError::Sonic {
                    step: Step::Admissibility,
                    detail: format!("c^2 - |u|^2 = {gap} at node {:?}", flow.grid().ijk(n)),
                });
            }
        }
    } else {
        for n in 0..prim.p.values.len() {
            let gap = flow.bernoulli.values[n] - prim.p.values[n];
            if !(gap > margin) {
                return Err(SolverError::Stagnation {
                    step: Step::Admissibility,
                    detail: format!("B - p = {gap} at node {:?}", flow.grid().ijk(n)),
                });
            }
        }
    }
    Ok(())
}

/// Runs the fixed-point iteration from the zero perturbation.
pub fn solve(background: &BackgroundState, data: &BoundaryData, cfg: &SolverConfig, grid: crate::domain::GridSpec) -> Result<SolveResult, SolverError> {
    cfg.validate()?;
    if background.grid() != grid.cross() || data.grid() != grid.cross() {
        return Err(SolverError::Setup("background, boundary data and grid disagree".into()));
    }
    let mut x = Perturbation::zeros(grid);
    let mut trace = IterationTrace::default();
    let mut delta_max = cfg.delta_max.unwrap_or(f64::INFINITY);
    let mut guess: Option<ScalarField3> = None;
    let mut prev_diff: Option<f64> = None;
    let finish = |x: Perturbation, trace, converged, failure, delta_max| SolveResult {
        flow: FlowField::from_perturbation(background, &x),
        perturbation: x,
        trace,
        converged,
        failure,
        delta_max,
    };
    for it in 1..=cfg.max_iter {
        let out = match apply_lambda_with_guess(&x, background, data, cfg, guess.as_ref()) {
            Ok(o) => o,
            Err(e) => return Ok(finish(x, trace, false, Some(e), delta_max)),
        };
        guess = Some(out.next.primary.clone());
        let x_new = if cfg.relaxation == 1.0 { out.next } else { x.relax(&out.next, cfg.relaxation) };
        if !x_new.is_finite() {
            let e = SolverError::NonFinite { step: Step::Admissibility, detail: "iterate".into() };
            return Ok(finish(x, trace, false, Some(e), delta_max));
        }
        let diff = component_norms(&x_new.difference(&x));
        let norm = component_norms(&x_new);
        let max_diff = diff.iter().cloned().fold(0.0, f64::max);
        let max_norm = norm.iter().cloned().fold(0.0, f64::max);
        if it == 1 && cfg.delta_max.is_none() {
            delta_max = 10.0 * max_norm;
        }
        trace.records.push(IterationRecord {
            iteration: it,
            diff,
            norm,
            ratio: prev_diff.map(|p| if p > 0.0 { max_diff / p } else { 0.0 }),
            linear_iterations: out.linear_iterations,
        });
        prev_diff = Some(max_diff);
        if max_norm > delta_max {
            let e = SolverError::DeltaExceeded { norm: max_norm, delta_max };
            return Ok(finish(x, trace, false, Some(e), delta_max));
        }
        x = x_new;
        if max_diff <= cfg.tol_fixed {
            let flow = FlowField::from_perturbation(background, &x);
            if let Err(e) = check_admissible(&flow, cfg.subsonic_margin) {
                return Ok(finish(x, trace, false, Some(e), delta_max));
            }
            return Ok(finish(x, trace, true, None, delta_max));
        }
    }
    Ok(finish(x, trace, false, None, delta_max))
}

/// `solve` restricted to incompressible backgrounds.
pub fn solve_incompressible(
    background: &BackgroundState,
    data: &BoundaryData,
    cfg: &SolverConfig,
    grid: crate::domain::GridSpec,
) -> Result<SolveResult, SolverError> {
    if background.is_compressible() {
        return Err(SolverError::Setup("solve_incompressible needs an incompressible background".into()));
    }
    solve(background, data, cfg, grid)
}
