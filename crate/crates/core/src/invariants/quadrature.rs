//! The integrating factors `I` and the potentials `Q` of the K-variable
//! conservation laws, in closed form and by adaptive quadrature.
//!
//! Compressible: `ln I(rho, B) = int_0^rho c^2(t) / (2 t (B - h(t))) dt` and
//! `Q(rho) = int_0^rho c^2(t) / (2 (B - h(t))) I(t)^-2 dt`. Since
//! `h' = c^2/t` these integrate to `I = sqrt(B / (B - h))` and `Q = p / (2B)`.
//! Incompressible: `ln I(p) = int_pref^p dt / (2 (B - t))`, so
//! `I = sqrt((B - pref) / (B - p))` and `Q = (p - pref) / (2 (B - pref))`.
//!
//! The quadrature versions integrate the defining integrals directly and
//! serve as independent checks of the closed forms.

use crate::gas::GasModel;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("B = {bernoulli} must exceed {level} on the whole integration range")]
    Domain { bernoulli: f64, level: f64 },
    #[error("negative density {0}")]
    NegativeDensity(f64),
}

/// Lower split point of the compressible integrand.
pub const SPLIT_POINT: f64 = 1e-6;

/// Adaptive Simpson with Richardson correction. `tol` is relative to the
/// magnitude of the first coarse estimate (absolute when that is zero).
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    simpson_step(f, a, b, fa, fm, fb, whole, tol * scale, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

fn check_compressible(gas: &GasModel, rho: f64, b: f64) -> Result<(), QuadratureError> {
    if !(rho >= 0.0) {
        return Err(QuadratureError::NegativeDensity(rho));
    }
    // h is increasing, so B > h(rho) covers all of [0, rho]
    let h = gas.enthalpy(rho);
    if !(b > h) {
        return Err(QuadratureError::Domain { bernoulli: b, level: h });
    }
    Ok(())
}

/// `I(rho, B) = sqrt(B / (B - h(rho)))`.
pub fn integrating_factor(gas: &GasModel, rho: f64, b: f64) -> Result<f64, QuadratureError> {
    check_compressible(gas, rho, b)?;
    Ok((b / (b - gas.enthalpy(rho))).sqrt())
}

/// `Q(rho) = p(rho) / (2B)`.
pub fn q_potential(gas: &GasModel, rho: f64, b: f64) -> Result<f64, QuadratureError> {
    check_compressible(gas, rho, b)?;
    Ok(gas.pressure(rho) / (2.0 * b))
}

/// `ln I(rho, B)` from the defining integral. The integrable singularity of
/// `t^(gamma-2) / (2 (B - h))` at zero is handled by splitting at
/// `t0 = min(SPLIT_POINT, rho)`: on `[0, t0]` the geometric expansion of
/// `1 / (B - h)` is integrated term by term, the rest goes to adaptive Simpson.
pub fn log_integrating_factor_quadrature(gas: &GasModel, rho: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    check_compressible(gas, rho, b)?;
    if rho == 0.0 {
        return Ok(0.0);
    }
    let g1 = gas.gamma() - 1.0;
    let t0 = SPLIT_POINT.min(rho);
    // int_0^t0 t^(g1-1) (h/B)^n / (2B) dt with h = t^g1/g1
    let x = t0.powf(g1) / (g1 * b);
    let mut head = 0.0;
    let mut term = x;
    for n in 0..40 {
        let add = term / (2.0 * (n + 1) as f64);
        head += add;
        if add.abs() < 1e-18 * head.abs() {
            break;
        }
        term *= x;
    }
    let integrand = |t: f64| gas.sound_speed_sq(t) / (2.0 * t * (b - gas.enthalpy(t)));
    Ok(head + adaptive_simpson(&integrand, t0, rho, tol))
}

pub fn integrating_factor_quadrature(gas: &GasModel, rho: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    Ok(log_integrating_factor_quadrature(gas, rho, b, tol)?.exp())
}

/// `Q(rho)` from its defining integral, with `I(t)` itself by quadrature.
/// The integrand vanishes like `t^(gamma-1)` at zero, so no split is needed.
pub fn q_potential_quadrature(gas: &GasModel, rho: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    check_compressible(gas, rho, b)?;
    let integrand = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let li = log_integrating_factor_quadrature(gas, t, b, tol).unwrap_or(f64::NAN);
        gas.sound_speed_sq(t) / (2.0 * (b - gas.enthalpy(t))) * (-2.0 * li).exp()
    };
    Ok(adaptive_simpson(&integrand, 0.0, rho, tol))
}

fn check_incompressible(p: f64, p_ref: f64, b: f64) -> Result<(), QuadratureError> {
    let top = p.max(p_ref);
    if !(b > top) {
        return Err(QuadratureError::Domain { bernoulli: b, level: top });
    }
    Ok(())
}

/// `I(p) = sqrt((B - pref) / (B - p))`.
pub fn integrating_factor_incompressible(p: f64, p_ref: f64, b: f64) -> Result<f64, QuadratureError> {
    check_incompressible(p, p_ref, b)?;
    Ok(((b - p_ref) / (b - p)).sqrt())
}

/// `Q(p) = (p - pref) / (2 (B - pref))`.
pub fn q_potential_incompressible(p: f64, p_ref: f64, b: f64) -> Result<f64, QuadratureError> {
    check_incompressible(p, p_ref, b)?;
    Ok((p - p_ref) / (2.0 * (b - p_ref)))
}

pub fn integrating_factor_incompressible_quadrature(p: f64, p_ref: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    check_incompressible(p, p_ref, b)?;
    let integrand = |t: f64| 1.0 / (2.0 * (b - t));
    Ok(adaptive_simpson(&integrand, p_ref, p, tol).exp())
}

pub fn q_potential_incompressible_quadrature(p: f64, p_ref: f64, b: f64, tol: f64) -> Result<f64, QuadratureError> {
    check_incompressible(p, p_ref, b)?;
    let integrand = |t: f64| {
        let i = integrating_factor_incompressible_quadrature(t, p_ref, b, tol).unwrap_or(f64::NAN);
        1.0 / (2.0 * (b - t) * i * i)
    };
    Ok(adaptive_simpson(&integrand, p_ref, p, tol))
}
