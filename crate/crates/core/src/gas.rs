//! Polytropic thermodynamics and the change of variables between primitive
//! states `(rho, u1, u2, u3)` and flow-angle states `(s, beta2, beta3, B)`.
//!
//! The pressure law is `p = A rho^gamma` with `A = 1/gamma`, so the sound
//! speed is `c^2 = rho^(gamma-1)` and the enthalpy `h = rho^(gamma-1)/(gamma-1)`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GasError {
    #[error("gamma = {0} outside (1, 3)")]
    InvalidGamma(f64),
    #[error("negative density {0}")]
    NegativeDensity(f64),
    #[error("stagnation: Bernoulli value {bernoulli} does not exceed {level}")]
    Stagnation { bernoulli: f64, level: f64 },
    #[error("axial velocity must be positive, got {0}")]
    NonPositiveAxialVelocity(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    gamma: f64,
}

/// Pressure, squared sound speed and enthalpy at one density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thermo {
    pub p: f64,
    pub c2: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewVarsPoint {
    pub s: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub bernoulli: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimitivePoint {
    pub rho: f64,
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

impl PrimitivePoint {
    pub fn speed_sq(&self) -> f64 {
        self.u1 * self.u1 + self.u2 * self.u2 + self.u3 * self.u3
    }
}

/// `G = 1 + beta2^2 + beta3^2`.
#[inline]
pub fn angle_factor(beta2: f64, beta3: f64) -> f64 {
    1.0 + beta2 * beta2 + beta3 * beta3
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self, GasError> {
        if !(gamma > 1.0 && gamma < 3.0) {
            return Err(GasError::InvalidGamma(gamma));
        }
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// The pressure constant `A = 1/gamma`.
    pub fn a(&self) -> f64 {
        1.0 / self.gamma
    }

    #[inline]
    pub fn pressure(&self, rho: f64) -> f64 {
        rho.powf(self.gamma) / self.gamma
    }

    #[inline]
    pub fn sound_speed_sq(&self, rho: f64) -> f64 {
        rho.powf(self.gamma - 1.0)
    }

    #[inline]
    pub fn enthalpy(&self, rho: f64) -> f64 {
        rho.powf(self.gamma - 1.0) / (self.gamma - 1.0)
    }

    /// Density with the given enthalpy (inverse of `enthalpy`).
    pub fn density_from_enthalpy(&self, h: f64) -> f64 {
        (h * (self.gamma - 1.0)).powf(1.0 / (self.gamma - 1.0))
    }

    pub fn thermo(&self, rho: f64) -> Result<Thermo, GasError> {
        if rho < 0.0 || rho.is_nan() {
            return Err(GasError::NegativeDensity(rho));
        }
        Ok(Thermo {
            p: self.pressure(rho),
            c2: self.sound_speed_sq(rho),
            h: self.enthalpy(rho),
        })
    }

    pub fn axial_speed_sq(&self, point: &NewVarsPoint) -> Result<f64, GasError> {
        let h = self.enthalpy(point.s.exp());
        axial_speed_sq_from_level(h, point.beta2, point.beta3, point.bernoulli)
    }

    pub fn to_primitive(&self, point: &NewVarsPoint) -> Result<PrimitivePoint, GasError> {
        let u1 = self.axial_speed_sq(point)?.sqrt();
        Ok(PrimitivePoint {
            rho: point.s.exp(),
            u1,
            u2: point.beta2 * u1,
            u3: point.beta3 * u1,
        })
    }

    pub fn from_primitive(&self, point: &PrimitivePoint) -> Result<NewVarsPoint, GasError> {
        if point.rho <= 0.0 || point.rho.is_nan() {
            return Err(GasError::NegativeDensity(point.rho));
        }
        if !(point.u1 > 0.0) {
            return Err(GasError::NonPositiveAxialVelocity(point.u1));
        }
        Ok(NewVarsPoint {
            s: point.rho.ln(),
            beta2: point.u2 / point.u1,
            beta3: point.u3 / point.u1,
            bernoulli: 0.5 * point.speed_sq() + self.enthalpy(point.rho),
        })
    }

    pub fn is_subsonic(&self, point: &PrimitivePoint, margin: f64) -> bool {
        self.sound_speed_sq(point.rho) - point.speed_sq() > margin
    }
}

/// `2 (B - level) / G`, where `level` is `h(rho)` or the pressure.
fn axial_speed_sq_from_level(level: f64, beta2: f64, beta3: f64, b: f64) -> Result<f64, GasError> {
    if !(b > level) {
        return Err(GasError::Stagnation { bernoulli: b, level });
    }
    Ok(2.0 * (b - level) / angle_factor(beta2, beta3))
}

/// Incompressible analogue of `axial_speed_sq`: `2 (B - p) / G`.
pub fn axial_speed_sq_incompressible(p: f64, beta2: f64, beta3: f64, b: f64) -> Result<f64, GasError> {
    axial_speed_sq_from_level(p, beta2, beta3, b)
}

/// Incompressible state from `(p, beta2, beta3, B)`; density is 1.
pub fn to_primitive_incompressible(
    p: f64,
    beta2: f64,
    beta3: f64,
    b: f64,
) -> Result<PrimitivePoint, GasError> {
    let u1 = axial_speed_sq_incompressible(p, beta2, beta3, b)?.sqrt();
    Ok(PrimitivePoint { rho: 1.0, u1, u2: beta2 * u1, u3: beta3 * u1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasModel {
        GasModel::new(1.4).unwrap()
    }

    #[test]
    fn thermo_reference_values() {
        let t = gas().thermo(1.0).unwrap();
        assert!((t.p - 1.0 / 1.4).abs() < 1e-15);
        assert_eq!(t.c2, 1.0);
        assert!((t.h - 2.5).abs() < 1e-14);
        let t2 = GasModel::new(2.0).unwrap().thermo(1.0).unwrap();
        assert_eq!((t2.p, t2.c2, t2.h), (0.5, 1.0, 1.0));
        let z = gas().thermo(0.0).unwrap();
        assert_eq!((z.p, z.c2, z.h), (0.0, 0.0, 0.0));
        assert!(gas().thermo(-1e-3).is_err());
    }

    #[test]
    fn gamma_range() {
        assert!(GasModel::new(1.0).is_err());
        assert!(GasModel::new(3.0).is_err());
        assert!(GasModel::new(3.5).is_err());
        assert!(GasModel::new(f64::NAN).is_err());
    }

    #[test]
    fn axial_speed_cases() {
        let g = gas();
        let s_half = g.density_from_enthalpy(0.5).ln();
        let v = g
            .axial_speed_sq(&NewVarsPoint { s: s_half, beta2: 0.0, beta3: 0.0, bernoulli: 1.0 })
            .unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let s_one = g.density_from_enthalpy(1.0).ln();
        let v = g
            .axial_speed_sq(&NewVarsPoint { s: s_one, beta2: 1.0, beta3: 1.0, bernoulli: 2.0 })
            .unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-14);
        // B equal to h up to rounding of the log/exp round trip
        let r = g.axial_speed_sq(&NewVarsPoint { s: s_one, beta2: 0.3, beta3: 0.0, bernoulli: 0.99 });
        assert!(matches!(r, Err(GasError::Stagnation { .. })));
    }

    #[test]
    fn primitive_examples() {
        let g = gas();
        let p = g
            .to_primitive(&NewVarsPoint { s: 0.0, beta2: 0.0, beta3: 0.0, bernoulli: 2.625 })
            .unwrap();
        assert!((p.rho - 1.0).abs() < 1e-15 && (p.u1 - 0.5).abs() < 1e-14);
        assert_eq!((p.u2, p.u3), (0.0, 0.0));
        let p = g
            .to_primitive(&NewVarsPoint { s: 0.0, beta2: 1.0, beta3: 0.0, bernoulli: 3.5 })
            .unwrap();
        assert!((p.u1 - 1.0).abs() < 1e-14 && (p.u2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn subsonic_examples() {
        let g = gas();
        let st = |u1| PrimitivePoint { rho: 1.0, u1, u2: 0.0, u3: 0.0 };
        assert!(g.is_subsonic(&st(0.5), 0.0));
        assert!(!g.is_subsonic(&st(1.2), 0.0));
        assert!(!g.is_subsonic(&st(1.0), 0.0));
    }

    #[test]
    fn incompressible_speed() {
        assert_eq!(axial_speed_sq_incompressible(0.0, 0.0, 0.0, 0.5).unwrap(), 1.0);
        assert_eq!(axial_speed_sq_incompressible(1.0, 1.0, 0.0, 2.0).unwrap(), 1.0);
        assert!(axial_speed_sq_incompressible(2.0, 0.1, 0.2, 1.0).is_err());
    }
}
