//! Steady subsonic Euler flows in the cylinder `[0,1] x T^2`, written in the
//! flow-angle variables `(s, beta2, beta3, B)`.
//!
//! The solver alternates an elliptic solve for the log-density (or pressure)
//! perturbation with characteristic updates of the flow angles and of the
//! Bernoulli function. The `invariants` module evaluates residuals of the
//! conservation laws and transport identities satisfied by smooth solutions.

pub mod characteristics;
pub mod domain;
pub mod elliptic;
pub mod flow;
pub mod gas;
pub mod invariants;
pub mod solver;
pub mod transport;
