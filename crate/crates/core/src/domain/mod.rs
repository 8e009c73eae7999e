//! Grids on `[0,1] x T^2`, grid fields, finite-difference stencils, profiles,
//! reflection extension and boundary data.

pub mod boundary;
pub mod field;
pub mod grid;
pub mod profile;
pub mod spline;
pub mod stencil;

pub use boundary::{
    check_compatibility, check_even_profile, BackgroundState, BoundaryData, BoundaryProfiles,
    CompatibilityReport, EdgeCondition, FlowKind, CATALOG_TOLERANCE,
};
pub use field::{CrossField, ScalarField3};
pub use grid::{wrap_periodic, CrossGrid, GridSpec};
pub use profile::{extend_reflect, Parity, Profile, QuadrantTable, TrigKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unknown profile `{0}`")]
    UnknownProfile(String),
    #[error("bad profile parameters: {0}")]
    ProfileParams(String),
    #[error("invalid background state: {0}")]
    Background(String),
}
