use thiserror::Error;

use crate::model::Boundary;

/// Errors produced by model construction and the solver/density operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{operation} requires {required:?} boundary conditions")]
    BoundaryMismatch {
        operation: &'static str,
        required: Boundary,
    },

    #[error("{operation} requires the sine coupling profile")]
    ProfileMismatch { operation: &'static str },

    #[error("site {site} out of range 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error(
        "Bose occupation diverges: beta*hbar*omega = {beta_omega:.3e} is below the floor {floor:.1e}"
    )]
    OccupancyDiverges { beta_omega: f64, floor: f64 },

    #[error("mode data is not a canonical transformation (max deviation {deviation:.3e})")]
    NonCanonicalModes { deviation: f64 },

    #[error(
        "grid under-resolves the linewidth near omega = {center:.6}: spacing {spacing:.3e} exceeds {required:.3e} (need >= 8 samples per linewidth)"
    )]
    UnderResolvedGrid {
        center: f64,
        spacing: f64,
        required: f64,
    },

    #[error("chain of {n_sites} sites exceeds the dense-diagonalization guard of {limit}")]
    ResourceGuard { n_sites: usize, limit: usize },

    #[error("diagonalization failed: {message} (condition estimate {condition:.3e})")]
    Diagonalization { message: String, condition: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
