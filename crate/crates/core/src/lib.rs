//! Numerical laboratory for the eigenvalues of the plate operator
//! `Δ²u − τΔu` on planar domains under five homogeneous boundary
//! conditions (clamped, hinged, free, and two Steklov variants).
//!
//! The crate provides
//! * semi-analytic reference spectra on disks (Bessel determinants) and
//!   rectangles (separable sines),
//! * a conforming Ritz/Galerkin solver on star-shaped Fourier domains,
//! * boundary shape-derivative machinery: Hadamard formulas for
//!   elementary symmetric functions of eigenvalue clusters, criticality
//!   residuals, radiality profiles, and finite-difference oracles.

pub mod forms;
pub mod geometry;
pub mod jet;
pub mod numerics;
pub mod poly;
pub mod reference_spectra;
pub mod ritz;
pub mod shape_calculus;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum PlateError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("eigensolver failed to converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("non-finite function value at x = {0}")]
    NonFiniteValue(f64),
    #[error("radius profile not positive at theta = {theta} (R = {radius})")]
    NonPositiveRadius { theta: f64, radius: f64 },
    #[error("map is not injective on the quadrature grid (det = {det:e} at t = {t})")]
    NotInjective { det: f64, t: f64 },
    #[error("requested {requested} eigenvalues but only {found} reachable with n_max = {n_max}")]
    SpectrumTruncated {
        requested: usize,
        found: usize,
        n_max: usize,
    },
    #[error("degenerate Steklov determinant for angular index {0}")]
    DegenerateDeterminant(usize),
    #[error("cluster tracking is ambiguous at step {h}: neighbour gap {gap:e} vs spread {spread:e}; reduce the step")]
    AmbiguousCluster { h: f64, gap: f64, spread: f64 },
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, PlateError>;
