use thiserror::Error;

/// Errors produced by the set algebra, boundary extrapolation and operator backends.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("interval has lo > hi: [{lo}, {hi}]")]
    InvertedInterval { lo: f64, hi: f64 },

    #[error("non-finite value {0} where a finite real is required")]
    NonFinite(f64),

    #[error("cannot combine a line set with a circle set")]
    MixedCarriers,

    #[error("arc length {0} outside (0, 2*pi]")]
    InvalidArc(f64),

    #[error("boundary limit did not converge at {location}: last contraction ratio {ratio:.3}")]
    NonConvergent { location: f64, ratio: f64 },

    #[error("Floquet multipliers are degenerate (|rho1| = {rho1:e}, |rho2| = {rho2:e})")]
    MonodromyDegenerate { rho1: f64, rho2: f64 },

    #[error("division by a value of modulus {0:e}")]
    DivisionByZero(f64),

    #[error("M_+ and M_- coincide (|M_+ - M_-| = {0:e}); use the truncation oracle")]
    DegenerateDenominator(f64),

    #[error("truncation window invalid: {0}")]
    InvalidWindow(String),

    #[error("invalid coefficients: {0}")]
    InvalidCoefficients(String),

    #[error("point {0} lies on the boundary of the natural domain")]
    OnBoundary(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;
