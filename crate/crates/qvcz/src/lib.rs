//! Two-photon van Cittert-Zernike simulator.
//!
//! Computes the post-selected second-order coherence matrix g²_jklm(ν) of
//! incoherent light modulated by a polarization grating (transmission axis
//! θ = πx/L) and propagated to the far field, by two independent routes:
//!
//! 1. [`coherence`]: Gauss-Legendre quadrature of the propagation integrals
//!    over the grating aperture (the numeric engine),
//! 2. [`closedform`]: the analytic sinc-combination expressions (the exact
//!    curves),
//!
//! plus photon-number statistics of the combined H+V thermal field at a
//! detector ([`photonstats`]) and a classical-coherence control calculation.
//!
//! Every coherence element is a function of the single dimensionless detector
//! separation ν = L·ΔX/(λz). The two routes agree to better than 1e-6 across
//! ν ∈ [0, 4] for all 16 elements; the `compare` machinery in [`scenario`]
//! verifies this on demand.
//!
//! # Quick start
//!
//! ```
//! use qvcz::closedform::g2_closed;
//! use qvcz::coherence::g2_numeric;
//! use qvcz::grating::{SourceKind, SourceModel};
//! use qvcz::quadrature::QuadratureSpec;
//! use qvcz::types::ElementIndex;
//!
//! let source = SourceModel::new(SourceKind::UnpolarizedTwoMode);
//! let spec = QuadratureSpec::default();
//! let element: ElementIndex = "HHHH".parse().unwrap();
//!
//! let numeric = g2_numeric(&source, element, 0.0, &spec).unwrap();
//! let analytic = g2_closed(SourceKind::UnpolarizedTwoMode, element, 0.0);
//! assert!((numeric.normalized - analytic).norm() < 1e-9);
//! assert!((analytic.re - 1.625).abs() < 1e-12);
//! ```
//!
//! Runnable walkthroughs of each capability live in `examples/`: `sweep`,
//! `compare`, `stats`, `resurrection`, `classical`. The `qvcz` binary exposes
//! the same five operations as subcommands.

pub mod closedform;
pub mod coherence;
pub mod grating;
pub mod photonstats;
pub mod quadrature;
pub mod report;
pub mod scenario;
pub mod types;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Grating coordinate outside the rect aperture [-1/2, 1/2].
    #[error("grating coordinate {0} outside the aperture [-1/2, 1/2]")]
    OutOfAperture(f64),

    /// Geometry with a nonpositive length scale, or a non-finite ν.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// Exchange term requested for a source whose four-point correlation
    /// has no exchange delta (the classical control).
    #[error("exchange term unsupported for {0}: classical sources keep only the direct delta term")]
    ExchangeUnsupported(&'static str),

    /// A quadrature integrand evaluated to NaN or infinity.
    #[error("non-finite integrand at {at}: {value}")]
    NonFiniteIntegrand { at: String, value: String },

    /// Quadrature spec violates its own invariants.
    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    /// Normalization constant vanished; g² is undefined for this source.
    #[error("degenerate source: normalization constant is zero")]
    DegenerateSource,

    /// Fresnel propagation requested with z ≤ 0.
    #[error("propagation distance must be positive, got z = {0}")]
    ZNonPositive(f64),

    /// Fresnel kernel phase advances by more than π between source nodes.
    #[error("undersampled Fresnel phase: max step {max_step:.3} rad exceeds π; refine the source grid")]
    UndersampledPhase { max_step: f64 },

    /// Field profile grid or amplitude data is malformed.
    #[error("invalid field profile: {0}")]
    InvalidProfile(String),

    /// Photon distribution truncated with too much tail mass.
    #[error("truncation insufficient: tail mass {tail:.3e} above n_max = {n_max} exceeds 1e-10")]
    TruncationInsufficient { n_max: usize, tail: f64 },

    /// Probabilities handed in are negative, non-finite, or not normalized.
    #[error("invalid photon distribution: {0}")]
    InvalidDistribution(String),

    /// g² of a distribution with zero mean photon number.
    #[error("g2 undefined for a zero-mean photon distribution")]
    ZeroMeanDistribution,

    /// Golden-section search found no interior maximum.
    #[error("no local maximum of |g2| in [{lo}, {hi}]: curve is monotone or constant there")]
    NoLocalMax { lo: f64, hi: f64 },

    /// Scenario file could not be parsed.
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    /// Scenario contents violate an invariant (empty element list, bad range).
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// Numeric and closed-form paths disagree beyond tolerance.
    #[error("comparison failed: max |numeric - closed| = {max_abs_err:.3e} exceeds {tol:.3e} ({worst})")]
    ComparisonFailed {
        max_abs_err: f64,
        tol: f64,
        worst: String,
    },

    /// Doubling the node count moved a result by more than the target
    /// tolerance; the quadrature has not converged.
    #[error("quadrature not converged: doubling nodes moved {what} by {delta:.3e} (target {tol:.3e})")]
    NotConverged { what: String, delta: f64, tol: f64 },

    /// Output/serialization failure.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
