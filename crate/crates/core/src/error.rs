use thiserror::Error;

/// Failures raised by parameter validation and the numerical engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("decay rate must be positive, got {0}")]
    NonPositiveGamma(f64),

    #[error("non-guided loss rate must be non-negative, got {0}")]
    NegativeLoss(f64),

    #[error("beta factor must lie in (0, 1], got {0}")]
    InvalidBeta(f64),

    #[error("pulse parameter alpha must be positive and finite, got {0}")]
    NonPositiveAlpha(f64),

    #[error("pulse is not normalized: squared norm {norm}")]
    UnnormalizedPulse { norm: f64 },

    #[error("invalid pulse samples: {0}")]
    InvalidPulse(String),

    #[error("quadrature did not converge: error estimate {estimate:.3e} above tolerance {tolerance:.3e} after {nodes} nodes")]
    QuadratureNotConverged {
        estimate: f64,
        tolerance: f64,
        nodes: usize,
    },

    #[error("cross-term integral is not real: imaginary residue {residue:.3e}")]
    ComplexCrossTerm { residue: f64 },

    #[error("evolution not converged: residual emitter excitation {residual:.3e} at horizon")]
    NotConverged { residual: f64 },

    #[error("bin width {dx} too coarse for pulse width {width} (need dx <= width/10)")]
    ResolutionTooCoarse { dx: f64, width: f64 },

    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
