use thiserror::Error;

/// Errors produced by instance construction, enumeration, parsing and
/// numeric verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two of the 2n card values are equal. The model requires all values
    /// to be pairwise distinct; ties are rejected, not broken.
    #[error("duplicate value {0}")]
    DuplicateValue(f64),

    /// A card value is zero, negative, or not a finite number.
    #[error("non-positive value {0}")]
    NonPositiveValue(f64),

    /// The instance exceeds the exhaustive-enumeration cap.
    #[error("instance too large for enumeration: n={n} exceeds cap {cap}")]
    InstanceTooLarge { n: usize, cap: usize },

    /// Window left extremes violate the moving-window conditions.
    #[error("invalid window spec: {0}")]
    InvalidWindowSpec(String),

    /// An algorithm specifier string failed to parse.
    #[error(
        "invalid algorithm spec `{0}`: expected open | closed | full | mixture:<r> | window:<t>"
    )]
    BadAlgorithmSpec(String),

    /// Root bracketing failed: both endpoints have the same sign.
    #[error("bracket failure on [{left}, {right}]: f(left)={f_left}, f(right)={f_right}")]
    BracketFailure {
        left: f64,
        right: f64,
        f_left: f64,
        f_right: f64,
    },

    /// Quadrature error estimate exceeds the requested tolerance.
    #[error("quadrature error bound {bound:e} exceeds tolerance {tol:e}; increase resolution")]
    ResolutionTooCoarse { bound: f64, tol: f64 },

    /// A synthetic instance was requested with an impossible couple index.
    #[error("invalid target k={k_target} for n={n}: k must be in [2, n+1]")]
    InvalidTarget { k_target: usize, n: usize },

    /// An instance file could not be read or decoded.
    #[error("bad instance file: {0}")]
    BadInstanceFile(String),

    /// A parameter grid or range is malformed.
    #[error("bad range: {0}")]
    BadRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
