use thiserror::Error;

/// Every failure the numerical core can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("potential strength must be positive, got {0}")]
    NonPositiveStrength(f64),
    #[error("shell radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("box mode index must be at least 1, got {0}")]
    InvalidMode(i64),
    #[error("coordinate {value} outside [0, {radius}]")]
    OutOfRange { value: f64, radius: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("Newton iteration did not converge after {iterations} steps (last |F| = {residual:e})")]
    NoConvergence { iterations: u32, residual: f64 },
    #[error("pole-equation derivative vanished at k = {re} + {im}i")]
    DerivativeVanished { re: f64, im: f64 },
    #[error("Newton iteration collapsed onto the trivial root k = 0")]
    ConvergedToTrivialRoot,
    #[error("argument-principle count {found} disagrees with expected {expected} in window {window}")]
    MissedPole { window: usize, expected: i64, found: i64 },
    #[error("poles {first} and {second} coincide")]
    DuplicatePole { first: i32, second: i32 },
    #[error("contour passes within {min_abs:e} of a zero of F")]
    BoundaryTooCloseToZero { min_abs: f64 },
    #[error("winding number {raw} is not close to an integer")]
    NonIntegerWinding { raw: f64 },

    #[error("normalization denominator R(λ − 2ik) + 1 vanishes for pole {index}")]
    DegenerateNormalizer { index: i32 },
    #[error("states belong to different shell models")]
    ModelMismatch,
    #[error("adaptive quadrature failed to reach tolerance (error estimate {estimate:e})")]
    QuadratureFailure { estimate: f64 },
    #[error("resonant family is not mirror-symmetric at index {index}")]
    AsymmetricFamily { index: i32 },
    #[error("size mismatch: expected {expected}, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("exp overflow: Re(−z²) = {exponent} exceeds the representable range")]
    Overflow { exponent: f64 },
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("asymptotic regime requires |k|²t ≥ 4, got {0}")]
    RegimeViolation(f64),
    #[error("quadrature and bilinear-form paths disagree (relative difference {relative:e})")]
    PathDisagreement { relative: f64 },

    #[error("series value at index {index} is not positive")]
    NonPositiveSample { index: usize },
    #[error("fit window holds {found} samples, at least {needed} required")]
    WindowTooSmall { found: usize, needed: usize },
    #[error("no decade of the time grid is free of the leading exponential term")]
    NoTailWindow,

    #[error("time step {dt} exceeds the grid spacing {h}")]
    StabilityBudgetExceeded { dt: f64, h: f64 },
    #[error("absorbing layer failed: edge probability {probe:e} above threshold at t = {time}")]
    ReflectionDetected { probe: f64, time: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
