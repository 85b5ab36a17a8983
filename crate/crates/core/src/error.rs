use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Contract violations raised by the grid, spectrum, sample and engine layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid sizing: {0}")]
    Sizing(String),

    #[error("length mismatch: expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("angular frequency must be positive, got {0} rad/s")]
    NonPositiveFrequency(f64),

    #[error("unphysical dispersion: dβ/dω = {slope} s/m at ω = {omega} rad/s")]
    NonPositiveGroupDelay { omega: f64, slope: f64 },

    #[error("frequency grid half-range {half_range:e} rad/s does not cover the spectrum (need at least {required:e} rad/s)")]
    Coverage { half_range: f64, required: f64 },

    #[error("closed form unavailable: {0}")]
    ClosedFormUnavailable(&'static str),

    #[error("carrier undersampled: delay step {step:e} s exceeds {limit:e} s")]
    CarrierUndersampled { step: f64, limit: f64 },

    #[error("self-interference term is zero; normalized output undefined")]
    ZeroBackground,

    #[error("pump sweep span {span:e} rad/s exceeds {limit:e} rad/s")]
    SweepTooWide { span: f64, limit: f64 },

    #[error("Wigner window too narrow: conjugate delay span {available:e} s, sample needs {required:e} s")]
    WignerWindow { available: f64, required: f64 },

    #[error("grid misalignment: {0}")]
    GridMisaligned(String),

    #[error("reference amplitude {value:e} below floor {floor:e}")]
    AmplitudeFloor { value: f64, floor: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
