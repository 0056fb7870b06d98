use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("direction is not a unit vector (norm {norm})")]
    NonUnitDirection { norm: f64 },
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix power {0} outside 0..=4")]
    PowerOutOfRange(u32),
    #[error("invalid POVM: |eta ± alpha| must not exceed 1 (alpha {alpha}, eta {eta})")]
    InvalidPovm { alpha: f64, eta: f64 },
    #[error("invalid state: {0}")]
    InvalidState(&'static str),
    #[error("parameter `{name}` = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("X-state discriminant is negative ({0:e})")]
    NegativeDiscriminant(f64),
    #[error("decay amplitudes are both zero")]
    ZeroAmplitudes,
    #[error("form factors are both zero")]
    ZeroFormFactors,
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("measurement settings are not orthogonal")]
    NonOrthogonalSettings,
    #[error("event count must be positive")]
    EmptyBatch,
    #[error("rejection sampler acceptance rate {0:.4} below 1%")]
    LowAcceptance(f64),
    #[error("decay parameter {0} too small for moment inversion (|alpha| < 0.05)")]
    AlphaTooSmall(f64),
    #[error("batch of {size} events is below the required {required}")]
    BatchTooSmall { size: usize, required: usize },
    #[error("bootstrap needs at least 100 resamples, got {0}")]
    TooFewResamples(usize),
    #[error("invalid scan: {0}")]
    InvalidScan(String),
    #[error("no interior maximum in bracket")]
    NoInteriorMaximum,
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
