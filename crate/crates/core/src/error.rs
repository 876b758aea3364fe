use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("N = {n_items} exceeds the dense-matrix cap of {cap}")]
    DeskScaleCap { n_items: u64, cap: u64 },

    #[error("step size underflow at t = {t:e} (problem too stiff for the requested tolerance)")]
    StepUnderflow { t: f64 },

    #[error("tolerance not achievable: {0}")]
    ToleranceUnachievable(String),

    #[error("state fully decayed at t = {t:e}: both amplitudes below representable range")]
    FullyDecayed { t: f64 },

    #[error("zero-norm state")]
    ZeroState,

    #[error("Gamma function pole at {0}")]
    Pole(f64),

    #[error("parabolic cylinder function did not converge in the {regime} regime (order = {order}, z = {z})")]
    Unconverged {
        regime: &'static str,
        order: String,
        z: String,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
