use thiserror::Error;

/// Everything that can go wrong while building parameters, maps, propagators
/// or Wigner states.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DomainError: {0}")]
    Domain(String),

    /// θη ≥ ħ²: the Seiberg–Witten map has vanishing (or sign-flipped) Jacobian.
    #[error("SingularMap: theta*eta = {theta_eta} must be below hbar^2 = {hbar_sq}")]
    SingularMap { theta_eta: f64, hbar_sq: f64 },

    #[error("NonPositiveStiffness: {name} = {value} must be positive")]
    NonPositiveStiffness { name: &'static str, value: f64 },

    #[error("OverdampedRegime: (2*lambda*mu - 1)^2 = {lhs} must exceed eps^2 = {eps_sq}")]
    OverdampedRegime { lhs: f64, eps_sq: f64 },

    #[error("StepTooLarge: step {step} exceeds period/100 = {limit}")]
    StepTooLarge { step: f64, limit: f64 },

    #[error("InsufficientSamples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("NonUniformSampling: trajectory times are not equally spaced")]
    NonUniformSampling,

    #[error("SingularCovariance: {0}")]
    SingularCovariance(String),

    #[error("DegenerateAxes: {0}")]
    DegenerateAxes(String),
}

impl Error {
    /// Short machine-readable name, the variant name without payload.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::SingularMap { .. } => "SingularMap",
            Error::NonPositiveStiffness { .. } => "NonPositiveStiffness",
            Error::OverdampedRegime { .. } => "OverdampedRegime",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::NonUniformSampling => "NonUniformSampling",
            Error::SingularCovariance(_) => "SingularCovariance",
            Error::DegenerateAxes(_) => "DegenerateAxes",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
