use thiserror::Error;

/// Failures raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("overdamped regime: 4|omega_c2|^2 - (gamma_41 - gamma_51)^2 = {discriminant:e} < 0")]
    OverdampedRegime { discriminant: f64 },

    #[error("evaluation on an undamped pole at delta2 = {delta2:e}, delta3 = {delta3:e}")]
    PoleOnGrid { delta2: f64, delta3: f64 },

    #[error("grid too coarse on {axis}: {detail}")]
    GridTooCoarse { axis: &'static str, detail: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("linear system is singular (condition number {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("finite-difference estimate {estimate:e} is below the noise floor {floor:e}")]
    NoiseFloor { estimate: f64, floor: f64 },

    #[error("adaptive quadrature did not converge (error estimate {error:e} after {intervals} intervals)")]
    QuadratureNonConvergence { error: f64, intervals: usize },

    #[error("trace has zero or non-finite mass")]
    ZeroMass,

    #[error("least-squares fit did not converge: {0}")]
    FitNonConvergence(String),

    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
