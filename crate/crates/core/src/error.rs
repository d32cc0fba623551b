use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole: {0}")]
    Pole(String),

    /// Adaptive integration ran out of budget before reaching its tolerance.
    #[error("integration did not converge: best estimate {estimate:e}, error bound {error_bound:e}")]
    Convergence { estimate: f64, error_bound: f64 },

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The selected probes do not determine all unknowns.
    #[error("design is rank deficient (rank {rank} of {required}); unresolved direction: {direction}")]
    Design { rank: usize, required: usize, direction: String },

    #[error("weighted least-squares system is singular (condition number {condition:e})")]
    Solve { condition: f64 },

    #[error("frame set resolves rank {rank} of 20 Riemann components; unresolved: {}", unresolved.join(", "))]
    FrameSet { rank: usize, unresolved: Vec<String> },

    #[error("unknown {kind} `{name}` (available: {})", available.join(", "))]
    UnknownStrategy { kind: &'static str, name: String, available: Vec<String> },
}
