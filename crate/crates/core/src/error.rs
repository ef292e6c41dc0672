use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical breakdown in {solver} at iteration {iteration}")]
    NumericalBreakdown {
        solver: &'static str,
        iteration: usize,
    },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error(
        "{solver} did not converge: relative residual {residual:.3e} after {iterations} iterations"
    )]
    NotConverged {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("step failed at t = {time}: {reason}")]
    StepFailure { time: f64, reason: String },
}
