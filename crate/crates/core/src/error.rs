use thiserror::Error;

use crate::expr::ExprError;
use crate::generators::GeneratorError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    /// A classical integral did not converge. `partial` is the last partial sum.
    #[error("integral diverged (last partial sum {partial:e})")]
    Diverged { partial: f64 },
    #[error("integrand failed at {at}: {message}")]
    Node { at: f64, message: String },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
