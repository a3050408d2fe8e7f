pub mod config;
pub mod error;
pub mod expr;
pub mod generators;
pub mod hardy;
pub mod harness;
pub mod pseudo_integral;
pub mod quadrature;
pub mod semiring;

pub use config::Config;
pub use error::{Error, Result};
