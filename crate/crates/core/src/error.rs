use thiserror::Error;

/// Errors raised by the numerical pipeline.
///
/// Every variant carries the module that raised it so CLI messages can be
/// traced back without a backtrace.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("[{module}] invalid parameter `{param}`: {message}")]
    Validation {
        module: &'static str,
        param: &'static str,
        message: String,
    },
    #[error("[{module}] domain error: {message}")]
    Domain {
        module: &'static str,
        message: String,
    },
    #[error("[{module}] configuration error: {message}")]
    Configuration {
        module: &'static str,
        message: String,
    },
    #[error("[{module}] internal consistency check failed: {message}")]
    Consistency {
        module: &'static str,
        message: String,
    },
    #[error("[profile] connecting orbit left the physical region at x = {x:.6e} (u = {u:.6e})")]
    Connection { x: f64, u: f64 },
    #[error("[profile] tolerance not reached: closest approach {closest:.3e} to the endstate after {steps} steps")]
    Truncation { closest: f64, steps: usize },
    #[error("[{module}] numerical failure: {message}")]
    Numerical {
        module: &'static str,
        message: String,
    },
}

impl Error {
    /// True for errors caused by bad inputs rather than numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Validation { .. } | Error::Domain { .. } | Error::Configuration { .. }
        )
    }

    pub(crate) fn numerical(module: &'static str, message: impl Into<String>) -> Self {
        Error::Numerical {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn domain(module: &'static str, message: impl Into<String>) -> Self {
        Error::Domain {
            module,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
