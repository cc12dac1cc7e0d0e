use alloc::string::String;

/// Errors raised by the numerical core.
///
/// Variants split into configuration problems (bad inputs, caught before any
/// computation) and numeric failures (nodes, blow-ups) that are a property of
/// the data being simulated.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    /// A density zero where the velocity or phase would have to be read.
    #[error("node at grid index {index} (x = {x}): rho = {rho:e}")]
    Node { index: usize, x: f64, rho: f64 },

    /// The Madelung integrator produced a node while stepping.
    #[error("node formed at step {step}, grid index {index} (x = {x}): rho = {rho:e}")]
    NodeFormation {
        step: usize,
        index: usize,
        x: f64,
        rho: f64,
    },

    #[error("non-finite value produced at step {step}")]
    Instability { step: usize },

    /// Adjacent samples differ in phase by more than the unwrapper accepts.
    #[error("phase step of {step:.3} rad between indices {index} and {} exceeds the resolution limit", index + 1)]
    Resolution { index: usize, step: f64 },

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("recurrence spec error: {0}")]
    Spec(String),

    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for failures that come from the simulated data rather than from
    /// how the run was configured.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Node { .. }
                | Error::NodeFormation { .. }
                | Error::Instability { .. }
                | Error::Resolution { .. }
                | Error::Calibration(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
