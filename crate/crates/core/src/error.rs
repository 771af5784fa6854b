use thiserror::Error;

/// Errors raised by the simulation core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("fitting diverged at epoch {epoch}: loss = {loss}")]
    Fitting { epoch: usize, loss: f64 },

    #[error("event for tick {event_tick} cannot be applied at tick {state_tick}")]
    Sequencing { event_tick: u64, state_tick: u64 },

    #[error("logic error: {0}")]
    Logic(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable category, used for CLI error lines and HTTP bodies.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Input(_) => "input",
            Error::Config(_) => "config",
            Error::Fitting { .. } => "fitting",
            Error::Sequencing { .. } => "sequencing",
            Error::Logic(_) => "logic",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
