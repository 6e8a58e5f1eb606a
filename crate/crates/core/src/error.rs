use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("relay region contains no relays")]
    EmptyRelaySet,

    #[error("relay set still empty after {attempts} resampling attempts")]
    RelayResampleLimit { attempts: u64 },

    #[error("receiver coincides with a transmitter (zero distance)")]
    ZeroDistance,

    #[error("multiplexing gain {m} outside support [0, {m_max}]")]
    OutsideSupport { m: f64, m_max: f64 },

    #[error("no outage observed for `{scenario}` at {gamma_bar_db} dB; more trials needed")]
    UnresolvedOutage {
        scenario: String,
        gamma_bar_db: f64,
    },

    #[error("slope fit: {0}")]
    SlopeFit(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    /// Stable snake_case tag for machine-readable error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::EmptyRelaySet => "empty_relay_set",
            Error::RelayResampleLimit { .. } => "relay_resample_limit",
            Error::ZeroDistance => "zero_distance",
            Error::OutsideSupport { .. } => "outside_support",
            Error::UnresolvedOutage { .. } => "unresolved_outage",
            Error::SlopeFit(_) => "slope_fit",
            Error::Config { .. } => "config",
            Error::Csv { .. } => "csv",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code used by the command line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config { .. } | Error::OutsideSupport { .. } => 2,
            Error::UnresolvedOutage { .. } => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
