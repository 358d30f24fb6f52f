use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit indices overlap: {0:?}")]
    OverlappingQubits(Vec<usize>),

    #[error("matrix of dimension {dim} does not act on {qubits} qubit(s)")]
    DimensionMismatch { dim: usize, qubits: usize },

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("probability {name} = {value} outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid friend: {0}")]
    InvalidFriend(String),

    #[error("invalid decoder: {0}")]
    InvalidDecoder(String),

    #[error("invalid setting: {0}")]
    InvalidSetting(String),

    #[error("expectation table is missing {0}")]
    MissingExpectation(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable category, used for CLI exit reporting.
    pub fn category(&self) -> &'static str {
        match self {
            Error::QubitOutOfRange { .. }
            | Error::OverlappingQubits(_)
            | Error::DimensionMismatch { .. }
            | Error::NotUnitary(_)
            | Error::InvalidState(_) => "circuit",
            Error::InvalidProbability { .. }
            | Error::InvalidFriend(_)
            | Error::InvalidDecoder(_)
            | Error::InvalidSetting(_)
            | Error::Config(_) => "config",
            Error::MissingExpectation(_) | Error::Domain(_) => "domain",
            Error::Infeasible(_) => "infeasible",
            Error::Io(_) | Error::Json(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" => 2,
            "infeasible" => 3,
            "io" => 4,
            "domain" => 5,
            _ => 1,
        }
    }
}

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidProbability { name, value })
    }
}
