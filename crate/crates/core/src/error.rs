use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("qubit {0} is not part of the layout")]
    UnknownQubit(usize),

    #[error("crosstalk matrix has no entry for qubits ({0}, {1})")]
    MissingCrosstalkPair(usize, usize),

    #[error("mechanism with detectors {detectors:?} (observable flip {observable}) has no graphlike decomposition")]
    UndecomposableMechanism {
        detectors: Vec<usize>,
        observable: bool,
    },

    #[error("detector {0} has no finite-weight path to a partner or the boundary")]
    DisconnectedSyndrome(usize),

    #[error("crystal is unstable: stiffness eigenvalue {eigenvalue:e} is not positive")]
    Instability { eigenvalue: f64 },

    #[error("null space exhausted while solving ion {ion}: {detail}")]
    NullSpaceExhausted { ion: usize, detail: String },

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("no threshold: bracketed base {base:.6} >= 1 for every distance")]
    NoThreshold { base: f64 },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
