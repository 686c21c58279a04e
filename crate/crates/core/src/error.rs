use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("self-loop on node {0}")]
    SelfLoop(usize),

    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("node {0} is isolated")]
    IsolatedNode(usize),

    #[error("graph is disconnected ({} components, sizes {sizes:?})", sizes.len())]
    Disconnected { sizes: Vec<usize> },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("meeting-time solver did not converge after {iterations} iterations (max residual {residual:e}, trace {trace:?})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("remeeting identity violated: relative error {rel_error:e}")]
    IdentityViolated { rel_error: f64 },

    #[error("critical ratio is at a pole")]
    Pole,

    #[error("structure coefficient undefined for b* = 1")]
    UnitRatio,

    #[error("copying weight {weight} is not positive; use a smaller delta")]
    NonPositiveWeight { weight: f64 },

    #[error("no absorption after {steps} steps")]
    StepLimit { steps: u64 },

    #[error("graph has {n} nodes, limit is {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("singular linear system")]
    Singular,

    #[error("gave up after {attempts} attempts: {detail}")]
    AttemptsExhausted { attempts: usize, detail: String },

    #[error("malformed binary dump: {0}")]
    Dump(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
