use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid weight spec: {0}")]
    InvalidSpec(String),

    #[error("moment of order {order} is infinite for pareto shape {shape}")]
    InfiniteMoment { order: u32, shape: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("chung-lu requires W_i^2 <= L_n, violated at vertex {vertex} (W^2 = {weight_sq}, L_n = {total})")]
    ChungLuPrecondition {
        vertex: usize,
        weight_sq: f64,
        total: f64,
    },

    #[error("{candidates} candidate cycles exceed the configured cap of {cap}")]
    CapExceeded { candidates: u128, cap: u64 },

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    #[error("power iteration did not converge within {iters} iterations")]
    NonConvergence { iters: usize },

    #[error("malformed edge list at line {line}: {msg}")]
    EdgeList { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
