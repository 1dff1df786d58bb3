use thiserror::Error;

/// Errors produced while loading data or running the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate edge ({src}, {dst}) at index {index}")]
    DuplicateEdge { src: u32, dst: u32, index: usize },
    #[error("self-loop on node {node} at index {index}")]
    SelfLoop { node: u32, index: usize },
    #[error("node {node} out of range (node count {node_count})")]
    NodeOutOfRange { node: u32, node_count: usize },
    #[error("node {node} activated more than once in cascade {cascade}")]
    RepeatedActivation { cascade: u64, node: u32 },
    #[error("unknown cascade id {0}")]
    UnknownCascade(u64),
    #[error("time {time} outside the timeline [1, {horizon}]")]
    TimeOutOfRange { time: u32, horizon: u32 },
    #[error("invalid time value {0}; activation times must be positive")]
    InvalidTime(i64),
    #[error("clock spans [1, {clock}] but the cascades span [1, {data}]")]
    HorizonMismatch { clock: u32, data: u32 },
    #[error("invalid clock: {0}")]
    InvalidClock(String),
    #[error("cut position {0} is already a boundary")]
    AlreadyBoundary(u32),
    #[error("intervals [{prev_start}, {prev_end}] and [{start}, {end}] are not adjacent")]
    NotAdjacent {
        prev_start: u32,
        prev_end: u32,
        start: u32,
        end: u32,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("timeline of {horizon} steps exceeds the limit of {limit} for {what}")]
    TooLarge {
        what: &'static str,
        horizon: u32,
        limit: u32,
    },
    #[error(
        "failed to sample a cascade of at least {min_size} activations after {attempts} attempts"
    )]
    SamplingExhausted { min_size: usize, attempts: usize },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
