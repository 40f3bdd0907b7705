use alloc::string::String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraftError {
    /// Malformed input: loops, parallel edges, unknown or duplicate vertices.
    #[error("malformed graph: {0}")]
    Format(String),
    #[error("the component containing `{vertex}` holds {count} terminals, an odd number")]
    Parity { vertex: String, count: usize },
    #[error("{what} is {actual}, above the configured bound of {limit}")]
    Size {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("vertices `{x}` and `{y}` lie in different components")]
    Disconnected { x: String, y: String },
    #[error("the graft is not bipartite")]
    NotBipartite,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("more than {cap} minimum joins exist")]
    CapExceeded { cap: usize },
    /// A condition that can only fail through a bug in this crate.
    #[error("internal invariant violated: {0}")]
    InternalInvariant(String),
    /// A structural statement about grafts failed on a concrete instance.
    #[error("property `{check}` violated: {detail}")]
    PropertyViolation { check: &'static str, detail: String },
}

pub type Result<T, E = GraftError> = core::result::Result<T, E>;
