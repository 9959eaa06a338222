use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("loop edge: {0}")]
    LoopEdge(String),
    #[error("graph is not connected: vertex `{vertex}` is unreachable from `{root}`")]
    Disconnected { vertex: String, root: String },
    #[error("input describes an empty graph")]
    EmptyGraph,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("move precondition violated ({kind}): {detail}")]
    PreconditionViolated { kind: &'static str, detail: String },
    #[error("certificate fingerprint mismatch at {stage}: expected {expected:#018x}, got {got:#018x}")]
    FingerprintMismatch {
        stage: &'static str,
        expected: u64,
        got: u64,
    },
    #[error("orientations belong to different graphs")]
    GraphMismatch,
    #[error("divisor degree {got} exceeds g-1 = {max}")]
    DegreeTooHigh { got: i64, max: i64 },
    #[error("divisor degree is {got}, expected {want}")]
    WrongDegree { got: i64, want: i64 },
    #[error("no orientation realizes this divisor exactly: flow short by {shortfall}")]
    Infeasible { shortfall: i64 },
    #[error("total capacity {0} exceeds the parallel-edge expansion cap")]
    CapacityTooLarge(i64),
    #[error("search interrupted: {0}")]
    Interrupted(&'static str),
    #[error("Riemann-Roch identity violated: r(D)={r_d}, r(K-D)={r_kd}, deg={deg}, g={genus}")]
    RrViolation {
        r_d: i64,
        r_kd: i64,
        deg: i64,
        genus: i64,
    },
}

impl Error {
    /// Stable machine-readable code, used by the CLI error payloads.
    pub fn code(&self) -> &'static str {
        match self {
            Error::LoopEdge(_) => "loop_edge",
            Error::Disconnected { .. } => "disconnected",
            Error::EmptyGraph => "empty_graph",
            Error::Parse { .. } => "parse_error",
            Error::UnknownVertex(_) => "unknown_vertex",
            Error::EmptySubset => "empty_subset",
            Error::TooLarge(_) => "too_large",
            Error::PreconditionViolated { .. } => "precondition_violated",
            Error::FingerprintMismatch { .. } => "fingerprint_mismatch",
            Error::GraphMismatch => "graph_mismatch",
            Error::DegreeTooHigh { .. } => "degree_too_high",
            Error::WrongDegree { .. } => "wrong_degree",
            Error::Infeasible { .. } => "infeasible",
            Error::CapacityTooLarge(_) => "capacity_too_large",
            Error::Interrupted(_) => "interrupted",
            Error::RrViolation { .. } => "rr_violation",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
