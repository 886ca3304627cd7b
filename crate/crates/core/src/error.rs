use thiserror::Error;

/// Errors produced anywhere in the mapping toolflow.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("gate `{kind}` repeats operand {qubit}")]
    RepeatedOperand { kind: String, qubit: usize },

    #[error("gate `{kind}` has {arity} operands, expected 1 or 2")]
    Arity { kind: String, arity: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("slice {slice} uses qubit {qubit} more than once")]
    SliceConflict { slice: usize, qubit: usize },

    #[error("slice {slice} is empty")]
    EmptySlice { slice: usize },

    #[error("slice index {index} out of range for depth {depth}")]
    SliceOutOfRange { index: usize, depth: usize },

    #[error("invalid benchmark: {0}")]
    Bench(String),

    #[error("lookahead scale must be positive for {kind} decay, got {sigma}")]
    Sigma { kind: &'static str, sigma: f64 },

    #[error("unknown lookahead `{0}` (const, expon, gauss)")]
    UnknownLookahead(String),

    #[error("invalid machine: {0}")]
    Machine(String),

    #[error("circuit width {width} exceeds machine capacity {slots}")]
    Capacity { width: usize, slots: usize },

    #[error("holder {0} is not covered by the assignment")]
    MissingHolder(usize),

    #[error("holders {a} and {b} are both in cluster {cluster}")]
    SameCluster { a: usize, b: usize, cluster: usize },

    #[error("assignments cover different holder sets or machines")]
    Mismatch,

    #[error("slice {slice} has {pairs} interacting pairs but the machine fits at most {limit}")]
    Infeasible {
        slice: usize,
        pairs: usize,
        limit: usize,
    },

    #[error("no capacity-respecting exchange co-locates pair ({a}, {b})")]
    Unrepairable { a: usize, b: usize },

    #[error("required edges do not form a matching: holder {0} appears twice")]
    NotMatching(usize),

    #[error("mapped circuit: {0}")]
    Mapped(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
