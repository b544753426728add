use thiserror::Error;

/// Which defining condition of `A(a, B, C)` a sequence failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    Bounds,
    Restriction,
    Composition,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Violation::Bounds => "exceeds bounds",
            Violation::Restriction => "violates the boolean restriction",
            Violation::Composition => "occurrence composition not admitted",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("literal `{literal}` refers to entry {index}, but dimension is {dim}")]
    IndexOutOfRange {
        literal: String,
        index: usize,
        dim: usize,
    },
    #[error("empty sequence")]
    EmptySequence,
    #[error("sequence entries must be positive")]
    NonPositiveEntry,
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid composition: {0}")]
    InvalidComposition(String),
    #[error("invalid sequence: {0}")]
    InvalidSequence(String),
    #[error("rank {rank} out of range (family has {total} elements)")]
    RankOutOfRange { rank: String, total: String },
    #[error("sequence is not a member: {0}")]
    NotAMember(Violation),
    #[error("vertex {0} not found in store")]
    VertexNotFound(String),
    #[error("sequence {gamma} is not dominated by roof {roof}")]
    NotDominated { gamma: String, roof: String },
    #[error("the sink has no successors")]
    Sink,
    #[error("count overflow in the rank representation")]
    Overflow,
    #[error("family is empty")]
    EmptyFamily,
    #[error("candidate space {candidates} exceeds budget {budget}")]
    BudgetExceeded { candidates: String, budget: u64 },
    #[error("unsupported index format version {0}")]
    VersionMismatch(String),
    #[error("checksum mismatch")]
    Checksum,
    #[error("truncated index image")]
    Truncated,
    #[error("corrupt index image: {0}")]
    Corrupt(String),
    #[error("{0}")]
    Spec(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn fmt_seq(seq: &[u32]) -> String {
    let parts: Vec<String> = seq.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}
