use thiserror::Error;

use crate::graph::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("unknown edge {0}")]
    UnknownEdge(usize),
    #[error("invalid graph: {0}")]
    Invalid(ValidationReport),
    #[error("inadmissible (g,b) = ({genus},{boundary})")]
    Inadmissible { genus: usize, boundary: usize },
    #[error("{edges} edges exceed the size cap of {cap}")]
    CapExceeded { edges: usize, cap: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("automorphisms act on different graphs")]
    Mismatch,
    #[error("not a switch: {0}")]
    NotSwitch(String),
}

/// A move that does not make sense on the given graph.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("edge {0} is terminal")]
    TerminalEdge(usize),
    #[error("edge {0} is a loop")]
    LoopEdge(usize),
    #[error("invalid subtree: {0}")]
    BadTree(String),
    #[error("replacement: {0}")]
    BadReplacement(String),
    #[error("replacement leaves the tree unchanged")]
    Unchanged,
    #[error("trees {0} and {1} have overlapping interiors")]
    Overlap(usize, usize),
}

/// Why an automorphism cannot be transported across a move.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NotInvariant {
    #[error("the family of trees is not invariant as a set")]
    Family,
    #[error("the automorphism does not extend over replacement tree {0}")]
    NoExtension(usize),
    #[error(transparent)]
    Move(#[from] MoveError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("budget of {budget} states exhausted before reaching a fixed point")]
    Saturation { budget: usize },
}

/// Failure inside the decomposition pipeline. Any occurrence is a bug or a
/// violated precondition.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecomposeError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Misuse of, or a structural surprise in, the path machinery.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PathError {
    #[error("not a path: {0}")]
    NotAPath(String),
    #[error("the automorphism is the identity")]
    Identity,
    #[error("the ends of the path are not in one orbit")]
    NotEquivalent,
    #[error("exponents {0} and {1} coincide modulo the order")]
    SameExponent(usize, usize),
    #[error("configuration violates the path classification: {0}")]
    Structure(String),
}

impl From<PathError> for DecomposeError {
    fn from(e: PathError) -> Self {
        match e {
            PathError::Structure(s) => DecomposeError::Internal(s),
            other => DecomposeError::Precondition(other.to_string()),
        }
    }
}

/// First failure met while evaluating a certificate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at {at}: {message}")]
pub struct CertificateError {
    /// Node address, e.g. `root/1/child`.
    pub at: String,
    pub message: String,
}
