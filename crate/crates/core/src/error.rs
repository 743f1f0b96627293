use std::fmt;

use crate::codec::PartialConstruction;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Operands disagree on alphabet, dimension, space or matrix size.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// Caller-supplied data violates an operation's precondition.
    #[error("invalid input: {0}")]
    Input(String),
    /// The request exceeds what can be enumerated or indexed.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// The operation is not defined for the given parameters (e.g. q != 2).
    #[error("outside domain: {0}")]
    Domain(String),
    /// A text file failed to parse.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// A search ran out of budget before certifying its answer.
    #[error("{0}")]
    Budget(BudgetExhausted),
    /// A multi-step construction stopped at a step whose search ran out of budget.
    #[error("step {} of the construction: {}", .0.level, .0.exhausted)]
    Construction(Box<PartialConstruction>),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

/// Best known bounds when a search is cut short. `lower` is always certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetExhausted {
    pub lower: usize,
    pub upper: Option<usize>,
    pub nodes: u64,
}

impl fmt::Display for BudgetExhausted {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Some(u) => write!(
                f,
                "search budget exhausted after {} nodes; value lies in [{}, {}]",
                self.nodes, self.lower, u
            ),
            None => write!(
                f,
                "search budget exhausted after {} nodes; value is at least {}",
                self.nodes, self.lower
            ),
        }
    }
}
