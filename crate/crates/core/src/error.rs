use thiserror::Error;

use crate::model::ArcId;
use crate::solver::SolveResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("arc {0} appears more than once")]
    DuplicateArc(ArcId),

    #[error("arc {arc} references node {node}, but the graph has {node_count} nodes")]
    NodeOutOfRange {
        arc: ArcId,
        node: usize,
        node_count: usize,
    },

    #[error("node {node} out of range (graph has {node_count} nodes)")]
    TerminalOutOfRange { node: usize, node_count: usize },

    #[error("cycle detected through nodes {0:?}")]
    Cycle(Vec<usize>),

    #[error("unknown arc id {0}")]
    UnknownArc(ArcId),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("more than {cap} s-t paths")]
    PathOverflow { cap: usize },

    #[error("more than {cap} first-stage paths; best found so far: {}", partial.as_ref().map_or("none".to_string(), |p| p.opt.to_string()))]
    SolveOverflow {
        cap: usize,
        partial: Option<Box<SolveResult>>,
    },

    #[error("adversary path pool exceeded {cap} paths")]
    PoolOverflow { cap: usize },

    #[error("more than {cap} deviation subsets to enumerate")]
    SubsetOverflow { cap: usize },

    #[error("formula has {variables} variables, exhaustive search is limited to {limit}")]
    TooManyVariables { variables: usize, limit: usize },

    #[error("budget model does not match the operation: {0}")]
    BudgetMismatch(&'static str),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("reduction precondition violated: {0}")]
    Precondition(String),

    #[error("linear program is {0}")]
    LpFailure(&'static str),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
