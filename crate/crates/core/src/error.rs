use thiserror::Error;

use crate::graph::StringGraphViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("label `{label}` is not a {expected} label")]
    BadLabel { label: String, expected: &'static str },
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("invalid alphabets: {0}")]
    Alphabets(String),
    #[error("not a string graph: {0}")]
    NotStringGraph(StringGraphViolation),
    #[error("not an encoded string graph: {0}")]
    NotEncodedStringGraph(String),
    #[error("cannot merge `{u}` into `{v}`: {reason}")]
    Merge { u: String, v: String, reason: &'static str },
    #[error("cannot split `{vertex}`: {reason}")]
    Split { vertex: String, reason: &'static str },
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("invalid rule: {0}")]
    InvalidRule(String),
    #[error("invalid grammar: {0}")]
    InvalidGrammar(String),
    #[error("substitution failed: {0}")]
    Substitution(String),
    #[error("derivation step {step}: {reason}")]
    Derivation { step: usize, reason: String },
    #[error("missing decoding rule for ({alpha}, {n1}, {n2})")]
    MissingDecodingRule { alpha: String, n1: String, n2: String },
    #[error("residual nonterminal `{0}` after derivation")]
    ResidualNonterminal(String),
    #[error("grammar is not reduced: {0}")]
    NotReduced(String),
    #[error("grammar is not match-exhaustive: {0}")]
    NotMatchExhaustive(String),
    #[error("invalid rewrite pattern: {0}")]
    InvalidPattern(String),
    #[error("search budget exceeded after {0} explored states")]
    BudgetExceeded(usize),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable category, used as the CLI error prefix.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownVertex(_) | Error::DuplicateVertex(_) | Error::BadLabel { .. } => "graph",
            Error::SelfLoop(_) | Error::Alphabets(_) => "graph",
            Error::NotStringGraph(_) | Error::NotEncodedStringGraph(_) => "string-graph",
            Error::Merge { .. } | Error::Split { .. } => "homeomorphism",
            Error::InvalidMatching(_) => "matching",
            Error::InvalidRule(_) => "rule",
            Error::InvalidGrammar(_) | Error::NotReduced(_) | Error::NotMatchExhaustive(_) => {
                "grammar"
            }
            Error::Substitution(_) | Error::Derivation { .. } | Error::ResidualNonterminal(_) => {
                "derivation"
            }
            Error::MissingDecodingRule { .. } => "decoding",
            Error::InvalidPattern(_) => "pattern",
            Error::BudgetExceeded(_) => "budget",
            Error::Format(_) | Error::Json(_) => "format",
            Error::Io(_) => "io",
        }
    }
}
