use crate::egraph::EClassId;
use crate::interval::Interval;

/// Position of a token in source text, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl std::fmt::Display for Pos {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("malformed numeric literal `{0}`")]
    BadLiteral(String),

    #[error("unbound variable `{0}`")]
    UnboundVar(String),

    #[error("duplicate variable `{0}`")]
    DuplicateVar(String),

    #[error("invalid interval for `{name}`: lower bound must not exceed upper bound")]
    EmptyRange { name: String },

    /// An e-class interval became empty. By soundness of the analysis this can
    /// only come from an unsound rewrite or an implementation bug, so the run
    /// aborts with the two offending intervals.
    #[error("contradiction while {during}: {existing} ⊓ {incoming} = ∅ at class {class}")]
    Contradiction {
        class: EClassId,
        existing: Interval,
        incoming: Interval,
        during: String,
    },

    #[error("invalid rule `{rule}`: {msg}")]
    Rule { rule: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
