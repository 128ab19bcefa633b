//! The input language.
//!
//! ```text
//! base { omega_minus_one = -1; }
//! characters { n = 3; mode = independent; }
//! param phi1 on U(W,3,+) supercuspidal {
//!   A dim 1 sign + tempered sl2triv;
//!   B dim 2 sign + tempered sl2triv;
//! }
//! epsilon { (A, C * chi_V^-1; psi2E) = -1; }
//! task ggp phi1 phi;
//! ```
//!
//! A summand is `[pair] [m x] (LABEL dim d (sign s | plain) | char) [* twist] [tempered] [sl2triv];`.
//! Attributes are off unless written.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod resolve;

use thiserror::Error;

use crate::param::ParamError;

pub use ast::Document;
pub use lexer::Pos;
pub use parser::parse;
pub use printer::print;
pub use resolve::{resolve, Workspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticError {
    #[error("second `{0}` block")]
    DuplicateBlock(&'static str),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("`{0}` given twice")]
    DuplicateKey(String),
    #[error("missing `{0}`")]
    MissingKey(String),
    #[error("bad value {value} for {key}")]
    BadValue { key: String, value: String },
    #[error("parameter `{0}` declared twice")]
    DuplicateParam(String),
    #[error("label `{0}` appears twice in one parameter; use a multiplicity")]
    DuplicateLabel(String),
    #[error("label `{0}` is declared with different dimension or sign elsewhere")]
    LabelConflict(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("unknown character `{0}` (expected chi, chi_V or chi_W)")]
    UnknownCharacter(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("characters are used but there is no `characters` block")]
    MissingCharacters,
    #[error("epsilon entry {0} given twice")]
    DuplicateEntry(String),
    #[error(transparent)]
    Param(ParamError),
}

impl SemanticError {
    /// Short name of the variant, as used by the corpus headers.
    pub fn class(&self) -> String {
        match self {
            SemanticError::Param(e) => format!("{e:?}").split([' ', '(', '{']).next().unwrap_or_default().to_string(),
            other => format!("{other:?}").split([' ', '(', '{']).next().unwrap_or_default().to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DslError {
    #[error("{pos}: syntax error: found {found}, expected {}", .expected.join(" or "))]
    Syntax { pos: Pos, found: String, expected: Vec<String> },
    #[error("{pos}: {error}")]
    Semantic { pos: Pos, error: SemanticError },
}

impl DslError {
    pub fn pos(&self) -> Pos {
        match self {
            DslError::Syntax { pos, .. } | DslError::Semantic { pos, .. } => *pos,
        }
    }
}

/// Parse and resolve.
pub fn load(src: &str) -> Result<Workspace, DslError> {
    resolve(&parse(src)?)
}
