//! Formal algebra of L-parameters: characters of E^x, twisted atoms, and
//! conjugate self-dual parameters attached to unitary groups.

mod character;
mod parameter;
mod summand;

pub use character::{CharE, Generator, Grade, Slope, StandardCharacters};
pub use parameter::{Block, FlagRequest, Form, GroupTag, LParameter, ParamFlags};
pub use summand::{Atom, AtomKind, Summand, CHARACTER_LABEL};

use thiserror::Error;

use crate::sign::Sign;

/// Value of omega_{E/F}(-1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BaseFieldData {
    pub omega_at_minus_one: Sign,
}

impl Default for BaseFieldData {
    fn default() -> Self {
        BaseFieldData { omega_at_minus_one: Sign::Plus }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("character {0} has non-zero slope and is not conjugate self-dual")]
    NonUnitarySlope(String),
    #[error("a parameter needs positive rank and at least one block")]
    EmptyParameter,
    #[error("dimension mismatch: summands add up to {found}, group rank is {expected}")]
    DimensionMismatch { expected: u32, found: u32 },
    #[error("summand {summand} has duality {found}, the group requires {expected}")]
    WrongDualitySign { summand: String, expected: Sign, found: String },
    #[error("summand {0} is conjugate self-dual of the parameter's own type and cannot sit in a dual-pair block")]
    SameTypeInDualPair(String),
    #[error("flag contradiction: {0}")]
    FlagContradiction(String),
    #[error("multiplicity of {0} must be positive")]
    ZeroMultiplicity(String),
    #[error("summand {0} is not contained in the parameter")]
    NotContained(String),
    #[error("U({form},{rank}) needs duality type {expected}, the parameter has type {found}")]
    NotGenuine { form: Form, rank: u32, expected: Sign, found: Sign },
}
