//! Syntax tree of a document. Every node keeps the position it started at.

use crate::epsilon::PsiTag;
use crate::param::Form;
use crate::sign::Sign;

use super::lexer::Pos;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub base: Option<BaseDecl>,
    pub characters: Option<CharactersDecl>,
    pub params: Vec<ParamDecl>,
    pub epsilon: Option<EpsilonDecl>,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseDecl {
    pub pos: Pos,
    pub omega_minus_one: Sign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharMode {
    Independent,
    Identified,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharactersDecl {
    pub pos: Pos,
    pub n: u32,
    pub mode: CharMode,
}

/// `g1^e1 * g2^e2 * |.|^p/q`, factors kept in source order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharExpr {
    pub pos: Pos,
    pub factors: Vec<(String, i64)>,
    pub slope: Option<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AtomDecl {
    /// `LABEL dim D sign S`, or `LABEL dim D plain` when `sign` is `None`.
    Labelled { label: String, dim: u32, sign: Option<Sign> },
    /// `char`
    Character,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandDecl {
    pub pos: Pos,
    pub pair: bool,
    pub mult: u32,
    pub atom: AtomDecl,
    pub twist: Option<CharExpr>,
    pub tempered: bool,
    pub sl2_trivial: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlagDecl {
    pub supercuspidal: bool,
    pub generic: bool,
    pub tempered: bool,
    pub discrete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamDecl {
    pub pos: Pos,
    pub name: String,
    pub form: Form,
    pub rank: u32,
    pub sign: Sign,
    pub flags: FlagDecl,
    pub summands: Vec<SummandDecl>,
}

/// One side of an epsilon key: an atom label or the character atom, with a twist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyRef {
    /// `None` for the character atom.
    pub label: Option<String>,
    pub twist: Option<CharExpr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsEntry {
    pub pos: Pos,
    pub left: KeyRef,
    pub right: KeyRef,
    pub psi: PsiTag,
    pub value: Sign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonDecl {
    pub pos: Pos,
    pub entries: Vec<EpsEntry>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    Up1,
    Up2,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskKind {
    Packet { param: String },
    Theta { step: Step, param: String },
    Ggp { phi1: String, phi: String, certified: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub pos: Pos,
    pub kind: TaskKind,
}
