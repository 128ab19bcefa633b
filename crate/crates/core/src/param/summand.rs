//! Irreducible Weil-Deligne atoms and their twists.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use super::character::CharE;
use super::ParamError;
use crate::sign::Sign;

/// Label of the dimension-one atom whose twists are exactly the characters of E^x.
pub const CHARACTER_LABEL: &str = "1";

/// What is known about an untwisted atom's duality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AtomKind {
    /// The trivial character; its twists are characters.
    Character,
    /// Conjugate self-dual with the given sign before any twist.
    SelfDual(Sign),
    /// Not conjugate self-dual. Its conjugate dual is the paired label (`B` <-> `B~`).
    Plain,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub label: String,
    pub dim: u32,
    pub kind: AtomKind,
    pub tempered: bool,
    pub sl2_trivial: bool,
}

impl Atom {
    pub fn self_dual(label: impl Into<String>, dim: u32, sign: Sign) -> Atom {
        Atom { label: label.into(), dim, kind: AtomKind::SelfDual(sign), tempered: true, sl2_trivial: true }
    }

    pub fn plain(label: impl Into<String>, dim: u32) -> Atom {
        Atom { label: label.into(), dim, kind: AtomKind::Plain, tempered: true, sl2_trivial: true }
    }

    pub fn character() -> Atom {
        Atom { label: CHARACTER_LABEL.to_string(), dim: 1, kind: AtomKind::Character, tempered: true, sl2_trivial: true }
    }

    pub fn with_tempered(mut self, tempered: bool) -> Atom {
        self.tempered = tempered;
        self
    }

    pub fn with_sl2_trivial(mut self, sl2_trivial: bool) -> Atom {
        self.sl2_trivial = sl2_trivial;
        self
    }

    fn paired(&self) -> Atom {
        let label = match self.label.strip_suffix('~') {
            Some(base) => base.to_string(),
            None => format!("{}~", self.label),
        };
        Atom { label, ..self.clone() }
    }
}

/// An atom twisted by a character. Identity is (label, dim, duality status, twist);
/// temperedness and SL2-triviality are attributes.
#[derive(Clone, Debug)]
pub struct Summand {
    atom: Atom,
    twist: CharE,
}

impl Summand {
    pub fn new(atom: Atom, twist: CharE) -> Summand {
        Summand { atom, twist }
    }

    pub fn untwisted(atom: Atom) -> Summand {
        Summand { atom, twist: CharE::trivial() }
    }

    pub fn character(mu: CharE) -> Summand {
        Summand { atom: Atom::character(), twist: mu }
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    pub fn label(&self) -> &str {
        &self.atom.label
    }

    pub fn dim(&self) -> u32 {
        self.atom.dim
    }

    pub fn twist(&self) -> &CharE {
        &self.twist
    }

    pub fn is_character(&self) -> bool {
        self.atom.kind == AtomKind::Character
    }

    pub fn as_character(&self) -> Option<&CharE> {
        self.is_character().then_some(&self.twist)
    }

    /// `Some(sign)` when conjugate self-dual, `None` otherwise.
    pub fn duality(&self) -> Option<Sign> {
        let tw = self.twist.conj_dual_sign().ok()?;
        match self.atom.kind {
            AtomKind::Character => Some(tw),
            AtomKind::SelfDual(s) => Some(s * tw),
            AtomKind::Plain => None,
        }
    }

    pub fn is_tempered(&self) -> bool {
        self.atom.tempered && self.twist.is_unitary()
    }

    pub fn is_sl2_trivial(&self) -> bool {
        self.atom.sl2_trivial
    }

    pub fn twist_by(&self, mu: &CharE) -> Summand {
        Summand { atom: self.atom.clone(), twist: &self.twist * mu }
    }

    /// The contragredient. Conjugate self-dual bases are their own duals up to the
    /// twist; plain bases pass to the paired label.
    pub fn dual(&self) -> Summand {
        let atom = match self.atom.kind {
            AtomKind::Plain => self.atom.paired(),
            _ => self.atom.clone(),
        };
        Summand { atom, twist: self.twist.inv() }
    }

    /// `c(s)^v`, the partner of `s` in a dual-pair block.
    pub fn conj_dual(&self) -> Summand {
        let atom = match self.atom.kind {
            AtomKind::Plain => self.atom.paired(),
            _ => self.atom.clone(),
        };
        Summand { atom, twist: self.twist.conj_dual() }
    }

    /// Bare atom with the twist stripped, and the twist.
    pub fn untwist(&self) -> (Summand, &CharE) {
        (Summand::untwisted(self.atom.clone()), &self.twist)
    }

    fn key(&self) -> (&str, u32, &CharE, AtomKind) {
        (&self.atom.label, self.atom.dim, &self.twist, self.atom.kind)
    }

    pub(crate) fn require_sign(&self, expected: Sign) -> Result<(), ParamError> {
        match self.duality() {
            Some(s) if s == expected => Ok(()),
            found => Err(ParamError::WrongDualitySign {
                summand: self.to_string(),
                expected,
                found: found.map_or("none".to_string(), |s| s.to_string()),
            }),
        }
    }
}

impl PartialEq for Summand {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Summand {}

impl Hash for Summand {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state)
    }
}

impl PartialOrd for Summand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Summand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_character() {
            write!(f, "{}", self.twist)
        } else if self.twist.is_trivial() {
            f.write_str(&self.atom.label)
        } else {
            write!(f, "{} * {}", self.atom.label, self.twist)
        }
    }
}
