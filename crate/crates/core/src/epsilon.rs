//! Root-number oracle. Signs are assigned to atom pairs and extended
//! biadditively to formal tensor products.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::param::{CharE, LParameter, Summand};
use crate::sign::Sign;

/// Normalisation of the additive character of E.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PsiTag {
    PsiE,
    Psi2E,
    PsiNeg2E,
}

impl PsiTag {
    pub const ALL: [PsiTag; 3] = [PsiTag::PsiE, PsiTag::Psi2E, PsiTag::PsiNeg2E];

    pub fn name(self) -> &'static str {
        match self {
            PsiTag::PsiE => "psiE",
            PsiTag::Psi2E => "psi2E",
            PsiTag::PsiNeg2E => "psiNeg2E",
        }
    }
}

impl fmt::Display for PsiTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PsiTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PsiTag::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown psi tag `{s}`"))
    }
}

impl Serialize for PsiTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Key of `a (x) b`: the unordered pair of base labels and the product of both twists.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    first: String,
    second: String,
    twist: CharE,
    /// Which of the two labels name the character atom.
    character_atoms: (bool, bool),
}

impl PairKey {
    pub fn new(a: &Summand, b: &Summand) -> PairKey {
        let twist = a.twist() * b.twist();
        let ka = (a.is_character(), a.label().to_string());
        let kb = (b.is_character(), b.label().to_string());
        // Non-character atoms first so the twist can be printed on the character side.
        let (x, y) = if ka <= kb { (ka, kb) } else { (kb, ka) };
        PairKey { first: x.1, second: y.1, twist, character_atoms: (x.0, y.0) }
    }

    pub fn labels(&self) -> (&str, &str) {
        (&self.first, &self.second)
    }

    pub fn twist(&self) -> &CharE {
        &self.twist
    }

    fn canonical(&self) -> String {
        format!("{}|{}|{}", self.first, self.second, self.twist)
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let first = if self.character_atoms.0 { "1".to_string() } else { self.first.clone() };
        let second = match (self.character_atoms.1, self.twist.is_trivial()) {
            (true, _) => self.twist.to_string(),
            (false, true) => self.second.clone(),
            (false, false) => format!("{} * {}", self.second, self.twist),
        };
        write!(f, "({first}, {second})")
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EpsError {
    #[error("epsilon table has no entry for ({key}; {psi})")]
    MissingTableEntry { key: String, psi: PsiTag },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpsTable {
    entries: BTreeMap<(PairKey, PsiTag), Sign>,
}

impl EpsTable {
    pub fn new() -> EpsTable {
        EpsTable::default()
    }

    /// Returns the previous value, if any.
    pub fn insert(&mut self, key: PairKey, psi: PsiTag, sign: Sign) -> Option<Sign> {
        self.entries.insert((key, psi), sign)
    }

    pub fn get(&self, key: &PairKey, psi: PsiTag) -> Option<Sign> {
        self.entries.get(&(key.clone(), psi)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PairKey, PsiTag, Sign)> {
        self.entries.iter().map(|((k, p), s)| (k, *p, *s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EpsBackend {
    ConstantOne,
    Table(EpsTable),
    Hashed { seed: u64 },
}

impl EpsBackend {
    pub fn name(&self) -> &'static str {
        match self {
            EpsBackend::ConstantOne => "one",
            EpsBackend::Table(_) => "table",
            EpsBackend::Hashed { .. } => "hashed",
        }
    }

    pub fn atom_sign(&self, key: &PairKey, psi: PsiTag) -> Result<Sign, EpsError> {
        match self {
            EpsBackend::ConstantOne => Ok(Sign::Plus),
            EpsBackend::Table(t) => t.get(key, psi).ok_or_else(|| EpsError::MissingTableEntry { key: key.to_string(), psi }),
            EpsBackend::Hashed { seed } => {
                let mut h = Sha256::new();
                h.update(seed.to_le_bytes());
                h.update(key.canonical().as_bytes());
                h.update([0u8]);
                h.update(psi.name().as_bytes());
                let digest = h.finalize();
                Ok(if digest[0] & 1 == 1 { Sign::Minus } else { Sign::Plus })
            }
        }
    }
}

/// A formal sum of summands with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FormalSum {
    terms: Vec<(Summand, u32)>,
}

impl FormalSum {
    /// Every summand of `phi`, dual-pair blocks included.
    pub fn of(phi: &LParameter) -> FormalSum {
        FormalSum { terms: phi.summands().map(|(s, m)| (s.clone(), m)).collect() }
    }

    /// The same-type part `m_1 phi^(1) + ... + m_s phi^(s)`.
    pub fn same_type(phi: &LParameter) -> FormalSum {
        FormalSum { terms: phi.same_type_blocks().to_vec() }
    }

    pub fn single(s: &Summand) -> FormalSum {
        FormalSum { terms: vec![(s.clone(), 1)] }
    }

    pub fn character(mu: &CharE) -> FormalSum {
        FormalSum::single(&Summand::character(mu.clone()))
    }

    pub fn terms(&self) -> &[(Summand, u32)] {
        &self.terms
    }

    pub fn twist(&self, mu: &CharE) -> FormalSum {
        FormalSum { terms: self.terms.iter().map(|(s, m)| (s.twist_by(mu), *m)).collect() }
    }

    pub fn dual(&self) -> FormalSum {
        FormalSum { terms: self.terms.iter().map(|(s, m)| (s.dual(), *m)).collect() }
    }

    pub fn plus(mut self, other: FormalSum) -> FormalSum {
        self.terms.extend(other.terms);
        self
    }

    pub fn tensor(&self, other: &FormalSum) -> TensorExpr {
        let mut terms = Vec::new();
        for (a, m) in &self.terms {
            for (b, k) in &other.terms {
                terms.push((PairKey::new(a, b), m * k));
            }
        }
        TensorExpr { terms }
    }
}

impl From<&LParameter> for FormalSum {
    fn from(phi: &LParameter) -> Self {
        FormalSum::of(phi)
    }
}

impl From<&Summand> for FormalSum {
    fn from(s: &Summand) -> Self {
        FormalSum::single(s)
    }
}

impl From<&CharE> for FormalSum {
    fn from(mu: &CharE) -> Self {
        FormalSum::character(mu)
    }
}

/// `sum_k m_k (a_k (x) b_k)` after key normalisation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorExpr {
    terms: Vec<(PairKey, u32)>,
}

impl TensorExpr {
    pub fn terms(&self) -> &[(PairKey, u32)] {
        &self.terms
    }

    /// Keys occurring an odd number of times; only these affect the sign.
    pub fn odd_keys(&self) -> Vec<PairKey> {
        let mut parity: BTreeMap<&PairKey, u32> = BTreeMap::new();
        for (k, m) in &self.terms {
            *parity.entry(k).or_insert(0) += m;
        }
        parity.into_iter().filter(|(_, m)| m % 2 == 1).map(|(k, _)| k.clone()).collect()
    }
}

/// `rho = x (x) y`, the usual entry point.
pub fn tensor(x: impl Into<FormalSum>, y: impl Into<FormalSum>) -> TensorExpr {
    x.into().tensor(&y.into())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleCall {
    pub key: String,
    pub psi: PsiTag,
    pub sign: Sign,
}

/// A backend together with a record of every atom pair it was asked about.
#[derive(Debug)]
pub struct Oracle<'a> {
    backend: &'a EpsBackend,
    seen: RefCell<BTreeMap<(PairKey, PsiTag), Sign>>,
}

impl<'a> Oracle<'a> {
    pub fn new(backend: &'a EpsBackend) -> Oracle<'a> {
        Oracle { backend, seen: RefCell::new(BTreeMap::new()) }
    }

    pub fn backend(&self) -> &EpsBackend {
        self.backend
    }

    pub fn atom_sign(&self, key: &PairKey, psi: PsiTag) -> Result<Sign, EpsError> {
        if let Some(s) = self.seen.borrow().get(&(key.clone(), psi)) {
            return Ok(*s);
        }
        let s = self.backend.atom_sign(key, psi)?;
        self.seen.borrow_mut().insert((key.clone(), psi), s);
        Ok(s)
    }

    /// `eps(1/2, rho, psi)`.
    pub fn eps_half(&self, rho: &TensorExpr, psi: PsiTag) -> Result<Sign, EpsError> {
        rho.odd_keys().iter().map(|k| self.atom_sign(k, psi)).product::<Result<Sign, EpsError>>()
    }

    pub fn calls(&self) -> Vec<OracleCall> {
        self.seen.borrow().iter().map(|((k, p), s)| OracleCall { key: k.to_string(), psi: *p, sign: *s }).collect()
    }

    /// The recorded lookups as a table backend.
    pub fn recorded_table(&self) -> EpsTable {
        let mut t = EpsTable::new();
        for ((k, p), s) in self.seen.borrow().iter() {
            t.insert(k.clone(), *p, *s);
        }
        t
    }
}

pub fn eps_half(rho: &TensorExpr, psi: PsiTag, backend: &EpsBackend) -> Result<Sign, EpsError> {
    Oracle::new(backend).eps_half(rho, psi)
}
