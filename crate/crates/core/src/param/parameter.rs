use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::character::CharE;
use super::summand::Summand;
use super::ParamError;
use crate::sign::Sign;

/// Hermitian (`V`) or skew-Hermitian (`W`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Form {
    Hermitian,
    SkewHermitian,
}

impl Form {
    pub fn letter(self) -> char {
        match self {
            Form::Hermitian => 'V',
            Form::SkewHermitian => 'W',
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// The unitary group a parameter is attached to, together with the duality type
/// its same-type summands carry. Genuine L-parameters have type `(-1)^(rank-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GroupTag {
    pub rank: u32,
    pub form: Form,
    pub duality: Sign,
}

impl GroupTag {
    pub fn new(rank: u32, form: Form) -> GroupTag {
        GroupTag { rank, form, duality: GroupTag::required_sign(rank) }
    }

    pub fn required_sign(rank: u32) -> Sign {
        Sign::from_parity(rank as i64 - 1)
    }

    pub fn is_genuine(&self) -> bool {
        self.duality == GroupTag::required_sign(self.rank)
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.duality.is_plus() { '+' } else { '-' };
        write!(f, "U({},{},{})", self.form, self.rank, s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParamFlags {
    pub tempered: bool,
    pub discrete: bool,
    pub supercuspidal_packet: bool,
    pub generic: bool,
}

/// User-asserted flags. `None` means "derive it".
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FlagRequest {
    pub tempered: Option<bool>,
    pub discrete: Option<bool>,
    pub supercuspidal_packet: bool,
    pub generic: bool,
}

impl FlagRequest {
    pub fn supercuspidal() -> FlagRequest {
        FlagRequest { supercuspidal_packet: true, ..FlagRequest::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Block {
    SameType {
        summand: Summand,
        mult: u32,
    },
    /// `member + c(member)^v`, repeated `mult` times.
    DualPair {
        member: Summand,
        mult: u32,
    },
}

impl Block {
    pub fn one(summand: Summand) -> Block {
        Block::SameType { summand, mult: 1 }
    }

    pub fn times(summand: Summand, mult: u32) -> Block {
        Block::SameType { summand, mult }
    }

    pub fn pair(member: Summand) -> Block {
        Block::DualPair { member, mult: 1 }
    }
}

/// `m_1 phi_1 + ... + m_r phi_r + phi' + c(phi')^v` in canonical form.
///
/// Same-type blocks are sorted by (label, dim, twist) with distinct summands;
/// dual-pair blocks are stored as sorted (member, partner) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LParameter {
    group: GroupTag,
    same_type: Vec<(Summand, u32)>,
    dual_pairs: Vec<(Summand, Summand, u32)>,
    flags: ParamFlags,
}

impl LParameter {
    /// Validated constructor for a genuine parameter of `group`.
    pub fn new(blocks: Vec<Block>, group: GroupTag, request: FlagRequest) -> Result<LParameter, ParamError> {
        if !group.is_genuine() {
            return Err(ParamError::NotGenuine {
                form: group.form,
                rank: group.rank,
                expected: GroupTag::required_sign(group.rank),
                found: group.duality,
            });
        }
        LParameter::build(blocks, group, request)
    }

    fn build(blocks: Vec<Block>, group: GroupTag, request: FlagRequest) -> Result<LParameter, ParamError> {
        if blocks.is_empty() || group.rank == 0 {
            return Err(ParamError::EmptyParameter);
        }
        let mut same: BTreeMap<Summand, u32> = BTreeMap::new();
        let mut pairs: BTreeMap<(Summand, Summand), u32> = BTreeMap::new();
        for block in blocks {
            match block {
                Block::SameType { summand, mult } => {
                    if mult == 0 {
                        return Err(ParamError::ZeroMultiplicity(summand.to_string()));
                    }
                    summand.require_sign(group.duality)?;
                    *same.entry(summand).or_insert(0) += mult;
                }
                Block::DualPair { member, mult } => {
                    if mult == 0 {
                        return Err(ParamError::ZeroMultiplicity(member.to_string()));
                    }
                    if member.duality() == Some(group.duality) {
                        return Err(ParamError::SameTypeInDualPair(member.to_string()));
                    }
                    let partner = member.conj_dual();
                    let key = if member <= partner { (member, partner) } else { (partner, member) };
                    *pairs.entry(key).or_insert(0) += mult;
                }
            }
        }
        let same_type: Vec<_> = same.into_iter().collect();
        let dual_pairs: Vec<_> = pairs.into_iter().map(|((a, b), m)| (a, b, m)).collect();
        let mut phi = LParameter { group, same_type, dual_pairs, flags: ParamFlags::default() };
        phi.check_dimension()?;
        phi.flags = phi.resolve_flags(request)?;
        Ok(phi)
    }

    fn check_dimension(&self) -> Result<(), ParamError> {
        let found = self.dim();
        if found != self.group.rank {
            return Err(ParamError::DimensionMismatch { expected: self.group.rank, found });
        }
        Ok(())
    }

    fn derived_tempered(&self) -> bool {
        self.summands().all(|(s, _)| s.is_tempered())
    }

    fn derived_discrete(&self) -> bool {
        self.dual_pairs.is_empty() && self.same_type.iter().all(|(_, m)| *m == 1)
    }

    fn resolve_flags(&self, request: FlagRequest) -> Result<ParamFlags, ParamError> {
        let tempered = self.derived_tempered();
        let discrete = self.derived_discrete();
        if let Some(t) = request.tempered {
            if t != tempered {
                return Err(ParamError::FlagContradiction(format!("declared tempered = {t}, but the summands give {tempered}")));
            }
        }
        if let Some(d) = request.discrete {
            if d != discrete {
                return Err(ParamError::FlagContradiction(format!("declared discrete = {d}, but the blocks give {discrete}")));
            }
        }
        if request.supercuspidal_packet {
            if !discrete {
                return Err(ParamError::FlagContradiction("a supercuspidal packet needs a discrete parameter".into()));
            }
            if let Some((s, _)) = self.summands().find(|(s, _)| !s.is_sl2_trivial()) {
                return Err(ParamError::FlagContradiction(format!("a supercuspidal packet needs SL2-trivial summands, {s} is not")));
            }
        }
        Ok(ParamFlags { tempered, discrete, supercuspidal_packet: request.supercuspidal_packet, generic: request.generic })
    }

    /// Reassemble after a structural operation. Summands keep their identity, so only
    /// the signs against `group`, the dimension and the derived flags are rechecked.
    fn rebuild(
        &self,
        group: GroupTag,
        same: Vec<(Summand, u32)>,
        pairs: Vec<(Summand, Summand, u32)>,
        keep: ParamFlags,
    ) -> Result<LParameter, ParamError> {
        if group.rank == 0 {
            return Err(ParamError::EmptyParameter);
        }
        let mut merged: BTreeMap<Summand, u32> = BTreeMap::new();
        for (s, m) in same {
            s.require_sign(group.duality)?;
            *merged.entry(s).or_insert(0) += m;
        }
        let mut merged_pairs: BTreeMap<(Summand, Summand), u32> = BTreeMap::new();
        for (a, b, m) in pairs {
            let key = if a <= b { (a, b) } else { (b, a) };
            *merged_pairs.entry(key).or_insert(0) += m;
        }
        let mut phi = LParameter {
            group,
            same_type: merged.into_iter().collect(),
            dual_pairs: merged_pairs.into_iter().map(|((a, b), m)| (a, b, m)).collect(),
            flags: ParamFlags::default(),
        };
        phi.check_dimension()?;
        let discrete = phi.derived_discrete();
        let sc = keep.supercuspidal_packet && discrete && phi.summands().all(|(s, _)| s.is_sl2_trivial());
        phi.flags = ParamFlags { tempered: phi.derived_tempered(), discrete, supercuspidal_packet: sc, generic: keep.generic };
        Ok(phi)
    }

    pub fn group(&self) -> GroupTag {
        self.group
    }

    pub fn rank(&self) -> u32 {
        self.group.rank
    }

    pub fn flags(&self) -> ParamFlags {
        self.flags
    }

    pub fn is_tempered(&self) -> bool {
        self.flags.tempered
    }

    pub fn is_discrete(&self) -> bool {
        self.flags.discrete
    }

    pub fn is_supercuspidal_packet(&self) -> bool {
        self.flags.supercuspidal_packet
    }

    pub fn same_type_blocks(&self) -> &[(Summand, u32)] {
        &self.same_type
    }

    pub fn dual_pair_blocks(&self) -> &[(Summand, Summand, u32)] {
        &self.dual_pairs
    }

    /// Every summand with its multiplicity, both members of each dual pair included.
    pub fn summands(&self) -> impl Iterator<Item = (&Summand, u32)> {
        self.same_type.iter().map(|(s, m)| (s, *m)).chain(self.dual_pairs.iter().flat_map(|(a, b, m)| [(a, *m), (b, *m)]))
    }

    pub fn dim(&self) -> u32 {
        self.summands().map(|(s, m)| s.dim() * m).sum()
    }

    /// Multiplicity of `s` among the same-type blocks.
    pub fn multiplicity_of(&self, s: &Summand) -> u32 {
        self.same_type.iter().find(|(t, _)| t == s).map_or(0, |(_, m)| *m)
    }

    pub fn contains(&self, s: &Summand) -> bool {
        self.multiplicity_of(s) > 0
    }

    /// Remove one copy of a same-type summand; the rank drops by its dimension.
    pub fn remove_once(&self, s: &Summand) -> Result<LParameter, ParamError> {
        if !self.contains(s) {
            return Err(ParamError::NotContained(s.to_string()));
        }
        let same: Vec<_> = self
            .same_type
            .iter()
            .filter_map(|(t, m)| if t == s { (*m > 1).then(|| (t.clone(), m - 1)) } else { Some((t.clone(), *m)) })
            .collect();
        let group = GroupTag { rank: self.group.rank - s.dim(), ..self.group };
        let keep = ParamFlags { supercuspidal_packet: false, generic: false, ..self.flags };
        self.rebuild(group, same, self.dual_pairs.clone(), keep)
    }

    /// `phi (x) mu`. The duality type is multiplied by the sign of `mu` when `mu` is unitary.
    pub fn tensor_twist(&self, mu: &CharE) -> Result<LParameter, ParamError> {
        let tw = mu.conj_dual_sign()?;
        let group = GroupTag { duality: self.group.duality * tw, ..self.group };
        let same = self.same_type.iter().map(|(s, m)| (s.twist_by(mu), *m)).collect();
        let pairs = self.dual_pairs.iter().map(|(a, b, m)| (a.twist_by(mu), b.twist_by(mu), *m)).collect();
        self.rebuild(group, same, pairs, self.flags)
    }

    /// `phi^v`, computed atom by atom through the dual involution.
    pub fn contragredient(&self) -> LParameter {
        let same = self.same_type.iter().map(|(s, m)| (s.dual(), *m)).collect();
        let pairs = self.dual_pairs.iter().map(|(a, b, m)| (a.dual(), b.dual(), *m)).collect();
        self.rebuild(self.group, same, pairs, self.flags).expect("the dual involution preserves dimensions and duality type")
    }

    /// Add one same-type summand, growing the rank.
    pub fn with_summand(&self, s: Summand, group: GroupTag) -> Result<LParameter, ParamError> {
        let mut same = self.same_type.clone();
        match same.iter_mut().find(|(t, _)| *t == s) {
            Some((_, m)) => *m += 1,
            None => same.push((s, 1)),
        }
        self.rebuild(group, same, self.dual_pairs.clone(), self.flags)
    }

    /// Add a dual-pair block `member + c(member)^v`.
    pub fn with_dual_pair(&self, member: Summand, group: GroupTag) -> Result<LParameter, ParamError> {
        let partner = member.conj_dual();
        let mut pairs = self.dual_pairs.clone();
        let (x, y) = if member <= partner { (member, partner) } else { (partner, member) };
        match pairs.iter_mut().find(|(a, b, _)| *a == x && *b == y) {
            Some((_, _, m)) => *m += 1,
            None => pairs.push((x, y, 1)),
        }
        self.rebuild(group, self.same_type.clone(), pairs, self.flags)
    }

    /// Reattach to a genuine group of the same rank (e.g. after untwisting).
    pub fn retag(&self, form: Form, request: FlagRequest) -> Result<LParameter, ParamError> {
        let group = GroupTag::new(self.group.rank, form);
        if group.duality != self.group.duality {
            return Err(ParamError::NotGenuine { form, rank: group.rank, expected: group.duality, found: self.group.duality });
        }
        let mut phi = LParameter { group, ..self.clone() };
        phi.flags = phi.resolve_flags(request)?;
        Ok(phi)
    }

    /// Same parameter with explicitly set user flags (re-validated).
    pub fn with_flags(&self, request: FlagRequest) -> Result<LParameter, ParamError> {
        let mut phi = self.clone();
        phi.flags = phi.resolve_flags(request)?;
        Ok(phi)
    }

    /// Replace every generator occurrence `name` by `value` in all twists.
    pub fn substitute(&self, name: &str, value: &CharE) -> Result<LParameter, ParamError> {
        let sub = |s: &Summand| Summand::new(s.atom().clone(), s.twist().substitute(name, value));
        let same = self.same_type.iter().map(|(s, m)| (sub(s), *m)).collect();
        let pairs = self.dual_pairs.iter().map(|(a, b, m)| (sub(a), sub(b), *m)).collect();
        self.rebuild(self.group, same, pairs, self.flags)
    }
}

impl fmt::Display for LParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (s, m) in &self.same_type {
            if *m == 1 {
                parts.push(format!("{s}"));
            } else {
                parts.push(format!("{m}({s})"));
            }
        }
        for (a, b, m) in &self.dual_pairs {
            let block = format!("[{a} + {b}]");
            parts.push(if *m == 1 { block } else { format!("{m}{block}") });
        }
        write!(f, "{} on {}", parts.join(" + "), self.group)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::{Atom, StandardCharacters};

    fn atom(label: &str, dim: u32, sign: Sign) -> Summand {
        Summand::untwisted(Atom::self_dual(label, dim, sign))
    }

    fn w3() -> GroupTag {
        GroupTag::new(3, Form::SkewHermitian)
    }

    #[test]
    fn builds_discrete_parameter() {
        let phi =
            LParameter::new(vec![Block::one(atom("A", 1, Sign::Plus)), Block::one(atom("B", 2, Sign::Plus))], w3(), FlagRequest::default())
                .unwrap();
        assert!(phi.is_discrete());
        assert!(phi.is_tempered());
        assert_eq!(phi.dim(), 3);
        assert_eq!(phi.group().to_string(), "U(W,3,+)");
    }

    #[test]
    fn dimension_mismatch() {
        let err = LParameter::new(
            vec![Block::times(atom("A", 1, Sign::Plus), 2), Block::one(atom("B", 2, Sign::Plus))],
            w3(),
            FlagRequest::default(),
        )
        .unwrap_err();
        assert_eq!(err, ParamError::DimensionMismatch { expected: 3, found: 4 });
    }

    #[test]
    fn wrong_duality_sign() {
        let err = LParameter::new(
            vec![Block::one(atom("A", 1, Sign::Minus)), Block::one(atom("B", 2, Sign::Plus))],
            w3(),
            FlagRequest::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ParamError::WrongDualitySign { expected: Sign::Plus, .. }));
    }

    #[test]
    fn flag_contradictions() {
        let blocks = vec![Block::times(atom("A", 1, Sign::Plus), 3)];
        let err = LParameter::new(blocks.clone(), w3(), FlagRequest::supercuspidal()).unwrap_err();
        assert!(matches!(err, ParamError::FlagContradiction(_)));
        let req = FlagRequest { discrete: Some(true), ..FlagRequest::default() };
        assert!(matches!(LParameter::new(blocks, w3(), req), Err(ParamError::FlagContradiction(_))));
        let nonsl2 = Summand::untwisted(Atom::self_dual("S", 3, Sign::Plus).with_sl2_trivial(false));
        let err = LParameter::new(vec![Block::one(nonsl2)], w3(), FlagRequest::supercuspidal()).unwrap_err();
        assert!(matches!(err, ParamError::FlagContradiction(_)));
    }

    #[test]
    fn rejects_rank_zero_and_empty() {
        let g = GroupTag::new(0, Form::Hermitian);
        assert_eq!(LParameter::new(vec![], g, FlagRequest::default()), Err(ParamError::EmptyParameter));
    }

    #[test]
    fn merges_duplicates_and_orders_canonically() {
        let a = atom("A", 1, Sign::Plus);
        let b = atom("B", 1, Sign::Plus);
        let p1 = LParameter::new(vec![Block::one(b.clone()), Block::one(a.clone()), Block::one(a.clone())], w3(), FlagRequest::default())
            .unwrap();
        let p2 = LParameter::new(vec![Block::times(a.clone(), 2), Block::one(b)], w3(), FlagRequest::default()).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(p1.multiplicity_of(&a), 2);
        assert!(!p1.is_discrete());
    }

    #[test]
    fn dual_pair_blocks_count_twice() {
        let s = StandardCharacters::independent(3);
        let pair = Summand::character(&s.chi_w * &CharE::abs_power(crate::param::Slope::new(1, 2)));
        let g5 = GroupTag::new(5, Form::Hermitian);
        let phi = LParameter::new(
            vec![Block::one(atom("A", 1, Sign::Plus)), Block::one(atom("B", 2, Sign::Plus)), Block::pair(pair)],
            g5,
            FlagRequest::default(),
        )
        .unwrap();
        assert_eq!(phi.dim(), 5);
        assert!(!phi.is_tempered());
        assert!(!phi.is_discrete());
    }

    #[test]
    fn same_type_atom_cannot_be_paired() {
        let err = LParameter::new(
            vec![Block::pair(atom("A", 1, Sign::Plus)), Block::one(atom("B", 1, Sign::Plus))],
            w3(),
            FlagRequest::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ParamError::SameTypeInDualPair(_)));
        // An opposite-type atom is its own partner: 2A of the other type.
        let phi = LParameter::new(
            vec![Block::pair(atom("A", 1, Sign::Minus)), Block::one(atom("B", 1, Sign::Plus))],
            w3(),
            FlagRequest::default(),
        )
        .unwrap();
        assert_eq!(phi.dim(), 3);
    }

    #[test]
    fn remove_twist_and_contragredient() {
        let s = StandardCharacters::independent(3);
        let mu = &s.chi_v.inv() * &s.chi_w;
        let c = atom("C", 3, Sign::Minus).twist_by(&mu);
        let w = Summand::character(s.chi_w.clone());
        let g4 = GroupTag::new(4, Form::Hermitian);
        let phi = LParameter::new(vec![Block::one(c.clone()), Block::one(w.clone())], g4, FlagRequest::default()).unwrap();
        let removed = phi.remove_once(&w).unwrap();
        assert_eq!(removed.rank(), 3);
        assert_eq!(removed.same_type_blocks(), &[(c.clone(), 1)]);
        assert!(matches!(removed.remove_once(&w), Err(ParamError::NotContained(_))));
        let back = phi.tensor_twist(&s.chi).unwrap().tensor_twist(&s.chi.inv()).unwrap();
        assert_eq!(back, phi);
        assert_eq!(phi.contragredient().contragredient(), phi);
    }
}
