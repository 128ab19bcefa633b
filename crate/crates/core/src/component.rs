//! Component groups S_phi as F2-vector spaces and their characters.

use std::fmt;

use thiserror::Error;

use crate::param::{BaseFieldData, LParameter, Summand};
use crate::sign::Sign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComponentError {
    #[error("rank mismatch: expected {expected} coordinates, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("basis summand {0} has no image in the target component group")]
    NoEmbedding(String),
}

/// `prod_j (Z/2Z) a_j`, one generator per distinct same-type summand, in the
/// parameter's canonical block order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SPhi {
    basis: Vec<Summand>,
    mults: Vec<u32>,
}

impl SPhi {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Summand] {
        &self.basis
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.mults
    }

    pub fn index_of(&self, s: &Summand) -> Option<usize> {
        self.basis.iter().position(|b| b == s)
    }

    /// `z_phi`: multiplicities mod 2.
    pub fn central_element(&self) -> GroupElement {
        GroupElement { bits: self.mults.iter().map(|m| m % 2 == 1).collect() }
    }

    pub fn basis_vector(&self, i: usize) -> GroupElement {
        let mut bits = vec![false; self.rank()];
        bits[i] = true;
        GroupElement { bits }
    }

    /// All `2^r` characters. Character `k` takes the value -1 at `a_i` exactly
    /// when bit `i` of `k` is set.
    pub fn characters(&self) -> Vec<SChar> {
        let r = self.rank();
        (0..1u64 << r).map(|k| SChar { values: (0..r).map(|i| if k >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect() }).collect()
    }
}

pub fn component_group(phi: &LParameter) -> SPhi {
    let (basis, mults) = phi.same_type_blocks().iter().cloned().unzip();
    SPhi { basis, mults }
}

pub fn central_element(phi: &LParameter) -> GroupElement {
    component_group(phi).central_element()
}

pub fn enumerate_characters(s: &SPhi) -> Vec<SChar> {
    s.characters()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub bits: Vec<bool>,
}

impl GroupElement {
    pub fn identity(rank: usize) -> GroupElement {
        GroupElement { bits: vec![false; rank] }
    }

    pub fn is_identity(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }

    pub fn rank(&self) -> usize {
        self.bits.len()
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(f, "({s})")
    }
}

/// A character of S_phi, given by its values on the canonical basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SChar {
    pub values: Vec<Sign>,
}

impl SChar {
    pub fn new(values: Vec<Sign>) -> SChar {
        SChar { values }
    }

    pub fn trivial(rank: usize) -> SChar {
        SChar { values: vec![Sign::Plus; rank] }
    }

    pub fn rank(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, i: usize) -> Sign {
        self.values[i]
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|s| s.is_plus())
    }

    pub fn eval(&self, x: &GroupElement) -> Result<Sign, ComponentError> {
        if x.rank() != self.rank() {
            return Err(ComponentError::RankMismatch { expected: self.rank(), found: x.rank() });
        }
        Ok(self.values.iter().zip(&x.bits).filter(|(_, &b)| b).map(|(v, _)| *v).product())
    }

    /// Pointwise product.
    pub fn mul(&self, other: &SChar) -> Result<SChar, ComponentError> {
        if other.rank() != self.rank() {
            return Err(ComponentError::RankMismatch { expected: self.rank(), found: other.rank() });
        }
        Ok(SChar { values: self.values.iter().zip(&other.values).map(|(a, b)| *a * *b).collect() })
    }

    /// Index of this character in the binary-counting enumeration.
    pub fn index(&self) -> u64 {
        self.values.iter().enumerate().filter(|(_, v)| !v.is_plus()).map(|(i, _)| 1u64 << i).sum()
    }
}

impl fmt::Display for SChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<_> = self.values.iter().map(|v| if v.is_plus() { "+" } else { "-" }).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn eval(eta: &SChar, x: &GroupElement) -> Result<Sign, ComponentError> {
    eta.eval(x)
}

/// `eta(z_phi)`: the pure inner form carrying `pi(phi, eta)`.
pub fn packet_side(eta: &SChar, phi: &LParameter) -> Result<Sign, ComponentError> {
    eta.eval(&central_element(phi))
}

/// Pull `eta` on `target` back along `map`, a map sending every basis summand of
/// `source` to a basis summand of `target`.
pub fn pull_back(eta: &SChar, target: &SPhi, source: &SPhi, map: impl Fn(&Summand) -> Summand) -> Result<SChar, ComponentError> {
    if eta.rank() != target.rank() {
        return Err(ComponentError::RankMismatch { expected: target.rank(), found: eta.rank() });
    }
    let values = source
        .basis()
        .iter()
        .map(|s| {
            let image = map(s);
            target.index_of(&image).map(|j| eta.value(j)).ok_or_else(|| ComponentError::NoEmbedding(s.to_string()))
        })
        .collect::<Result<_, _>>()?;
    Ok(SChar { values })
}

/// Restriction of a character of `S_{theta(phi)}` to `S_phi` along `a_i -> a_i (x) mu`.
pub fn restrict(eta_big: &SChar, big: &SPhi, small: &SPhi, mu: &crate::param::CharE) -> Result<SChar, ComponentError> {
    pull_back(eta_big, big, small, |s| s.twist_by(mu))
}

/// The character `nu` with `pi^v = pi(phi^v, eta * nu)`.
pub fn nu_character(phi: &LParameter, base: &BaseFieldData) -> SChar {
    let s = component_group(phi);
    if phi.dim() % 2 == 1 {
        return SChar::trivial(s.rank());
    }
    SChar { values: s.basis().iter().map(|b| base.omega_at_minus_one.pow(b.dim() as u64)).collect() }
}

pub fn nu_twist(eta: &SChar, phi: &LParameter, base: &BaseFieldData) -> Result<SChar, ComponentError> {
    eta.mul(&nu_character(phi, base))
}

/// The contragredient member: `pi(phi, eta)^v = pi(phi^v, eta^v * nu)`, where `eta^v`
/// is `eta` moved along the identification `a_j <-> a_j^v`.
pub fn dual_character(phi: &LParameter, eta: &SChar, base: &BaseFieldData) -> Result<(LParameter, SChar), ComponentError> {
    let dual = phi.contragredient();
    let moved = pull_back(eta, &component_group(phi), &component_group(&dual), |t| t.dual())?;
    let twisted = nu_twist(&moved, &dual, base)?;
    Ok((dual, twisted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::{Atom, Block, FlagRequest, Form, GroupTag};
    use proptest::prelude::*;

    fn atom(label: &str, dim: u32, sign: Sign) -> Summand {
        Summand::untwisted(Atom::self_dual(label, dim, sign))
    }

    fn param(blocks: &[(&str, u32, u32)], rank: u32) -> LParameter {
        let sign = GroupTag::required_sign(rank);
        let blocks = blocks.iter().map(|(l, d, m)| Block::times(atom(l, *d, sign), *m)).collect();
        LParameter::new(blocks, GroupTag::new(rank, Form::Hermitian), FlagRequest::default()).unwrap()
    }

    #[test]
    fn rank_and_central_element() {
        let phi = param(&[("A", 1, 2), ("B", 1, 1)], 3);
        let s = component_group(&phi);
        assert_eq!(s.rank(), 2);
        assert_eq!(s.central_element().bits, vec![false, true]);
        let phi = param(&[("A", 2, 1), ("B", 1, 1)], 3);
        assert_eq!(central_element(&phi).bits, vec![true, true]);
        let phi = param(&[("A", 1, 2)], 2);
        assert!(central_element(&phi).is_identity());
        assert_eq!(component_group(&phi).rank(), 1);
    }

    #[test]
    fn enumeration_is_binary_counting() {
        let phi = param(&[("A", 1, 1), ("B", 1, 1)], 2);
        let chars = enumerate_characters(&component_group(&phi));
        assert_eq!(chars.len(), 4);
        assert_eq!(chars[1].values, vec![Sign::Minus, Sign::Plus]);
        assert_eq!(chars[2].values, vec![Sign::Plus, Sign::Minus]);
        for (k, c) in chars.iter().enumerate() {
            assert_eq!(c.index(), k as u64);
        }
    }

    #[test]
    fn eval_rank_mismatch() {
        let eta = SChar::trivial(2);
        assert_eq!(eta.eval(&GroupElement::identity(3)), Err(ComponentError::RankMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn nu_examples() {
        let base = BaseFieldData { omega_at_minus_one: Sign::Minus };
        let odd = param(&[("A", 1, 1), ("B", 2, 1)], 3);
        let eta = SChar::new(vec![Sign::Minus, Sign::Plus]);
        assert_eq!(nu_twist(&eta, &odd, &base).unwrap(), eta);
        let even = param(&[("A", 1, 1), ("B", 1, 1)], 2);
        assert_eq!(nu_character(&even, &base).values, vec![Sign::Minus, Sign::Minus]);
        assert!(nu_character(&even, &BaseFieldData::default()).is_trivial());
        let mixed = param(&[("A", 1, 1), ("B", 3, 1)], 4);
        assert_eq!(nu_character(&mixed, &base).values, vec![Sign::Minus, Sign::Minus]);
        let mixed = param(&[("A", 2, 1), ("B", 2, 1)], 4);
        assert!(nu_character(&mixed, &base).is_trivial());
    }

    #[test]
    fn restriction_missing_image() {
        let big = component_group(&param(&[("A", 1, 1)], 1));
        let small = component_group(&param(&[("B", 1, 1)], 1));
        let err = pull_back(&SChar::trivial(1), &big, &small, |s| s.clone()).unwrap_err();
        assert!(matches!(err, ComponentError::NoEmbedding(_)));
    }

    fn side_counts(r: usize, mults: &[u32]) -> (usize, usize) {
        let labels = ["A", "B", "C", "D", "E", "F"];
        let blocks: Vec<_> = (0..r).map(|i| (labels[i], 1, mults[i])).collect();
        let rank = mults.iter().sum();
        let phi = param(&blocks, rank);
        let chars = enumerate_characters(&component_group(&phi));
        let plus = chars.iter().filter(|c| packet_side(c, &phi).unwrap().is_plus()).count();
        (plus, chars.len() - plus)
    }

    #[test]
    fn dual_character_round_trip_and_side() {
        let base = BaseFieldData { omega_at_minus_one: Sign::Minus };
        let phi = param(&[("A", 1, 1), ("B", 3, 1), ("C", 2, 2)], 8);
        for eta in enumerate_characters(&component_group(&phi)) {
            let (dual, moved) = dual_character(&phi, &eta, &base).unwrap();
            assert_eq!(packet_side(&moved, &dual).unwrap(), packet_side(&eta, &phi).unwrap());
            let (back, again) = dual_character(&dual, &moved, &base).unwrap();
            assert_eq!((back, again), (phi.clone(), eta));
        }
    }

    proptest! {
        #[test]
        fn sides_split_evenly(mults in prop::collection::vec(1u32..=3, 1..=5)) {
            let r = mults.len();
            let (plus, minus) = side_counts(r, &mults);
            prop_assert_eq!(plus + minus, 1 << r);
            if mults.iter().any(|m| m % 2 == 1) {
                prop_assert_eq!(plus, minus);
            } else {
                prop_assert_eq!(minus, 0);
            }
        }

        #[test]
        fn eval_is_multiplicative(a in prop::collection::vec(any::<bool>(), 4), b in prop::collection::vec(any::<bool>(), 4), x in prop::collection::vec(any::<bool>(), 4)) {
            let to_char = |v: &[bool]| SChar::new(v.iter().map(|&m| if m { Sign::Minus } else { Sign::Plus }).collect());
            let (ea, eb) = (to_char(&a), to_char(&b));
            let x = GroupElement { bits: x };
            prop_assert_eq!(ea.mul(&eb).unwrap().eval(&x).unwrap(), ea.eval(&x).unwrap() * eb.eval(&x).unwrap());
        }

        #[test]
        fn nu_twist_is_an_involution(dims in prop::collection::vec(1u32..=3, 1..=4), minus in any::<bool>(), bits in prop::collection::vec(any::<bool>(), 4)) {
            let labels = ["A", "B", "C", "D"];
            let blocks: Vec<_> = dims.iter().enumerate().map(|(i, d)| (labels[i], *d, 1)).collect();
            let phi = param(&blocks, dims.iter().sum());
            let base = BaseFieldData { omega_at_minus_one: if minus { Sign::Minus } else { Sign::Plus } };
            let eta = SChar::new(bits[..dims.len()].iter().map(|&m| if m { Sign::Minus } else { Sign::Plus }).collect());
            let twice = nu_twist(&nu_twist(&eta, &phi, &base).unwrap(), &phi, &base).unwrap();
            prop_assert_eq!(twice, eta);
        }
    }
}
