//! Seeded random parameters.
//!
//! Atoms come from small per-role alphabets. The label fixes the dimension and
//! the twist, and the sign is forced by the group, so every label means one
//! atom within an instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::param::{Atom, Block, FlagRequest, Form, GroupTag, LParameter, StandardCharacters, Summand};
use crate::recipe::GgpSetup;
use crate::theta::theta_up1_param;

/// What a random `phi_2` may contain besides same-type atoms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Phi2Shape {
    pub dual_pairs: bool,
    pub multiplicities: bool,
    /// Include `chi_V chi^-1` once, so that chi_W appears twice in theta(phi_2).
    pub doubling_character: bool,
}

/// One input to the recipe: `phi_2` is `None` when phi was drawn without chi_W.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub setup: GgpSetup,
    pub phi1: LParameter,
    pub phi2: Option<LParameter>,
    pub phi: LParameter,
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Sampler {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn setup(&mut self, n: u32, identify_chi: bool) -> GgpSetup {
        let chars = if identify_chi { StandardCharacters::identified(n) } else { StandardCharacters::independent(n) };
        GgpSetup::new(n, chars)
    }

    /// A summand from alphabet `prefix`, index `i`, valid on groups whose
    /// same-type summands have duality `tag.duality`.
    fn pool_atom(prefix: &str, i: usize, tag: GroupTag, chars: &StandardCharacters) -> Summand {
        let dim = (i % 3) as u32 + 1;
        let label = format!("{prefix}{i}");
        if i % 4 == 3 {
            let twist = chars.chi.clone();
            let sign = tag.duality * twist.conj_dual_sign().expect("chi is unitary");
            Summand::new(Atom::self_dual(label, dim, sign), twist)
        } else {
            Summand::untwisted(Atom::self_dual(label, dim, tag.duality))
        }
    }

    /// Same-type blocks of total dimension `dim`. Distinct labels unless
    /// `multiplicities` is set.
    fn fill(&mut self, dim: u32, prefix: &str, tag: GroupTag, chars: &StandardCharacters, multiplicities: bool) -> Vec<Block> {
        let pool = 3 * (dim as usize).div_ceil(2) + 3;
        'retry: loop {
            let mut left = dim;
            let mut chosen: Vec<(usize, u32)> = Vec::new();
            while left > 0 {
                let options: Vec<usize> = (0..pool)
                    .filter(|&i| ((i % 3) as u32) < left)
                    .filter(|&i| multiplicities || chosen.iter().all(|(j, _)| *j != i))
                    .collect();
                if options.is_empty() {
                    continue 'retry;
                }
                let i = options[self.rng.random_range(0..options.len())];
                left -= (i % 3) as u32 + 1;
                match chosen.iter_mut().find(|(j, _)| *j == i) {
                    Some((_, m)) => *m += 1,
                    None => chosen.push((i, 1)),
                }
            }
            return chosen.into_iter().map(|(i, m)| Block::times(Self::pool_atom(prefix, i, tag, chars), m)).collect();
        }
    }

    /// A discrete parameter with supercuspidal packet on U(W_n).
    pub fn phi1(&mut self, setup: &GgpSetup) -> LParameter {
        let tag = GroupTag::new(setup.n, Form::SkewHermitian);
        let blocks = self.fill(setup.n, "P", tag, &setup.chars, false);
        LParameter::new(blocks, tag, FlagRequest::supercuspidal()).expect("generated phi_1 is valid")
    }

    /// A tempered parameter on U(W_n).
    pub fn phi2(&mut self, setup: &GgpSetup, shape: Phi2Shape) -> LParameter {
        let tag = GroupTag::new(setup.n, Form::SkewHermitian);
        let mut blocks = Vec::new();
        let mut left = setup.n;
        if shape.doubling_character {
            blocks.push(Block::one(Summand::character(setup.doubling_character())));
            left -= 1;
        }
        if shape.dual_pairs && left >= 2 && self.rng.random_bool(0.5) {
            let d = self.rng.random_range(1..=(left / 2).min(2));
            blocks.push(Block::pair(Summand::untwisted(Atom::plain(format!("U{d}"), d))));
            left -= 2 * d;
        }
        blocks.extend(self.fill(left, "Q", tag, &setup.chars, shape.multiplicities));
        LParameter::new(blocks, tag, FlagRequest::default()).expect("generated phi_2 is valid")
    }

    /// A tempered parameter on U(V_{n+1}) built from atoms only, so it never
    /// contains chi_W.
    pub fn phi_without_chi_w(&mut self, setup: &GgpSetup) -> LParameter {
        let tag = GroupTag::new(setup.n + 1, Form::Hermitian);
        let blocks = self.fill(setup.n + 1, "R", tag, &setup.chars, true);
        LParameter::new(blocks, tag, FlagRequest::default()).expect("generated phi is valid")
    }

    /// `phi = theta(phi_2)` for a fresh `phi_2` of the given shape.
    pub fn instance_with(&mut self, setup: &GgpSetup, shape: Phi2Shape) -> Instance {
        let phi1 = self.phi1(setup);
        let phi2 = self.phi2(setup, shape);
        let phi = theta_up1_param(&phi2, &setup.lift_one()).expect("setup is checked");
        Instance { setup: setup.clone(), phi1, phi2: Some(phi2), phi }
    }

    /// chi_W is put into phi with probability 1/2; when it is, it occurs once.
    pub fn instance(&mut self, setup: &GgpSetup) -> Instance {
        if self.rng.random_bool(0.5) {
            self.instance_with(setup, Phi2Shape { multiplicities: true, ..Phi2Shape::default() })
        } else {
            let phi1 = self.phi1(setup);
            let phi = self.phi_without_chi_w(setup);
            Instance { setup: setup.clone(), phi1, phi2: None, phi }
        }
    }

    /// Any tempered parameter on U(W_n), possibly containing the chi_V-role of `ctx_chi_v`.
    pub fn theta_source(&mut self, setup: &GgpSetup, with_chi_v: Option<&crate::param::CharE>) -> LParameter {
        let tag = GroupTag::new(setup.n, Form::SkewHermitian);
        let mut blocks = Vec::new();
        let mut left = setup.n;
        if let Some(chi_v) = with_chi_v {
            blocks.push(Block::one(Summand::character(chi_v.clone())));
            left -= 1;
        }
        if left >= 2 && self.rng.random_bool(0.3) {
            blocks.push(Block::pair(Summand::untwisted(Atom::plain("U1", 1))));
            left -= 2;
        }
        blocks.extend(self.fill(left, "S", tag, &setup.chars, true));
        LParameter::new(blocks, tag, FlagRequest::default()).expect("generated source is valid")
    }

    /// A parameter with exactly `r` distinct same-type blocks and random
    /// multiplicities. The first atom has dimension one, so its multiplicity is
    /// adjusted until the total dimension matches the chosen duality.
    pub fn with_blocks(&mut self, r: usize) -> LParameter {
        let duality = if self.rng.random_bool(0.5) { crate::Sign::Plus } else { crate::Sign::Minus };
        let mut mults: Vec<u32> = (0..r).map(|_| self.rng.random_range(1..=3)).collect();
        let pair = r == 0 || self.rng.random_bool(0.3);
        let dim_of = |mults: &[u32]| -> u32 {
            mults.iter().enumerate().map(|(i, m)| ((i % 3) as u32 + 1) * m).sum::<u32>() + if pair { 2 } else { 0 }
        };
        if r > 0 && GroupTag::required_sign(dim_of(&mults)) != duality {
            mults[0] += 1;
        }
        let mut blocks: Vec<Block> = mults
            .iter()
            .enumerate()
            .map(|(i, &m)| Block::times(Summand::untwisted(Atom::self_dual(format!("T{i}"), (i % 3) as u32 + 1, duality)), m))
            .collect();
        if pair {
            blocks.push(Block::pair(Summand::untwisted(Atom::plain("U1", 1))));
        }
        let form = if self.rng.random_bool(0.5) { Form::Hermitian } else { Form::SkewHermitian };
        let tag = GroupTag::new(dim_of(&mults), form);
        LParameter::new(blocks, tag, FlagRequest::default()).expect("generated parameter is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::component_group;

    #[test]
    fn same_seed_same_instance() {
        let mut a = Sampler::new(9);
        let mut b = Sampler::new(9);
        let s = a.setup(3, false);
        b.setup(3, false);
        assert_eq!(a.instance(&s), b.instance(&s));
    }

    #[test]
    fn generated_parameters_meet_their_hypotheses() {
        for seed in 0..200 {
            let mut g = Sampler::new(seed);
            let n = 1 + (seed % 5) as u32;
            let s = g.setup(n, seed % 2 == 0);
            let inst = g.instance(&s);
            assert!(inst.phi1.is_supercuspidal_packet());
            assert_eq!(inst.phi1.dim(), n);
            assert!(inst.phi.is_tempered());
            assert_eq!(inst.phi.dim(), n + 1);
            assert_eq!(inst.phi2.is_some(), inst.phi.contains(&s.chi_w_summand()));
            let r = 1 + (seed % 5) as usize;
            assert_eq!(component_group(&g.with_blocks(r)).rank(), r);
        }
    }

    #[test]
    fn doubling_shape_doubles_chi_w() {
        let mut g = Sampler::new(1);
        let s = g.setup(4, false);
        let inst = g.instance_with(&s, Phi2Shape { doubling_character: true, ..Phi2Shape::default() });
        assert_eq!(inst.phi.multiplicity_of(&s.chi_w_summand()), 2);
    }
}
