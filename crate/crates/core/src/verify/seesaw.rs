//! The see-saw argument run on characters.
//!
//! Starting from the Fourier-Jacobi pair for `phi_2^v x phi_1` on U(W_n) x U(W_n),
//! the two theta lifts (rank +2 for phi_1, rank +1 for phi_2) are applied to the
//! distinguished characters, with contragredients where the see-saw identity needs
//! them. The result is compared against the closed form by the property suite.

use serde::Serialize;

use crate::component::{component_group, dual_character, packet_side, SChar};
use crate::epsilon::{EpsBackend, Oracle, OracleCall};
use crate::param::{LParameter, Summand};
use crate::recipe::{fj_eta, recover_phi2, DistinguishedPair, GgpSetup, PacketMember, PairSource, RecipeError};
use crate::sign::Sign;
use crate::theta::{
    contains_chi_v, restrict_up1, theta_up1_char, theta_up1_param, theta_up2_char, theta_up2_char_inverse, theta_up2_eps_prime,
    theta_up2_param, ThetaContext,
};

/// Deliberate corruptions of the transfer rules, used to show the comparison has teeth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Faults {
    /// Flip the rank-two multiplier at the first basis vector.
    pub flip_multiplier: bool,
    /// Flip the value at chi_W after the rank-one extension.
    pub flip_extension: bool,
    /// Flip the sign relating eps and eps'.
    pub flip_eps_rule: bool,
}

impl Faults {
    pub fn none() -> Faults {
        Faults::default()
    }

    /// Each single fault, by name.
    pub fn singles() -> Vec<(&'static str, Faults)> {
        vec![
            ("flip_multiplier", Faults { flip_multiplier: true, ..Faults::default() }),
            ("flip_extension", Faults { flip_extension: true, ..Faults::default() }),
            ("flip_eps_rule", Faults { flip_eps_rule: true, ..Faults::default() }),
        ]
    }

    pub fn is_none(&self) -> bool {
        *self == Faults::default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceStep {
    /// Fourier-Jacobi characters of `phi_2^v x phi_1`.
    BaseCase {
        first: String,
        second: String,
        eta_first: String,
        eta_second: String,
        side_first: Sign,
        side_second: Sign,
    },
    Contragredient {
        from: String,
        to: String,
        before: String,
        after: String,
    },
    EpsRule {
        eps_prime: Sign,
        eps: Sign,
    },
    LiftTwo {
        source: String,
        target: String,
        before: String,
        after: String,
    },
    LiftOne {
        source: String,
        target: String,
        requested_side: Sign,
        side: Sign,
        before: String,
        after: String,
    },
    Final {
        upper: String,
        lower: String,
        upper_side: Sign,
        lower_side: Sign,
    },
}

/// A complete record of one transport, replayable against a backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeesawTrace {
    pub phi1: LParameter,
    pub phi: LParameter,
    pub setup: GgpSetup,
    pub faults: Faults,
    pub steps: Vec<TraceStep>,
    pub calls: Vec<OracleCall>,
    pub eps_prime: Sign,
    pub eps: Sign,
    /// `None` when the members (of the base pair or of the result) land on
    /// different inner forms.
    pub pair: Option<DistinguishedPair>,
}

impl SeesawTrace {
    /// Re-run the transport from the recorded inputs and compare.
    pub fn replay(&self, backend: &EpsBackend) -> Result<bool, RecipeError> {
        let oracle = Oracle::new(backend);
        let again = transport(&self.phi1, &self.phi, &self.setup, &oracle, &self.faults)?;
        Ok(again.as_ref() == Some(self))
    }
}

fn flip_at(eta: &SChar, i: Option<usize>) -> SChar {
    let mut values = eta.values.clone();
    if let Some(i) = i {
        values[i] = -values[i];
    }
    SChar::new(values)
}

fn flip_first(eta: &SChar, on: bool) -> SChar {
    flip_at(eta, if on && eta.rank() > 0 { Some(0) } else { None })
}

fn flip_chi_w(eta: &SChar, phi: &LParameter, ctx: &ThetaContext, on: bool) -> SChar {
    let i = component_group(phi).index_of(&Summand::character(ctx.chi_w.clone()));
    flip_at(eta, if on { i } else { None })
}

fn eps_rule(eps: Sign, phi1: &LParameter, ctx: &ThetaContext, oracle: &Oracle, faults: &Faults) -> Result<Sign, RecipeError> {
    let e = theta_up2_eps_prime(eps, phi1, ctx, oracle)?;
    Ok(if faults.flip_eps_rule { -e } else { e })
}

/// The inputs every direction of the argument starts from.
struct Base {
    phi2_dual: LParameter,
    eta2_dual: SChar,
    eta1: SChar,
    eps_prime: Sign,
    /// Both Fourier-Jacobi members sit on the same inner form.
    sides_agree: bool,
    /// Rank-two lift of phi_1 (n odd) or of phi_1^v (n even), and its context.
    up2_source: LParameter,
    up2_ctx: ThetaContext,
    /// Source and context of the rank-one lift.
    up1_source: LParameter,
    up1_ctx: ThetaContext,
}

fn base(phi1: &LParameter, phi: &LParameter, setup: &GgpSetup, oracle: &Oracle) -> Result<Option<Base>, RecipeError> {
    let phi2 = match recover_phi2(phi, setup) {
        Err(RecipeError::ChiWAbsent) => return Ok(None),
        r => r?,
    };
    let phi2_dual = phi2.contragredient();
    let (eta2_dual, eta1) = fj_eta(&phi2_dual, phi1, setup.n, &setup.chars.chi, oracle)?;
    let eps_prime = packet_side(&eta1, phi1)?;
    let sides_agree = packet_side(&eta2_dual, &phi2_dual)? == eps_prime;
    let b = if setup.n_is_odd() {
        Base {
            up2_source: phi1.clone(),
            up2_ctx: setup.lift_two(),
            up1_source: phi2.clone(),
            up1_ctx: setup.lift_one(),
            phi2_dual,
            eta2_dual,
            eta1,
            eps_prime,
            sides_agree,
        }
    } else {
        Base {
            up2_source: phi1.contragredient(),
            up2_ctx: setup.lift_two_inverted(),
            up1_source: phi2_dual.clone(),
            up1_ctx: setup.lift_one_inverted(),
            phi2_dual,
            eta2_dual,
            eta1,
            eps_prime,
            sides_agree,
        }
    };
    Ok(Some(b))
}

fn require_same(what: &str, got: &LParameter, want: &LParameter) -> Result<(), RecipeError> {
    if got != want {
        return Err(RecipeError::HypothesisViolation(format!("see-saw {what} landed on {got}, expected {want}")));
    }
    Ok(())
}

/// Push the Fourier-Jacobi characters through the see-saw. `Ok(None)` when phi
/// does not contain chi_W.
pub fn transport(
    phi1: &LParameter,
    phi: &LParameter,
    setup: &GgpSetup,
    oracle: &Oracle,
    faults: &Faults,
) -> Result<Option<SeesawTrace>, RecipeError> {
    setup.check()?;
    // The trace records only this transport's lookups.
    let outer = oracle;
    let oracle = &Oracle::new(outer.backend());
    let Some(b) = base(phi1, phi, setup, oracle)? else { return Ok(None) };
    let odd = setup.n_is_odd();
    let mut steps = vec![TraceStep::BaseCase {
        first: b.phi2_dual.to_string(),
        second: phi1.to_string(),
        eta_first: b.eta2_dual.to_string(),
        eta_second: b.eta1.to_string(),
        side_first: packet_side(&b.eta2_dual, &b.phi2_dual)?,
        side_second: b.eps_prime,
    }];

    // Upper member: lift the phi_1 side by two.
    let up2_eta = if odd {
        b.eta1.clone()
    } else {
        let (dual, moved) = dual_character(phi1, &b.eta1, &setup.base)?;
        steps.push(contragredient_step(phi1, &dual, &b.eta1, &moved));
        moved
    };
    let eps = eps_rule(b.eps_prime, &b.up2_source, &b.up2_ctx, oracle, faults)?;
    steps.push(TraceStep::EpsRule { eps_prime: b.eps_prime, eps });
    let lifted_src = theta_up2_param(&b.up2_source, &b.up2_ctx)?;
    let lifted_eta = flip_first(&theta_up2_char(&up2_eta, &b.up2_source, &b.up2_ctx, oracle)?, faults.flip_multiplier);
    steps.push(TraceStep::LiftTwo {
        source: b.up2_source.to_string(),
        target: lifted_src.to_string(),
        before: up2_eta.to_string(),
        after: lifted_eta.to_string(),
    });
    let (upper_param, upper_eta) = if odd {
        (lifted_src, lifted_eta)
    } else {
        let (dual, moved) = dual_character(&lifted_src, &lifted_eta, &setup.base)?;
        steps.push(contragredient_step(&lifted_src, &dual, &lifted_eta, &moved));
        (dual, moved)
    };
    require_same("upper parameter", &upper_param, &theta_up2_param(phi1, &setup.lift_two())?)?;

    // Lower member: lift the phi_2 side by one.
    let up1_eta = if odd {
        let (dual, moved) = dual_character(&b.phi2_dual, &b.eta2_dual, &setup.base)?;
        steps.push(contragredient_step(&b.phi2_dual, &dual, &b.eta2_dual, &moved));
        moved
    } else {
        b.eta2_dual.clone()
    };
    let lifted_src = theta_up1_param(&b.up1_source, &b.up1_ctx)?;
    let (tau, side) = theta_up1_char(&b.up1_source, &up1_eta, eps, &b.up1_ctx)?;
    let tau = flip_chi_w(&tau, &lifted_src, &b.up1_ctx, faults.flip_extension);
    steps.push(TraceStep::LiftOne {
        source: b.up1_source.to_string(),
        target: lifted_src.to_string(),
        requested_side: eps,
        side,
        before: up1_eta.to_string(),
        after: tau.to_string(),
    });
    let (lower_param, lower_eta) = if odd {
        (lifted_src, tau)
    } else {
        let (dual, moved) = dual_character(&lifted_src, &tau, &setup.base)?;
        steps.push(contragredient_step(&lifted_src, &dual, &tau, &moved));
        (dual, moved)
    };
    require_same("lower parameter", &lower_param, phi)?;

    let upper = PacketMember::new(upper_param, upper_eta)?;
    let lower = PacketMember::new(lower_param, lower_eta)?;
    steps.push(TraceStep::Final {
        upper: upper.character.to_string(),
        lower: lower.character.to_string(),
        upper_side: upper.side,
        lower_side: lower.side,
    });
    let pair = (b.sides_agree && upper.side == lower.side).then_some(DistinguishedPair { upper, lower, source: PairSource::Seesaw });
    Ok(Some(SeesawTrace {
        phi1: phi1.clone(),
        phi: phi.clone(),
        setup: setup.clone(),
        faults: *faults,
        steps,
        calls: oracle.calls(),
        eps_prime: b.eps_prime,
        eps,
        pair,
    }))
}

fn contragredient_step(from: &LParameter, to: &LParameter, before: &SChar, after: &SChar) -> TraceStep {
    TraceStep::Contragredient { from: from.to_string(), to: to.to_string(), before: before.to_string(), after: after.to_string() }
}

/// Every pair `(eta^dia, eta^heart)` on a common inner form whose pull-back
/// through the see-saw is the Fourier-Jacobi pair. Uniqueness of the
/// distinguished pair means this has at most one element.
pub fn seesaw_pairs(
    phi1: &LParameter,
    phi: &LParameter,
    setup: &GgpSetup,
    oracle: &Oracle,
    faults: &Faults,
) -> Result<Vec<DistinguishedPair>, RecipeError> {
    setup.check()?;
    let Some(b) = base(phi1, phi, setup, oracle)? else { return Ok(Vec::new()) };
    if !b.sides_agree {
        return Ok(Vec::new());
    }
    let odd = setup.n_is_odd();
    let upper_param = theta_up2_param(phi1, &setup.lift_two())?;
    let case_two = contains_chi_v(&b.up1_source, &b.up1_ctx);
    let lifted_lower = theta_up1_param(&b.up1_source, &b.up1_ctx)?;
    let expected_up1 = if odd { dual_character(&b.phi2_dual, &b.eta2_dual, &setup.base)?.1 } else { b.eta2_dual.clone() };

    let upper_ok = |eta: &SChar, eps: Sign| -> Result<bool, RecipeError> {
        let lifted_eta = if odd { eta.clone() } else { dual_character(&upper_param, eta, &setup.base)?.1 };
        let small = theta_up2_char_inverse(&flip_first(&lifted_eta, faults.flip_multiplier), &b.up2_source, &b.up2_ctx, oracle)?;
        let eta1 = if odd { small } else { dual_character(&b.up2_source, &small, &setup.base)?.1 };
        let eps_prime = eps_rule(eps, &b.up2_source, &b.up2_ctx, oracle, faults)?;
        Ok(eta1 == b.eta1 && eps_prime == b.eps_prime)
    };
    let lower_ok = |eta: &SChar, eps: Sign| -> Result<bool, RecipeError> {
        let tau = if odd { eta.clone() } else { dual_character(phi, eta, &setup.base)?.1 };
        let tau = flip_chi_w(&tau, &lifted_lower, &b.up1_ctx, faults.flip_extension);
        let restricted = restrict_up1(&b.up1_source, &tau, &b.up1_ctx)?;
        Ok(restricted == expected_up1 && (case_two || packet_side(&tau, &lifted_lower)? == eps))
    };

    let mut pairs = Vec::new();
    for eps in [Sign::Plus, Sign::Minus] {
        let mut uppers = Vec::new();
        for eta in component_group(&upper_param).characters() {
            if packet_side(&eta, &upper_param)? == eps && upper_ok(&eta, eps)? {
                uppers.push(eta);
            }
        }
        let mut lowers = Vec::new();
        for eta in component_group(phi).characters() {
            if packet_side(&eta, phi)? == eps && lower_ok(&eta, eps)? {
                lowers.push(eta);
            }
        }
        for u in &uppers {
            for l in &lowers {
                pairs.push(DistinguishedPair {
                    upper: PacketMember::new(upper_param.clone(), u.clone())?,
                    lower: PacketMember::new(phi.clone(), l.clone())?,
                    source: PairSource::Seesaw,
                });
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::param::{Atom, Block, FlagRequest, Form, GroupTag, StandardCharacters};
    use crate::recipe::closed_form_pair;

    fn atom(label: &str, dim: u32, sign: Sign) -> Summand {
        Summand::untwisted(Atom::self_dual(label, dim, sign))
    }

    fn on(rank: u32, form: Form, blocks: Vec<Block>, req: FlagRequest) -> LParameter {
        LParameter::new(blocks, GroupTag::new(rank, form), req).unwrap()
    }

    fn odd_case() -> (LParameter, LParameter, GgpSetup) {
        let s = GgpSetup::new(3, StandardCharacters::independent(3));
        let phi1 = on(
            3,
            Form::SkewHermitian,
            vec![Block::one(atom("A", 1, Sign::Plus)), Block::one(atom("B", 2, Sign::Plus))],
            FlagRequest::supercuspidal(),
        );
        let phi2 = on(3, Form::SkewHermitian, vec![Block::one(atom("C", 3, Sign::Plus))], FlagRequest::default());
        let phi = theta_up1_param(&phi2, &s.lift_one()).unwrap();
        (phi1, phi, s)
    }

    #[test]
    fn odd_rank_agrees_with_closed_form() {
        let (phi1, phi, s) = odd_case();
        for seed in 0..16 {
            let backend = EpsBackend::Hashed { seed };
            let oracle = Oracle::new(&backend);
            let closed = closed_form_pair(&phi1, &phi, &s, &oracle).unwrap();
            let trace = transport(&phi1, &phi, &s, &oracle, &Faults::none()).unwrap().unwrap();
            let pair = trace.pair.expect("sides agree");
            assert_eq!((&pair.upper, &pair.lower), (&closed.upper, &closed.lower), "seed {seed}");
            let all = seesaw_pairs(&phi1, &phi, &s, &oracle, &Faults::none()).unwrap();
            assert_eq!(all.len(), 1);
            assert_eq!(all[0].lower, closed.lower);
        }
    }

    #[test]
    fn replay_reproduces_and_detects_a_different_backend() {
        let (phi1, phi, s) = odd_case();
        let backend = EpsBackend::Hashed { seed: 3 };
        let trace = transport(&phi1, &phi, &s, &Oracle::new(&backend), &Faults::none()).unwrap().unwrap();
        assert!(trace.replay(&backend).unwrap());
        let differs = (0..32).any(|seed| !trace.replay(&EpsBackend::Hashed { seed: 100 + seed }).unwrap());
        assert!(differs);
    }

    #[test]
    fn no_chi_w_means_nothing_to_transport() {
        let (phi1, _, s) = odd_case();
        let phi = on(4, Form::Hermitian, vec![Block::one(atom("D", 4, Sign::Minus))], FlagRequest::default());
        let backend = EpsBackend::ConstantOne;
        let oracle = Oracle::new(&backend);
        assert!(transport(&phi1, &phi, &s, &oracle, &Faults::none()).unwrap().is_none());
        assert!(seesaw_pairs(&phi1, &phi, &s, &oracle, &Faults::none()).unwrap().is_empty());
    }

    #[test]
    fn faults_break_agreement_somewhere() {
        let (phi1, phi, s) = odd_case();
        for (name, faults) in Faults::singles() {
            let broken = (0..32).any(|seed| {
                let backend = EpsBackend::Hashed { seed };
                let oracle = Oracle::new(&backend);
                let closed = closed_form_pair(&phi1, &phi, &s, &oracle).unwrap();
                let pair = transport(&phi1, &phi, &s, &oracle, &faults).unwrap().unwrap().pair;
                pair.map(|p| (p.upper, p.lower)) != Some((closed.upper, closed.lower))
            });
            assert!(broken, "{name} went unnoticed");
        }
    }
}
