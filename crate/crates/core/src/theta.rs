//! Theta lifts of parameters and packet characters from U(W_n) to U(V_{n+1})
//! and U(V_{n+2}).

use thiserror::Error;

use crate::component::{component_group, pull_back, ComponentError, SChar};
use crate::epsilon::{tensor, EpsError, Oracle, PsiTag};
use crate::param::{CharE, Form, GroupTag, LParameter, ParamError, Slope, Summand};
use crate::sign::Sign;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ThetaError {
    #[error("the lift to U(V_(n+2)) needs a parameter whose packet is supercuspidal")]
    NotSupercuspidalPacket,
    #[error("theta context does not fit U(W_{rank}): {reason}")]
    BadContext { rank: u32, reason: String },
    #[error("theta lifts start from a skew-Hermitian group, got {0}")]
    WrongForm(GroupTag),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error(transparent)]
    Eps(#[from] EpsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankStep {
    One,
    Two,
}

impl RankStep {
    pub fn delta(self) -> u32 {
        match self {
            RankStep::One => 1,
            RankStep::Two => 2,
        }
    }
}

/// The splitting characters of one dual pair `U(V_{n+delta}) x U(W_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaContext {
    pub chi_v: CharE,
    pub chi_w: CharE,
    pub step: RankStep,
}

impl ThetaContext {
    pub fn new(chi_v: CharE, chi_w: CharE, step: RankStep) -> ThetaContext {
        ThetaContext { chi_v, chi_w, step }
    }

    /// `chi_V^-1 chi_W`, the twist applied to the source parameter.
    pub fn twist(&self) -> CharE {
        &self.chi_v.inv() * &self.chi_w
    }

    /// Restriction grades must be `omega^dim V` and `omega^dim W`.
    pub fn check(&self, n: u32) -> Result<(), ThetaError> {
        let bad = |reason: String| ThetaError::BadContext { rank: n, reason };
        let v = self.chi_v.conj_dual_sign().map_err(|e| bad(e.to_string()))?;
        let w = self.chi_w.conj_dual_sign().map_err(|e| bad(e.to_string()))?;
        let dim_v = n + self.step.delta();
        if v != Sign::from_parity(dim_v as i64) {
            return Err(bad(format!("chi_V-role {} must restrict to omega^{dim_v}", self.chi_v)));
        }
        if w != Sign::from_parity(n as i64) {
            return Err(bad(format!("chi_W-role {} must restrict to omega^{n}", self.chi_w)));
        }
        Ok(())
    }

    fn check_source(&self, phi: &LParameter) -> Result<(), ThetaError> {
        let g = phi.group();
        if g.form != Form::SkewHermitian || !g.is_genuine() {
            return Err(ThetaError::WrongForm(g));
        }
        self.check(phi.rank())
    }
}

/// Twist every block and move to the Hermitian group of rank `rank`, taking the
/// duality type from the twist rather than from the target.
fn twisted_onto(phi: &LParameter, mu: &CharE, rank: u32) -> Result<(LParameter, GroupTag), ThetaError> {
    let twisted = phi.tensor_twist(mu)?;
    let group = GroupTag { rank, form: Form::Hermitian, duality: twisted.group().duality };
    if !group.is_genuine() {
        return Err(ParamError::NotGenuine { form: group.form, rank, expected: GroupTag::required_sign(rank), found: group.duality }.into());
    }
    Ok((twisted, group))
}

/// Whether `phi` contains the chi_V-role character (the second case of the
/// U(V_{n+1}) correspondence).
pub fn contains_chi_v(phi: &LParameter, ctx: &ThetaContext) -> bool {
    phi.contains(&Summand::character(ctx.chi_v.clone()))
}

/// `theta(phi) = phi (x) chi_V^-1 chi_W + chi_W`.
pub fn theta_up1_param(phi: &LParameter, ctx: &ThetaContext) -> Result<LParameter, ThetaError> {
    ctx.check_source(phi)?;
    let (twisted, group) = twisted_onto(phi, &ctx.twist(), phi.rank() + 1)?;
    let lifted = twisted.with_summand(Summand::character(ctx.chi_w.clone()), group)?;
    Ok(lifted.with_flags(Default::default())?)
}

/// Lift `eta` to `S_theta(phi)`.
///
/// If phi does not contain the chi_V-role, the new basis vector `b_1` gets the
/// unique value putting the lift on side `target_side`. Otherwise the component
/// groups are identified, the character is carried over unchanged, and the side
/// is whatever that character gives; `target_side` is then ignored.
pub fn theta_up1_char(phi: &LParameter, eta: &SChar, target_side: Sign, ctx: &ThetaContext) -> Result<(SChar, Sign), ThetaError> {
    let lifted = theta_up1_param(phi, ctx)?;
    let small = component_group(phi);
    let big = component_group(&lifted);
    if eta.rank() != small.rank() {
        return Err(ComponentError::RankMismatch { expected: small.rank(), found: eta.rank() }.into());
    }
    let mu = ctx.twist();
    let mut values = vec![Sign::Plus; big.rank()];
    let mut new_index = None;
    for (j, c) in big.basis().iter().enumerate() {
        let pre = c.twist_by(&mu.inv());
        match small.index_of(&pre) {
            Some(i) => values[j] = eta.value(i),
            None => new_index = Some(j),
        }
    }
    let z_big = big.central_element();
    match new_index {
        Some(b1) => {
            let rest = SChar::new(values.clone()).eval(&z_big)?;
            // b_1 has multiplicity one, so it always lies in z.
            values[b1] = target_side * rest;
            Ok((SChar::new(values), target_side))
        }
        None => {
            let lifted_eta = SChar::new(values);
            let side = lifted_eta.eval(&z_big)?;
            Ok((lifted_eta, side))
        }
    }
}

/// `theta(eta)|_{S_phi}`, along `a_i -> a_i (x) chi_V^-1 chi_W`.
pub fn restrict_up1(phi: &LParameter, eta_big: &SChar, ctx: &ThetaContext) -> Result<SChar, ThetaError> {
    let lifted = theta_up1_param(phi, ctx)?;
    let mu = ctx.twist();
    Ok(pull_back(eta_big, &component_group(&lifted), &component_group(phi), |s| s.twist_by(&mu))?)
}

/// `theta(phi) = phi (x) chi_V^-1 chi_W + (chi_W |.|^1/2 + chi_W |.|^-1/2)`.
pub fn theta_up2_param(phi1: &LParameter, ctx: &ThetaContext) -> Result<LParameter, ThetaError> {
    ctx.check_source(phi1)?;
    if !phi1.is_supercuspidal_packet() {
        return Err(ThetaError::NotSupercuspidalPacket);
    }
    let (twisted, group) = twisted_onto(phi1, &ctx.twist(), phi1.rank() + 2)?;
    let half = &ctx.chi_w * &CharE::abs_power(Slope::new(1, 2));
    let lifted = twisted.with_dual_pair(Summand::character(half), group)?;
    Ok(lifted.with_flags(Default::default())?)
}

/// `eps' = eps * eps(1/2, phi (x) chi_V^-1, psi_2^E)`.
pub fn theta_up2_eps_prime(eps: Sign, phi1: &LParameter, ctx: &ThetaContext, oracle: &Oracle) -> Result<Sign, ThetaError> {
    Ok(eps * oracle.eps_half(&tensor(phi1, &ctx.chi_v.inv()), PsiTag::Psi2E)?)
}

/// Per-basis multipliers `eps(1/2, phi^(j) (x) chi_V^-1, psi_2^E)`, indexed by `S_phi`.
pub fn theta_up2_multipliers(phi1: &LParameter, ctx: &ThetaContext, oracle: &Oracle) -> Result<Vec<Sign>, ThetaError> {
    let chi_v_inv = ctx.chi_v.inv();
    component_group(phi1).basis().iter().map(|s| Ok(oracle.eps_half(&tensor(s, &chi_v_inv), PsiTag::Psi2E)?)).collect()
}

fn up2_transport(eta: &SChar, phi1: &LParameter, ctx: &ThetaContext, oracle: &Oracle, forward: bool) -> Result<SChar, ThetaError> {
    let lifted = theta_up2_param(phi1, ctx)?;
    let small = component_group(phi1);
    let big = component_group(&lifted);
    let mult = theta_up2_multipliers(phi1, ctx, oracle)?;
    let mu = ctx.twist();
    if forward {
        if eta.rank() != small.rank() {
            return Err(ComponentError::RankMismatch { expected: small.rank(), found: eta.rank() }.into());
        }
        let values = big
            .basis()
            .iter()
            .map(|c| {
                let i = small.index_of(&c.twist_by(&mu.inv())).ok_or_else(|| ComponentError::NoEmbedding(c.to_string()))?;
                Ok(eta.value(i) * mult[i])
            })
            .collect::<Result<_, ThetaError>>()?;
        Ok(SChar::new(values))
    } else {
        let pulled = pull_back(eta, &big, &small, |s| s.twist_by(&mu))?;
        Ok(SChar::new(pulled.values.iter().zip(&mult).map(|(v, m)| *v * *m).collect()))
    }
}

/// `theta(eta)(c_j) = eta(c_j) * eps(1/2, phi^(j) (x) chi_V^-1, psi_2^E)`.
pub fn theta_up2_char(eta: &SChar, phi1: &LParameter, ctx: &ThetaContext, oracle: &Oracle) -> Result<SChar, ThetaError> {
    up2_transport(eta, phi1, ctx, oracle, true)
}

/// Inverse of [`theta_up2_char`].
pub fn theta_up2_char_inverse(eta_big: &SChar, phi1: &LParameter, ctx: &ThetaContext, oracle: &Oracle) -> Result<SChar, ThetaError> {
    up2_transport(eta_big, phi1, ctx, oracle, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::component::enumerate_characters;
    use crate::epsilon::{EpsBackend, EpsTable, PairKey};
    use crate::param::{Atom, Block, FlagRequest, StandardCharacters};
    use std::collections::BTreeSet;

    fn w(rank: u32) -> GroupTag {
        GroupTag::new(rank, Form::SkewHermitian)
    }

    fn atom(label: &str, dim: u32, sign: Sign) -> Summand {
        Summand::untwisted(Atom::self_dual(label, dim, sign))
    }

    fn phi1_fixture() -> LParameter {
        LParameter::new(
            vec![Block::one(atom("A", 1, Sign::Plus)), Block::one(atom("B", 2, Sign::Plus))],
            w(3),
            FlagRequest::supercuspidal(),
        )
        .unwrap()
    }

    fn ctx1(n: u32) -> ThetaContext {
        let s = StandardCharacters::independent(n);
        ThetaContext::new(&s.chi_v * &s.chi.inv(), s.chi_w, RankStep::One)
    }

    fn ctx2(n: u32) -> ThetaContext {
        let s = StandardCharacters::independent(n);
        ThetaContext::new(s.chi_v, s.chi_w, RankStep::Two)
    }

    #[test]
    fn context_grades_are_checked() {
        let s = StandardCharacters::independent(3);
        let bad = ThetaContext::new(s.chi_v.clone(), s.chi_w.clone(), RankStep::One);
        assert!(matches!(bad.check(3), Err(ThetaError::BadContext { .. })));
        assert!(ctx1(3).check(3).is_ok());
        assert!(ctx2(3).check(3).is_ok());
        assert!(ctx2(4).check(4).is_ok());
    }

    #[test]
    fn up1_shape_case_one() {
        let phi = phi1_fixture();
        let lifted = theta_up1_param(&phi, &ctx1(3)).unwrap();
        assert_eq!(lifted.rank(), 4);
        assert_eq!(lifted.group(), GroupTag::new(4, Form::Hermitian));
        assert_eq!(component_group(&lifted).rank(), 3);
    }

    #[test]
    fn up1_shape_case_two() {
        let ctx = ctx1(3);
        let phi = LParameter::new(
            vec![Block::one(Summand::character(ctx.chi_v.clone())), Block::one(atom("D", 2, Sign::Plus))],
            w(3),
            FlagRequest::default(),
        )
        .unwrap();
        assert!(contains_chi_v(&phi, &ctx));
        let lifted = theta_up1_param(&phi, &ctx).unwrap();
        assert_eq!(component_group(&lifted).rank(), 2);
        assert_eq!(lifted.multiplicity_of(&Summand::character(ctx.chi_w.clone())), 2);
    }

    #[test]
    fn up1_case_one_extensions_differ_at_b1() {
        let phi = phi1_fixture();
        let ctx = ctx1(3);
        let lifted = theta_up1_param(&phi, &ctx).unwrap();
        let big = component_group(&lifted);
        let b1 = big.index_of(&Summand::character(ctx.chi_w.clone())).unwrap();
        for eta in enumerate_characters(&component_group(&phi)) {
            let (plus, sp) = theta_up1_char(&phi, &eta, Sign::Plus, &ctx).unwrap();
            let (minus, sm) = theta_up1_char(&phi, &eta, Sign::Minus, &ctx).unwrap();
            assert_eq!((sp, sm), (Sign::Plus, Sign::Minus));
            // Brute force: exactly one extension per side.
            let z = big.central_element();
            for (target, got) in [(Sign::Plus, &plus), (Sign::Minus, &minus)] {
                let matching: Vec<_> = enumerate_characters(&big)
                    .into_iter()
                    .filter(|c| c.eval(&z).unwrap() == target)
                    .filter(|c| restrict_up1(&phi, c, &ctx).unwrap() == eta)
                    .collect();
                assert_eq!(matching, vec![got.clone()]);
            }
            for j in 0..big.rank() {
                assert_eq!(plus.value(j) == minus.value(j), j != b1);
            }
        }
    }

    #[test]
    fn up1_case_two_forces_side() {
        let ctx = ctx1(3);
        let phi = LParameter::new(
            vec![Block::one(Summand::character(ctx.chi_v.clone())), Block::one(atom("D", 2, Sign::Plus))],
            w(3),
            FlagRequest::default(),
        )
        .unwrap();
        let lifted = theta_up1_param(&phi, &ctx).unwrap();
        let z = component_group(&lifted).central_element();
        for eta in enumerate_characters(&component_group(&phi)) {
            let (a, sa) = theta_up1_char(&phi, &eta, Sign::Plus, &ctx).unwrap();
            let (b, sb) = theta_up1_char(&phi, &eta, Sign::Minus, &ctx).unwrap();
            assert_eq!(a, b);
            assert_eq!(sa, sb);
            assert_eq!(sa, a.eval(&z).unwrap());
            assert_eq!(restrict_up1(&phi, &a, &ctx).unwrap(), eta);
        }
    }

    #[test]
    fn up1_bijects_onto_each_side() {
        let phi = phi1_fixture();
        let ctx = ctx1(3);
        let small = enumerate_characters(&component_group(&phi));
        for side in [Sign::Plus, Sign::Minus] {
            let images: BTreeSet<_> = small.iter().map(|e| theta_up1_char(&phi, e, side, &ctx).unwrap().0).collect();
            assert_eq!(images.len(), small.len());
        }
    }

    #[test]
    fn up2_shape_and_requirements() {
        let phi = phi1_fixture();
        let lifted = theta_up2_param(&phi, &ctx2(3)).unwrap();
        assert_eq!(lifted.rank(), 5);
        assert_eq!(component_group(&lifted).rank(), 2);
        assert!(!lifted.is_tempered());
        assert_eq!(lifted.dual_pair_blocks().len(), 1);
        let plain = phi.with_flags(FlagRequest::default()).unwrap();
        assert_eq!(theta_up2_param(&plain, &ctx2(3)), Err(ThetaError::NotSupercuspidalPacket));
    }

    #[test]
    fn up2_eps_prime_table() {
        let phi = phi1_fixture();
        let ctx = ctx2(3);
        let chi_v_inv = Summand::character(ctx.chi_v.inv());
        let mut t = EpsTable::new();
        t.insert(PairKey::new(&atom("A", 1, Sign::Plus), &chi_v_inv), PsiTag::Psi2E, Sign::Minus);
        t.insert(PairKey::new(&atom("B", 2, Sign::Plus), &chi_v_inv), PsiTag::Psi2E, Sign::Minus);
        let backend = EpsBackend::Table(t);
        let o = Oracle::new(&backend);
        for eps in [Sign::Plus, Sign::Minus] {
            assert_eq!(theta_up2_eps_prime(eps, &phi, &ctx, &o).unwrap(), eps);
        }
        let one = EpsBackend::ConstantOne;
        let eta = SChar::new(vec![Sign::Minus, Sign::Plus]);
        assert_eq!(theta_up2_char(&eta, &phi, &ctx, &Oracle::new(&one)).unwrap(), eta);
        let lifted = theta_up2_char(&eta, &phi, &ctx, &o).unwrap();
        assert_eq!(lifted, SChar::new(vec![Sign::Plus, Sign::Minus]));
    }

    #[test]
    fn up2_multiplier_product_is_total_sign() {
        let phi = phi1_fixture();
        let ctx = ctx2(3);
        for seed in 0..20 {
            let backend = EpsBackend::Hashed { seed };
            let o = Oracle::new(&backend);
            let eta = SChar::trivial(2);
            let lifted = theta_up2_char(&eta, &phi, &ctx, &o).unwrap();
            let ratio: Sign = lifted.values.iter().product();
            assert_eq!(ratio, theta_up2_eps_prime(Sign::Plus, &phi, &ctx, &o).unwrap());
            assert_eq!(theta_up2_char_inverse(&lifted, &phi, &ctx, &o).unwrap(), eta);
            let twice = theta_up2_char(&lifted, &phi, &ctx, &o).unwrap();
            // The multiplier squares to one, in canonical coordinates of S_phi.
            assert_eq!(twice, eta);
        }
    }
}
