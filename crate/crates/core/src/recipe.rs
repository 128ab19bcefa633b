//! Distinguished characters for the Bessel and Fourier-Jacobi problems, and
//! the multiplicity of `Hom_{U(V_{n+1})}(pi_{n+2}, pi_{n+1})` for
//! `theta(phi_1) x phi`.

use serde::Serialize;
use thiserror::Error;

use crate::component::{component_group, ComponentError, SChar};
use crate::epsilon::{tensor, EpsBackend, EpsError, FormalSum, Oracle, OracleCall, PsiTag};
use crate::param::{BaseFieldData, CharE, FlagRequest, Form, LParameter, ParamError, StandardCharacters, Summand};
use crate::sign::Sign;
use crate::theta::{theta_up1_param, theta_up2_param, RankStep, ThetaContext, ThetaError};
use crate::verify::seesaw;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RecipeError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("the parameter does not contain chi_W")]
    ChiWAbsent,
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Eps(#[from] EpsError),
    #[error(transparent)]
    Component(#[from] ComponentError),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Everything fixed once `n` and the splitting characters are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GgpSetup {
    pub n: u32,
    pub chars: StandardCharacters,
    pub base: BaseFieldData,
    /// The caller vouches that nonzero theta lifts from `Pi_theta(phi_2)` back to
    /// U(W_n) are irreducible.
    pub irreducibility_certified: bool,
}

impl GgpSetup {
    pub fn new(n: u32, chars: StandardCharacters) -> GgpSetup {
        GgpSetup { n, chars, base: BaseFieldData::default(), irreducibility_certified: false }
    }

    pub fn n_is_odd(&self) -> bool {
        self.n % 2 == 1
    }

    /// `psi_2^E` for n odd, `psi^E` for n even.
    pub fn fj_psi(&self) -> PsiTag {
        fj_psi(self.n)
    }

    /// U(V_{n+2}) x U(W_n) with `(chi_W, chi_V)`; defines `theta(phi_1)`.
    pub fn lift_two(&self) -> ThetaContext {
        ThetaContext::new(self.chars.chi_v.clone(), self.chars.chi_w.clone(), RankStep::Two)
    }

    /// U(V_{n+1}) x U(W_n) with `(chi_W, chi_V chi^-1)`; defines `theta(phi_2)`.
    pub fn lift_one(&self) -> ThetaContext {
        ThetaContext::new(&self.chars.chi_v * &self.chars.chi.inv(), self.chars.chi_w.clone(), RankStep::One)
    }

    /// The same two pairs with every character inverted.
    pub fn lift_two_inverted(&self) -> ThetaContext {
        let c = self.lift_two();
        ThetaContext::new(c.chi_v.inv(), c.chi_w.inv(), c.step)
    }

    pub fn lift_one_inverted(&self) -> ThetaContext {
        let c = self.lift_one();
        ThetaContext::new(c.chi_v.inv(), c.chi_w.inv(), c.step)
    }

    /// `chi_V chi^-1`, the character whose presence in phi_2 doubles chi_W in theta(phi_2).
    pub fn doubling_character(&self) -> CharE {
        self.lift_one().chi_v
    }

    pub fn chi_w_summand(&self) -> Summand {
        Summand::character(self.chars.chi_w.clone())
    }

    pub fn check(&self) -> Result<(), RecipeError> {
        if self.n == 0 {
            return Err(RecipeError::HypothesisViolation("n must be at least 1".into()));
        }
        self.lift_two().check(self.n)?;
        self.lift_one().check(self.n)?;
        Ok(())
    }
}

pub fn fj_psi(n: u32) -> PsiTag {
    if n % 2 == 1 {
        PsiTag::Psi2E
    } else {
        PsiTag::PsiE
    }
}

/// `pi(phi, eta)` together with the pure inner form it lives on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PacketMember {
    pub parameter: LParameter,
    pub character: SChar,
    pub side: Sign,
}

impl PacketMember {
    pub fn new(parameter: LParameter, character: SChar) -> Result<PacketMember, ComponentError> {
        let side = character.eval(&component_group(&parameter).central_element())?;
        Ok(PacketMember { parameter, character, side })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairSource {
    /// The closed form for a single copy of chi_W.
    ClosedForm,
    /// The closed form when phi_2 contains chi_V chi^-1.
    DoubledChiW,
    /// Transported through the see-saw from the Fourier-Jacobi base case.
    Seesaw,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishedPair {
    /// Member of `Pi_theta(phi_1)` on U(V_{n+2}).
    pub upper: PacketMember,
    /// Member of `Pi_phi` on U(V_{n+1}).
    pub lower: PacketMember,
    pub source: PairSource,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Zero,
    AtLeastOne(Option<DistinguishedPair>),
    One(DistinguishedPair),
}

impl Multiplicity {
    pub fn name(&self) -> &'static str {
        match self {
            Multiplicity::Zero => "Zero",
            Multiplicity::AtLeastOne(_) => "AtLeastOne",
            Multiplicity::One(_) => "One",
        }
    }

    pub fn pair(&self) -> Option<&DistinguishedPair> {
        match self {
            Multiplicity::Zero => None,
            Multiplicity::AtLeastOne(p) => p.as_ref(),
            Multiplicity::One(p) => Some(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub case: Multiplicity,
    pub chi_w_multiplicity: u32,
    pub lifted_phi1: LParameter,
    pub recovered_phi2: Option<LParameter>,
    pub audit: Vec<OracleCall>,
}

fn eta_values(phi_d: &LParameter, phi_h: &LParameter, twist: &CharE, psi: PsiTag, oracle: &Oracle) -> Result<(SChar, SChar), EpsError> {
    let h_full = FormalSum::of(phi_h).twist(twist);
    let d_full = FormalSum::of(phi_d);
    let d = component_group(phi_d)
        .basis()
        .iter()
        .map(|s| oracle.eps_half(&FormalSum::single(s).tensor(&h_full), psi))
        .collect::<Result<_, _>>()?;
    let h = component_group(phi_h)
        .basis()
        .iter()
        .map(|s| oracle.eps_half(&d_full.tensor(&FormalSum::single(s).twist(twist)), psi))
        .collect::<Result<_, _>>()?;
    Ok((SChar::new(d), SChar::new(h)))
}

/// `eta^spade(a_i) = eps(1/2, phi_d^(i) (x) phi_h, psi_-2^E)` and symmetrically on `b_j`.
pub fn bessel_eta(phi_d: &LParameter, phi_h: &LParameter, oracle: &Oracle) -> Result<(SChar, SChar), EpsError> {
    eta_values(phi_d, phi_h, &CharE::trivial(), PsiTag::PsiNeg2E, oracle)
}

/// `eta^club(a_i) = eps(1/2, phi_d^(i) (x) phi_h (x) chi^-1, psi)` with `psi_2^E` for n
/// odd and `psi^E` for n even; symmetrically on `b_j`.
pub fn fj_eta(phi_d: &LParameter, phi_h: &LParameter, n: u32, chi: &CharE, oracle: &Oracle) -> Result<(SChar, SChar), EpsError> {
    eta_values(phi_d, phi_h, &chi.inv(), fj_psi(n), oracle)
}

/// Write `phi = theta(phi_2)` and return `phi_2 = (phi - chi_W) (x) (chi_V^-1 chi chi_W)^-1`.
pub fn recover_phi2(phi: &LParameter, setup: &GgpSetup) -> Result<LParameter, RecipeError> {
    let chi_w = setup.chi_w_summand();
    if !phi.contains(&chi_w) {
        return Err(RecipeError::ChiWAbsent);
    }
    let rest = phi.remove_once(&chi_w)?;
    let phi2 = rest.tensor_twist(&setup.lift_one().twist().inv())?;
    Ok(phi2.retag(Form::SkewHermitian, FlagRequest::default())?)
}

fn check_phi1(phi1: &LParameter, setup: &GgpSetup) -> Result<(), RecipeError> {
    let g = phi1.group();
    if g.form != Form::SkewHermitian || g.rank != setup.n {
        return Err(RecipeError::HypothesisViolation(format!("phi_1 must live on U(W,{}), got {g}", setup.n)));
    }
    if !phi1.is_supercuspidal_packet() {
        return Err(RecipeError::HypothesisViolation("phi_1 must have a supercuspidal packet".into()));
    }
    Ok(())
}

fn check_phi(phi: &LParameter, setup: &GgpSetup) -> Result<(), RecipeError> {
    let g = phi.group();
    if g.form != Form::Hermitian || g.rank != setup.n + 1 {
        return Err(RecipeError::HypothesisViolation(format!("phi must live on U(V,{}), got {g}", setup.n + 1)));
    }
    if !phi.is_tempered() {
        return Err(RecipeError::HypothesisViolation("phi must be tempered".into()));
    }
    Ok(())
}

/// `eta^dia(a_i) = eps(1/2, phi_1^(i) chi_V^-1 chi_W (x) phi^v, psi)` on `S_theta(phi_1)`.
fn eta_diamond(lifted_phi1: &LParameter, phi: &LParameter, psi: PsiTag, oracle: &Oracle) -> Result<SChar, EpsError> {
    let phi_dual = FormalSum::of(&phi.contragredient());
    let values = component_group(lifted_phi1)
        .basis()
        .iter()
        .map(|c| oracle.eps_half(&FormalSum::single(c).tensor(&phi_dual), psi))
        .collect::<Result<_, _>>()?;
    Ok(SChar::new(values))
}

/// `eps(1/2, phi_1 (x) (phi_2^(j))^v (x) chi^-1, psi)` for the basis summand `s` of phi
/// coming from `phi_2^(j)`.
fn heart_b(phi1: &LParameter, s: &Summand, setup: &GgpSetup, oracle: &Oracle) -> Result<Sign, EpsError> {
    let from_phi2 = s.twist_by(&setup.lift_one().twist().inv());
    let rho = FormalSum::of(phi1).tensor(&FormalSum::single(&from_phi2.dual()).twist(&setup.chars.chi.inv()));
    oracle.eps_half(&rho, setup.fj_psi())
}

/// The closed-form pair for a single copy of chi_W.
pub fn closed_form_pair(phi1: &LParameter, phi: &LParameter, setup: &GgpSetup, oracle: &Oracle) -> Result<DistinguishedPair, RecipeError> {
    let psi = setup.fj_psi();
    let lifted = theta_up2_param(phi1, &setup.lift_two())?;
    let phi2 = recover_phi2(phi, setup)?;
    let eta_d = eta_diamond(&lifted, phi, psi, oracle)?;
    let chi_w = setup.chi_w_summand();
    let phi2_bar_dual = FormalSum::same_type(&phi2).dual().twist(&setup.chars.chi.inv());
    let mut values = Vec::new();
    for s in component_group(phi).basis() {
        let v = if *s == chi_w {
            let lifted_phi1 = FormalSum::of(phi1).twist(&setup.lift_two().twist());
            oracle.eps_half(&lifted_phi1.tensor(&FormalSum::of(&phi.contragredient())), psi)?
                * oracle.eps_half(&FormalSum::of(phi1).tensor(&phi2_bar_dual), psi)?
        } else {
            heart_b(phi1, s, setup, oracle)?
        };
        values.push(v);
    }
    Ok(DistinguishedPair {
        upper: PacketMember::new(lifted, eta_d)?,
        lower: PacketMember::new(phi.clone(), SChar::new(values))?,
        source: PairSource::ClosedForm,
    })
}

/// The pair for phi_2 containing `chi_V chi^-1`: `S_phi_2` and `S_theta(phi_2)` are
/// identified and every basis vector gets the `b_j` formula.
pub fn doubled_eta(phi1: &LParameter, phi2: &LParameter, setup: &GgpSetup, oracle: &Oracle) -> Result<(SChar, SChar), RecipeError> {
    check_phi1(phi1, setup)?;
    if !phi2.contains(&Summand::character(setup.doubling_character())) {
        return Err(RecipeError::HypothesisViolation(format!("phi_2 must contain {}", setup.doubling_character())));
    }
    if !setup.irreducibility_certified {
        return Err(RecipeError::HypothesisViolation("irreducibility of the theta lifts back to U(W_n) is not certified".into()));
    }
    let phi = theta_up1_param(phi2, &setup.lift_one())?;
    let lifted = theta_up2_param(phi1, &setup.lift_two())?;
    let eta_d = eta_diamond(&lifted, &phi, setup.fj_psi(), oracle)?;
    let values = component_group(&phi).basis().iter().map(|s| heart_b(phi1, s, setup, oracle)).collect::<Result<_, _>>()?;
    Ok((eta_d, SChar::new(values)))
}

/// Decide the multiplicity for `theta(phi_1) x phi` and produce the distinguished pair.
pub fn main_multiplicity(
    phi1: &LParameter,
    phi: &LParameter,
    setup: &GgpSetup,
    backend: &EpsBackend,
) -> Result<MultiplicityReport, RecipeError> {
    setup.check()?;
    check_phi1(phi1, setup)?;
    check_phi(phi, setup)?;
    let oracle = Oracle::new(backend);
    let lifted = theta_up2_param(phi1, &setup.lift_two())?;
    let m = phi.multiplicity_of(&setup.chi_w_summand());
    let mut seesaw_calls = Vec::new();
    let (case, recovered) = match m {
        0 => (Multiplicity::Zero, None),
        1 => (Multiplicity::One(closed_form_pair(phi1, phi, setup, &oracle)?), Some(recover_phi2(phi, setup)?)),
        _ => {
            let phi2 = recover_phi2(phi, setup)?;
            if setup.irreducibility_certified {
                let (eta_d, eta_h) = doubled_eta(phi1, &phi2, setup, &oracle)?;
                let pair = DistinguishedPair {
                    upper: PacketMember::new(lifted.clone(), eta_d)?,
                    lower: PacketMember::new(phi.clone(), eta_h)?,
                    source: PairSource::DoubledChiW,
                };
                (Multiplicity::One(pair), Some(phi2))
            } else {
                let trace = seesaw::transport(phi1, phi, setup, &oracle, &seesaw::Faults::default())?;
                let witness = trace.map(|t| {
                    seesaw_calls = t.calls;
                    t.pair
                });
                (Multiplicity::AtLeastOne(witness.flatten()), Some(phi2))
            }
        }
    };
    let mut audit = oracle.calls();
    audit.extend(seesaw_calls);
    audit.sort_by(|a, b| (&a.key, a.psi).cmp(&(&b.key, b.psi)));
    audit.dedup();
    Ok(MultiplicityReport { case, chi_w_multiplicity: m, lifted_phi1: lifted, recovered_phi2: recovered, audit })
}

/// `eps(1/2, rho, psi)` for a plain two-factor product, as used in reports.
pub fn eps_of(x: impl Into<FormalSum>, y: impl Into<FormalSum>, psi: PsiTag, oracle: &Oracle) -> Result<Sign, EpsError> {
    oracle.eps_half(&tensor(x, y), psi)
}
