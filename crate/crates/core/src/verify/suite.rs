//! Randomized property suite. Every check is an exact identity; failures are
//! report entries carrying the seed that reproduces them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::component::{component_group, packet_side};
use crate::epsilon::{EpsBackend, Oracle};
use crate::param::{Form, GroupTag, LParameter};
use crate::recipe::{closed_form_pair, doubled_eta, main_multiplicity, DistinguishedPair, GgpSetup, Multiplicity, RecipeError};
use crate::sign::Sign;
use crate::theta::{
    contains_chi_v, restrict_up1, theta_up1_char, theta_up1_param, theta_up2_char, theta_up2_char_inverse, theta_up2_param,
};
use crate::verify::random::{Instance, Phi2Shape, Sampler};
use crate::verify::seesaw::{seesaw_pairs, transport, Faults};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: u32) -> Parity {
        if n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Hashed,
    One,
    /// A table holding exactly the signs the hashed backend would give, so a
    /// lookup outside the recorded keys is an error.
    Table,
}

impl BackendKind {
    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Hashed => "hashed",
            BackendKind::One => "one",
            BackendKind::Table => "table",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seeds: Vec<u64>,
    pub max_rank: u32,
    pub parities: Vec<Parity>,
    pub backends: Vec<BackendKind>,
    pub identify_chi: bool,
    pub faults: Faults,
}

impl SuiteConfig {
    pub fn empty() -> SuiteConfig {
        SuiteConfig {
            seeds: Vec::new(),
            max_rank: 0,
            parities: Vec::new(),
            backends: Vec::new(),
            identify_chi: false,
            faults: Faults::none(),
        }
    }

    /// Seeds `first..first + count`, both parities.
    pub fn new(first: u64, count: u64, max_rank: u32, backends: Vec<BackendKind>) -> SuiteConfig {
        SuiteConfig {
            seeds: (first..first + count).collect(),
            max_rank,
            parities: vec![Parity::Odd, Parity::Even],
            backends,
            identify_chi: false,
            faults: Faults::none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteEntry {
    pub property: String,
    pub seed: u64,
    pub n: u32,
    pub parity: Parity,
    pub backend: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub entries: Vec<SuiteEntry>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    /// Seed of the first failure.
    pub first_failure: Option<u64>,
}

impl SuiteReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SuiteEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    /// Counts keyed by `property` and optionally restricted to one parity.
    pub fn tally(&self, parity: Option<Parity>) -> BTreeMap<String, Tally> {
        let mut out: BTreeMap<String, Tally> = BTreeMap::new();
        for e in self.entries.iter().filter(|e| parity.is_none_or(|p| p == e.parity)) {
            let t = out.entry(e.property.clone()).or_default();
            if e.pass {
                t.passed += 1;
            } else {
                t.failed += 1;
                t.first_failure.get_or_insert(e.seed);
            }
        }
        out
    }

    pub fn property(&self, name: &str) -> impl Iterator<Item = &SuiteEntry> {
        let name = name.to_string();
        self.entries.iter().filter(move |e| e.property == name)
    }
}

/// Property names, in report order.
pub const PROPERTIES: [&str; 9] = [
    "packet_sides",
    "theta_shape",
    "restriction_round_trip",
    "central_value",
    "trichotomy",
    "recipe_seesaw_agreement",
    "doubled_chi_w_agreement",
    "trace_replay",
    "mutation",
];

type Check = Result<(bool, String), RecipeError>;

fn verdict(ok: bool, detail: impl Into<String>) -> Check {
    Ok((ok, detail.into()))
}

/// The instance seed for one `(seed, parity)` cell.
pub fn instance_seed(seed: u64, parity: Parity) -> u64 {
    seed.wrapping_mul(2).wrapping_add(if parity == Parity::Even { 1 } else { 0 })
}

fn pick_rank(sampler: &mut Sampler, parity: Parity, max_rank: u32) -> Option<u32> {
    use rand::Rng;
    let ranks: Vec<u32> = (1..=max_rank).filter(|&n| Parity::of(n) == parity).collect();
    if ranks.is_empty() {
        return None;
    }
    Some(ranks[sampler.rng().random_range(0..ranks.len())])
}

fn same_pair(a: &DistinguishedPair, b: &DistinguishedPair) -> bool {
    a.upper == b.upper && a.lower == b.lower
}

fn describe(p: &DistinguishedPair) -> String {
    format!("{} on side {} / {} on side {}", p.upper.character, p.upper.side, p.lower.character, p.lower.side)
}

fn packet_sides(sampler: &mut Sampler, r: usize) -> Check {
    let phi = sampler.with_blocks(r);
    let s = component_group(&phi);
    let chars = s.characters();
    let z = s.central_element();
    let plus = chars.iter().filter(|e| e.eval(&z) == Ok(Sign::Plus)).count();
    let want_plus = if z.is_identity() { chars.len() } else { chars.len() / 2 };
    verdict(chars.len() == 1 << r && s.rank() == r && plus == want_plus, format!("{phi}: {} characters, {plus} on side +1", chars.len()))
}

fn genuine_on(phi: &LParameter, rank: u32) -> bool {
    let g = phi.group();
    g.form == Form::Hermitian && g.rank == rank && g.is_genuine() && g.duality == GroupTag::required_sign(rank) && phi.dim() == rank
}

fn theta_shape(sampler: &mut Sampler, setup: &GgpSetup) -> Check {
    use rand::Rng;
    let n = setup.n;
    let ctx = setup.lift_one();
    let case_two = sampler.rng().random_bool(0.3);
    let src = sampler.theta_source(setup, case_two.then_some(&ctx.chi_v));
    let up1 = theta_up1_param(&src, &ctx)?;
    let grow = component_group(&up1).rank() as i64 - component_group(&src).rank() as i64;
    let want = if contains_chi_v(&src, &ctx) { 0 } else { 1 };
    let phi1 = sampler.phi1(setup);
    let up2 = theta_up2_param(&phi1, &setup.lift_two())?;
    let same_rank = component_group(&up2).rank() == component_group(&phi1).rank();
    verdict(genuine_on(&up1, n + 1) && grow == want && genuine_on(&up2, n + 2) && same_rank, format!("{src} -> {up1}; {phi1} -> {up2}"))
}

fn restriction_round_trip(sampler: &mut Sampler, setup: &GgpSetup, oracle: &Oracle) -> Check {
    use rand::Rng;
    let ctx = setup.lift_one();
    let case_two = sampler.rng().random_bool(0.3);
    let src = sampler.theta_source(setup, case_two.then_some(&ctx.chi_v));
    for eta in component_group(&src).characters() {
        for eps in [Sign::Plus, Sign::Minus] {
            let (big, _) = theta_up1_char(&src, &eta, eps, &ctx)?;
            if restrict_up1(&src, &big, &ctx)? != eta {
                return verdict(false, format!("{src}: {eta} with side {eps} does not restrict back"));
            }
        }
    }
    let phi1 = sampler.phi1(setup);
    let up2 = setup.lift_two();
    for eta in component_group(&phi1).characters() {
        let big = theta_up2_char(&eta, &phi1, &up2, oracle)?;
        if theta_up2_char_inverse(&big, &phi1, &up2, oracle)? != eta {
            return verdict(false, format!("{phi1}: rank-two lift of {eta} does not invert"));
        }
    }
    verdict(true, format!("{src}; {phi1}"))
}

fn mult_one(sampler: &mut Sampler, setup: &GgpSetup) -> Instance {
    sampler.instance_with(setup, Phi2Shape { multiplicities: true, ..Phi2Shape::default() })
}

fn central_value(inst: &Instance, oracle: &Oracle) -> Check {
    let p = closed_form_pair(&inst.phi1, &inst.phi, &inst.setup, oracle)?;
    let d = packet_side(&p.upper.character, &p.upper.parameter)?;
    let h = packet_side(&p.lower.character, &p.lower.parameter)?;
    verdict(d == h, format!("eta_dia(z) = {d}, eta_heart(z) = {h}"))
}

fn trichotomy(inst: &Instance, backend: &EpsBackend, oracle: &Oracle, faults: &Faults) -> Check {
    let m = inst.phi.multiplicity_of(&inst.setup.chi_w_summand());
    let report = main_multiplicity(&inst.phi1, &inst.phi, &inst.setup, backend)?;
    let pairs = seesaw_pairs(&inst.phi1, &inst.phi, &inst.setup, oracle, faults)?;
    let zero = report.case == Multiplicity::Zero;
    verdict(
        zero == (m == 0) && pairs.is_empty() == (m == 0),
        format!("chi_W multiplicity {m}, case {}, {} see-saw candidates", report.case.name(), pairs.len()),
    )
}

fn agreement(inst: &Instance, oracle: &Oracle, faults: &Faults) -> Check {
    let closed = closed_form_pair(&inst.phi1, &inst.phi, &inst.setup, oracle)?;
    let pairs = seesaw_pairs(&inst.phi1, &inst.phi, &inst.setup, oracle, faults)?;
    let forward = transport(&inst.phi1, &inst.phi, &inst.setup, oracle, faults)?.and_then(|t| t.pair);
    let unique = pairs.len() == 1 && same_pair(&pairs[0], &closed);
    let forward_ok = forward.as_ref().is_some_and(|p| same_pair(p, &closed));
    let detail = match (&forward, unique) {
        (Some(f), _) if !forward_ok => format!("closed form {} vs see-saw {}", describe(&closed), describe(f)),
        (None, _) => format!("closed form {}; see-saw members on different sides", describe(&closed)),
        (_, false) => format!("{} see-saw candidates", pairs.len()),
        _ => describe(&closed),
    };
    verdict(unique && forward_ok, detail)
}

fn doubled_agreement(inst: &Instance, oracle: &Oracle, faults: &Faults) -> Check {
    let mut setup = inst.setup.clone();
    setup.irreducibility_certified = true;
    let phi2 = inst.phi2.as_ref().expect("doubling instances carry phi_2");
    let (d, h) = doubled_eta(&inst.phi1, phi2, &setup, oracle)?;
    let pairs = seesaw_pairs(&inst.phi1, &inst.phi, &setup, oracle, faults)?;
    let ok = pairs.len() == 1 && pairs[0].upper.character == d && pairs[0].lower.character == h;
    let seesaw: Vec<String> = pairs.iter().map(describe).collect();
    verdict(ok, format!("closed form ({d}, {h}); see-saw [{}]", seesaw.join("; ")))
}

fn trace_replay(inst: &Instance, backend: &EpsBackend, oracle: &Oracle, faults: &Faults) -> Check {
    match transport(&inst.phi1, &inst.phi, &inst.setup, oracle, faults)? {
        Some(trace) => verdict(trace.replay(backend)?, format!("{} steps, {} oracle calls", trace.steps.len(), trace.calls.len())),
        None => verdict(false, "nothing to transport"),
    }
}

struct Cell {
    seed: u64,
    n: u32,
    parity: Parity,
}

/// Run every backend-dependent check for one cell.
fn backend_checks(cell: &Cell, config: &SuiteConfig, backend: &EpsBackend) -> Vec<(&'static str, Check)> {
    let oracle = Oracle::new(backend);
    let mut sampler = Sampler::new(instance_seed(cell.seed, cell.parity));
    let setup = sampler.setup(cell.n, config.identify_chi);
    let faults = &config.faults;
    let one = mult_one(&mut sampler, &setup);
    let mixed = sampler.instance(&setup);
    let doubled = sampler.instance_with(&setup, Phi2Shape { doubling_character: true, ..Phi2Shape::default() });
    vec![
        ("restriction_round_trip", restriction_round_trip(&mut sampler, &setup, &oracle)),
        ("central_value", central_value(&one, &oracle)),
        ("trichotomy", trichotomy(&mixed, backend, &oracle, faults)),
        ("recipe_seesaw_agreement", agreement(&one, &oracle, faults)),
        ("doubled_chi_w_agreement", doubled_agreement(&doubled, &oracle, faults)),
        ("trace_replay", trace_replay(&one, backend, &oracle, faults)),
    ]
}

fn hashed_seed(seed: u64) -> u64 {
    seed
}

fn backend_for(kind: BackendKind, cell: &Cell, config: &SuiteConfig) -> EpsBackend {
    match kind {
        BackendKind::Hashed => EpsBackend::Hashed { seed: hashed_seed(cell.seed) },
        BackendKind::One => EpsBackend::ConstantOne,
        BackendKind::Table => {
            // Record every lookup the hashed run makes, then replay from the table.
            let hashed = EpsBackend::Hashed { seed: hashed_seed(cell.seed) };
            let oracle = Oracle::new(&hashed);
            let mut sampler = Sampler::new(instance_seed(cell.seed, cell.parity));
            let setup = sampler.setup(cell.n, config.identify_chi);
            let one = mult_one(&mut sampler, &setup);
            let mixed = sampler.instance(&setup);
            let doubled = sampler.instance_with(&setup, Phi2Shape { doubling_character: true, ..Phi2Shape::default() });
            let _ = restriction_round_trip(&mut sampler, &setup, &oracle);
            let _ = closed_form_pair(&one.phi1, &one.phi, &one.setup, &oracle);
            let _ = seesaw_pairs(&one.phi1, &one.phi, &one.setup, &oracle, &config.faults);
            let _ = transport(&one.phi1, &one.phi, &one.setup, &oracle, &config.faults);
            let _ = seesaw_pairs(&mixed.phi1, &mixed.phi, &mixed.setup, &oracle, &config.faults);
            let _ = closed_form_pair(&mixed.phi1, &mixed.phi, &mixed.setup, &oracle);
            let _ = seesaw_pairs(&doubled.phi1, &doubled.phi, &doubled.setup, &oracle, &config.faults);
            let mut certified = doubled.setup.clone();
            certified.irreducibility_certified = true;
            if let Some(phi2) = &doubled.phi2 {
                let _ = doubled_eta(&doubled.phi1, phi2, &certified, &oracle);
            }
            EpsBackend::Table(oracle.recorded_table())
        }
    }
}

/// Does `faults` change the outcome of the agreement check on this cell?
fn mutation_breaks(cell: &Cell, config: &SuiteConfig, faults: &Faults) -> Result<bool, RecipeError> {
    let backend = EpsBackend::Hashed { seed: hashed_seed(cell.seed) };
    let oracle = Oracle::new(&backend);
    let mut sampler = Sampler::new(instance_seed(cell.seed, cell.parity));
    let setup = sampler.setup(cell.n, config.identify_chi);
    let one = mult_one(&mut sampler, &setup);
    let (clean, _) = agreement(&one, &oracle, &Faults::none())?;
    let (faulty, _) = agreement(&one, &oracle, faults)?;
    Ok(clean && !faulty)
}

pub fn run_property_suite(config: &SuiteConfig) -> SuiteReport {
    let mut entries = Vec::new();
    let push = |entries: &mut Vec<SuiteEntry>, property: &str, cell: &Cell, backend: &str, check: Check| {
        let (pass, detail) = match check {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        entries.push(SuiteEntry {
            property: property.to_string(),
            seed: cell.seed,
            n: cell.n,
            parity: cell.parity,
            backend: backend.to_string(),
            pass,
            detail,
        });
    };
    let mut cells = Vec::new();
    for &parity in &config.parities {
        for &seed in &config.seeds {
            let mut sampler = Sampler::new(instance_seed(seed, parity) ^ 0x5eed);
            let Some(n) = pick_rank(&mut sampler, parity, config.max_rank) else { continue };
            cells.push(Cell { seed, n, parity });
        }
    }
    for cell in &cells {
        let mut sampler = Sampler::new(instance_seed(cell.seed, cell.parity) ^ 0xb10c);
        let r = 1 + (cell.seed % config.max_rank.clamp(1, 5) as u64) as usize;
        push(&mut entries, "packet_sides", cell, "none", packet_sides(&mut sampler, r));
        let setup = sampler.setup(cell.n, config.identify_chi);
        push(&mut entries, "theta_shape", cell, "none", theta_shape(&mut sampler, &setup));
        for &kind in &config.backends {
            let backend = backend_for(kind, cell, config);
            for (property, check) in backend_checks(cell, config, &backend) {
                push(&mut entries, property, cell, kind.name(), check);
            }
        }
    }
    if config.faults.is_none() && !cells.is_empty() {
        for (name, faults) in Faults::singles() {
            for &parity in &config.parities {
                let parity_cells: Vec<&Cell> = cells.iter().filter(|c| c.parity == parity).collect();
                let Some(first) = parity_cells.first() else { continue };
                let hit = parity_cells.iter().find(|c| mutation_breaks(c, config, &faults).unwrap_or(false));
                let cell = hit.copied().unwrap_or(first);
                let detail = match hit {
                    Some(c) => format!("{name} breaks agreement at seed {}", c.seed),
                    None => format!("{name} went unnoticed on {} instances", parity_cells.len()),
                };
                push(&mut entries, "mutation", cell, "hashed", verdict(hit.is_some(), detail));
            }
        }
    }
    SuiteReport { entries }
}
