use ggp_core::component::{component_group, packet_side};
use ggp_core::dsl::{load, Workspace};
use ggp_core::epsilon::{EpsBackend, Oracle};
use ggp_core::recipe::{closed_form_pair, doubled_eta, main_multiplicity, Multiplicity, PairSource};
use ggp_core::verify::random::Sampler;
use ggp_core::verify::seesaw::{seesaw_pairs, Faults};
use ggp_core::Sign;
use proptest::prelude::*;

fn fixture(name: &str) -> Workspace {
    let path = format!("{}/tests/dsl_corpus/{name}", env!("CARGO_MANIFEST_DIR"));
    load(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn fixture_pair_is_the_seesaw_singleton() {
    let ws = fixture("ok_01_ggp_fixture.ggp");
    let (phi1, phi) = (ws.param("phi1").unwrap(), ws.param("phi").unwrap());
    let setup = ws.setup(false).unwrap();
    for seed in [0, 42, 1234] {
        let backend = EpsBackend::Hashed { seed };
        let report = main_multiplicity(phi1, phi, &setup, &backend).unwrap();
        let Multiplicity::One(pair) = &report.case else { panic!("expected One, got {}", report.case.name()) };
        assert_eq!(pair.source, PairSource::ClosedForm);
        assert_eq!(pair.upper.side, pair.lower.side);
        let found = seesaw_pairs(phi1, phi, &setup, &Oracle::new(&backend), &Faults::none()).unwrap();
        assert_eq!(found.len(), 1, "seed {seed}");
        assert_eq!(found[0].upper.character, pair.upper.character);
        assert_eq!(found[0].lower.character, pair.lower.character);
    }
}

#[test]
fn constant_backend_gives_trivial_characters() {
    let ws = fixture("ok_01_ggp_fixture.ggp");
    let report =
        main_multiplicity(ws.param("phi1").unwrap(), ws.param("phi").unwrap(), &ws.setup(false).unwrap(), &EpsBackend::ConstantOne)
            .unwrap();
    let pair = report.case.pair().unwrap();
    assert!(pair.upper.character.is_trivial());
    assert!(pair.lower.character.is_trivial());
    assert_eq!(pair.upper.side, Sign::Plus);
}

#[test]
fn zero_case_has_no_pullback() {
    let ws = fixture("ok_02_zero_case.ggp");
    let (phi1, phi) = (ws.param("phi1").unwrap(), ws.param("phi").unwrap());
    let setup = ws.setup(false).unwrap();
    let backend = EpsBackend::Hashed { seed: 42 };
    let report = main_multiplicity(phi1, phi, &setup, &backend).unwrap();
    assert_eq!(report.case, Multiplicity::Zero);
    assert_eq!(report.chi_w_multiplicity, 0);
    assert!(seesaw_pairs(phi1, phi, &setup, &Oracle::new(&backend), &Faults::none()).unwrap().is_empty());
}

#[test]
fn doubled_fixture_needs_certification() {
    let ws = fixture("ok_09_doubled_chi_w.ggp");
    let (phi1, phi) = (ws.param("phi1").unwrap(), ws.param("phi").unwrap());
    let backend = EpsBackend::Hashed { seed: 42 };
    let uncertified = main_multiplicity(phi1, phi, &ws.setup(false).unwrap(), &backend).unwrap();
    assert_eq!(uncertified.case.name(), "AtLeastOne");
    assert_eq!(uncertified.chi_w_multiplicity, 2);

    let setup = ws.setup(true).unwrap();
    let certified = main_multiplicity(phi1, phi, &setup, &backend).unwrap();
    let Multiplicity::One(pair) = &certified.case else { panic!() };
    assert_eq!(pair.source, PairSource::DoubledChiW);
    let phi2 = certified.recovered_phi2.as_ref().unwrap();
    let (eta_d, eta_h) = doubled_eta(phi1, phi2, &setup, &Oracle::new(&backend)).unwrap();
    assert_eq!((&eta_d, &eta_h), (&pair.upper.character, &pair.lower.character));
    // the witness found without certification is the same pair
    let witness = uncertified.case.pair().unwrap();
    assert_eq!(witness.upper.character, eta_d);
    assert_eq!(witness.lower.character, eta_h);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_pair_lives_on_one_inner_form(seed in any::<u64>(), n in 1u32..=5) {
        let mut s = Sampler::new(seed);
        let setup = s.setup(n, seed % 2 == 0);
        let inst = s.instance_with(&setup, Default::default());
        let backend = EpsBackend::Hashed { seed };
        let pair = closed_form_pair(&inst.phi1, &inst.phi, &setup, &Oracle::new(&backend)).unwrap();
        prop_assert_eq!(pair.upper.side, pair.lower.side);
        prop_assert_eq!(packet_side(&pair.lower.character, &inst.phi).unwrap(), pair.lower.side);
    }

    #[test]
    fn seesaw_singleton_matches_closed_form_for_odd_n(seed in any::<u64>(), k in 0u32..=2) {
        let n = 2 * k + 1;
        let mut s = Sampler::new(seed);
        let setup = s.setup(n, false);
        let inst = s.instance_with(&setup, Default::default());
        let backend = EpsBackend::Hashed { seed };
        let oracle = Oracle::new(&backend);
        let pair = closed_form_pair(&inst.phi1, &inst.phi, &setup, &oracle).unwrap();
        let found = seesaw_pairs(&inst.phi1, &inst.phi, &setup, &oracle, &Faults::none()).unwrap();
        prop_assert_eq!(found.len(), 1);
        prop_assert_eq!(&found[0].upper.character, &pair.upper.character);
        prop_assert_eq!(&found[0].lower.character, &pair.lower.character);
    }

    #[test]
    fn packet_splits_evenly_unless_central_element_is_trivial(seed in any::<u64>(), r in 1usize..=5) {
        let phi = Sampler::new(seed).with_blocks(r);
        let s = component_group(&phi);
        let chars = s.characters();
        let plus = chars.iter().filter(|c| packet_side(c, &phi).unwrap() == Sign::Plus).count();
        if s.central_element().is_identity() {
            prop_assert_eq!(plus, chars.len());
        } else {
            prop_assert_eq!(2 * plus, chars.len());
        }
    }
}
