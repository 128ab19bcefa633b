use super::{run_with_env, EXIT_DIAGNOSTIC, EXIT_HYPOTHESIS, EXIT_OK, EXIT_VERIFY};
use serde_json::Value;

fn corpus(name: &str) -> String {
    format!("{}/../core/tests/dsl_corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = run_with_env(std::iter::once("ggp").chain(args.iter().copied()), None);
    let v = if out.stdout.is_empty() { Value::Null } else { serde_json::from_str(&out.stdout).expect("stdout is JSON") };
    (out.code, v)
}

#[test]
fn zero_case_fixture() {
    let (code, v) = run(&["ggp", "phi1", "phi", "--input", &corpus("ok_02_zero_case.ggp")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["case"], "Zero");
    assert_eq!(v["schema"], "ggp-report/1");
    assert_eq!(v["pair"], Value::Null);
}

#[test]
fn multiplicity_one_fixture_reports_a_pair_on_one_side() {
    let (code, v) = run(&["ggp", "phi1", "phi", "--input", &corpus("ok_01_ggp_fixture.ggp"), "--seed", "42", "--trace"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["case"], "One");
    assert_eq!(v["pair"]["upper"]["side"], v["pair"]["lower"]["side"]);
    assert_eq!(v["trace"]["pair"]["upper"], v["pair"]["upper"]);
    assert_eq!(v["trace"]["pair"]["lower"], v["pair"]["lower"]);
    assert!(v["audit"].as_array().unwrap().iter().all(|c| c["psi"] == "psi2E"));
}

#[test]
fn constant_backend_gives_trivial_pair() {
    let (_, v) = run(&["ggp", "phi1", "phi", "--input", &corpus("ok_01_ggp_fixture.ggp"), "--backend", "one"]);
    for side in ["upper", "lower"] {
        let values = v["pair"][side]["character"]["values"].as_array().unwrap();
        assert!(values.iter().all(|x| x["value"] == "+1"));
        assert_eq!(v["pair"][side]["side"], "+1");
    }
}

#[test]
fn packet_on_rank_two() {
    let (code, v) = run(&["packet", "p", "--input", &corpus("ok_03_packet.ggp")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["members"].as_array().unwrap().len(), 4);
    assert_eq!(v["per_side"]["+1"], 2);
    assert_eq!(v["per_side"]["-1"], 2);
}

#[test]
fn theta_tables_cover_every_character() {
    let (code, v) = run(&["theta", "up1", "phi2", "--input", &corpus("ok_05_identified.ggp")]);
    assert_eq!(code, EXIT_OK);
    // one character, two epsilons, two requested sides
    assert_eq!(v["map"].as_array().unwrap().len(), 4);
    assert_eq!(v["context"]["chi_w_text"], "chi^2");
    let (code, v) = run(&["theta", "up2", "phi1", "--input", &corpus("ok_05_identified.ggp")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["target"]["rank"], 4);
}

#[test]
fn identify_chi_flag_rewrites_the_characters_block() {
    let (_, plain) = run(&["theta", "up2", "phi1", "--input", &corpus("ok_01_ggp_fixture.ggp")]);
    let (_, ident) = run(&["theta", "up2", "phi1", "--input", &corpus("ok_01_ggp_fixture.ggp"), "--identify-chi"]);
    assert_eq!(plain["context"]["chi_v_text"], "chi_V");
    assert_eq!(ident["context"]["chi_v_text"], "chi^5");
}

#[test]
fn run_executes_tasks_in_order() {
    let (code, v) = run(&["run", "--input", &corpus("ok_05_identified.ggp")]);
    assert_eq!(code, EXIT_OK);
    let tasks = v["tasks"].as_array().unwrap();
    assert_eq!(tasks.len(), 2);
    assert_eq!(tasks[0]["result"]["step"], "up1");
    assert_eq!(tasks[1]["result"]["step"], "up2");
}

#[test]
fn table_backend_comes_from_the_document() {
    let (code, v) = run(&["theta", "up2", "phi1", "--input", &corpus("ok_04_epsilon_table.ggp")]);
    assert_eq!(code, EXIT_OK);
    let audit = v["audit"].as_array().unwrap();
    assert!(audit.iter().any(|c| c["key"] == "(A, chi_V^-1)" && c["sign"] == "-1"));
}

#[test]
fn missing_table_entry_is_a_diagnostic() {
    let (code, v) = run(&["ggp", "phi1", "phi", "--input", &corpus("ok_01_ggp_fixture.ggp"), "--backend", "table"]);
    assert_eq!(code, EXIT_DIAGNOSTIC);
    assert!(v["error"]["message"].as_str().unwrap().contains("epsilon"));
}

#[test]
fn exit_codes() {
    let (code, v) = run(&["packet", "p", "--input", &corpus("syntax_01_missing_semicolon.ggp")]);
    assert_eq!(code, EXIT_DIAGNOSTIC);
    assert_eq!((v["error"]["line"].as_u64(), v["error"]["column"].as_u64()), (Some(4), Some(1)));
    let (code, _) = run(&["ggp", "p", "p", "--input", &corpus("ok_03_packet.ggp")]);
    assert_eq!(code, EXIT_HYPOTHESIS);
    let (code, _) = run(&["verify", "--seeds", "3", "--backend", "one"]);
    assert_eq!(code, EXIT_OK);
    let (code, _) = run(&["packet"]);
    assert_eq!(code, EXIT_DIAGNOSTIC);
}

#[test]
fn verify_failures_exit_three() {
    // The hashed backend exposes the even-rank disagreement.
    let (code, v) = run(&["verify", "--seeds", "10", "--max-rank", "2"]);
    assert_eq!(code, EXIT_VERIFY);
    assert_eq!(v["summary"]["odd"]["recipe_seesaw_agreement"]["failed"], 0);
}

#[test]
fn seed_override_from_environment() {
    let args = ["ggp", "verify", "--seeds", "2", "--backend", "one"];
    let from_env = run_with_env(args, Some("7"));
    let explicit = run_with_env(["ggp", "verify", "--seeds", "2", "--backend", "one", "--seed", "7"], None);
    assert_eq!(from_env.stdout, explicit.stdout);
    let flag_wins = run_with_env(["ggp", "verify", "--seeds", "2", "--backend", "one", "--seed", "7"], Some("9"));
    assert_eq!(flag_wins.stdout, explicit.stdout);
    assert_eq!(run_with_env(args, Some("x")).code, EXIT_DIAGNOSTIC);
}

#[test]
fn output_is_key_sorted_and_stable() {
    let go = || run(&["verify", "--seeds", "5", "--seed", "42", "--backend", "one"]);
    let a = run_with_env(["ggp", "verify", "--seeds", "5", "--seed", "42", "--backend", "one"], None);
    assert_eq!(go(), go());
    assert!(a.stdout.starts_with("{\"command\":\"verify\",\"config\":"));
}

#[test]
fn pretty_output_parses_to_the_same_value() {
    let (_, compact) = run(&["packet", "p", "--input", &corpus("ok_03_packet.ggp")]);
    let (_, pretty) = run(&["packet", "p", "--input", &corpus("ok_03_packet.ggp"), "--pretty"]);
    assert_eq!(compact, pretty);
}
