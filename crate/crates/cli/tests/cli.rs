mod common;

use common::{fixtures, rrsp, stdout, GOLDEN};
use rrsp::io::parse_instance;
use rrsp::model::validate_instance;

fn line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
        .unwrap_or_else(|| panic!("no `{key}` line in\n{text}"))
}

#[test]
fn solves_the_single_arc_instance() {
    let out = rrsp(&["solve", "trivial.json"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "OPT = 4\nfirst_stage = [0]\nworst_scenario = {0: 1}\nrecovery = [0]\nexplored = 1\n"
    );
}

#[test]
fn overrides_change_the_rule_and_budget() {
    let base = stdout(&rrsp(&["solve", "diamond.json"]));
    assert_eq!(line(&base, "OPT"), "6");
    // Committing to the detour 0 -> 1 -> 2 -> 3 costs 3; one new arc then
    // reaches either plain route, and one deviation can only spoil one of them.
    let disc = stdout(&rrsp(&["solve", "diamond.json", "--budget", "disc:1", "--kind", "incl", "--k", "1"]));
    assert_eq!(line(&disc, "OPT"), "5");
    assert_eq!(line(&disc, "first_stage"), "[0 4 3]");
    let none = stdout(&rrsp(&["solve", "diamond.json", "--budget", "cont:0"]));
    assert_eq!(line(&none, "OPT"), "4");
}

#[test]
fn chain_on_four_nodes_certifies_at_one_quarter() {
    let out = rrsp(&["verify", "thm1", "chain4.edges", "--kind", "sym", "--budget", "cont:1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(line(&text, "OPT"), "1/4");
    assert_eq!(line(&text, "verdict"), "PASS");
}

#[test]
fn star_has_no_hamiltonian_path() {
    let text = stdout(&rrsp(&["verify", "thm1", "star4.edges", "--kind", "incl"]));
    assert_eq!(line(&text, "oracle"), "no hamiltonian path");
    assert_eq!(line(&text, "verdict"), "PASS");
    let text = stdout(&rrsp(&["verify", "discrete", "star4.edges", "--kind", "excl"]));
    assert_eq!(line(&text, "OPT"), "1");
    assert_eq!(stdout(&rrsp(&["oracle", "hp", "star4.edges"])), "no hamiltonian path\n");
}

#[test]
fn reduced_formula_solves_to_one_over_m() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("f.json");
    let meta = dir.path().join("f.meta.json");
    let out = rrsp(&[
        "reduce",
        "sat3",
        "sat.cnf",
        "--q",
        "1",
        "--kind",
        "incl",
        "--out",
        inst.to_str().unwrap(),
        "--meta",
        meta.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed = parse_instance(&std::fs::read_to_string(&inst).unwrap()).unwrap();
    assert!(validate_instance(&parsed).is_empty());
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&meta).unwrap()).unwrap();
    assert_eq!(meta["m"], 3);
    assert_eq!(meta["gadget_index"].as_array().unwrap().len(), 3);

    let text = stdout(&rrsp(&["solve", inst.to_str().unwrap()]));
    assert_eq!(line(&text, "OPT"), "1/3");
}

#[test]
fn report_file_matches_the_printed_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = rrsp(&["verify", "lemma2", "unsat.cnf", "--q", "1", "--kind", "excl", "--report", report.to_str().unwrap()]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["verdict"], "PASS");
    assert_eq!(r["opt"], "1/2");
    assert_eq!(r["opt"].as_str().unwrap(), line(&stdout(&out), "OPT"));
}

#[test]
fn exit_codes() {
    assert_eq!(rrsp(&["solve", "trivial.json"]).status.code(), Some(0));
    let capped = rrsp(&["solve", "diamond.json", "--path-cap", "1"]);
    assert_eq!(capped.status.code(), Some(1));
    assert!(stdout(&capped).starts_with("overflow:"));
    assert_eq!(rrsp(&["solve", "missing.json"]).status.code(), Some(2));
    assert_eq!(rrsp(&["solve", "chain4.edges"]).status.code(), Some(2));
    assert_eq!(rrsp(&["reduce", "sat3", "sat.cnf", "--q", "4", "--kind", "incl"]).status.code(), Some(2));
    assert_eq!(rrsp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_documents_report_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"nodes\": 2,\n  \"color\": 1\n}\n").unwrap();
    let out = rrsp(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn generated_documents_parse_and_round_trip() {
    let text = stdout(&rrsp(&["gen", "random-dag", "--nodes", "7", "--arcs", "12", "--seed", "3"]));
    let inst = parse_instance(&text).unwrap();
    assert!(validate_instance(&inst).is_empty());
    assert_eq!(rrsp::io::serialize_instance(&inst), text);
    let again = stdout(&rrsp(&["gen", "random-dag", "--nodes", "7", "--arcs", "12", "--seed", "4"]));
    assert_ne!(text, again);
}

#[test]
fn golden_commands_are_repeatable() {
    assert!(fixtures().join("trivial.json").exists());
    for args in GOLDEN {
        let a = rrsp(args);
        let b = rrsp(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code(), "{args:?}");
        assert_ne!(a.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
    }
}
