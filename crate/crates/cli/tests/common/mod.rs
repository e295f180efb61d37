#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Runs the binary from the fixture directory so outputs carry no absolute paths.
pub fn rrsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrsp"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Every subcommand, on fixed inputs and seeds.
pub const GOLDEN: &[&[&str]] = &[
    &["solve", "trivial.json"],
    &["solve", "diamond.json"],
    &["solve", "diamond.json", "--kind", "incl", "--k", "1", "--budget", "disc:1"],
    &["solve", "diamond.json", "--path-cap", "1"],
    &["reduce", "hp", "chain4.edges", "--kind", "sym"],
    &["reduce", "hp", "star4.edges", "--kind", "excl", "--budget", "cont:5/2"],
    &["reduce", "hp-discrete", "star4.edges", "--kind", "incl"],
    &["reduce", "sat3", "sat.cnf", "--q", "1", "--kind", "excl"],
    &["verify", "thm1", "chain4.edges", "--kind", "sym", "--budget", "cont:1"],
    &["verify", "thm1", "star4.edges", "--kind", "excl"],
    &["verify", "discrete", "chain4.edges", "--kind", "incl"],
    &["verify", "discrete", "star4.edges", "--kind", "sym"],
    &["verify", "lemma2", "sat.cnf", "--q", "1", "--kind", "incl"],
    &["verify", "lemma2", "unsat.cnf", "--q", "2", "--kind", "sym"],
    &["oracle", "hp", "chain4.edges"],
    &["oracle", "hp", "star4.edges"],
    &["oracle", "max3sat", "sat.cnf"],
    &["oracle", "max3sat", "unsat.cnf"],
    &["gen", "random-dag", "--nodes", "6", "--arcs", "10", "--seed", "7"],
    &["gen", "random-dag", "--nodes", "5", "--arcs", "8", "--seed", "7", "--budget", "disc:2", "--kind", "sym"],
    &["gen", "random-digraph", "--nodes", "5", "--seed", "11"],
];
