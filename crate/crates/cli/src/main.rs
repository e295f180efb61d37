use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rrsp::gen::{self, BudgetChoice, InstanceParams};
use rrsp::io::{format_edge_list, parse_dimacs_cnf, parse_edge_list, parse_instance, serialize_instance};
use rrsp::oracles::{
    format_assignment, hp_oracle, max3sat_oracle, verify_hp_reduction, verify_sat_reduction, HpBudget,
    VerificationReport,
};
use rrsp::rational;
use rrsp::reductions::{reduce_hp_continuous_with_budget, reduce_hp_discrete, reduce_max3sat};
use rrsp::{solve, Budget, Error, Instance, NeighborhoodKind, RecoveryRule, SolveOptions, SolveResult};

#[derive(Parser)]
#[command(name = "rrsp", version, about = "Recoverable robust shortest paths: exact solver and reduction checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance document exactly.
    Solve {
        instance: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        path_cap: Option<usize>,
    },
    /// Build a hardness instance from a source problem.
    #[command(subcommand)]
    Reduce(Reduce),
    /// Check a reduction end to end against the source-problem oracle.
    #[command(subcommand)]
    Verify(Verify),
    /// Solve a source problem by brute force.
    #[command(subcommand)]
    Oracle(Oracle),
    /// Generate seeded random inputs.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Args)]
struct Overrides {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    #[arg(long)]
    k: Option<usize>,
    /// `cont:G` or `disc:G`.
    #[arg(long)]
    budget: Option<Budget>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Incl,
    Excl,
    Sym,
}

impl From<Kind> for NeighborhoodKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Incl => NeighborhoodKind::Incl,
            Kind::Excl => NeighborhoodKind::Excl,
            Kind::Sym => NeighborhoodKind::Sym,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write the instance document here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the construction metadata (JSON) here.
    #[arg(long)]
    meta: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Reduce {
    /// Layered graph with a continuous budget.
    Hp {
        edgelist: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Continuous budget, `cont:G` with G > 0.
        #[arg(long)]
        budget: Option<Budget>,
        #[command(flatten)]
        output: Output,
    },
    /// Layered graph with a discrete budget.
    HpDiscrete {
        edgelist: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[command(flatten)]
        output: Output,
    },
    /// Clause-gadget graph for a CNF formula.
    Sat3 {
        cnf: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long, value_enum)]
        kind: Kind,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct VerifyCommon {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    path_cap: Option<usize>,
    /// Write a JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Verify {
    /// Continuous budget: Hamiltonian path iff OPT <= G/n.
    Thm1 {
        edgelist: PathBuf,
        #[arg(long)]
        budget: Option<Budget>,
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Discrete budget: Hamiltonian path iff OPT = 0.
    Discrete {
        edgelist: PathBuf,
        #[command(flatten)]
        common: VerifyCommon,
    },
    /// Clause gadgets: OPT = 1/s^q for the best assignment satisfying s clauses.
    Lemma2 {
        cnf: PathBuf,
        #[arg(long)]
        q: usize,
        #[command(flatten)]
        common: VerifyCommon,
    },
}

#[derive(Subcommand)]
enum Oracle {
    /// Hamiltonian path by backtracking.
    Hp { edgelist: PathBuf },
    /// Maximum number of satisfiable clauses by enumeration.
    Max3sat { cnf: PathBuf },
}

#[derive(Subcommand)]
enum Gen {
    /// A random acyclic instance document.
    RandomDag {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        arcs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// A random simple digraph as an edge list.
    RandomDigraph {
        #[arg(long)]
        nodes: usize,
        /// Arc probability.
        #[arg(long, default_value_t = 0.35)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// `Failed` maps to exit status 1: a check failed or a cap was hit.
enum Outcome {
    Done,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let overflow = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<Error>(),
                    Some(Error::PathOverflow { .. } | Error::SolveOverflow { .. } | Error::PoolOverflow { .. } | Error::SubsetOverflow { .. })
                )
            });
            ExitCode::from(if overflow { 1 } else { 2 })
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn options(path_cap: Option<usize>) -> SolveOptions {
    path_cap.map_or_else(SolveOptions::default, SolveOptions::with_path_cap)
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Solve {
            instance,
            overrides,
            path_cap,
        } => {
            let text = read(&instance)?;
            let inst = parse_instance(&text).with_context(|| format!("in {}", instance.display()))?;
            let inst = apply(inst, &overrides);
            match solve(&inst, &options(path_cap)) {
                Ok(r) => {
                    print!("{}", format_result(&r));
                    Ok(Outcome::Done)
                }
                Err(Error::SolveOverflow { cap, partial }) => {
                    println!("overflow: more than {cap} first-stage paths");
                    if let Some(r) = partial {
                        println!("incumbent:");
                        print!("{}", format_result(&r));
                    }
                    Ok(Outcome::Failed)
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Reduce(reduce) => run_reduce(reduce),
        Command::Verify(verify) => run_verify(verify),
        Command::Oracle(Oracle::Hp { edgelist }) => {
            let g = parse_edge_list(&read(&edgelist)?)?;
            match hp_oracle(&g) {
                Some(order) => {
                    let nodes: Vec<String> = order.iter().map(|v| (v + 1).to_string()).collect();
                    println!("hamiltonian path: {}", nodes.join(" "));
                }
                None => println!("no hamiltonian path"),
            }
            Ok(Outcome::Done)
        }
        Command::Oracle(Oracle::Max3sat { cnf }) => {
            let f = parse_dimacs_cnf(&read(&cnf)?)?;
            let (s, a) = max3sat_oracle(&f)?;
            println!("s_max = {s} of {}", f.clause_count());
            println!("assignment = {}", format_assignment(&a));
            Ok(Outcome::Done)
        }
        Command::Gen(Gen::RandomDag {
            nodes,
            arcs,
            seed,
            overrides,
        }) => {
            if nodes < 2 || arcs < 1 {
                bail!("need at least 2 nodes and 1 arc");
            }
            let mut params = InstanceParams::new(nodes, arcs);
            params.kind = overrides.kind.map(Into::into);
            params.budget = match overrides.budget {
                Some(Budget::Discrete(_)) => BudgetChoice::Discrete,
                Some(Budget::Continuous(_)) => BudgetChoice::Continuous,
                None => BudgetChoice::Either,
            };
            let inst = gen::random_instance(&mut gen::rng(seed), &params);
            print!("{}", serialize_instance(&apply(inst, &overrides)));
            Ok(Outcome::Done)
        }
        Command::Gen(Gen::RandomDigraph { nodes, density, seed }) => {
            if !(0.0..=1.0).contains(&density) {
                bail!("density must lie in [0, 1]");
            }
            print!("{}", format_edge_list(&gen::random_simple_digraph(&mut gen::rng(seed), nodes, density)));
            Ok(Outcome::Done)
        }
    }
}

fn apply(inst: Instance, o: &Overrides) -> Instance {
    let rule = RecoveryRule::new(o.kind.map_or(inst.rule.kind, Into::into), o.k.unwrap_or(inst.rule.k));
    let budget = o.budget.clone().unwrap_or(inst.budget);
    Instance::new(inst.graph, rule, budget)
}

fn continuous_budget(budget: Option<Budget>) -> anyhow::Result<rrsp::Rational> {
    match budget {
        None => Ok(rational::one()),
        Some(Budget::Continuous(g)) => Ok(g),
        Some(Budget::Discrete(_)) => bail!("this construction takes a continuous budget (cont:G)"),
    }
}

fn emit<M: serde::Serialize>(inst: &Instance, meta: &M, output: &Output) -> anyhow::Result<Outcome> {
    write_or_print(output.out.as_deref(), &serialize_instance(inst))?;
    if let Some(path) = &output.meta {
        let mut text = serde_json::to_string_pretty(meta)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(Outcome::Done)
}

fn run_reduce(reduce: Reduce) -> anyhow::Result<Outcome> {
    match reduce {
        Reduce::Hp {
            edgelist,
            kind,
            budget,
            output,
        } => {
            let g = parse_edge_list(&read(&edgelist)?)?;
            let (inst, meta) = reduce_hp_continuous_with_budget(&g, kind.into(), continuous_budget(budget)?)?;
            emit(&inst, &meta, &output)
        }
        Reduce::HpDiscrete { edgelist, kind, output } => {
            let g = parse_edge_list(&read(&edgelist)?)?;
            let (inst, meta) = reduce_hp_discrete(&g, kind.into())?;
            emit(&inst, &meta, &output)
        }
        Reduce::Sat3 { cnf, q, kind, output } => {
            let f = parse_dimacs_cnf(&read(&cnf)?)?;
            let (inst, meta) = reduce_max3sat(&f, q, kind.into())?;
            emit(&inst, &meta, &output)
        }
    }
}

fn run_verify(verify: Verify) -> anyhow::Result<Outcome> {
    let (report, common) = match verify {
        Verify::Thm1 {
            edgelist,
            budget,
            common,
        } => {
            let g = parse_edge_list(&read(&edgelist)?)?;
            let budget = HpBudget::Continuous(continuous_budget(budget)?);
            (verify_hp_reduction(&g, common.kind.into(), &budget, &options(common.path_cap))?, common)
        }
        Verify::Discrete { edgelist, common } => {
            let g = parse_edge_list(&read(&edgelist)?)?;
            (verify_hp_reduction(&g, common.kind.into(), &HpBudget::Discrete, &options(common.path_cap))?, common)
        }
        Verify::Lemma2 { cnf, q, common } => {
            let f = parse_dimacs_cnf(&read(&cnf)?)?;
            (verify_sat_reduction(&f, q, common.kind.into(), &options(common.path_cap))?, common)
        }
    };
    print!("{}", format_report(&report));
    if let Some(path) = &common.report {
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(if report.passed() { Outcome::Done } else { Outcome::Failed })
}

fn format_result(r: &SolveResult) -> String {
    let mut out = String::new();
    writeln!(out, "OPT = {}", r.opt).unwrap();
    writeln!(out, "first_stage = {}", r.first_stage).unwrap();
    writeln!(out, "worst_scenario = {}", r.worst_scenario).unwrap();
    writeln!(out, "recovery = {}", r.best_recovery).unwrap();
    writeln!(out, "explored = {}", r.explored).unwrap();
    out
}

fn format_report(r: &VerificationReport) -> String {
    let mut out = String::new();
    writeln!(out, "instance = {}", r.instance).unwrap();
    writeln!(out, "OPT = {}", r.opt).unwrap();
    writeln!(out, "threshold = {}", r.threshold).unwrap();
    writeln!(out, "oracle = {}", r.oracle_answer).unwrap();
    for failure in &r.failures {
        writeln!(out, "failure = {failure}").unwrap();
    }
    writeln!(out, "verdict = {}", r.verdict).unwrap();
    out
}
