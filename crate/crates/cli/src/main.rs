use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use ncl_core::generate::{and_or_instance, general_instance, single_weight_instance, ProblemKind};
use ncl_core::io::{
    instance_document, parse_instance, parse_witness, to_canonical_json, write_instance, ParsedInstance, SolveOutput,
};
use ncl_core::kernel::{kernelize, KernelResult};
use ncl_core::single::{solve_demand_oracle, solve_single_weight, SingleWeightInstance};
use ncl_core::{andor, blue, dot, oracle, single, Instance, Orientation, Query, Verdict, VertexKind, Weight};

/// Reconfiguration solvers for Nondeterministic Constraint Logic.
#[derive(Parser)]
#[command(name = "ncl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide reachability for one or more instance files.
    Solve {
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        /// Instance files; `-` reads standard input.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Apply the reduction rules and print the residual instance or verdict.
    Kernelize {
        /// Fails unless the document asks this problem.
        #[arg(long, value_enum)]
        problem: Option<Problem>,
        file: PathBuf,
    },
    /// Print a seeded random instance.
    Gen {
        #[arg(long, value_enum, default_value_t = Mode::General)]
        mode: Mode,
        /// Red edges (general mode).
        #[arg(long, default_value_t = 2)]
        red: usize,
        /// Blue edges (general mode).
        #[arg(long, default_value_t = 4)]
        blue: usize,
        /// Vertices, rounded up to an even number (andor mode).
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        /// Edges (single-weight mode).
        #[arg(long, default_value_t = 6)]
        edges: usize,
        #[arg(long, value_enum, default_value_t = Problem::C2c)]
        problem: Problem,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check a witness against an instance.
    CheckWitness { instance: PathBuf, witness: PathBuf },
    /// Print the instance as Graphviz text.
    ExportDot {
        #[arg(long, value_enum, default_value_t = View::Ini)]
        view: View,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Oracle,
    KernelRed,
    Blue,
    Or,
    SingleWeight,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Problem {
    C2c,
    C2e,
}

impl From<Problem> for ProblemKind {
    fn from(p: Problem) -> Self {
        match p {
            Problem::C2c => ProblemKind::C2C,
            Problem::C2e => ProblemKind::C2E,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    General,
    Andor,
    SingleWeight,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum View {
    None,
    Ini,
    Tar,
}

/// Instances this small go straight to the oracle under `auto`.
const TINY_EDGES: usize = 12;

/// Enumeration caps, all replaced by `NCL_ORACLE_CAP` when it is set.
struct Caps {
    oracle: usize,
    blue: usize,
    bcsr_bits: usize,
    single: usize,
}

impl Caps {
    fn from_env() -> Self {
        match std::env::var(oracle::CAP_VARIABLE)
            .ok()
            .and_then(|s| s.trim().parse().ok())
        {
            Some(cap) => Caps {
                oracle: cap,
                blue: cap,
                bcsr_bits: cap,
                single: cap,
            },
            None => Caps {
                oracle: oracle::DEFAULT_CAP,
                blue: blue::DEFAULT_CAP,
                bcsr_bits: andor::DEFAULT_CAP_BITS,
                single: single::DEFAULT_CAP,
            },
        }
    }
}

fn read_input(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .context("reading standard input")?;
        return Ok(text);
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path) -> anyhow::Result<ParsedInstance> {
    parse_instance(&read_input(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn auto_method(parsed: &ParsedInstance) -> Method {
    let ParsedInstance::Ncl(instance) = parsed else {
        return Method::SingleWeight;
    };
    let g = &instance.graph;
    if g.non_loop_edge_count() <= TINY_EDGES {
        return Method::Oracle;
    }
    let kinds = g.classify_vertices();
    let count = |kind| kinds.iter().filter(|&&(_, k)| k == kind).count();
    if g.is_and_or() && count(VertexKind::Or) < count(VertexKind::And) {
        return Method::Or;
    }
    if g.count_weight(Weight::Red) <= g.count_weight(Weight::Blue) {
        Method::KernelRed
    } else {
        Method::Blue
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Auto => "auto",
        Method::Oracle => "oracle",
        Method::KernelRed => "kernel-red",
        Method::Blue => "blue",
        Method::Or => "or",
        Method::SingleWeight => "single-weight",
    }
}

fn solve_ncl(instance: &Instance, method: Method, caps: &Caps) -> anyhow::Result<Verdict> {
    Ok(match method {
        Method::Oracle => oracle::solve_bfs(instance, caps.oracle)?,
        Method::KernelRed => match kernelize(instance)? {
            KernelResult::Decided { answer, .. } => Verdict { answer, witness: None },
            KernelResult::Reduced { instance: residue, .. } => Verdict {
                answer: oracle::solve_bfs(&residue, caps.oracle)?.answer,
                witness: None,
            },
        },
        Method::Blue => blue::solve(instance, caps.blue)?,
        Method::Or => andor::solve_or(instance, caps.bcsr_bits)?,
        Method::SingleWeight => bail!("the single-weight method needs demands and a uniform weight"),
        Method::Auto => unreachable!("auto is resolved before solving"),
    })
}

fn solve_single(instance: &SingleWeightInstance, method: Method, caps: &Caps) -> anyhow::Result<Verdict> {
    Ok(match method {
        Method::SingleWeight => solve_single_weight(instance, caps.single)?,
        Method::Oracle => solve_demand_oracle(instance, caps.oracle)?,
        _ => bail!("single-weight instances are solved by the single-weight or oracle method"),
    })
}

fn solve_file(path: &Path, requested: Method, caps: &Caps) -> anyhow::Result<SolveOutput> {
    let parsed = load(path)?;
    let method = if requested == Method::Auto {
        auto_method(&parsed)
    } else {
        requested
    };
    let verdict = match &parsed {
        ParsedInstance::Ncl(i) => solve_ncl(i, method, caps),
        ParsedInstance::SingleWeight(s) => solve_single(s, method, caps),
    }
    .with_context(|| format!("solving {}", path.display()))?;
    Ok(SolveOutput::new(
        verdict.answer,
        verdict.witness.as_deref(),
        method_name(method),
    ))
}

fn solve(files: &[PathBuf], method: Method) -> anyhow::Result<ExitCode> {
    let caps = Caps::from_env();
    if let [file] = files {
        print!("{}", to_canonical_json(&solve_file(file, method, &caps)?));
        return Ok(ExitCode::SUCCESS);
    }
    let results: Vec<anyhow::Result<SolveOutput>> = files.par_iter().map(|f| solve_file(f, method, &caps)).collect();
    let mut failed = false;
    let entries: Vec<Value> = files
        .iter()
        .zip(results)
        .map(|(file, result)| {
            let mut entry = match result {
                Ok(output) => serde_json::to_value(output).expect("outputs serialize"),
                Err(err) => {
                    failed = true;
                    json!({ "error": format!("{err:#}") })
                }
            };
            entry["file"] = json!(file.display().to_string());
            entry
        })
        .collect();
    print!("{}", to_canonical_json(&entries));
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn kernelize_file(path: &Path, problem: Option<Problem>) -> anyhow::Result<()> {
    let ParsedInstance::Ncl(instance) = load(path)? else {
        bail!("kernelization applies to red/blue constraint graphs");
    };
    let asked = match instance.query {
        Query::Configuration(_) => Problem::C2c,
        Query::Edge(_) => Problem::C2e,
    };
    if problem.is_some_and(|p| p != asked) {
        bail!("the document asks a different problem than --problem");
    }
    let output = match kernelize(&instance)? {
        KernelResult::Decided { answer, trace } => json!({
            "result": "decided",
            "answer": if answer { "yes" } else { "no" },
            "trace": trace,
        }),
        KernelResult::Reduced {
            instance,
            origin,
            trace,
        } => json!({
            "result": "reduced",
            "instance": instance_document(&instance),
            "origin": origin,
            "trace": trace,
        }),
    };
    print!("{}", to_canonical_json(&output));
    Ok(())
}

fn generate(
    mode: Mode,
    red: usize,
    blue: usize,
    vertices: usize,
    edges: usize,
    problem: Problem,
    seed: u64,
) -> anyhow::Result<()> {
    let parsed = match mode {
        Mode::General => ParsedInstance::Ncl(general_instance(red, blue, seed, problem.into())?),
        Mode::Andor => ParsedInstance::Ncl(and_or_instance(vertices, seed, problem.into())?),
        Mode::SingleWeight => ParsedInstance::SingleWeight(single_weight_instance(edges, seed)?),
    };
    print!("{}", write_instance(&parsed));
    Ok(())
}

/// Checks a single-weight witness: feasible steps, one reversal apart,
/// from the initial to the target orientation.
fn check_single_witness(instance: &SingleWeightInstance, witness: &[Orientation]) -> Result<(), String> {
    if witness.first() != Some(&instance.initial) {
        return Err("witness does not start at the initial orientation".into());
    }
    if witness.last() != Some(&instance.target) {
        return Err("witness does not end at the target orientation".into());
    }
    for (i, o) in witness.iter().enumerate() {
        if !instance.graph.is_feasible(o) {
            return Err(format!("step {i} is not feasible"));
        }
        if i > 0 && witness[i - 1].difference(o).len() != 1 {
            return Err(format!("step {i} does not reverse exactly one edge"));
        }
    }
    Ok(())
}

fn check_witness(instance_path: &Path, witness_path: &Path) -> anyhow::Result<ExitCode> {
    let parsed = load(instance_path)?;
    let loops: Vec<bool> = match &parsed {
        ParsedInstance::Ncl(i) => i.graph.edges().iter().map(|e| e.is_loop()).collect(),
        ParsedInstance::SingleWeight(s) => vec![false; s.graph.edge_count()],
    };
    let witness = parse_witness(&read_input(witness_path)?, &loops)
        .with_context(|| format!("parsing {}", witness_path.display()))?;
    let verdict = match &parsed {
        ParsedInstance::Ncl(i) => i.check_witness(&witness).map_err(|e| e.to_string()),
        ParsedInstance::SingleWeight(s) => check_single_witness(s, &witness),
    };
    let output = match &verdict {
        Ok(()) => json!({ "valid": true }),
        Err(reason) => json!({ "valid": false, "error": reason }),
    };
    print!("{}", to_canonical_json(&output));
    Ok(if verdict.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn export(path: &Path, view: View) -> anyhow::Result<()> {
    let parsed = load(path)?;
    let text = match &parsed {
        ParsedInstance::Ncl(i) => {
            let orientation = match (view, &i.query) {
                (View::None, _) => None,
                (View::Ini, _) => Some(&i.initial),
                (View::Tar, Query::Configuration(t)) => Some(t),
                (View::Tar, Query::Edge(_)) => bail!("a c2e instance has no target orientation"),
            };
            dot::export_dot(&i.graph, orientation)
        }
        ParsedInstance::SingleWeight(s) => {
            let orientation = match view {
                View::None => None,
                View::Ini => Some(&s.initial),
                View::Tar => Some(&s.target),
            };
            dot::export_demand_dot(&s.graph, orientation)
        }
    };
    print!("{text}");
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Solve { method, files } => solve(&files, method),
        Command::Kernelize { problem, file } => kernelize_file(&file, problem).map(|()| ExitCode::SUCCESS),
        Command::Gen {
            mode,
            red,
            blue,
            vertices,
            edges,
            problem,
            seed,
        } => generate(mode, red, blue, vertices, edges, problem, seed).map(|()| ExitCode::SUCCESS),
        Command::CheckWitness { instance, witness } => check_witness(&instance, &witness),
        Command::ExportDot { view, file } => export(&file, view).map(|()| ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
