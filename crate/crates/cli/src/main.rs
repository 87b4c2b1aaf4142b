//! `ctx`: contextuality checks, paradox certificates and n-cycle quantum
//! constructions from the command line.
//!
//! Exit codes: 0 success (or, for `pp find`, a paradox was found), 1 no
//! paradox, 2 enumeration cap exceeded, 3 invalid input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use ctx_core::bundle::BundleDiagram;
use ctx_core::classical::{self, Level};
use ctx_core::io::{self, BehaviorData, BehaviorFile};
use ctx_core::paradox;
use ctx_core::quantum::{self, even, odd, EvenCycleParams, GammaConfig, OddCycleParams};
use ctx_core::{fixtures, inequality, Error, DEFAULT_ENUMERATION_CAP};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "ctx", version, about = "Contextuality hierarchy and possibilistic paradoxes")]
struct Cli {
    /// Enumeration cap on global assignments (default: $CTX_CAP, else 2^24).
    #[arg(long, global = true)]
    cap: Option<u128>,
    /// Seed for randomized searches.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Convergence tolerance for numerical searches.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Position of a behavior in the contextuality hierarchy.
    Check {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long, default_value = "all")]
        level: String,
    },
    /// Possibilistic paradoxes.
    Pp {
        #[command(subcommand)]
        command: PpCommand,
    },
    /// Values of every n-cycle inequality.
    Ineq {
        #[arg(long)]
        behavior: PathBuf,
    },
    /// Quantum constructions.
    Quantum {
        #[command(subcommand)]
        command: QuantumCommand,
    },
    /// Largest paradox probability over the n-cycle constructions.
    Gamma {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Bundle diagram of a possibility table.
    Bundle {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long, value_enum, default_value_t = BundleFormat::Json)]
        format: BundleFormat,
    },
    /// Canonical tables and quantum constructions as behavior files.
    Fixtures {
        /// One of bell, hardy, pr-box, cabello, hardy-quantum; prints it.
        #[arg(long, conflicts_with = "out_dir")]
        name: Option<String>,
        /// Writes every fixture into this directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PpCommand {
    /// Finds a paradox certificate.
    Find {
        #[arg(long)]
        behavior: PathBuf,
        /// Only require the possibility table to be nondisturbing.
        #[arg(long)]
        possibilistic: bool,
        #[arg(long, value_enum, default_value_t = TextFormat::Json)]
        format: TextFormat,
    },
}

#[derive(Subcommand)]
enum QuantumCommand {
    /// The n-cycle construction: two qubits (`--alpha`) for even n, a
    /// qutrit (`--theta`, `--eta`, `--v3`) for odd n.
    Ncycle {
        #[arg(long)]
        n: usize,
        #[arg(long, conflicts_with_all = ["theta", "eta", "v3"])]
        alpha: Option<f64>,
        /// θ5, θ7, ..., θn (default π/4 each).
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<f64>>,
        /// Defaults to (1,1,1)/√3.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        eta: Option<Vec<f64>>,
        /// Defaults to (1,0,0).
        #[arg(long, value_delimiter = ',', num_args = 1)]
        v3: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TextFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum BundleFormat {
    Json,
    Dot,
}

fn cap(cli: &Cli) -> anyhow::Result<u128> {
    if let Some(c) = cli.cap {
        return Ok(c);
    }
    match std::env::var("CTX_CAP") {
        Ok(v) => v.trim().parse().with_context(|| format!("CTX_CAP={v} is not a number")),
        Err(_) => Ok(DEFAULT_ENUMERATION_CAP),
    }
}

fn load(path: &Path) -> anyhow::Result<BehaviorFile> {
    Ok(io::load_behavior(path)?)
}

/// Stdout writes ignore a closed pipe (`ctx ... | head`).
fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn print_json(v: &Value) {
    emit(&(serde_json::to_string_pretty(v).expect("values serialize") + "\n"));
}

fn check(cli: &Cli, path: &Path, level: &str) -> anyhow::Result<u8> {
    let level: Level = level.parse()?;
    let file = load(path)?;
    let cap = cap(cli)?;
    let report = match &file.data {
        BehaviorData::Probabilistic(b) => classical::classify(b, level, cap)?,
        BehaviorData::Possibilistic(pb) => classical::classify_possibilistic(pb, level, cap)?,
    };
    print_json(&serde_json::to_value(&report)?);
    Ok(0)
}

fn pp_find(path: &Path, possibilistic: bool, format: TextFormat) -> anyhow::Result<u8> {
    let file = load(path)?;
    if let (BehaviorData::Probabilistic(b), false) = (&file.data, possibilistic) {
        b.require_nondisturbing()?;
    }
    let pb = file.possibilistic();
    let s = pb.scenario().clone();
    let cert = match paradox::CycleView::of_cycle_scenario(&s) {
        Ok(_) => paradox::detect_cycle_paradox(&pb)?,
        Err(_) => paradox::detect_simple_scenario_paradox(&pb)?,
    };
    let Some(cert) = cert else {
        match format {
            TextFormat::Json => print_json(&json!("none")),
            TextFormat::Text => emit("none\n"),
        }
        return Ok(1);
    };
    match format {
        TextFormat::Json => print_json(&cert.describe(&s)),
        TextFormat::Text => emit(&cert.to_text(&s)),
    }
    Ok(0)
}

fn ineq(path: &Path) -> anyhow::Result<u8> {
    let file = load(path)?;
    let BehaviorData::Probabilistic(b) = &file.data else {
        bail!("{}: inequalities need probabilities, got a possibility table", path.display());
    };
    print_json(&serde_json::to_value(inequality::evaluate_all(b)?)?);
    Ok(0)
}

fn vector3(name: &str, v: Option<Vec<f64>>, default: [f64; 3]) -> anyhow::Result<[f64; 3]> {
    let Some(v) = v else { return Ok(default) };
    let arr: [f64; 3] = v
        .try_into()
        .map_err(|v: Vec<f64>| anyhow!("--{name} needs 3 components, got {}", v.len()))?;
    let norm = arr.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        bail!("--{name} is the zero vector");
    }
    Ok(arr.map(|x| x / norm))
}

fn cabello_eta() -> [f64; 3] {
    [1.0 / 3f64.sqrt(); 3]
}

fn quantum_ncycle(
    n: usize,
    alpha: Option<f64>,
    theta: Option<Vec<f64>>,
    eta: Option<Vec<f64>>,
    v3: Option<Vec<f64>>,
    out: Option<&Path>,
) -> anyhow::Result<u8> {
    let value = if n.is_multiple_of(2) {
        let alpha = alpha.ok_or_else(|| anyhow!("even n needs --alpha"))?;
        even_value(&quantum::build_even_cycle(&EvenCycleParams::new(n, alpha)?)?)
    } else {
        if alpha.is_some() {
            bail!("--alpha applies to even n; odd n takes --theta, --eta and --v3");
        }
        let thetas = theta.unwrap_or_else(|| vec![std::f64::consts::FRAC_PI_4; n.saturating_sub(3) / 2]);
        let params = OddCycleParams::new(
            n,
            vector3("eta", eta, cabello_eta())?,
            vector3("v3", v3, [1.0, 0.0, 0.0])?,
            thetas,
        )?;
        odd_value(&quantum::build_odd_cycle(&params)?)
    };
    match out {
        Some(path) => {
            std::fs::write(path, serde_json::to_string_pretty(&value)? + "\n")
                .with_context(|| format!("writing {}", path.display()))?;
        }
        None => print_json(&value),
    }
    Ok(0)
}

fn even_value(c: &even::EvenCycleConstruction) -> Value {
    io::behavior_to_value(
        &c.behavior,
        Some(json!({
            "construction": "two-qubit even cycle",
            "params": c.params,
            "witness": {"context": 0, "outcome": [1, 1], "probability": c.witness_probability},
        })),
    )
}

fn odd_value(c: &odd::OddCycleConstruction) -> Value {
    io::behavior_to_value(
        &c.behavior,
        Some(json!({
            "construction": "qutrit odd cycle",
            "params": c.params,
            "witness": {"context": 0, "outcome": [0, 1], "probability": c.witness_probability},
        })),
    )
}

fn gamma(cli: &Cli, n: usize, restarts: usize) -> anyhow::Result<u8> {
    let mut config = GammaConfig {
        restarts,
        ..GammaConfig::default()
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(tol) = cli.tol {
        config.tol = tol;
    }
    print_json(&serde_json::to_value(quantum::optimize_gamma(n, &config)?)?);
    Ok(0)
}

fn bundle(cli: &Cli, path: &Path, format: BundleFormat) -> anyhow::Result<u8> {
    let pb = load(path)?.possibilistic();
    let d = BundleDiagram::new(&pb, cap(cli)?)?;
    match format {
        BundleFormat::Json => emit(&(d.to_json() + "\n")),
        BundleFormat::Dot => emit(&d.to_dot()),
    }
    Ok(0)
}

const FIXTURES: [&str; 5] = ["bell", "hardy", "pr-box", "cabello", "hardy-quantum"];

fn fixture(name: &str) -> anyhow::Result<Value> {
    if let Some(b) = fixtures::completion(name) {
        let weights = if name == "hardy" {
            "1/2 PR-type box + 1/2 uniform mixture of the five global assignments; uniform weights on this table would disturb"
        } else {
            "uniform over the possible entries of each context (minimal completion of the possibility table)"
        };
        return Ok(io::behavior_to_value(&b, Some(json!({"name": name, "weights": weights}))));
    }
    match name {
        "cabello" => Ok(odd_value(&quantum::build_odd_cycle(&OddCycleParams::cabello())?)),
        "hardy-quantum" => {
            let best = quantum::optimize_gamma(4, &GammaConfig::default())?;
            Ok(even_value(&quantum::build_even_cycle(&EvenCycleParams::new(4, best.params[0])?)?))
        }
        _ => bail!("unknown fixture `{name}`; expected one of {}", FIXTURES.join(", ")),
    }
}

fn fixtures_cmd(name: Option<&str>, out_dir: Option<&Path>) -> anyhow::Result<u8> {
    match (name, out_dir) {
        (Some(name), _) => print_json(&fixture(name)?),
        (None, Some(dir)) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for name in FIXTURES {
                let path = dir.join(format!("{name}.json"));
                std::fs::write(&path, serde_json::to_string_pretty(&fixture(name)?)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
                eprintln!("wrote {}", path.display());
            }
        }
        (None, None) => bail!("give --name or --out-dir"),
    }
    Ok(0)
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Check { behavior, level } => check(cli, behavior, level),
        Command::Pp {
            command: PpCommand::Find {
                behavior,
                possibilistic,
                format,
            },
        } => pp_find(behavior, *possibilistic, *format),
        Command::Ineq { behavior } => ineq(behavior),
        Command::Quantum {
            command: QuantumCommand::Ncycle {
                n,
                alpha,
                theta,
                eta,
                v3,
                out,
            },
        } => quantum_ncycle(*n, *alpha, theta.clone(), eta.clone(), v3.clone(), out.as_deref()),
        Command::Gamma { n, restarts } => gamma(cli, *n, *restarts),
        Command::Bundle { behavior, format } => bundle(cli, behavior, *format),
        Command::Fixtures { name, out_dir } => fixtures_cmd(name.as_deref(), out_dir.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let cap_exceeded = matches!(e.downcast_ref::<Error>(), Some(Error::EnumerationCapExceeded { .. }));
            ExitCode::from(if cap_exceeded { 2 } else { 3 })
        }
    }
}
