//! `altruism`: command-line front end over the JSON game format.
//!
//! Every command prints exactly one JSON document on stdout. Exit codes: 0
//! success, 1 infeasible (including `--require-ne` without an equilibrium),
//! 2 invalid input, 3 budget refusal.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altruism_core::dynamics::{
    format_trajectory, random_start, run_dynamics_with, DynamicsConfig, Policy, DEFAULT_MAX_STEPS,
};
use altruism_core::generators::{
    example1, expand_paths, footnote_asymmetric, footnote_symmetric, partition_to_network,
    sat_to_network, sat_to_singleton, CnfFormula, NetworkGame, PartitionInstance,
};
use altruism_core::oracle::{
    brute_force_optimum, enumerate_nash, min_altruist_subset_bruteforce, DEFAULT_BUDGET,
};
use altruism_core::singleton::{social_optimum_symmetric, solve_symmetric_singleton, thresholds};
use altruism_core::stabilization::{
    min_altruist_set, min_stability_cost_allocation, vcg_mechanism, StabilityCostMatrix,
};
use altruism_core::{CongestionVector, Error, Game, GameSpec, Rational, State};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "altruism",
    version,
    about = "Congestion games with altruistic agents"
)]
struct Cli {
    /// Worker threads for parallel evaluation (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GameArg {
    /// Game file: core format, or a network with `graph` and `players`.
    #[arg(long)]
    game: PathBuf,
    /// Path limit per player when expanding a network file.
    #[arg(long, default_value_t = 100_000)]
    cap: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a game.
    Validate(GameArg),
    /// Equilibria of a symmetric singleton game by dynamic programming.
    Solve {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        require_ne: bool,
    },
    /// Better-response dynamics.
    Dynamics {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, default_value = "round_robin")]
        policy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: u64,
        /// Comma-separated strategy indices, or `random` (uses --seed).
        #[arg(long)]
        start: Option<String>,
        /// Write the move list as text to this file and include it in the JSON.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Exhaustive equilibrium enumeration.
    Oracle {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long)]
        require_ne: bool,
    },
    /// Socially optimal state.
    Optimum {
        #[command(flatten)]
        game: GameArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Altruist-count sweep of a symmetric singleton game.
    Thresholds(GameArg),
    /// Fewest altruists, or cheapest placement, for a target load.
    Stabilize {
        #[command(flatten)]
        game: GameArg,
        /// JSON `{resource: count}` (or a document with a `target` key).
        #[arg(long)]
        target: PathBuf,
        /// JSON `{agent: {resource: cost}}` (or a document with a `costs` key).
        #[arg(long)]
        costs: Option<PathBuf>,
        /// Cross-check the altruist count by exhaustive search.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// VCG allocation and payments for a target load.
    Vcg {
        #[command(flatten)]
        game: GameArg,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        costs: PathBuf,
    },
    /// Emit a canned game or a reduction instance.
    Generate {
        kind: Kind,
        /// DIMACS-style formula file (sat-singleton, sat-network).
        #[arg(long)]
        formula: Option<PathBuf>,
        /// Integer list file (partition).
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Single-source wrapper for sat-network.
        #[arg(long)]
        symmetric: bool,
        /// Emit network instances as core games with explicit paths.
        #[arg(long)]
        expand: bool,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Example1,
    FootnoteSym,
    FootnoteAsym,
    SatSingleton,
    SatNetwork,
    Partition,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Validation(_) => (2, "validation"),
            Error::Unsupported(_) => (2, "unsupported"),
            Error::Infeasible(_) => (1, "infeasible"),
            Error::Budget { .. } => (3, "budget"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

fn parse_error(message: String) -> Failure {
    Failure {
        code: 2,
        kind: "parse",
        message,
    }
}

type Outcome = Result<(Value, u8), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| parse_error(format!("{}: {e}", path.display())))
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| parse_error(format!("{}: {e}", path.display())))
}

fn load_game(arg: &GameArg) -> Result<Game, Failure> {
    let doc = read_json(&arg.game)?;
    let bad = |e: serde_json::Error| parse_error(format!("{}: {e}", arg.game.display()));
    if doc.get("graph").is_some() {
        let net: NetworkGame = serde_json::from_value(doc).map_err(bad)?;
        log(&format!(
            "expanding network with {} edges",
            net.graph.edges.len()
        ));
        Ok(expand_paths(&net, arg.cap)?)
    } else {
        let spec: GameSpec = serde_json::from_value(doc).map_err(bad)?;
        Ok(Game::from_spec(spec)?)
    }
}

/// The value under `key` if the document has one, else the document itself.
fn unwrap_key(doc: Value, key: &str) -> Value {
    match doc {
        Value::Object(mut m) if m.contains_key(key) => m.remove(key).unwrap_or(Value::Null),
        other => other,
    }
}

fn load_target(game: &Game, path: &Path) -> Result<CongestionVector, Failure> {
    let map: BTreeMap<String, usize> =
        serde_json::from_value(unwrap_key(read_json(path)?, "target"))
            .map_err(|e| parse_error(format!("{}: {e}", path.display())))?;
    Ok(CongestionVector::from_map(game, &map)?)
}

fn load_costs(game: &Game, path: &Path) -> Result<StabilityCostMatrix, Failure> {
    let map: BTreeMap<String, BTreeMap<String, Rational>> =
        serde_json::from_value(unwrap_key(read_json(path)?, "costs"))
            .map_err(|e| parse_error(format!("{}: {e}", path.display())))?;
    Ok(StabilityCostMatrix::from_ids(game, &map)?)
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn log(msg: &str) {
    eprintln!("altruism: {msg}");
}

/// `{agent id: [resource ids]}` for a state.
fn assignment(game: &Game, state: &State) -> Value {
    let map: BTreeMap<&str, Vec<&str>> = game
        .agents()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let res = game
                .strategy_of(state, i)
                .iter()
                .map(|&e| game.resources()[e].id.as_str())
                .collect();
            (a.id.as_str(), res)
        })
        .collect();
    to_value(&map)
}

fn allocation_ids(game: &Game, alloc: &[usize]) -> Value {
    let map: BTreeMap<&str, &str> = game
        .agents()
        .iter()
        .zip(alloc)
        .map(|(a, &e)| (a.id.as_str(), game.resources()[e].id.as_str()))
        .collect();
    to_value(&map)
}

fn per_agent(game: &Game, xs: &[Rational]) -> Value {
    let map: BTreeMap<&str, &Rational> = game
        .agents()
        .iter()
        .map(|a| a.id.as_str())
        .zip(xs)
        .collect();
    to_value(&map)
}

fn parse_start(game: &Game, spec: Option<&str>, seed: u64) -> Result<State, Failure> {
    let state = match spec {
        None => State(vec![0; game.n_agents()]),
        Some("random") => random_start(game, seed),
        Some(list) => State(
            list.split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| parse_error(format!("--start: {e}")))?,
        ),
    };
    game.check_state(&state)?;
    Ok(state)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate(arg) => {
            let g = load_game(&arg)?;
            Ok((
                json!({
                    "valid": true,
                    "agents": g.n_agents(),
                    "resources": g.n_resources(),
                    "singleton": g.is_singleton(),
                    "symmetric": g.is_symmetric(),
                    "state_count": g.state_space_size().to_string(),
                }),
                0,
            ))
        }
        Command::Solve { game, require_ne } => {
            let g = load_game(&game)?;
            let rep = solve_symmetric_singleton(&g)?;
            log(&format!("{} admissibility patterns", rep.dp_runs));
            let code = if require_ne && !rep.exists { 1 } else { 0 };
            Ok((to_value(&rep), code))
        }
        Command::Dynamics {
            game,
            policy,
            seed,
            max_steps,
            start,
            trajectory,
        } => {
            let g = load_game(&game)?;
            let policy = Policy::parse(&policy, seed)?;
            let start = parse_start(&g, start.as_deref(), seed)?;
            let config = DynamicsConfig {
                max_steps,
                record_trajectory: trajectory.is_some(),
                ..DynamicsConfig::default()
            };
            let rep = run_dynamics_with(&g, &start, &policy, &config)?;
            if let (Some(path), Some(steps)) = (&trajectory, &rep.trajectory) {
                std::fs::write(path, format_trajectory(&g, steps))
                    .map_err(|e| parse_error(format!("{}: {e}", path.display())))?;
            }
            let mut out = to_value(&rep);
            out["policy"] = json!(policy.name());
            out["start"] = to_value(&start);
            out["final_assignment"] = assignment(&g, &rep.final_state);
            Ok((out, 0))
        }
        Command::Oracle {
            game,
            budget,
            require_ne,
        } => {
            let g = load_game(&game)?;
            let rep = enumerate_nash(&g, budget)?;
            log(&format!("visited {} canonical states", rep.canonical_count));
            let code = if require_ne && !rep.exists { 1 } else { 0 };
            let mut out = to_value(&rep);
            out["state_count"] = json!(rep.state_count.to_string());
            out["raw_equilibrium_count"] = json!(rep.raw_equilibrium_count.to_string());
            Ok((out, code))
        }
        Command::Optimum { game, budget } => {
            let g = load_game(&game)?;
            let (state, cost, method) = if g.is_singleton() && g.is_symmetric() {
                let opt = social_optimum_symmetric(&g)?;
                (opt.state, opt.cost, "dp")
            } else {
                let (s, c) = brute_force_optimum(&g, budget)?;
                (s, c, "brute_force")
            };
            Ok((
                json!({
                    "method": method,
                    "cost": to_value(&cost),
                    "state": to_value(&state),
                    "assignment": assignment(&g, &state),
                }),
                0,
            ))
        }
        Command::Thresholds(arg) => {
            let g = load_game(&arg)?;
            Ok((to_value(&thresholds(&g)?), 0))
        }
        Command::Stabilize {
            game,
            target,
            costs,
            verify,
            budget,
        } => {
            let g = load_game(&game)?;
            let target = load_target(&g, &target)?;
            if let Some(costs) = costs {
                let costs = load_costs(&g, &costs)?;
                let a = min_stability_cost_allocation(&g, &target, &costs)?;
                return Ok((
                    json!({
                        "allocation": allocation_ids(&g, &a.allocation),
                        "total": to_value(&a.total),
                    }),
                    0,
                ));
            }
            let Some(set) = min_altruist_set(&g, &target)? else {
                return Err(Error::Infeasible("no altruist set reaches the target".into()).into());
            };
            let mut out = json!({
                "size": set.size(),
                "altruists": set.altruists.iter().map(|&i| g.agents()[i].id.clone()).collect::<Vec<_>>(),
                "allocation": allocation_ids(&g, &set.allocation),
            });
            if verify {
                let brute = min_altruist_subset_bruteforce(&g, &target, budget)?;
                out["verified"] = json!(brute.map(|t| t.len()) == Some(set.size()));
            }
            Ok((out, 0))
        }
        Command::Vcg {
            game,
            target,
            costs,
        } => {
            let g = load_game(&game)?;
            let target = load_target(&g, &target)?;
            let costs = load_costs(&g, &costs)?;
            let v = vcg_mechanism(&g, &target, &costs)?;
            Ok((
                json!({
                    "allocation": allocation_ids(&g, &v.allocation),
                    "total": to_value(&v.total),
                    "payments": per_agent(&g, &v.payments),
                    "utilities": per_agent(&g, &v.utilities),
                }),
                0,
            ))
        }
        Command::Generate {
            kind,
            formula,
            partition,
            symmetric,
            expand,
            cap,
        } => {
            let need = |p: Option<PathBuf>, flag: &str| {
                p.ok_or_else(|| parse_error(format!("--{flag} is required for this generator")))
            };
            let network = |net: NetworkGame| -> Outcome {
                if expand {
                    Ok((to_value(&expand_paths(&net, cap)?.to_spec()), 0))
                } else {
                    net.validate()?;
                    Ok((to_value(&net), 0))
                }
            };
            match kind {
                Kind::Example1 => Ok((to_value(&example1().to_spec()), 0)),
                Kind::FootnoteSym => Ok((to_value(&footnote_symmetric().to_spec()), 0)),
                Kind::FootnoteAsym => Ok((to_value(&footnote_asymmetric().to_spec()), 0)),
                Kind::SatSingleton => {
                    let phi = CnfFormula::parse_dimacs(&read(&need(formula, "formula")?)?)?;
                    Ok((to_value(&sat_to_singleton(&phi).to_spec()), 0))
                }
                Kind::SatNetwork => {
                    let phi = CnfFormula::parse_dimacs(&read(&need(formula, "formula")?)?)?;
                    network(sat_to_network(&phi, symmetric))
                }
                Kind::Partition => {
                    let inst = PartitionInstance::parse(&read(&need(partition, "partition")?)?)?;
                    network(partition_to_network(&inst).0)
                }
            }
        }
    }
}

/// Writes the result; a closed stdout is not an error worth a panic.
fn emit(value: &Value) {
    let mut out = std::io::stdout().lock();
    if serde_json::to_writer_pretty(&mut out, value).is_ok() {
        let _ = writeln!(out);
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            emit(&json!({"error": {"kind": "usage", "message": e.kind().to_string()}}));
            return ExitCode::from(2);
        }
    };
    if cli.workers > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            log(&format!("worker pool: {e}"));
        }
    }
    match run(cli) {
        Ok((value, code)) => {
            emit(&value);
            ExitCode::from(code)
        }
        Err(f) => {
            log(&f.message);
            emit(&json!({"error": {"kind": f.kind, "message": f.message}}));
            ExitCode::from(f.code)
        }
    }
}
