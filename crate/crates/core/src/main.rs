//! Command-line front end: run simulations, plan partitions, profile the
//! state-copy cost, and generate benchmark circuits.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tqsim::error::{Error, Result};
use tqsim::noise::{load_noise_model, NoiseModel};
use tqsim::partition::{profile_copy_cost, CopyCostProfile};
use tqsim::qasm::parse_qasm;
use tqsim::report::{
    self, parse_ideal_json, plan_only, RunMode, RunOptions, DEFAULT_COPY_COST_GATES,
};
use tqsim::state::DEFAULT_MEMORY_BUDGET_BYTES;

const MEM_BUDGET_ENV: &str = "TQSIM_MEM_BUDGET";

#[derive(Parser)]
#[command(
    name = "tqsim",
    about = "Noisy quantum-circuit simulator with simulation-tree state reuse",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a baseline and/or tree simulation and emit results JSON.
    Run(RunArgs),
    /// Plan a dynamic circuit partition and print the plan JSON.
    Plan(PlanArgs),
    /// Profile the state-copy cost on this host.
    Profile(ProfileArgs),
    /// Generate a benchmark circuit as OpenQASM.
    Gen(GenArgs),
}

#[derive(Args)]
struct RunArgs {
    /// OpenQASM 2.0 circuit file.
    #[arg(long)]
    circuit: PathBuf,
    /// Noise-model JSON file; omit for ideal simulation.
    #[arg(long)]
    noise: Option<PathBuf>,
    /// Requested number of outcomes.
    #[arg(long)]
    shots: u64,
    /// baseline | tree | both.
    #[arg(long, default_value = "tree")]
    mode: String,
    /// Master seed; identical configs and seeds reproduce counts exactly.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Explicit per-level arities, e.g. 16,2,2 (otherwise planned).
    #[arg(long, value_delimiter = ',')]
    arities: Option<Vec<u64>>,
    /// Explicit slice boundaries (gate indices), e.g. 3,5.
    #[arg(long, value_delimiter = ',')]
    boundaries: Option<Vec<usize>>,
    /// State-copy cost in gate units for planning.
    #[arg(long, default_value_t = DEFAULT_COPY_COST_GATES)]
    copy_cost: f64,
    /// Memory budget in bytes (overrides TQSIM_MEM_BUDGET).
    #[arg(long)]
    mem_budget: Option<u64>,
    /// Worker threads; results are independent of this.
    #[arg(long)]
    threads: Option<usize>,
    /// Ideal distribution JSON for fidelity metrics.
    #[arg(long)]
    ideal: Option<PathBuf>,
    /// Write results JSON here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    noise: Option<PathBuf>,
    #[arg(long)]
    shots: u64,
    #[arg(long, default_value_t = DEFAULT_COPY_COST_GATES)]
    copy_cost: f64,
    #[arg(long)]
    mem_budget: Option<u64>,
    /// Force the first-level shot count instead of deriving it.
    #[arg(long)]
    a0: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Statevector widths (qubit counts) to profile.
    #[arg(long, value_delimiter = ',', default_values_t = [12usize, 16, 20])]
    widths: Vec<usize>,
    /// Repetitions per measurement (at least 10).
    #[arg(long, default_value_t = 50)]
    reps: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Circuit family: qft | bv | ghz | qpe | qaoa.
    family: String,
    /// Width parameter (qubits, data bits, or counting bits by family).
    #[arg(long)]
    n: Option<usize>,
    /// QFT: prepend a layer of Hadamards so the ideal output is all zeros.
    #[arg(long, default_value_t = false)]
    prelude: bool,
    /// BV: hidden bitstring (length n).
    #[arg(long)]
    hidden: Option<String>,
    /// QPE: phase in [0,1); accepts decimals or fractions like 1/3.
    #[arg(long)]
    phase: Option<String>,
    /// QAOA: edge list like 0-1,1-2,2-0.
    #[arg(long, value_delimiter = ',')]
    edges: Option<Vec<String>>,
    /// QAOA: mixer angle beta.
    #[arg(long)]
    beta: Option<f64>,
    /// QAOA: cost angle gamma.
    #[arg(long)]
    gamma: Option<f64>,
    /// QAOA: number of layers.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn memory_budget(flag: Option<u64>) -> Result<u64> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match std::env::var(MEM_BUDGET_ENV) {
        Ok(text) => text.trim().parse::<u64>().map_err(|_| {
            Error::InvalidArgument(format!(
                "{MEM_BUDGET_ENV} must be a byte count, got `{text}`"
            ))
        }),
        Err(_) => Ok(DEFAULT_MEMORY_BUDGET_BYTES),
    }
}

fn load_circuit(path: &PathBuf) -> Result<tqsim::Circuit> {
    parse_qasm(&fs::read_to_string(path)?)
}

fn load_noise(path: &Option<PathBuf>) -> Result<NoiseModel> {
    match path {
        Some(p) => load_noise_model(&fs::read_to_string(p)?),
        None => Ok(NoiseModel::noise_free()),
    }
}

fn emit(text: String, output: &Option<PathBuf>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn parse_phase(text: &str) -> Result<f64> {
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    if let Some((num, den)) = text.split_once('/') {
        let n: f64 = num.trim().parse().map_err(|_| bad_phase(text))?;
        let d: f64 = den.trim().parse().map_err(|_| bad_phase(text))?;
        if d != 0.0 {
            return Ok(n / d);
        }
    }
    Err(bad_phase(text))
}

fn bad_phase(text: &str) -> Error {
    Error::InvalidArgument(format!("phase must be a number or fraction, got `{text}`"))
}

fn parse_edges(specs: &[String]) -> Result<Vec<(usize, usize)>> {
    specs
        .iter()
        .map(|s| {
            s.split_once('-')
                .and_then(|(u, v)| Some((u.trim().parse().ok()?, v.trim().parse().ok()?)))
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("edge must look like 0-1, got `{s}`"))
                })
        })
        .collect()
}

fn require<T>(value: Option<T>, what: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("missing required argument {what}")))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let circuit = load_circuit(&args.circuit)?;
    let model = load_noise(&args.noise)?;
    let mut options = RunOptions::new(args.shots, RunMode::parse(&args.mode)?, args.seed);
    options.arities = args.arities;
    options.boundaries = args.boundaries;
    options.copy_cost = CopyCostProfile::uniform(args.copy_cost)?;
    options.memory_budget_bytes = memory_budget(args.mem_budget)?;
    if let Some(path) = &args.ideal {
        options.ideal = Some(parse_ideal_json(&fs::read_to_string(path)?)?);
    }
    let doc = match args.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
            pool.install(|| report::run_simulation(&circuit, &model, &options))?
        }
        None => report::run_simulation(&circuit, &model, &options)?,
    };
    emit(doc.to_json_pretty()?, &args.output)
}

fn cmd_plan(args: PlanArgs) -> Result<()> {
    let circuit = load_circuit(&args.circuit)?;
    let model = load_noise(&args.noise)?;
    let cost = CopyCostProfile::uniform(args.copy_cost)?;
    let plan = plan_only(
        &circuit,
        &model,
        args.shots,
        &cost,
        memory_budget(args.mem_budget)?,
        args.a0,
    )?;
    emit(serde_json::to_string_pretty(&plan.to_json())?, &args.output)
}

fn cmd_profile(args: ProfileArgs) -> Result<()> {
    let profile = profile_copy_cost(&args.widths, args.reps)?;
    emit(serde_json::to_string_pretty(&profile)?, &args.output)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let circuit = match args.family.as_str() {
        "qft" => tqsim::bench::gen_qft(require(args.n, "--n")?, args.prelude)?,
        "bv" => {
            let n = require(args.n, "--n")?;
            let hidden = require(args.hidden, "--hidden")?;
            tqsim::bench::gen_bv(n, &hidden)?
        }
        "ghz" => tqsim::bench::gen_ghz(require(args.n, "--n")?)?,
        "qpe" => {
            let n = require(args.n, "--n")?;
            let phase = parse_phase(&require(args.phase, "--phase")?)?;
            tqsim::bench::gen_qpe(n, phase)?
        }
        "qaoa" => {
            let edges = parse_edges(&require(args.edges, "--edges")?)?;
            let n = match args.n {
                Some(n) => n,
                None => edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
            };
            tqsim::bench::gen_qaoa_maxcut(
                n,
                &edges,
                require(args.beta, "--beta")?,
                require(args.gamma, "--gamma")?,
                args.layers,
            )?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown circuit family `{other}` (expected qft|bv|ghz|qpe|qaoa)"
            )))
        }
    };
    emit(circuit.to_qasm(), &args.output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Plan(args) => cmd_plan(args),
        Command::Profile(args) => cmd_profile(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
