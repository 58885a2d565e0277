//! `ucr`: capacity, UCR optimization, protocol simulation, information
//! spectra and converse-lemma checks from the command line.
//!
//! Every run writes its outputs and a `manifest.json` into `--out-dir`;
//! `ucr replay` re-executes a manifest and regenerates the same bytes.

mod commands;
mod error;
mod io;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ucr_core::channelcap::{ChannelSpec, DEFAULT_DROP_TOL, DEFAULT_GRID_STEP};
use ucr_core::probspace::{JointPmfDoc, Pmf, PmfDoc};
use ucr_core::protocol::RunDescriptor;
use ucr_core::ucrcap::{SolveOptions, DEFAULT_DIRICHLET_COUNT};

use commands::{
    CapacityConfig, ConditionSettings, Invocation, LemmasConfig, SimulateConfig, SpectrumConfig,
    UcrConfig,
};
use error::{CliError, CliResult};
use io::{read_json, Format};
use manifest::{mismatches, write_outputs, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "ucr", version, about = "Uniform common-randomness capacity toolkit")]
struct Cli {
    /// Root seed; every random stream is split from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for outputs and the run manifest.
    #[arg(long, global = true, default_value = "ucr-out")]
    out_dir: PathBuf,
    /// Format of the summary file (tables are always CSV).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity of a discrete memoryless channel.
    Capacity(CapacityArgs),
    /// UCR capacity of a source at a constraint level or through a channel.
    Ucr(UcrArgs),
    /// Simulate the key generation protocol described by a run descriptor.
    Simulate(SimulateArgs),
    /// Sample information spectra of a channel.
    Spectrum(SpectrumArgs),
    /// Check the converse lemmas on random and protocol-derived instances.
    Lemmas(LemmasArgs),
    /// Re-execute a run manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug)]
struct CapacityArgs {
    /// Channel spec JSON (`{"kind": "dmc", "payload": ...}`).
    channel: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct UcrArgs {
    /// Source spec JSON (`alphabet_x`, `alphabet_y`, row-major `probs`).
    source: PathBuf,
    /// Constraint level in bits.
    #[arg(long = "C", conflicts_with = "channel")]
    c: Option<f64>,
    /// Channel spec whose capacity sets the constraint level.
    #[arg(long)]
    channel: Option<PathBuf>,
    /// Size of the auxiliary alphabet; defaults to |X| + 1.
    #[arg(long)]
    u_card: Option<usize>,
    /// Exhaustive grid search instead of the solver.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 0.02)]
    grid_step: f64,
    #[arg(long, default_value_t = DEFAULT_DIRICHLET_COUNT)]
    dirichlet: usize,
    /// Comma-separated ascending C values; writes curve.csv.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Local-search restarts of the solver.
    #[arg(long)]
    restarts: Option<usize>,
    /// Capacity tolerance when --channel is given.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Run descriptor JSON.
    descriptor: PathBuf,
    /// Enumerate all block pairs instead of sampling (n <= 10).
    #[arg(long)]
    exact: bool,
    /// Overrides the descriptor's trial count.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Cardinality exponent c; defaults to I(U;X) + mu + 1.
    #[arg(long = "card-exponent")]
    card_exponent: Option<f64>,
    /// Target rate H; defaults to I(U;X).
    #[arg(long = "target-rate")]
    target_rate: Option<f64>,
    /// Slack for |H(K) - H(L)| / n, checked in exact mode.
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Debug)]
struct SpectrumArgs {
    /// Channel spec JSON.
    channel: PathBuf,
    /// Input law JSON (`alphabet`, `probs`); uniform when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated block lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_DROP_TOL)]
    drop_tol: f64,
    /// Rate grid step of the inf-information rate scan.
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    rate_step: f64,
    /// Comma-separated rates at which to report the spectrum mass.
    #[arg(long, value_delimiter = ',')]
    mass_below: Vec<f64>,
}

#[derive(Args, Debug)]
struct LemmasArgs {
    #[arg(long, default_value_t = 10_000)]
    instances: usize,
    #[arg(long, default_value_t = 50)]
    telescoping: usize,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, default_value_t = 0.001)]
    beta: f64,
    #[arg(long = "card-exponent", default_value_t = 2.0)]
    card_exponent: f64,
}

#[derive(Args, Debug)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Compare the regenerated outputs with the files next to the manifest
    /// instead of writing them.
    #[arg(long)]
    verify: bool,
}

fn resolve(command: Command, seed: Option<u64>) -> CliResult<Invocation> {
    let root = seed.unwrap_or(0);
    Ok(match command {
        Command::Capacity(a) => Invocation::Capacity(CapacityConfig {
            channel: read_json::<ChannelSpec>(&a.channel)?,
            tol: a.tol,
        }),
        Command::Ucr(a) => {
            let source: JointPmfDoc = read_json(&a.source)?;
            let channel = a.channel.as_deref().map(read_json::<ChannelSpec>).transpose()?;
            let mut solver = SolveOptions {
                seed: root,
                ..SolveOptions::default()
            };
            if let Some(r) = a.restarts {
                solver.restarts = r;
            }
            Invocation::Ucr(UcrConfig {
                u_card: a.u_card.unwrap_or(source.alphabet_x.len() + 1),
                source,
                c: a.c,
                channel,
                tol: a.tol,
                oracle: a.oracle,
                grid_step: a.grid_step,
                dirichlet_count: a.dirichlet,
                grid: a.grid,
                solver,
            })
        }
        Command::Simulate(a) => {
            let mut descriptor: RunDescriptor = read_json(&a.descriptor)?;
            descriptor.seed = Some(seed.or(descriptor.seed).unwrap_or(0));
            if let Some(t) = a.trials {
                descriptor.trials = t;
            }
            Invocation::Simulate(SimulateConfig {
                descriptor,
                exact: a.exact,
                conditions: ConditionSettings {
                    alpha: a.alpha,
                    beta: a.beta,
                    delta: a.delta,
                    c: a.card_exponent,
                    h_target: a.target_rate,
                    epsilon: a.epsilon,
                },
            })
        }
        Command::Spectrum(a) => {
            let channel: ChannelSpec = read_json(&a.channel)?;
            let input = match &a.input {
                Some(p) => read_json::<PmfDoc>(p)?,
                None => {
                    let size = channel.build()?.input_size();
                    PmfDoc::from_pmf(&Pmf::uniform(size)?, None)
                }
            };
            Invocation::Spectrum(SpectrumConfig {
                channel,
                input,
                n: a.n,
                samples: a.samples,
                seed: root,
                drop_tol: a.drop_tol,
                rate_step: a.rate_step,
                mass_below: a.mass_below,
            })
        }
        Command::Lemmas(a) => Invocation::Lemmas(LemmasConfig {
            instances: a.instances,
            telescoping_instances: a.telescoping,
            seed: root,
            alpha: a.alpha,
            beta: a.beta,
            c: a.card_exponent,
        }),
        Command::Replay(_) => unreachable!("replay is dispatched separately"),
    })
}

fn run_and_record(inv: Invocation, format: Format, out_dir: &Path) -> CliResult<()> {
    let start = Instant::now();
    let outcome = inv.execute(format)?;
    let manifest = RunManifest::new(inv, format, &outcome.files, start.elapsed().as_secs_f64());
    write_outputs(out_dir, &outcome.files, &manifest)?;
    let stdout = String::from_utf8_lossy(&outcome.files[0].bytes);
    print!("{stdout}");
    match outcome.invariant_failure {
        Some(msg) => Err(CliError::Invariant(msg)),
        None => Ok(()),
    }
}

fn replay(args: &ReplayArgs, out_dir: &Path) -> CliResult<()> {
    let m = RunManifest::load(&args.manifest)?;
    if !args.verify {
        return run_and_record(m.invocation, m.format, out_dir);
    }
    let outcome = m.invocation.execute(m.format)?;
    let dir = args.manifest.parent().unwrap_or(Path::new("."));
    let bad = mismatches(dir, &m, &outcome.files)?;
    if !bad.is_empty() {
        return Err(CliError::Invariant(format!("replay differs in {}", bad.join(", "))));
    }
    println!("replay of {} matches {} output file(s)", m.invocation.name(), m.outputs.len());
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Replay(a) => replay(&a, &cli.out_dir),
        command => run_and_record(resolve(command, cli.seed)?, cli.format, &cli.out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
