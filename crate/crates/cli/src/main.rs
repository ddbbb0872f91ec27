//! `unigate`: evolve NAND/NOR implementations of finite state machines.

mod commands;
mod machine;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use unigate::cgp::MutationMode;
use unigate::evolve::DEFAULT_MAX_GENERATIONS;

/// Exit statuses shared by every subcommand.
pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "unigate",
    version,
    about = "Evolve NAND/NOR gate netlists for finite state machines with Cartesian Genetic Programming"
)]
struct Cli {
    /// Worker threads for `--repeat` and `sweep` (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a netlist for a machine and write its artifacts.
    Synth(SynthArgs),
    /// Check a BLIF netlist against a machine's truth table.
    Verify(VerifyArgs),
    /// Co-simulate a BLIF netlist with latches against a machine.
    Sim(SimArgs),
    /// Write the encoded truth table as a PLA (for espresso baselines).
    Encode(EncodeArgs),
    /// Convert a saved genotype to BLIF and/or DOT.
    Export(ExportArgs),
    /// Run a parameter grid and write detail and aggregate CSVs.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
pub struct MachineArgs {
    /// KISS2 state table.
    #[arg(value_name = "KISS2", required_unless_present = "builtin")]
    pub kiss2: Option<PathBuf>,
    /// Bundled machine instead of a file: dk27, lion9, s8, beecount, bbara,
    /// dk14, 10101, 0001000, 01100110, 12-0s-then-1.
    #[arg(long, conflicts_with = "kiss2")]
    pub builtin: Option<String>,
    /// State assignment.
    #[arg(long, value_enum, default_value_t = Encoding::Natural)]
    pub encoding: Encoding,
    /// Explicit state assignment, one `STATE BITS` line per state (overrides
    /// --encoding).
    #[arg(long, value_name = "FILE")]
    pub encoding_map: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Encoding {
    Natural,
    Gray,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Redraw each chosen gene uniformly from its legal range.
    Redraw,
    /// Always change each chosen gene to a different legal value.
    Strict,
}

impl From<Mutation> for MutationMode {
    fn from(m: Mutation) -> Self {
        match m {
            Mutation::Redraw => MutationMode::Redraw,
            Mutation::Strict => MutationMode::Strict,
        }
    }
}

fn mutation_rate(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if (0.1..=100.0).contains(&v) {
        Ok(v)
    } else {
        Err("must lie in [0.1, 100]".into())
    }
}

#[derive(Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub machine: MachineArgs,
    /// Number of nodes (columns) in the single CGP row.
    #[arg(long)]
    pub m: usize,
    /// Offspring per generation.
    #[arg(long, default_value_t = 4)]
    pub lambda: usize,
    /// Mutation rate in percent of all genes, in [0.1, 100]. Values of 3 to 10
    /// work well in practice.
    #[arg(long, default_value_t = 10.0, value_parser = mutation_rate)]
    pub mu: f64,
    /// RNG seed; 0 picks one from the clock and prints it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATIONS)]
    pub max_generations: u64,
    #[arg(long, value_enum, default_value_t = Mutation::Redraw)]
    pub mutation: Mutation,
    /// Run seeds seed, seed+1, ..., seed+N-1 and keep the smallest solution.
    #[arg(long, default_value_t = 1)]
    pub repeat: u64,
    /// Directory for the .cgp, .blif, .dot, .report.txt and .csv artifacts.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Artifact file stem (default: machine name).
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// BLIF netlist, combinational or with latches.
    pub netlist: PathBuf,
    #[command(flatten)]
    pub machine: MachineArgs,
}

#[derive(Args)]
pub struct SimArgs {
    /// BLIF netlist with latches.
    pub netlist: PathBuf,
    #[command(flatten)]
    pub machine: MachineArgs,
    /// Comma separated input vectors, each an integer whose most significant
    /// bit is in0, or a bit string such as 01.
    #[arg(long, conflicts_with = "random")]
    pub stimulus: Option<String>,
    /// Number of random stimulus sequences.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub cycles: usize,
    /// Seed for --random.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub machine: MachineArgs,
    /// Output PLA path (default: stdout).
    #[arg(long)]
    pub pla: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExportArgs {
    /// Genotype text written by `synth`.
    pub genotype: PathBuf,
    /// Machine the genotype implements; adds state names and latches.
    #[arg(value_name = "KISS2")]
    pub kiss2: Option<PathBuf>,
    #[arg(long, conflicts_with = "kiss2")]
    pub builtin: Option<String>,
    #[arg(long, value_enum, default_value_t = Encoding::Natural)]
    pub encoding: Encoding,
    #[arg(long, value_name = "FILE")]
    pub encoding_map: Option<PathBuf>,
    #[arg(long)]
    pub blif: Option<PathBuf>,
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// CSV grid with header `benchmark,lambda,m,mu_r,seeds`; `seeds` is a
    /// count and runs use seeds 1..=count. A benchmark is a bundled name or a
    /// KISS2 path.
    pub grid: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_GENERATIONS)]
    pub max_generations: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap's own usage-error status (2) would read as "budget exhausted"
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { EXIT_OK });
        }
    };
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
        {
            log::warn!("could not size thread pool: {e}");
        }
    }
    let result = match cli.command {
        Command::Synth(a) => synth::run(a),
        Command::Verify(a) => commands::verify(a),
        Command::Sim(a) => commands::sim(a),
        Command::Encode(a) => commands::encode(a),
        Command::Export(a) => commands::export(a),
        Command::Sweep(a) => commands::sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
