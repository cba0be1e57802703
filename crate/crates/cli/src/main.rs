//! `fskq`: build fully symmetric node sets and kernel quadrature rules, apply
//! them, and run the bundled experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use fskq::experiments::ExperimentId;
use fskq::node_selection::RandomKind;
use fskq::{Error, MeasureKind};

mod commands;
mod config;

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_WARNINGS: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "fskq", version, about = "Kernel quadrature on fully symmetric node sets")]
#[command(args_override_self = true)]
struct Cli {
    /// Flat `key = value` file; keys are long flag names of the subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a node set and write it as JSON.
    Nodes(NodesCmd),
    /// Solve for the quadrature weights of a node set.
    Rule(RuleCmd),
    /// Apply a rule to a values file or a built-in integrand.
    Integrate(IntegrateCmd),
    /// Run one of the bundled experiments.
    Experiment(ExperimentCmd),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BasisArg {
    Cc,
    Gh,
}

/// Where generators come from: a sparse grid, random draws, or a list.
#[derive(Args, Debug, Clone)]
struct NodeArgs {
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum)]
    basis: Option<BasisArg>,
    /// Sparse-grid level.
    #[arg(long)]
    q: Option<usize>,
    /// Draw random generators instead of a sparse grid.
    #[arg(long)]
    random: bool,
    /// Number of random generators.
    #[arg(long = "J", alias = "count", value_name = "J")]
    count: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Distribution of random generators: gaussian or uniform.
    #[arg(long, default_value = "gaussian")]
    kind: RandomKind,
    /// Zero out random entries with magnitude below this value.
    #[arg(long)]
    truncate_below: Option<f64>,
    /// Explicit generators, `;`-separated, entries `,`-separated.
    #[arg(long, value_name = "LIST")]
    generators: Option<String>,
    /// Refuse node sets with more nodes than this.
    #[arg(long, default_value_t = 5_000_000)]
    node_cap: u64,
}

#[derive(Args, Debug)]
struct NodesCmd {
    #[command(flatten)]
    nodes: NodeArgs,
    #[arg(long, default_value = "nodes.json")]
    out: PathBuf,
    /// Also write every node as a CSV line to this file.
    #[arg(long, value_name = "FILE")]
    expand: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RuleCmd {
    /// Node-set file; otherwise the node flags generate one.
    #[arg(long = "nodes", value_name = "FILE")]
    nodes_file: Option<PathBuf>,
    #[command(flatten)]
    nodes: NodeArgs,
    #[arg(long, default_value_t = 1.0)]
    length_scale: f64,
    /// gaussian (standard normal) or uniform (the cube [-1, 1]^d).
    #[arg(long, default_value = "gaussian")]
    measure: MeasureKind,
    /// Remove the origin set before solving.
    #[arg(long)]
    drop_center: bool,
    /// Compare against weights from the full kernel system.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 10_000)]
    oracle_cap: usize,
    #[arg(long, default_value = "rule.json")]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum IntegrandArg {
    Ex1,
    Ex2,
    Bond,
}

#[derive(Args, Debug)]
struct IntegrateCmd {
    #[arg(long, value_name = "FILE")]
    rule: PathBuf,
    /// Function values at the rule's nodes, in node order.
    #[arg(long, value_name = "FILE", conflicts_with = "integrand")]
    values: Option<PathBuf>,
    #[arg(long, value_enum)]
    integrand: Option<IntegrandArg>,
    /// Write the built-in integrand's values file here.
    #[arg(long, value_name = "FILE", requires = "integrand")]
    save_values: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ExperimentCmd {
    id: ExperimentId,
    #[arg(long)]
    qmax: Option<usize>,
    /// ex3 Gauss–Hermite level.
    #[arg(long)]
    level: Option<usize>,
    /// ex3 step counts: `a:b:step`, `a:b`, or a comma list.
    #[arg(long)]
    dims: Option<String>,
    /// ex1 numbers of fully symmetric sets.
    #[arg(long = "J", value_name = "LIST")]
    j_values: Option<String>,
    #[arg(long)]
    seeds: Option<String>,
    #[arg(long)]
    length_scale: Option<f64>,
    /// ex1 length-scale candidates, `lo:hi:count` on a log scale.
    #[arg(long, value_name = "LO:HI:COUNT")]
    mle_grid: Option<String>,
    #[arg(long)]
    fit_on_fss: bool,
    /// ex3: keep the origin set.
    #[arg(long)]
    keep_center: bool,
    #[arg(long)]
    node_cap: Option<u64>,
    #[arg(long)]
    allow_large: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Report destination; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Finished without error; `warned` selects the exit code.
pub struct Done {
    pub warned: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        fskq::error::ErrorCategory::Validation => EXIT_VALIDATION,
        fskq::error::ErrorCategory::Numerical => EXIT_NUMERICAL,
        fskq::error::ErrorCategory::Io => EXIT_IO,
    }
}

fn fail(code: &str, message: &str, exit: u8) -> ExitCode {
    let one_line = message.lines().map(str::trim).filter(|l| !l.is_empty()).collect::<Vec<_>>().join(" ");
    eprintln!("error: {code}: {one_line}");
    ExitCode::from(exit)
}

fn main() -> ExitCode {
    let cmd = Cli::command();
    let argv = match config::expand_args(std::env::args_os().collect(), &cmd) {
        Ok(a) => a,
        Err(e) => return fail(e.reason_code(), &e.to_string(), exit_code(&e)),
    };
    let cli = match cmd.try_get_matches_from(argv).and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let message = text.strip_prefix("error: ").unwrap_or(&text);
            let first = message.split("\n\n").next().unwrap_or(message);
            return fail("usage", first, EXIT_VALIDATION);
        }
    };
    let result = match cli.command {
        Command::Nodes(c) => commands::nodes(c),
        Command::Rule(c) => commands::rule(c),
        Command::Integrate(c) => commands::integrate(c),
        Command::Experiment(c) => commands::experiment(c),
    };
    match result {
        Ok(Done { warned: false }) => ExitCode::SUCCESS,
        Ok(Done { warned: true }) => ExitCode::from(EXIT_WARNINGS),
        Err(e) => fail(e.reason_code(), &e.to_string(), exit_code(&e)),
    }
}
