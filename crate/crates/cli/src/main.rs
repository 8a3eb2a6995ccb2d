use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use vltau_core::report::Report;
use vltau_core::suites::{run_suite, Config, Options, ALL_SUITES};

#[derive(Parser)]
#[command(name = "vltau", version, about = "Exact verification suites for the fixed-point subalgebra V_L^tau, L = sqrt(2)A2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Truncation grade N for character checks (commutators use min(N, 5)).
    #[arg(long, global = true, default_value_t = 6)]
    max_weight: i64,
    /// Seed for the randomized property suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    report_format: Format,
    /// Directory whose data files replace the built-in ones.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Include wall times in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Identities in V_L checked by the vertex engine.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// The Zhu algebra scalar system.
    Zhu {
        #[command(subcommand)]
        what: ZhuCmd,
    },
    /// Classification of simple modules.
    Classify {
        #[command(subcommand)]
        what: ClassifyCmd,
    },
    /// Graded characters.
    Chars {
        #[command(subcommand)]
        what: CharsCmd,
    },
    /// Fusion tables.
    Fusion {
        #[command(subcommand)]
        what: FusionCmd,
    },
    /// Every suite in pipeline order.
    All,
}

#[derive(Subcommand)]
enum VerifyCmd {
    Structure,
    AppendixB,
    Singular,
    Section4,
    Commutators,
    Borcherds,
}

#[derive(Subcommand)]
enum ZhuCmd {
    Derive,
}

#[derive(Subcommand)]
enum ClassifyCmd {
    Run,
    ZhuStructure,
    Sigma,
}

#[derive(Subcommand)]
enum CharsCmd {
    Decompositions,
    Twisted,
}

#[derive(Subcommand)]
enum FusionCmd {
    Check,
}

fn suite_names(c: &Command) -> Vec<&'static str> {
    let one = |s: &'static str| vec![s];
    match c {
        Command::Verify { what } => one(match what {
            VerifyCmd::Structure => "verify structure",
            VerifyCmd::AppendixB => "verify appendix-b",
            VerifyCmd::Singular => "verify singular",
            VerifyCmd::Section4 => "verify section4",
            VerifyCmd::Commutators => "verify commutators",
            VerifyCmd::Borcherds => "verify borcherds",
        }),
        Command::Zhu { what: ZhuCmd::Derive } => one("zhu derive"),
        Command::Classify { what } => one(match what {
            ClassifyCmd::Run => "classify run",
            ClassifyCmd::ZhuStructure => "classify zhu-structure",
            ClassifyCmd::Sigma => "classify sigma",
        }),
        Command::Chars { what } => one(match what {
            CharsCmd::Decompositions => "chars decompositions",
            CharsCmd::Twisted => "chars twisted",
        }),
        Command::Fusion { what: FusionCmd::Check } => one("fusion check"),
        Command::All => ALL_SUITES.to_vec(),
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    anyhow::ensure!(cli.max_weight >= 0, "--max-weight must be non-negative");
    let cfg = match &cli.config {
        Some(dir) => Config::from_dir(dir).with_context(|| format!("loading data from {}", dir.display()))?,
        None => Config::builtin(),
    };
    let opt = Options { max_weight: cli.max_weight, seed: cli.seed, timing: cli.timing };
    let names = suite_names(&cli.command);
    let suites = names.iter().map(|n| run_suite(n, &cfg, &opt).expect("known suite")).collect();
    let command = if names.len() == 1 { names[0] } else { "all" };
    let report = Report::new(command, cli.max_weight, cli.seed, suites);
    match cli.report_format {
        Format::Json => print!("{}", report.to_json()),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
