mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};

#[derive(Parser)]
#[command(name = "threshold-lab", version, about = "Weightedness and trade robustness of simple games")]
struct Cli {
    /// Human-readable summaries instead of JSON
    #[arg(long, global = true)]
    pretty: bool,

    /// Worker threads for parallel work (default: all cores)
    #[arg(long, global = true, env = "THRESHOLD_LAB_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Trade,
    Invariant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnumModeArg {
    Trade,
    Invariant,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetForm {
    Explicit,
    Invariants,
    Weighted,
}

#[derive(Subcommand)]
enum Command {
    /// Completeness, invariants, trivial players and weightedness of a game
    Analyze {
        /// Game document (JSON), `-` for standard input
        file: PathBuf,
    },
    /// Weights for weighted games, a shortest trade certificate otherwise
    Certify(CertifyArgs),
    /// Enumerate complete games and count them by verdict
    Enumerate(EnumerateArgs),
    /// Compare closed-form counts with the enumeration
    Formulas {
        /// One of cg_r1, wg_r1, cg_t2, cg_t1, wg_t1 (default: all)
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
    },
    /// Characteristic invariants of a named game or family member
    Family {
        name: String,
        /// Parameters as key=value, comma separated or repeated
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Add a class of two players, preserving robustness of this kind
        #[arg(long)]
        lift: Option<ModeArg>,
        /// Also report weightedness and first failing trade lengths
        #[arg(long)]
        analyze: bool,
    },
    /// Rewrite a game document in another form
    Convert {
        file: PathBuf,
        #[arg(long, value_enum)]
        to: TargetForm,
        /// Weighted output with one weight per player
        #[arg(long)]
        per_player: bool,
    },
    /// Search small games for counterexamples to 3-trade statements
    Conjecture {
        /// t3r2, t3 or r2
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 1)]
        n_min: u32,
        #[arg(long)]
        n_max: u32,
    },
}

#[derive(Args)]
struct CertifyArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value = "invariant")]
    mode: ModeArg,
    #[arg(long, default_value_t = 4)]
    max_k: usize,
    /// Also give the certificate as player-level coalitions
    #[arg(long)]
    expand: bool,
}

#[derive(Args)]
struct EnumerateArgs {
    /// Player count `N` or range `A..B` (inclusive)
    #[arg(long)]
    n: String,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 4)]
    cap_k: usize,
    /// Largest length tried for non-weighted games surviving the cap
    #[arg(long, default_value_t = 6)]
    escalate_to: usize,
    #[arg(long, value_enum, default_value = "trade")]
    mode: EnumModeArg,
    /// One JSON record per game
    #[arg(long)]
    records: Option<PathBuf>,
    /// Count table as CSV, `-` for standard output
    #[arg(long)]
    csv: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Analyze { file } => commands::analyze(&file, cli.pretty),
        Command::Certify(a) => commands::certify(&a.file, a.mode, a.max_k, a.expand, cli.pretty),
        Command::Enumerate(a) => commands::enumerate(
            &commands::EnumerateRequest {
                n: a.n,
                t: a.t,
                r: a.r,
                cap_k: a.cap_k,
                escalate_to: a.escalate_to,
                mode: a.mode,
                records: a.records,
                csv: a.csv,
            },
            cli.pretty,
        ),
        Command::Formulas { check, n_min, n_max } => commands::formulas(check.as_deref(), n_min, n_max, cli.pretty),
        Command::Family { name, params, lift, analyze } => {
            commands::family(&name, &params, lift, analyze, cli.pretty)
        }
        Command::Convert { file, to, per_player } => commands::convert(&file, to, per_player, cli.pretty),
        Command::Conjecture { target, n_min, n_max } => commands::conjecture(&target, n_min, n_max, cli.pretty),
    };
    match result {
        Ok(Outcome::Verdict) => ExitCode::SUCCESS,
        Ok(Outcome::Inconclusive) => ExitCode::from(2),
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
