//! `kummerlab`: run the identity checks and moment experiments from the shell.
//!
//! Exit codes: 0 success, 1 a check or computation failed, 2 invalid input.

mod cache;
mod commands;
mod record;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cache::Cache;
use commands::{CliError, CommandOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "kummerlab", version, about = "Kummer sums weighted by |L(1, chi)| modulo a prime")]
struct Cli {
    /// Cache directory (default: $KUMMERLAB_CACHE, then ./.kummerlab)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Include phase timings and a timestamp in the JSON printed to stdout
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the exact identity and invariant suites for p <= pmax
    Verify {
        #[arg(long)]
        pmax: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2,5", allow_hyphen_values = true)]
        n: Vec<i64>,
        /// Also enforce the principal-character identity in its original form
        #[arg(long)]
        stated_principal: bool,
    },
    /// One moment statistic for one prime and twist
    Moments {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long)]
        weighted: bool,
    },
    /// One moment statistic for every prime p = 1 mod 3 in a range
    Scan {
        #[arg(long)]
        pmin: u64,
        #[arg(long)]
        pmax: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        n: i64,
        #[arg(long, default_value_t = 2)]
        order: u32,
        #[arg(long)]
        weighted: bool,
    },
    /// The constant C and the divisor-sum constants C_t
    Constants {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        t: Vec<u64>,
    },
    /// Sums of |L(1, chi)| over the character group
    Lsum {
        #[arg(long)]
        p: u64,
        /// Also report sum chi(t) |L(1, chi)| against C C_t p
        #[arg(long)]
        t: Option<u64>,
    },
    /// Kummer's census of the angles theta_p and the Patterson partial sum
    Kummer {
        #[arg(long)]
        xmax: u64,
        #[arg(long)]
        census: bool,
        #[arg(long)]
        patterson: bool,
        /// Include every per-prime record in the JSON output
        #[arg(long)]
        records: bool,
    },
    /// Time the bulk DFT path against per-character sums
    Bench {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
}

fn run(cli: &Cli, cache: &Cache) -> Result<CommandOutput, CliError> {
    match &cli.command {
        Command::Verify { pmax, n, stated_principal } => commands::verify(*pmax, n, *stated_principal, cache),
        Command::Moments { p, n, order, weighted } => commands::moments(*p, *n, *order, *weighted, cache),
        Command::Scan { pmin, pmax, n, order, weighted } => commands::scan(*pmin, *pmax, *n, *order, *weighted, cache),
        Command::Constants { t } => commands::constants(t),
        Command::Lsum { p, t } => commands::lsum(*p, *t, cache),
        Command::Kummer { xmax, census, patterson, records } => commands::kummer(*xmax, *census, *patterson, *records),
        Command::Bench { p, reps } => commands::bench(*p, *reps),
    }
}

fn emit(cli: &Cli, out: &CommandOutput) -> std::io::Result<()> {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match cli.format {
        Format::Json => {
            let rec = if cli.timings { out.record.clone() } else { out.record.stripped() };
            serde_json::to_writer_pretty(&mut lock, &rec)?;
            writeln!(lock)?;
        }
        Format::Csv => out.table.write_csv(&mut lock).map_err(std::io::Error::other)?,
    }
    lock.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool is configured once");
    }
    let cache = Cache::resolve(cli.cache.clone());
    match run(&cli, &cache) {
        Ok(out) => {
            if let Err(e) = cache.store_run(&out.record) {
                eprintln!("warning: could not store run record under {}: {e}", cache.dir().display());
            }
            if let Err(e) = emit(&cli, &out) {
                eprintln!("error: writing output: {e}");
                return ExitCode::from(1);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}: one or more checks failed", out.record.command);
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
