//! `harmdist` command-line tool.
//!
//! Exit codes: 0 success, 1 usage error or infeasible request, 2 I/O or
//! encoding error, 3 verification found violations.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use harmdist::{Engine, TokenMode};

#[derive(Parser, Debug)]
#[command(
    name = "harmdist",
    version,
    about = "Harmonic edit distance between strings"
)]
pub struct Cli {
    /// What counts as one symbol.
    #[arg(long, global = true, default_value = "codepoints", value_parser = parse_mode)]
    pub mode: TokenMode,

    /// Decimal places in printed distances.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,

    /// LCS engine: auto, dp, bitparallel or huntszymanski.
    #[arg(long, global = true, default_value = "auto", value_parser = parse_engine)]
    pub engine: Engine,

    /// Seed for index construction and random verification.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the distance between two strings.
    Dist { a: OsString, b: OsString },

    /// Print the pairwise distance matrix of a newline-delimited file as TSV.
    Matrix { input: PathBuf },

    /// Print the k nearest lines of a corpus file to a query string.
    Knn {
        corpus: PathBuf,
        query: OsString,
        #[arg(short, long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        /// Load a prebuilt index instead of building one.
        #[arg(long, conflicts_with = "no_index")]
        index: Option<PathBuf>,
        /// Linear scan, no index.
        #[arg(long)]
        no_index: bool,
    },

    /// Build a VP-tree index for a corpus file and write it to disk.
    Index { corpus: PathBuf, output: PathBuf },

    /// Verify the metric axioms and supporting lemmas.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Enumerate every string up to the maximum length (default).
    #[arg(long, conflicts_with = "random")]
    pub exhaustive: bool,
    /// Draw random samples.
    #[arg(long)]
    pub random: bool,
    /// Exact rational arithmetic (default when exhaustive).
    #[arg(long, conflicts_with = "float")]
    pub rational: bool,
    /// Production floating-point path (default when random).
    #[arg(long)]
    pub float: bool,
    #[arg(long)]
    pub alphabet: Option<u32>,
    #[arg(long)]
    pub maxlen: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Print a JSON summary instead of text.
    #[arg(long)]
    pub json: bool,
    #[arg(long, hide = true, value_enum)]
    pub fixture: Option<FixtureArg>,
    /// Parameters as key=value: alphabet, maxlen, samples, seed.
    #[arg(value_name = "KEY=VALUE")]
    pub params: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FixtureArg {
    BrokenLcs,
}

fn parse_mode(s: &str) -> Result<TokenMode, String> {
    s.parse().map_err(|e: harmdist::Error| e.to_string())
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    s.parse().map_err(|e: harmdist::Error| e.to_string())
}

/// Terminal failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl From<harmdist::Error> for Failure {
    fn from(e: harmdist::Error) -> Self {
        use harmdist::Error as E;
        match e {
            E::InvalidUtf8 | E::Io(_) | E::IndexFormat(_) => Failure::Input(e.to_string()),
            E::Precondition(_) | E::Capacity { .. } | E::EmptyCorpus => {
                Failure::Usage(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = commands::run(&cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(code) => {
            if let Err(e) = flushed {
                // closed pipe and the like
                eprintln!("harmdist: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            let msg = match &f {
                Failure::Usage(m) | Failure::Input(m) => m,
            };
            eprintln!("harmdist: {msg}");
            ExitCode::from(f.code())
        }
    }
}
