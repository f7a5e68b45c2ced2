//! `legsurg`: command-line front end.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails (d^2 != 0,
//! failed chain-map or A-infinity relations, dictionary mismatch), 2 on input
//! errors.

mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "legsurg", version, about = "Legendrian surgery invariants with exact homology over Q")]
pub struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Dimension parameter n for documents written in terms of n.
    #[arg(long, global = true)]
    pub dim: Option<i64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComplexKind {
    Lin,
    Cyc,
    Hoplus,
    Ho,
    Mcyc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Theory {
    Ch,
    #[value(name = "sh+")]
    ShPlus,
    Sh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LefschetzEmit {
    Dga,
    Hochschild,
    DictionaryCheck,
}

/// Degree window and word-length bound shared by complex builders.
#[derive(clap::Args, Debug, Clone, Copy)]
pub struct Window {
    #[arg(long = "min-deg", allow_hyphen_values = true)]
    pub min_deg: i64,
    #[arg(long = "max-deg", allow_hyphen_values = true)]
    pub max_deg: i64,
    /// Extra word length allowed by the action filtration (used only when
    /// some generator has grading <= 0).
    #[arg(long = "max-len", default_value_t = 0)]
    pub max_len: usize,
    /// Accept a truncated (action-filtered) complex instead of failing.
    #[arg(long)]
    pub allow_truncated: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a DGA document: gradings, endpoints, d^2 = 0.
    Validate { dga: String },
    /// Homology of a complex built from a DGA.
    Homology {
        dga: String,
        #[arg(long, value_enum)]
        complex: ComplexKind,
        #[command(flatten)]
        window: Window,
        /// Augmentation document (for `--complex lin`; default: zero).
        #[arg(long)]
        augmentation: Option<String>,
    },
    /// Surgery complexes: LCH (ch), SLH+ (sh+) or SLH (sh).
    Surgery {
        dga: String,
        /// `ball:<n>` or a filling document.
        #[arg(long)]
        filling: String,
        #[arg(long, value_enum)]
        theory: Theory,
        #[command(flatten)]
        window: Window,
        /// Count table document (default: all counts zero).
        #[arg(long)]
        counts: Option<String>,
    },
    /// Enumerate augmentations with values in a finite set.
    Augmentations {
        dga: String,
        /// Comma-separated rationals, e.g. `-1,0,1`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<String>,
    },
    /// Check a DGA morphism document.
    Morphism {
        file: String,
        #[arg(long)]
        check: bool,
    },
    /// Lefschetz fibration algebra from directed A-infinity data.
    Lefschetz {
        ainf: String,
        /// Truncation order N (required: all equalities hold up to t^N).
        #[arg(long = "t-order")]
        t_order: usize,
        #[arg(long, value_enum)]
        emit: LefschetzEmit,
        #[arg(long = "min-deg", allow_hyphen_values = true, default_value_t = 0)]
        min_deg: i64,
        #[arg(long = "max-deg", allow_hyphen_values = true, default_value_t = 4)]
        max_deg: i64,
        #[arg(long = "max-len", default_value_t = 8)]
        max_len: usize,
    },
    /// The bundled example corpus.
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExamplesAction {
    /// List the bundled documents.
    List,
    /// Print a bundled document.
    Emit { name: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(run::Failure::Math { output, reason }) => {
            print!("{output}");
            eprintln!("error: {reason}");
            ExitCode::from(1)
        }
        Err(run::Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
