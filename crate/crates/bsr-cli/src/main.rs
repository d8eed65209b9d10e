//! `bsr`: presentations and certification for Bott-Samelson rings of
//! Coxeter words.
//!
//! Exit codes: 0 = all checks pass, 1 = a violation was found, 2 =
//! input error, 3 = inconclusive (float tolerance). Reports go to
//! stdout, diagnostics to stderr.

mod commands;
mod job;
mod render;
mod suite;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{cmd_find_ample, cmd_present, cmd_verify, CmdError, Which, EXIT_INPUT};
use job::{resolve, JobSpec, Overrides};
use render::Format;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "bsr",
    about = "Bott-Samelson rings of Coxeter words: quadratic presentations, \
             Groebner/Koszul certificates and the Kaehler package"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON job document (generators, coxeter_matrix, word, backend, ...)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Word letters, comma separated; names from the job document, or
    /// s1,s2,... against a uniform order-3 system when no document is given
    #[arg(long)]
    word: Option<String>,
    /// Scalar backend: rational (exact, orders in {1,2,3,inf}) or float
    #[arg(long)]
    backend: Option<String>,
    /// Zero tolerance of the float backend
    #[arg(long)]
    tolerance: Option<f64>,
    /// Requested float mantissa bits (the backend is f64; clamped to 53)
    #[arg(long)]
    precision_bits: Option<u32>,
    /// Seed for randomized commands
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WhichArg {
    Pd,
    Gb,
    Hl,
    Hr,
    Oracle,
    All,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the quadratic presentation (Q matrix, raw and reduced relations)
    Present {
        #[command(flatten)]
        common: Common,
    },
    /// Run a certification suite and exit with the verdict
    Verify {
        #[arg(value_enum)]
        which: WhichArg,
        #[command(flatten)]
        common: Common,
        /// Explicit Lefschetz coefficients for hl/hr (else searched)
        #[arg(long)]
        lefschetz: Option<String>,
    },
    /// Search for an ample Lefschetz vector by coefficient halving
    FindAmple {
        #[command(flatten)]
        common: Common,
    },
    /// Seeded random cross-validation over sampled systems and words
    RandomSuite {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
}

fn load_job(common: &Common, lefschetz: Option<String>) -> Result<job::Job, job::InputError> {
    let spec = match &common.input {
        Some(path) => JobSpec::from_file(path)?,
        None => JobSpec::default(),
    };
    resolve(
        spec,
        Overrides {
            word: common.word.clone(),
            backend: common.backend.clone(),
            tolerance: common.tolerance,
            precision_bits: common.precision_bits,
            lefschetz,
        },
    )
}

fn run() -> Result<(String, i32), String> {
    let cli = Cli::parse();
    let outcome: Result<(String, i32), CmdError> = match cli.cmd {
        Cmd::Present { common } => {
            let j = load_job(&common, None).map_err(|e| e.to_string())?;
            cmd_present(&j, common.format)
        }
        Cmd::Verify {
            which,
            common,
            lefschetz,
        } => {
            let j = load_job(&common, lefschetz).map_err(|e| e.to_string())?;
            let which = match which {
                WhichArg::Pd => Which::Pd,
                WhichArg::Gb => Which::Gb,
                WhichArg::Hl => Which::Hl,
                WhichArg::Hr => Which::Hr,
                WhichArg::Oracle => Which::Oracle,
                WhichArg::All => Which::All,
            };
            cmd_verify(&j, which, common.format)
        }
        Cmd::FindAmple { common } => {
            let j = load_job(&common, None).map_err(|e| e.to_string())?;
            cmd_find_ample(&j, common.format)
        }
        Cmd::RandomSuite {
            common,
            count,
            max_len,
        } => {
            let spec_seed = match &common.input {
                Some(path) => JobSpec::from_file(path)
                    .map_err(|e| e.to_string())?
                    .seed,
                None => None,
            };
            let seed = common.seed.or(spec_seed).unwrap_or(0);
            let eps = common
                .tolerance
                .unwrap_or(bsr_core::numeric::DEFAULT_EPS);
            suite::cmd_random_suite(seed, count, max_len, eps, common.format)
        }
    };
    outcome.map_err(|e| e.to_string())
}

fn main() {
    match run() {
        Ok((report, code)) => {
            print!("{report}");
            std::process::exit(code);
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(EXIT_INPUT);
        }
    }
}
