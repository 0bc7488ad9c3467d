//! `lp`: parse, evaluate, bound and query statistical probability logic.

mod commands;
mod output;
mod reproduce;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use output::Format;

#[derive(Parser, Debug)]
#[command(name = "lp", version, about = "Statistical probability logic toolkit")]
pub struct Cli {
    /// Output style; `structured` emits versioned JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Largest number of tuples a single probability term may enumerate.
    #[arg(long, global = true, default_value_t = lp_logic::eval::DEFAULT_MAX_ENUM)]
    pub max_enum: u64,

    /// Evaluate without the thread pool.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and sort-check a `.lp` file and print its canonical form.
    Parse { file: PathBuf },
    /// Evaluate each sentence or term of a file on a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        sentences: PathBuf,
    },
    /// Bound a probability term given statistical sentences.
    Entail {
        #[arg(long)]
        sentences: PathBuf,
        /// A one-variable probability term, e.g. `[Q(x)]{x}`.
        #[arg(long)]
        query: String,
    },
    /// Compile, query or check a Bayes net file.
    Bayes {
        #[command(subcommand)]
        action: BayesAction,
    },
    /// Degree of belief in a ground literal from a knowledge base.
    Believe {
        #[arg(long)]
        sentences: PathBuf,
        /// A ground literal about one constant, e.g. `Fly(Tweety)`.
        #[arg(long)]
        query: String,
    },
    /// Run the probability axiom suite over random models.
    CheckAxioms {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of models.
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Domain sizes, cycled through: `1-6` or `2,3,5`.
        #[arg(long, default_value = "1-6")]
        sizes: String,
        /// Formula pairs per model.
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Break every model's measure to check that the suite notices.
        #[arg(long)]
        inject_bug: bool,
    },
    /// Run the shipped examples and compare with their expected output.
    Reproduce {
        #[arg(long, default_value = "paper-examples")]
        dir: PathBuf,
        /// Rewrite the expected outputs instead of comparing.
        #[arg(long)]
        update: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum BayesAction {
    /// Print the net as `.lp` sentences.
    Compile { net: PathBuf },
    /// Exact conditional probability, e.g. `--query "X1 | X2, !X4"`.
    Query {
        net: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Check every signed product equation on the net's joint.
    Verify { net: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Ctx::new(PathBuf::new(), &cli);
    let (code, out, err) = commands::run(&ctx, &cli.command);
    let _ = std::io::stdout().write_all(out.as_bytes());
    let _ = std::io::stderr().write_all(err.as_bytes());
    ExitCode::from(code)
}
