//! `thinset` command-line front end.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use thinset::rational::parse_rational;
use thinset::Rational;

mod commands;
mod report;

use report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "thinset",
    version,
    about = "Thin subsets of the positive integers"
)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Thinness verdicts for a set.
    Classify(ClassifyArgs),
    /// Density ratios A(n)/n at checkpoints.
    Density(DensityArgs),
    /// Extreme window counts for uniform density.
    Udensity(UdensityArgs),
    /// Greedy block decomposition.
    Decompose(SetHorizonM),
    /// Merge two sets into blocks of bounded size.
    Merge(MergeArgs),
    /// Split a very thin set into super thin pieces.
    Split(SetHorizonM),
    /// Two sets meeting exactly in a given thin set.
    Cover(SetHorizon),
    /// Ideal and statistical convergence through exceedance sets.
    Converge(ConvergeArgs),
    /// Named example sets.
    Gallery {
        #[command(subcommand)]
        action: GalleryCommand,
    },
    /// Binary tree families of sets.
    Bw {
        #[command(subcommand)]
        action: BwCommand,
    },
}

#[derive(Debug, Subcommand)]
enum GalleryCommand {
    List,
}

#[derive(Debug, Subcommand)]
enum BwCommand {
    /// Check S1-S3 on every node up to a depth.
    Verify {
        #[arg(long, value_parser = parse_usize)]
        depth: usize,
        #[arg(long, value_parser = parse_u64)]
        horizon: u64,
        /// Use this set at every node instead of the dyadic family.
        #[arg(long)]
        constant: Option<String>,
    },
    /// Nodes along a branch and the differences between consecutive nodes.
    Branch {
        #[arg(long)]
        x: String,
    },
    /// First n_k elements of each branch difference.
    Ar {
        #[arg(long)]
        x: String,
        #[arg(long, value_parser = parse_u64, value_delimiter = ',', required = true)]
        indices: Vec<u64>,
        #[arg(long, value_parser = parse_u64)]
        horizon: u64,
    },
    /// Runs of growing length taken from the sets along a branch.
    Case1 {
        #[arg(long)]
        x: String,
        #[arg(long, value_parser = parse_u64)]
        m: u64,
        #[arg(long, value_parser = parse_u64)]
        horizon: u64,
        #[arg(long)]
        constant: Option<String>,
    },
}

#[derive(Debug, Args)]
struct SetHorizon {
    /// Set expression or gallery name.
    #[arg(long)]
    set: String,
    #[arg(long, value_parser = parse_u64)]
    horizon: u64,
}

#[derive(Debug, Args)]
struct SetHorizonM {
    #[command(flatten)]
    base: SetHorizon,
    /// Gap threshold inside a block.
    #[arg(long, value_parser = parse_u64, default_value = "1")]
    m: u64,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    base: SetHorizon,
    /// Classes to decide, comma separated.
    #[arg(long, value_delimiter = ',')]
    class: Vec<String>,
    /// Every class (the default when no class is given).
    #[arg(long)]
    all: bool,
    /// Gap thresholds tried by the run-based diagnostics.
    #[arg(long, value_parser = parse_u64, value_delimiter = ',')]
    m_grid: Vec<u64>,
}

#[derive(Debug, Args)]
struct DensityArgs {
    #[command(flatten)]
    base: SetHorizon,
    /// Defaults to powers of two and the horizon.
    #[arg(long, value_parser = parse_u64, value_delimiter = ',')]
    checkpoints: Vec<u64>,
    /// Fraction of checkpoints used for the liminf/limsup estimates.
    #[arg(long, value_parser = parse_q, default_value = "1/2")]
    tail: Rational,
}

#[derive(Debug, Args)]
struct UdensityArgs {
    #[command(flatten)]
    base: SetHorizon,
    /// Window lengths.
    #[arg(long, value_parser = parse_u64, value_delimiter = ',', required = true)]
    k: Vec<u64>,
    #[arg(long, value_parser = parse_u64, default_value = "0")]
    burn_in: u64,
}

#[derive(Debug, Args)]
struct MergeArgs {
    /// 1: two super thin sets; 2: a very thin set and a super thin set.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["1", "2", "lemma-1", "lemma-2"]))]
    lemma: String,
    #[arg(long)]
    s: String,
    #[arg(long)]
    t: String,
    #[arg(long, value_parser = parse_u64)]
    horizon: u64,
    /// Gap threshold for the blocks of S (`--lemma 2` only).
    #[arg(long, value_parser = parse_u64, default_value = "1")]
    m: u64,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    /// Catalog sequence: paper_x or paper_y.
    #[arg(long, group = "sequence")]
    seq: Option<String>,
    /// Explicit values x_1, x_2, ...
    #[arg(long, group = "sequence", value_parser = parse_q, value_delimiter = ',')]
    table: Vec<Rational>,
    /// Two-valued sequence: `--on` on this set, `--off` elsewhere.
    #[arg(long, group = "sequence")]
    indicator: Option<String>,
    #[arg(long, value_parser = parse_q, default_value = "-1", allow_hyphen_values = true)]
    on: Rational,
    #[arg(long, value_parser = parse_q, default_value = "1", allow_hyphen_values = true)]
    off: Rational,
    #[arg(long, value_parser = parse_q, allow_hyphen_values = true)]
    limit: Rational,
    #[arg(long, value_parser = parse_q, value_delimiter = ',', required = true)]
    eps: Vec<Rational>,
    #[arg(long, value_parser = parse_u64)]
    horizon: u64,
    /// statistical, super-thin, very-thin, very-very-thin
    #[arg(long, value_delimiter = ',')]
    modes: Vec<String>,
}

fn parse_q(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_u64(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.trim().parse::<u64>() {
        return Ok(n);
    }
    let q = parse_q(s)?;
    if !q.is_integer() {
        return Err(format!("`{s}` is not an integer"));
    }
    q.to_integer()
        .to_u64()
        .ok_or_else(|| format!("`{s}` is not a non-negative 64-bit integer"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    parse_u64(s).and_then(|n| usize::try_from(n).map_err(|e| e.to_string()))
}

/// The invocation as it would be typed.
fn echo(args: &[String]) -> String {
    let quote = |a: &String| {
        if !a.is_empty()
            && a.chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_/.,=:".contains(c))
        {
            a.clone()
        } else {
            format!("'{}'", a.replace('\'', "'\\''"))
        }
    };
    std::iter::once("thinset".to_string())
        .chain(args.iter().skip(1).map(quote))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command, echo(&args)) {
        Ok(report) => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            if let Err(e) = report.write(cli.format, &mut out).and_then(|_| out.flush()) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
