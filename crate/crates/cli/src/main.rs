use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use shifteq_cli::commands::{self, SectionChoice, SweepSource};
use shifteq_core::OracleBudget;

/// Shift-equivalence classification of finite relations.
#[derive(Parser)]
#[command(name = "shifteq", version)]
struct Cli {
    /// Read and write matrices transposed (column x, row y set iff y ∈ R(x)).
    #[arg(long, global = true)]
    paper_convention: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct BudgetArgs {
    /// Largest n·n' the brute force accepts.
    #[arg(long, default_value_t = 16)]
    max_bits: usize,
    /// Largest lag tried; defaults to max(q, q') + lcm(p, p').
    #[arg(long)]
    max_lag: Option<usize>,
}

impl From<BudgetArgs> for OracleBudget {
    fn from(b: BudgetArgs) -> Self {
        OracleBudget {
            max_bits: b.max_bits,
            ell_max: b.max_lag,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the power profile i, j, q, p.
    Profile { file: PathBuf },
    /// Print the canonical form with a component and provenance listing.
    Canon {
        file: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the invariant triple.
    Invariant {
        file: PathBuf,
        /// `default` (smallest member) or `random:SEED`.
        #[arg(long, default_value = "default")]
        section: SectionChoice,
        /// Append the canonical certificate.
        #[arg(long)]
        certify: bool,
        /// Write the component order as DOT.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decide shift equivalence; exit 0 if equivalent, 1 if not.
    Equiv {
        left: PathBuf,
        right: PathBuf,
        /// Also run the brute-force check.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Generate reproducible random relations.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Partition a directory of relation files into classes.
    Batch { dir: PathBuf },
    /// Compare the invariant with the brute force over many pairs.
    OracleSweep {
        /// Directory of relation files; every unordered pair is checked.
        #[arg(conflicts_with_all = ["exhaustive", "n"])]
        dir: Option<PathBuf>,
        /// Check all ordered pairs of relations on this many points (at most 2).
        #[arg(long, conflicts_with = "n")]
        exhaustive: Option<usize>,
        /// Points per random relation.
        #[arg(long, requires = "pairs")]
        n: Option<usize>,
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> commands::Outcome {
    let transposed = cli.paper_convention;
    match cli.command {
        Command::Profile { file } => commands::profile(out, &file, transposed),
        Command::Canon { file, output } => commands::canon(out, &file, output.as_deref(), transposed),
        Command::Invariant {
            file,
            section,
            certify,
            dot,
        } => commands::invariant_cmd(out, &file, section, certify, dot.as_deref(), transposed),
        Command::Equiv {
            left,
            right,
            oracle,
            budget,
        } => commands::equiv(out, &left, &right, oracle.then(|| budget.into()), transposed),
        Command::Random {
            n,
            density,
            seed,
            count,
            out_dir,
        } => commands::random(out, n, density, seed, count, out_dir.as_deref(), transposed),
        Command::Batch { dir } => commands::batch(out, err, &dir, transposed),
        Command::OracleSweep {
            dir,
            exhaustive,
            n,
            pairs,
            density,
            seed,
            budget,
        } => {
            let source = match (dir.as_deref(), exhaustive, n, pairs) {
                (Some(d), None, None, _) => SweepSource::Dir(d),
                (None, Some(n), None, _) => SweepSource::Exhaustive(n),
                (None, None, Some(n), Some(pairs)) => SweepSource::Random {
                    n,
                    pairs,
                    density,
                    seed,
                },
                _ => {
                    return Err(commands::CliError::Usage(
                        "give a directory, --exhaustive N, or --n N --pairs K".into(),
                    ))
                }
            };
            commands::oracle_sweep(out, err, source, budget.into(), transposed)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = match run(cli, &mut out, &mut err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "shifteq: {e}");
            e.exit_code()
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
