use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{error::ErrorKind, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use collapse_lab::experiments::{
    self, cmd_collapse, epoch2_stats, gamma_rows, phase_transition, predict_rows, sweep_c, sweep_n, tree_hist_rows,
    tree_rows, write_rows, CollapseConfig, Epoch2Config, ExperimentError, OutputFormat, PhaseTransitionConfig, Side,
    ValidationConfig,
};
use serde::Serialize;

/// Strong-collapse experiments on Erdős–Rényi clique complexes.
#[derive(Parser, Debug)]
#[command(name = "collapse-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Base seed; trial i runs on trial_seed(seed, i).
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads. COLLAPSE_LAB_THREADS takes precedence when set.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Sparse,
    Dense,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Epoch2Table {
    Summary,
    Hist,
    Trials,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// γ_t recursion and its limit.
    Gamma {
        #[arg(long)]
        c: f64,
        /// Horizon T.
        #[arg(long, default_value_t = 20)]
        t: usize,
    },
    /// First-epoch predictions and rate bounds for t = 0..=T.
    Predict {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        t: usize,
        /// Use the e^c prefactor in the bounds instead of e^-c.
        #[arg(long)]
        paper_constants: bool,
    },
    /// Root collapsing on Poisson trees against the recursion.
    Tree {
        #[arg(long)]
        c: f64,
        /// Largest depth, or the depth of the histogram with --hist.
        #[arg(long, default_value_t = 6)]
        t: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Root-degree histogram at depth t instead of the γ table.
        #[arg(long)]
        hist: bool,
    },
    /// Per-trial records of the two-epoch collapse.
    Collapse {
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "p", conflicts_with = "p")]
        c: Option<f64>,
        /// Edge probability; sets c = p n.
        #[arg(long)]
        p: Option<f64>,
        /// First-epoch phases. Defaults to the bound-based budget for ε = 0.01.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 30)]
        trials: u64,
        /// Fill the wall_time_ms column (makes output non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Core size over a grid of n at fixed c.
    SweepN {
        #[arg(long)]
        c: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Core size over a grid of c at fixed n.
    SweepC {
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        c: Vec<f64>,
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 10)]
        trials: u64,
    },
    /// Second-epoch statistics with the phase budget matched to eps.
    Epoch2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 30)]
        trials: u64,
        /// Accept eps above the range covered by the ending bound.
        #[arg(long)]
        allow_outside_range: bool,
        /// CSV table to emit; JSON always carries the full report.
        #[arg(long, value_enum, default_value_t = Epoch2Table::Summary)]
        table: Epoch2Table,
    },
    /// Dominated pairs (sparse) or universal vertices (dense) near the thresholds.
    PhaseTransition {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, default_value_t = 1.5)]
        lambda: f64,
        /// Edge probability, used instead of the λ substitution.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 50)]
        trials: u64,
    },
    /// Oracle suite; exits 1 if any check fails.
    Validate {
        #[arg(long, default_value_t = 100)]
        graphs: u64,
        #[arg(long, default_value_t = 25)]
        max_n: usize,
        #[arg(long, default_value_t = 5)]
        orders: usize,
    },
}

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Graph(_) | ExperimentError::Theory(_) | ExperimentError::Parameter(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

struct Sink {
    out: Option<PathBuf>,
    format: OutputFormat,
}

impl Sink {
    fn open(&self) -> Result<Box<dyn Write>, Failure> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(io::stdout().lock()),
        })
    }

    fn rows<T: Serialize>(&self, rows: &[T]) -> Result<(), Failure> {
        let mut w = self.open()?;
        write_rows(rows, self.format, &mut w).map_err(|e| self.context(e))?;
        w.flush().map_err(|e| self.context(e))
    }

    fn json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let mut w = self.open()?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| self.context(e))?;
        writeln!(w).map_err(|e| self.context(e))?;
        w.flush().map_err(|e| self.context(e))
    }

    fn text(&self, s: &str) -> Result<(), Failure> {
        let mut w = self.open()?;
        w.write_all(s.as_bytes()).map_err(|e| self.context(e))?;
        w.flush().map_err(|e| self.context(e))
    }

    fn context(&self, e: impl std::fmt::Display) -> Failure {
        let target = self.out.as_ref().map_or("stdout".to_string(), |p| p.display().to_string());
        Failure::Runtime(anyhow::anyhow!("writing {target}: {e}"))
    }
}

/// Returns whether every check passed; only `validate` can report `false`.
fn run(cli: Cli) -> Result<bool, Failure> {
    let seed = cli.common.seed;
    let sink = Sink { out: cli.common.out, format: cli.common.format.into() };
    match cli.command {
        Command::Gamma { c, t } => sink.rows(&gamma_rows(c, t)?)?,
        Command::Predict { c, n, t, paper_constants } => sink.rows(&predict_rows(c, n, t, paper_constants)?)?,
        Command::Tree { c, t, trials, hist } => {
            if hist {
                sink.rows(&tree_hist_rows(c, t, trials, seed)?)?
            } else {
                sink.rows(&tree_rows(c, t, trials, seed)?)?
            }
        }
        Command::Collapse { n, c, p, t, trials, timings } => {
            let c = match (c, p) {
                (Some(c), _) => c,
                (None, Some(p)) => {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Failure::Usage(format!("edge probability {p} is outside [0, 1]")));
                    }
                    p * n as f64
                }
                (None, None) => unreachable!("clap requires c or p"),
            };
            let cfg = CollapseConfig { n, c, t, trials, seed, timings };
            sink.rows(&cmd_collapse(&cfg)?)?
        }
        Command::SweepN { c, n, t, trials } => sink.rows(&sweep_n(c, &n, t, trials, seed)?)?,
        Command::SweepC { n, c, t, trials } => sink.rows(&sweep_c(n, &c, t, trials, seed)?)?,
        Command::Epoch2 { n, c, eps, trials, allow_outside_range, table } => {
            let report = epoch2_stats(&Epoch2Config { n, c, eps, trials, seed, allow_outside_range })?;
            match (sink.format, table) {
                (OutputFormat::Json, _) => sink.json(&report)?,
                (_, Epoch2Table::Summary) => sink.rows(std::slice::from_ref(&report.summary))?,
                (_, Epoch2Table::Hist) => sink.rows(&report.histogram)?,
                (_, Epoch2Table::Trials) => sink.rows(&report.trials)?,
            }
        }
        Command::PhaseTransition { n, side, lambda, p, trials } => {
            let side = match side {
                SideArg::Sparse => Side::Sparse,
                SideArg::Dense => Side::Dense,
            };
            let row = phase_transition(&PhaseTransitionConfig { side, n, lambda, p, trials, seed })?;
            sink.rows(std::slice::from_ref(&row))?
        }
        Command::Validate { graphs, max_n, orders } => {
            let report = experiments::validate(&ValidationConfig { graphs, max_n, orders, seed })?;
            match sink.format {
                OutputFormat::Json => sink.json(&report)?,
                OutputFormat::Csv => sink.text(&report.to_string())?,
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = experiments::resolve_threads(cli.common.threads);
    match experiments::with_threads(threads, || run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => Cli::command().error(ErrorKind::ValueValidation, msg).exit(),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
