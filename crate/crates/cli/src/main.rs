mod config;
mod converge;
mod kernel;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{Format, HamiltonianName, Quantity, RunConfig, Suite};
use report::Report;

/// Anticommuting Wiener space toolkit: verification suites, Feynman-Kac kernels,
/// refinement tables and Brownian moments.
#[derive(Parser, Debug)]
#[command(name = "anticommute", version)]
struct Cli {
    /// JSON file with run parameters. Flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format (json or csv).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Tolerance for exact-identity checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an invariant suite. Exit status 1 if any check fails.
    Verify { suite: Option<Suite> },
    /// FK kernel estimate against the matrix-exponential oracle and the closed form.
    Kernel {
        hamiltonian: Option<HamiltonianName>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Track one scalar over a refinement sequence, with Richardson extrapolation.
    Converge {
        quantity: Option<Quantity>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Brownian moment table.
    Moments {
        /// Number of Brownian components (even).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long)]
        degree: Option<usize>,
    },
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    #[arg(long)]
    t: Option<f64>,
    /// Step counts, comma separated and strictly increasing.
    #[arg(long = "n", value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
}

impl Cli {
    /// Flags first, then the config file.
    fn merge(self) -> Result<(Command, RunConfig)> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        cfg.format = self.format.or(cfg.format);
        cfg.out = self.out.or(cfg.out);
        cfg.tol = self.tol.or(cfg.tol);
        let mut take_model = |m: &ModelArgs| {
            cfg.t = m.t.or(cfg.t);
            cfg.n = m.n.clone().or(cfg.n.take());
            cfg.r = m.r.or(cfg.r);
            cfg.c = m.c.or(cfg.c);
            cfg.b = m.b.or(cfg.b);
            cfg.lambda = m.lambda.or(cfg.lambda);
        };
        match &self.command {
            Command::Verify { suite } => cfg.suite = suite.or(cfg.suite),
            Command::Kernel { hamiltonian, model } => {
                take_model(model);
                cfg.hamiltonian = hamiltonian.or(cfg.hamiltonian);
            }
            Command::Converge { quantity, model } => {
                take_model(model);
                cfg.quantity = quantity.or(cfg.quantity);
            }
            Command::Moments { m, times, degree } => {
                cfg.m = m.or(cfg.m);
                cfg.times = times.clone().or(cfg.times.take());
                cfg.degree = degree.or(cfg.degree);
            }
        }
        cfg.validate()?;
        Ok((self.command, cfg))
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(value) = std::env::var("ANTICOMMUTE_THREADS") {
        let threads: usize = value
            .parse()
            .with_context(|| format!("ANTICOMMUTE_THREADS must be a positive integer, got {value:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    let (command, cfg) = cli.merge()?;
    let report: Report = match command {
        Command::Verify { .. } => verify::run(cfg.suite.unwrap_or(Suite::All), cfg.tol_or_default())?,
        Command::Kernel { .. } => {
            let name = cfg.hamiltonian.context("kernel needs a Hamiltonian (flag or config)")?;
            kernel::run(name, &cfg)?
        }
        Command::Converge { .. } => {
            let quantity = cfg.quantity.context("converge needs a quantity (flag or config)")?;
            converge::run(quantity, &cfg)?
        }
        Command::Moments { .. } => report::moments(&cfg)?,
    };
    let format = cfg.format.unwrap_or(report.default_format);
    let text = report.render(format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
