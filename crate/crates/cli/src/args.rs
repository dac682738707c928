use crate::config::RunConfig;
use crate::output::format_tables;
use crate::run::{cmd_convergence, cmd_reproduce_tables, cmd_solve, Failure};
use carleman::problems::ProblemId;
use carleman::qrm::Backend;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "carleman",
    version,
    about = "Carleman contraction solver for quasi-linear elliptic Cauchy problems"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one bundled problem at each noise level.
    Solve(Overrides),
    /// Run Tests 1-4 at every noise level and write the error tables.
    ReproduceTables(Overrides),
    /// Write the iteration trace and the last difference field for one run.
    Convergence(Overrides),
    /// Print the annotated example configuration.
    ExampleConfig,
}

/// Flags shared by the run commands. Each overrides the matching config key.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Problem: 1-4, test1-test4 or linear.
    #[arg(long = "test", value_parser = parse_problem)]
    pub problem: Option<ProblemId>,
    /// Noise level; repeat for several.
    #[arg(long = "delta")]
    pub deltas: Vec<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// sparse-direct or conjugate-gradient.
    #[arg(long)]
    pub backend: Option<Backend>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

fn parse_problem(s: &str) -> Result<ProblemId, String> {
    s.parse().map_err(|e: carleman::Error| e.to_string())
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path).map_err(Failure::Config)?,
            None => RunConfig::default(),
        };
        if let Some(p) = self.problem {
            cfg.problem = p;
        }
        if !self.deltas.is_empty() {
            cfg.deltas = self.deltas.clone();
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(b) = self.backend {
            cfg.qrm.solver = b;
        }
        if let Some(dir) = &self.output_dir {
            cfg.output_dir = dir.clone();
        }
        cfg.validate().map_err(Failure::Config)?;
        Ok(cfg)
    }
}

/// Runs a parsed command line and returns what should go to stdout.
pub fn execute(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Solve(o) => {
            let report = cmd_solve(o.resolve()?)?;
            Ok(format_tables(&report))
        }
        Command::ReproduceTables(o) => {
            let report = cmd_reproduce_tables(o.resolve()?)?;
            Ok(format_tables(&report))
        }
        Command::Convergence(o) => {
            let files = cmd_convergence(o.resolve()?)?;
            let mut out = format!(
                "{} delta={}: {} iterations (converged: {})\n",
                files.row.problem, files.row.delta, files.row.iterations, files.row.converged
            );
            for r in &files.row.trace {
                out += &format!(
                    "  iter {:>3}  l2_diff {:.4e}  hlb_diff {:.4e}\n",
                    r.iter, r.l2_diff, r.hlb_diff
                );
            }
            out += &format!(
                "trace: {}\ndifference: {}\n",
                files.trace_csv.display(),
                files.difference_csv.display()
            );
            Ok(out)
        }
        Command::ExampleConfig => Ok(crate::config::EXAMPLE_CONFIG.to_string()),
    }
}
