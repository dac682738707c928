use crate::config::RunConfig;
use crate::output;
use anyhow::anyhow;
use carleman::driver::{FixedPointSolver, IterationRecord, SolveOutcome};
use carleman::grid_fd::{DiffusionField, Grid};
use carleman::problems::{
    cell_seed, error_report, make_problem, sample_cauchy_data, ErrorMetrics, NoiseModel, ProblemId,
};
use carleman::Error;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::{Path, PathBuf};

/// Failure class of a command; decides the process exit code.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Solver(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn io(err: impl Into<anyhow::Error>) -> Self {
        Failure::Io(err.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, err) = match self {
            Failure::Config(e) => ("configuration error", e),
            Failure::Solver(e) => ("solver failure", e),
            Failure::Io(e) => ("I/O error", e),
        };
        write!(f, "{kind}: {err:#}")
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGrid(_)
            | Error::InvalidCarleman(_)
            | Error::WeightDomain { .. }
            | Error::InvalidConfig { .. }
            | Error::InvalidCutoff(_)
            | Error::UnknownProblem(_)
            | Error::NotElliptic { .. } => Failure::Config(e.into()),
            _ => Failure::Solver(e.into()),
        }
    }
}

/// One (problem, δ) cell of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub problem: ProblemId,
    pub delta: f64,
    pub seed: u64,
    pub rel_linf: f64,
    pub rel_l2: f64,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
    pub trace: Vec<IterationRecord>,
    pub field_csv: PathBuf,
    pub trace_csv: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    /// Seconds spent assembling and factoring the normal matrix (shared by all rows).
    pub setup_seconds: f64,
    pub rows: Vec<ReportRow>,
}

pub struct Cell {
    pub problem: ProblemId,
    pub delta_index: usize,
    pub delta: f64,
    pub seed: u64,
    pub outcome: SolveOutcome,
    pub metrics: ErrorMetrics,
}

pub struct Session {
    pub config: RunConfig,
    pub grid: Grid,
    pub solver: FixedPointSolver,
    pub setup_seconds: f64,
}

impl Session {
    /// Validates the configuration and factors the normal matrix. All bundled
    /// problems use `A = I`, so one factorization serves every cell.
    pub fn new(config: RunConfig) -> Result<Self, Failure> {
        config.validate().map_err(Failure::Config)?;
        let started = std::time::Instant::now();
        let grid = Grid::unit_square(config.n)?;
        config.carleman.validate(&grid)?;
        let solver = FixedPointSolver::new(&grid, &DiffusionField::identity(&grid), &config.carleman, &config.qrm)?;
        Ok(Self {
            config,
            grid,
            solver,
            setup_seconds: started.elapsed().as_secs_f64(),
        })
    }

    pub fn run_cell(&self, problem: ProblemId, delta_index: usize) -> Result<Cell, Failure> {
        let delta = self.config.deltas[delta_index];
        let seed = cell_seed(self.config.seed, problem, delta_index);
        let spec = make_problem(problem, &self.grid);
        let data = sample_cauchy_data(&spec, &self.grid, &NoiseModel::uniform(delta, seed))?;
        let outcome = self.solver.solve(&spec.nonlinearity, &data, &self.config.driver)?;
        let metrics = error_report(&outcome.solution, &spec, &self.grid)?;
        Ok(Cell {
            problem,
            delta_index,
            delta,
            seed,
            outcome,
            metrics,
        })
    }

    /// Runs the cells on scoped threads; results come back in input order.
    pub fn run_cells(&self, cells: &[(ProblemId, usize)]) -> Result<Vec<Cell>, Failure> {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).max(1);
        let mut out = Vec::with_capacity(cells.len());
        for chunk in cells.chunks(workers) {
            let results: Vec<Result<Cell, Failure>> = std::thread::scope(|s| {
                let handles: Vec<_> = chunk
                    .iter()
                    .map(|&(p, d)| s.spawn(move || self.run_cell(p, d)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| {
                        h.join()
                            .unwrap_or_else(|_| Err(Failure::Solver(anyhow!("worker thread panicked"))))
                    })
                    .collect()
            });
            for r in results {
                out.push(r?);
            }
        }
        Ok(out)
    }

    fn cell_stem(cell: &Cell) -> String {
        format!("{}_delta{}", cell.problem, cell.delta)
    }

    /// Writes the field and trace CSVs of a cell and returns its report row.
    pub fn write_cell(&self, cell: &Cell, dir: &Path) -> Result<ReportRow, Failure> {
        let stem = Self::cell_stem(cell);
        let field_csv = dir.join(format!("{stem}_field.csv"));
        let trace_csv = dir.join(format!("{stem}_trace.csv"));
        let spec = make_problem(cell.problem, &self.grid);
        let exact = spec
            .exact
            .as_ref()
            .expect("bundled problems have exact solutions")
            .sample(&self.grid);
        output::write_field_csv(&field_csv, &self.grid, &cell.outcome.solution, &exact).map_err(Failure::io)?;
        output::write_trace_csv(&trace_csv, &cell.outcome.trace).map_err(Failure::io)?;
        Ok(ReportRow {
            problem: cell.problem,
            delta: cell.delta,
            seed: cell.seed,
            rel_linf: cell.metrics.rel_linf,
            rel_l2: cell.metrics.rel_l2,
            iterations: cell.outcome.iterations,
            converged: cell.outcome.converged,
            seconds: cell.outcome.seconds,
            trace: cell.outcome.trace.records().to_vec(),
            field_csv,
            trace_csv,
        })
    }

    fn output_dir(&self) -> Result<PathBuf, Failure> {
        let dir = self.config.output_dir.clone();
        std::fs::create_dir_all(&dir).map_err(Failure::io)?;
        Ok(dir)
    }

    fn report(&self, cells: &[Cell]) -> Result<RunReport, Failure> {
        let dir = self.output_dir()?;
        let rows = cells
            .iter()
            .map(|c| self.write_cell(c, &dir))
            .collect::<Result<_, _>>()?;
        Ok(RunReport {
            config: self.config.clone(),
            setup_seconds: self.setup_seconds,
            rows,
        })
    }

    fn write_report(&self, report: &RunReport, name: &str) -> Result<(), Failure> {
        let dir = self.output_dir()?;
        output::write_json(&dir.join(name), report).map_err(Failure::io)?;
        std::fs::write(dir.join("run_config.toml"), self.config.to_toml()).map_err(Failure::io)
    }
}

/// `solve`: the configured problem at every configured noise level.
pub fn cmd_solve(config: RunConfig) -> Result<RunReport, Failure> {
    let session = Session::new(config)?;
    let problem = session.config.problem;
    let cells: Vec<_> = (0..session.config.deltas.len()).map(|d| (problem, d)).collect();
    let results = session.run_cells(&cells)?;
    let report = session.report(&results)?;
    session.write_report(&report, "report.json")?;
    Ok(report)
}

/// `reproduce-tables`: Tests 1–4 at every configured noise level.
pub fn cmd_reproduce_tables(config: RunConfig) -> Result<RunReport, Failure> {
    let session = Session::new(config)?;
    let cells: Vec<_> = ProblemId::TABLES
        .iter()
        .flat_map(|&p| (0..session.config.deltas.len()).map(move |d| (p, d)))
        .collect();
    let results = session.run_cells(&cells)?;
    let report = session.report(&results)?;
    session.write_report(&report, "tables.json")?;
    let dir = session.output_dir()?;
    std::fs::write(dir.join("tables.txt"), output::format_tables(&report)).map_err(Failure::io)?;
    Ok(report)
}

pub struct ConvergenceFiles {
    pub trace_csv: PathBuf,
    pub difference_csv: PathBuf,
    pub row: ReportRow,
}

/// `convergence`: the trace and the final `u_{n+1} - u_n` field for the first configured δ.
pub fn cmd_convergence(config: RunConfig) -> Result<ConvergenceFiles, Failure> {
    let session = Session::new(config)?;
    let cell = session.run_cell(session.config.problem, 0)?;
    let dir = session.output_dir()?;
    let row = session.write_cell(&cell, &dir)?;
    let difference_csv = dir.join(format!("{}_difference.csv", Session::cell_stem(&cell)));
    output::write_difference_csv(&difference_csv, &session.grid, &cell.outcome.last_difference).map_err(Failure::io)?;
    Ok(ConvergenceFiles {
        trace_csv: row.trace_csv.clone(),
        difference_csv,
        row,
    })
}
