//! Plain-text output: CSV fields and traces, JSON reports, text tables.

use crate::run::RunReport;
use carleman::driver::IterationTrace;
use carleman::grid_fd::{Grid, ScalarField};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// `x,y,u_comp,u_exact,abs_err`, one line per node with `i` varying fastest.
pub fn write_field_csv(path: &Path, grid: &Grid, u: &ScalarField, exact: &ScalarField) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y,u_comp,u_exact,abs_err")?;
    for k in 0..grid.len() {
        let [x, y] = grid.point(k);
        writeln!(w, "{x},{y},{},{},{}", u[k], exact[k], (u[k] - exact[k]).abs())?;
    }
    w.flush()
}

/// `x,y,diff,abs_diff` for the last `u_{n+1} - u_n`.
pub fn write_difference_csv(path: &Path, grid: &Grid, diff: &ScalarField) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,y,diff,abs_diff")?;
    for k in 0..grid.len() {
        let [x, y] = grid.point(k);
        writeln!(w, "{x},{y},{},{}", diff[k], diff[k].abs())?;
    }
    w.flush()
}

/// `iter,l2_diff,hlb_diff,ratio,seconds`; `ratio` is empty on the first row.
pub fn write_trace_csv(path: &Path, trace: &IterationTrace) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "iter,l2_diff,hlb_diff,ratio,seconds")?;
    for r in trace.records() {
        let ratio = r.ratio.map(|v| v.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{},{}", r.iter, r.l2_diff, r.hlb_diff, ratio, r.seconds)?;
    }
    w.flush()
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    std::fs::write(path, text + "\n")
}

/// One block per problem, one line per noise level.
pub fn format_tables(report: &RunReport) -> String {
    let mut out = String::new();
    let mut problems: Vec<_> = report.rows.iter().map(|r| r.problem).collect();
    problems.dedup();
    for p in problems {
        let _ = writeln!(out, "{p}");
        let _ = writeln!(
            out,
            "  {:>6}  {:>12}  {:>12}  {:>5}  {:>9}  {:>8}",
            "delta", "rel_Linf", "rel_L2", "iters", "converged", "seconds"
        );
        for r in report.rows.iter().filter(|r| r.problem == p) {
            let _ = writeln!(
                out,
                "  {:>5}%  {:>12.4e}  {:>12.4e}  {:>5}  {:>9}  {:>8.2}",
                r.delta * 100.0,
                r.rel_linf,
                r.rel_l2,
                r.iterations,
                r.converged,
                r.seconds
            );
        }
        out.push('\n');
    }
    out
}
