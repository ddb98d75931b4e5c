//! Experiment runner behind the `kcore-lab` binary.
//!
//! Every subcommand produces a CSV table with a fixed header; the library
//! entry points are exposed so tests can inspect the numbers directly.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
mod error;
mod format;
pub mod plot;

use std::io::Write;
use std::path::Path;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};
pub use format::{fmt_float, fmt_opt, fmt_sig, Table};

use plot::{render_svg, write_svg, Series};

fn emit(table: &Table, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => table.write_file(path),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write_to(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn trial_plot(report: &commands::VerifyReport, title: &str, path: &Path) -> CliResult<()> {
    let observed = report
        .fractions
        .iter()
        .enumerate()
        .map(|(t, &f)| (t as f64, f))
        .collect();
    let mut series = vec![Series::new("k-core fraction", observed)];
    let flat = |p: f64| (0..report.fractions.len()).map(|t| (t as f64, p)).collect();
    if let Some(p) = report.predicted {
        series.push(Series::new("predicted", flat(p)));
    }
    if let Some(p) = report.predicted_embedded {
        series.push(Series::new("predicted (embedded)", flat(p)));
    }
    write_svg(
        path,
        &render_svg(title, "trial", "k-core fraction", &series),
    )
}

/// Runs one parsed command line on a pool of `cli.workers` threads.
pub fn run(cli: &Cli) -> CliResult<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command))
}

fn dispatch(command: &Command) -> CliResult<()> {
    match command {
        Command::Verify(a) => {
            let report = commands::verify(a)?;
            emit(&report.table, a.run.out.as_deref())?;
            if let Some(p) = &a.run.plot {
                trial_plot(&report, &format!("{} kernel, n = {}", a.kernel, a.n), p)?;
            }
        }
        Command::Paley(a) => {
            let report = commands::paley(a)?;
            emit(&report.table, a.run.out.as_deref())?;
            if let Some(p) = &a.run.plot {
                trial_plot(&report, &format!("Paley graph, q = {}", a.q), p)?;
            }
        }
        Command::Threshold(a) => {
            let report = commands::threshold(a)?;
            emit(&report.table, a.out.as_deref())?;
            if let Some(p) = &a.plot {
                let curve = report
                    .scan
                    .curve
                    .iter()
                    .map(|pt| (pt.c, pt.prob_a))
                    .collect();
                let title = format!("{} kernel, k = {}", a.kernel, a.k);
                write_svg(
                    p,
                    &render_svg(&title, "c", "P(A)", &[Series::new("P(A)", curve)]),
                )?;
            }
        }
        Command::Continuity(a) => {
            let report = commands::continuity(a)?;
            emit(&report.table, a.out.as_deref())?;
            if let Some(p) = &a.plot {
                let limit = report.limit_prob_a;
                let pts = |f: &dyn Fn(&commands::ContinuityRow) -> f64| {
                    report
                        .rows
                        .iter()
                        .enumerate()
                        .map(|(i, r)| (i as f64, f(r)))
                        .collect()
                };
                let series = [
                    Series::new("cut distance", pts(&|r| r.cut_distance)),
                    Series::new("|P(A) - limit|", pts(&|r| (r.prob_a - limit).abs())),
                ];
                write_svg(p, &render_svg("continuity", "index", "value", &series))?;
            }
        }
        Command::Cutnorm(a) => {
            let report = commands::cutnorm(a)?;
            emit(&report.table, a.out.as_deref())?;
        }
        Command::Plot(a) => {
            let svg = plot::plot(a)?;
            write_svg(&a.out, &svg)?;
        }
    }
    Ok(())
}
