use std::time::Instant;

use kcore_core::branching::{prob_a, BranchingSpec, ProbA};
use kcore_core::graphs::{
    embed_graph, generate, k_core, percolate, GraphGenSpec, WeightedDenseGraph,
};
use kcore_core::kernels::{BlockMatrix, StepKernel};
use kcore_core::rng::derive_seed;
use rayon::prelude::*;

use super::{experiment_id, fixed_point_mode, join_status, load_kernel, target_kernel};
use crate::args::{PaleyArgs, PercolationArgs, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_float, fmt_opt, Table};

pub const VERIFY_HEADER: &[&str] = &[
    "experiment_id",
    "row",
    "trial",
    "n",
    "c",
    "k",
    "seed",
    "kcore_size",
    "kcore_fraction",
    "predicted_fraction",
    "predicted_embedded",
    "stddev",
    "abs_gap",
    "abs_gap_embedded",
    "status",
    "wallclock_ms",
];

/// Grid graphs larger than this skip the embedded prediction: the embedding
/// would be a dense kernel with `n^2` blocks evaluated point by point.
pub const EMBED_GRID_CAP: usize = 4096;

#[derive(Debug)]
pub struct VerifyReport {
    pub table: Table,
    pub fractions: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
    pub predicted: Option<f64>,
    pub predicted_embedded: Option<f64>,
}

pub fn verify(args: &VerifyArgs) -> CliResult<VerifyReport> {
    let shape = load_kernel(&args.kernel)?;
    let (target, approximated) = target_kernel(&shape)?;
    let graph = generate(&GraphGenSpec::KernelGrid {
        n: args.n,
        kernel: shape,
    })?;
    let id = experiment_id(
        "verify",
        &format!("{}|{}|{}", args.kernel, args.n, describe(&args.run)),
    );
    let notes = if approximated {
        vec!["target_finitary"]
    } else {
        vec![]
    };
    run_trials(id, &graph, &target, &args.run, notes)
}

/// `verify` on the Paley graph of order `q` against the constant kernel 1/2.
pub fn paley(args: &PaleyArgs) -> CliResult<VerifyReport> {
    let graph = generate(&GraphGenSpec::Paley { q: args.q })?;
    let target = StepKernel::constant(0.5)?;
    let id = experiment_id("paley", &format!("{}|{}", args.q, describe(&args.run)));
    run_trials(id, &graph, &target, &args.run, vec![])
}

fn describe(run: &PercolationArgs) -> String {
    format!(
        "{}|{}|{}|{:?}|{}|{:?}|{}",
        run.c, run.k, run.trials, run.depth, run.seed, run.strategy, run.tol
    )
}

fn predict(kernel: StepKernel<f64>, run: &PercolationArgs) -> CliResult<ProbA<f64>> {
    let spec = BranchingSpec::new(kernel, run.c)?;
    Ok(prob_a(&spec, run.k, fixed_point_mode(run.depth, run.tol)?)?)
}

fn run_trials(
    id: String,
    graph: &WeightedDenseGraph<f64>,
    target: &StepKernel<f64>,
    run: &PercolationArgs,
    mut notes: Vec<&'static str>,
) -> CliResult<VerifyReport> {
    let n = graph.n();
    if !(run.c >= 0.0) || !run.c.is_finite() {
        return Err(CliError::Config(format!(
            "--c must be finite and nonnegative, got {}",
            run.c
        )));
    }
    if run.k < 2 {
        return Err(CliError::Config(format!(
            "--k must be at least 2, got {}",
            run.k
        )));
    }
    fixed_point_mode(run.depth, run.tol)?;
    let mut table = Table::new("verify", VERIFY_HEADER);
    if run.trials == 0 {
        return Ok(VerifyReport {
            table,
            fractions: vec![],
            mean: f64::NAN,
            stddev: f64::NAN,
            predicted: None,
            predicted_embedded: None,
        });
    }
    let predicted = predict(target.clone(), run)?;
    if !predicted.converged {
        notes.push("unconverged");
    }
    let embedded = if matches!(graph.matrix(), BlockMatrix::Grid { .. }) && n > EMBED_GRID_CAP {
        notes.push("embedded_skipped");
        None
    } else {
        let p = predict(embed_graph(graph)?, run)?;
        if !p.converged && predicted.converged {
            notes.push("unconverged");
        }
        Some(p.value)
    };
    let status = join_status(&notes);

    let started = Instant::now();
    let outcomes: Vec<(u64, usize, f64)> = (0..run.trials)
        .into_par_iter()
        .map(|t| -> CliResult<(u64, usize, f64)> {
            let seed = derive_seed(run.seed, t);
            let clock = Instant::now();
            let h = percolate(graph, run.c, seed, run.strategy)?;
            let core = k_core(&h, run.k)?;
            Ok((seed, core.size(), clock.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<CliResult<_>>()?;
    let total_ms = started.elapsed().as_secs_f64() * 1e3;
    let ms = |v: f64| if run.timing { fmt_float(v) } else { "0".into() };

    let nf = n as f64;
    let fractions: Vec<f64> = outcomes.iter().map(|&(_, s, _)| s as f64 / nf).collect();
    let gap = |f: f64, p: Option<f64>| p.map(|p| (f - p).abs());
    for (t, (&(seed, size, wall), &frac)) in outcomes.iter().zip(&fractions).enumerate() {
        table.push(vec![
            id.clone(),
            "trial".into(),
            t.to_string(),
            n.to_string(),
            fmt_float(run.c),
            run.k.to_string(),
            seed.to_string(),
            size.to_string(),
            fmt_float(frac),
            fmt_float(predicted.value),
            fmt_opt(embedded),
            String::new(),
            fmt_opt(gap(frac, Some(predicted.value))),
            fmt_opt(gap(frac, embedded)),
            status.clone(),
            ms(wall),
        ]);
    }

    let trials = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / trials;
    let stddev = if fractions.len() > 1 {
        (fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (trials - 1.0)).sqrt()
    } else {
        0.0
    };
    let mean_gap =
        |p: Option<f64>| p.map(|p| fractions.iter().map(|f| (f - p).abs()).sum::<f64>() / trials);
    table.push(vec![
        id,
        "summary".into(),
        String::new(),
        n.to_string(),
        fmt_float(run.c),
        run.k.to_string(),
        run.seed.to_string(),
        String::new(),
        fmt_float(mean),
        fmt_float(predicted.value),
        fmt_opt(embedded),
        fmt_float(stddev),
        fmt_opt(mean_gap(Some(predicted.value))),
        fmt_opt(mean_gap(embedded)),
        status,
        ms(total_ms),
    ]);

    Ok(VerifyReport {
        table,
        fractions,
        mean,
        stddev,
        predicted: Some(predicted.value),
        predicted_embedded: embedded,
    })
}
