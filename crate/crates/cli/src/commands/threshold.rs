use kcore_core::branching::{threshold_scan, ThresholdConfig, ThresholdOutcome, ThresholdScan};

use super::{experiment_id, join_status, load_kernel, target_kernel};
use crate::args::ThresholdArgs;
use crate::error::{CliError, CliResult};
use crate::format::{fmt_float, Table};

pub const THRESHOLD_HEADER: &[&str] = &[
    "experiment_id",
    "row",
    "c",
    "c_right",
    "prob_a",
    "delta",
    "iterations",
    "status",
];

#[derive(Debug)]
pub struct ThresholdReport {
    pub table: Table,
    pub scan: ThresholdScan<f64>,
}

pub fn threshold(args: &ThresholdArgs) -> CliResult<ThresholdReport> {
    let shape = load_kernel(&args.kernel)?;
    let (kernel, approximated) = target_kernel(&shape)?;
    if !(args.tol > 0.0) {
        return Err(CliError::Config(format!(
            "--tol must be positive, got {}",
            args.tol
        )));
    }
    let cfg = ThresholdConfig {
        eps_pa: args.eps,
        tol_c: args.tol,
        grid_points: args.points,
        min_jump: args.min_jump,
        ..ThresholdConfig::new(args.k, args.c_min, args.c_max)
    };
    let scan = threshold_scan(&kernel, &cfg)?;
    let id = experiment_id(
        "threshold",
        &format!(
            "{}|{}|{}|{}|{}|{}|{}|{}",
            args.kernel,
            args.k,
            args.c_min,
            args.c_max,
            args.points,
            args.tol,
            args.eps,
            args.min_jump
        ),
    );

    let mut table = Table::new("threshold", THRESHOLD_HEADER);
    let base: &[&str] = if approximated {
        &["target_finitary"]
    } else {
        &[]
    };
    for p in &scan.curve {
        let mut notes = base.to_vec();
        if !p.converged {
            notes.push("unconverged");
        }
        table.push(vec![
            id.clone(),
            "curve".into(),
            fmt_float(p.c),
            String::new(),
            fmt_float(p.prob_a),
            String::new(),
            p.iterations.to_string(),
            join_status(&notes),
        ]);
    }
    for j in &scan.jumps {
        table.push(vec![
            id.clone(),
            "jump".into(),
            fmt_float(j.c_left),
            fmt_float(j.c_right),
            String::new(),
            fmt_float(j.delta),
            String::new(),
            join_status(base),
        ]);
    }
    let (c, c_right, outcome) = match scan.outcome {
        ThresholdOutcome::Found { c, hi, .. } => (fmt_float(c), fmt_float(hi), "found"),
        ThresholdOutcome::BelowRange => (fmt_float(args.c_min), String::new(), "below_range"),
        ThresholdOutcome::NoneInRange => (String::new(), String::new(), "none_in_range"),
    };
    let mut notes = vec![outcome];
    notes.extend_from_slice(base);
    if scan.unconverged_evaluations > 0 {
        notes.push("unconverged");
    }
    table.push(vec![
        id,
        "threshold".into(),
        c,
        c_right,
        String::new(),
        String::new(),
        String::new(),
        notes.join("+"),
    ]);
    Ok(ThresholdReport { table, scan })
}
