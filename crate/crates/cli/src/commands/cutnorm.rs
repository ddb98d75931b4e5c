use kcore_core::kernels::{cut_norm, CutNormMode, SignedStepKernel, StepKernel, EXACT_BLOCK_CAP};

use super::{experiment_id, load_kernel};
use crate::args::{CutMode, CutnormArgs};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_float, Table};

pub const CUTNORM_HEADER: &[&str] = &["experiment_id", "mode", "blocks", "cut_distance", "status"];

#[derive(Debug)]
pub struct CutnormReport {
    pub table: Table,
    pub exact: Option<f64>,
    pub heuristic: Option<f64>,
}

fn step(name: &str) -> CliResult<StepKernel<f64>> {
    load_kernel(name)?
        .as_step()
        .cloned()
        .ok_or_else(|| CliError::Config(format!("kernel '{name}' is not a step kernel")))
}

pub fn cutnorm(args: &CutnormArgs) -> CliResult<CutnormReport> {
    let a = step(&args.kernel)?;
    let b = step(&args.against)?;
    let diff = SignedStepKernel::difference(&a, &b);
    let blocks = diff.num_blocks();
    let id = experiment_id(
        "cutnorm",
        &format!(
            "{}|{}|{:?}|{}|{}",
            args.kernel, args.against, args.mode, args.restarts, args.seed
        ),
    );
    let mut table = Table::new("cutnorm", CUTNORM_HEADER);
    let mut row = |mode: &str, value: Option<f64>, status: &str| {
        table.push(vec![
            id.clone(),
            mode.into(),
            blocks.to_string(),
            value.map(fmt_float).unwrap_or_default(),
            status.into(),
        ])
    };

    let mut exact = None;
    let mut heuristic = None;
    if args.mode != CutMode::Heuristic {
        if blocks <= EXACT_BLOCK_CAP || args.mode == CutMode::Exact {
            let v = cut_norm(&diff, CutNormMode::Exact)?;
            exact = Some(v.value);
            row("exact", exact, v.status.as_str());
        } else {
            row("exact", None, "exceeds_block_cap");
        }
    }
    if args.mode != CutMode::Exact {
        let v = cut_norm(
            &diff,
            CutNormMode::Heuristic {
                restarts: args.restarts,
                seed: args.seed,
            },
        )?;
        heuristic = Some(v.value);
        row("heuristic", heuristic, v.status.as_str());
    }
    Ok(CutnormReport {
        table,
        exact,
        heuristic,
    })
}
