use kcore_core::branching::{prob_a, BranchingSpec};
use kcore_core::graphs::{embed_graph, generate, GraphGenSpec};
use kcore_core::kernels::{
    cut_distance, finitary_ladder, KernelShape, StepKernel, DEFAULT_GRID_LEVEL,
};

use super::{experiment_id, fixed_point_mode, join_status, load_kernel, target_kernel};
use crate::args::{ContinuityArgs, Family};
use crate::error::{CliError, CliResult};
use crate::format::{fmt_float, Table};

pub const CONTINUITY_HEADER: &[&str] = &[
    "experiment_id",
    "index",
    "label",
    "blocks",
    "cut_distance",
    "cut_status",
    "prob_a",
    "limit_prob_a",
    "abs_diff",
    "status",
];

#[derive(Debug)]
pub struct ContinuityRow {
    pub label: String,
    pub cut_distance: f64,
    pub exact_distance: bool,
    pub prob_a: f64,
}

#[derive(Debug)]
pub struct ContinuityReport {
    pub table: Table,
    pub rows: Vec<ContinuityRow>,
    pub limit_prob_a: f64,
}

type Labelled = (String, StepKernel<f64>);

pub fn continuity(args: &ContinuityArgs) -> CliResult<ContinuityReport> {
    if args.k < 2 {
        return Err(CliError::Config(format!(
            "--k must be at least 2, got {}",
            args.k
        )));
    }
    let mode = fixed_point_mode(None, args.tol)?;
    let (family, limit, limit_note): (Vec<Labelled>, StepKernel<f64>, Option<&str>) =
        match args.family {
            Family::Paley => {
                if args.q.is_empty() {
                    return Err(CliError::Config("--q needs at least one modulus".into()));
                }
                let members = args
                    .q
                    .iter()
                    .map(|&q| {
                        let g = generate::<f64>(&GraphGenSpec::Paley { q })?;
                        Ok((format!("paley-{q}"), embed_graph(&g)?))
                    })
                    .collect::<CliResult<_>>()?;
                (members, StepKernel::constant(0.5)?, None)
            }
            Family::Dyadic => {
                let shape = load_kernel(&args.kernel)?;
                let ladder = finitary_ladder(&shape, args.levels, DEFAULT_GRID_LEVEL)?;
                let members = ladder
                    .into_iter()
                    .enumerate()
                    .map(|(i, w)| (format!("dyadic-{}", i + 1), w))
                    .collect();
                let (limit, approximated) = match &shape {
                    KernelShape::Step(w) => (w.clone(), false),
                    KernelShape::Function { .. } => target_kernel(&shape)?,
                };
                (members, limit, approximated.then_some("reference_finitary"))
            }
        };

    let predict = |w: StepKernel<f64>| -> CliResult<(f64, bool)> {
        let p = prob_a(&BranchingSpec::new(w, args.c)?, args.k, mode)?;
        Ok((p.value, p.converged))
    };
    let (limit_prob_a, limit_converged) = predict(limit.clone())?;
    let id = experiment_id(
        "continuity",
        &format!(
            "{:?}|{}|{:?}|{}|{}|{}|{}",
            args.family, args.kernel, args.q, args.levels, args.c, args.k, args.tol
        ),
    );

    let mut table = Table::new("continuity", CONTINUITY_HEADER);
    let mut rows = Vec::with_capacity(family.len());
    for (index, (label, w)) in family.into_iter().enumerate() {
        let blocks = w.num_blocks();
        let d = cut_distance(&w, &limit);
        let (p, converged) = predict(w)?;
        let mut notes: Vec<&str> = limit_note.into_iter().collect();
        if !(converged && limit_converged) {
            notes.push("unconverged");
        }
        table.push(vec![
            id.clone(),
            index.to_string(),
            label.clone(),
            blocks.to_string(),
            fmt_float(d.value),
            d.status.as_str().into(),
            fmt_float(p),
            fmt_float(limit_prob_a),
            fmt_float((p - limit_prob_a).abs()),
            join_status(&notes),
        ]);
        rows.push(ContinuityRow {
            label,
            cut_distance: d.value,
            exact_distance: d.status == kcore_core::kernels::CutNormStatus::Exact,
            prob_a: p,
        });
    }
    Ok(ContinuityReport {
        table,
        rows,
        limit_prob_a,
    })
}
