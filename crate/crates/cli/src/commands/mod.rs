//! One module per subcommand. Each returns a [`Table`](crate::Table) plus whatever
//! numbers the caller may want to check, and leaves file output to [`crate::run`].

mod continuity;
mod cutnorm;
mod threshold;
mod verify;

pub use continuity::{continuity, ContinuityReport, ContinuityRow, CONTINUITY_HEADER};
pub use cutnorm::{cutnorm, CutnormReport, CUTNORM_HEADER};
pub use threshold::{threshold, ThresholdReport, THRESHOLD_HEADER};
pub use verify::{paley, verify, VerifyReport, EMBED_GRID_CAP, VERIFY_HEADER};

use kcore_core::branching::{FixedPointMode, DEFAULT_MAX_ITER};
use kcore_core::kernels::{
    finitary_lower_approx, KernelPreset, KernelShape, StepKernel, DEFAULT_GRID_LEVEL,
};
use kcore_core::rng::mix64;

use crate::error::{CliError, CliResult};

/// Dyadic level used when a non-step kernel needs a step target.
pub const TARGET_LEVEL: u32 = 8;

pub(crate) fn load_kernel(name: &str) -> CliResult<KernelShape<f64>> {
    let preset: KernelPreset = name.parse()?;
    Ok(preset.resolve()?)
}

/// The step kernel predictions are computed from, and whether it is an approximation.
pub(crate) fn target_kernel(shape: &KernelShape<f64>) -> CliResult<(StepKernel<f64>, bool)> {
    match shape {
        KernelShape::Step(w) => Ok((w.clone(), false)),
        KernelShape::Function { .. } => Ok((
            finitary_lower_approx(shape, TARGET_LEVEL, DEFAULT_GRID_LEVEL)?,
            true,
        )),
    }
}

pub(crate) fn fixed_point_mode(depth: Option<u32>, tol: f64) -> CliResult<FixedPointMode> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(CliError::Config(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    Ok(match depth {
        Some(d) => FixedPointMode::Depth(d),
        None => FixedPointMode::Limit {
            tol,
            max_iter: DEFAULT_MAX_ITER,
        },
    })
}

/// Stable short id for a run configuration.
pub(crate) fn experiment_id(command: &str, config: &str) -> String {
    let mut h = mix64(0x6b63_6f72_652d_6c61);
    for b in command.bytes().chain([0u8]).chain(config.bytes()) {
        h = mix64(h ^ b as u64);
    }
    format!("{command}-{:012x}", h >> 16)
}

pub(crate) fn join_status(parts: &[&str]) -> String {
    if parts.is_empty() {
        "ok".into()
    } else {
        parts.join("+")
    }
}
