//! Locating the appearance of a giant k-core as the scale grows.

use rayon::prelude::*;

use super::fixed_point::{prob_a, FixedPointMode};
use super::BranchingSpec;
use crate::error::{invalid, Result};
use crate::kernels::StepKernel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConfig {
    pub k: u32,
    pub c_lo: f64,
    pub c_hi: f64,
    /// `P(A)` at or below this counts as zero.
    pub eps_pa: f64,
    /// Width of the final bisection bracket.
    pub tol_c: f64,
    /// Points of the uniform curve, endpoints included.
    pub grid_points: usize,
    /// Minimal rise between adjacent curve points reported as a jump.
    pub min_jump: f64,
    pub mode: FixedPointMode,
}

impl ThresholdConfig {
    pub fn new(k: u32, c_lo: f64, c_hi: f64) -> Self {
        Self {
            k,
            c_lo,
            c_hi,
            eps_pa: 1e-8,
            tol_c: 1e-6,
            grid_points: 201,
            min_jump: 0.01,
            mode: FixedPointMode::limit(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdOutcome {
    /// Smallest positive scale lies in `[lo, hi]`; `c` is the midpoint.
    Found { c: f64, lo: f64, hi: f64 },
    /// `P(A)` is already positive at `c_lo`.
    BelowRange,
    /// `P(A)` stays at or below `eps_pa` up to `c_hi`.
    NoneInRange,
}

impl ThresholdOutcome {
    pub fn value(&self) -> Option<f64> {
        match *self {
            ThresholdOutcome::Found { c, .. } => Some(c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint<T> {
    pub c: f64,
    pub prob_a: T,
    pub converged: bool,
    pub iterations: usize,
}

/// Adjacent curve points `c_left < c_right` across which `P(A)` rose by `delta`.
/// Runs of consecutive steep intervals are merged.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jump {
    pub c_left: f64,
    pub c_right: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdScan<T> {
    pub outcome: ThresholdOutcome,
    pub curve: Vec<CurvePoint<T>>,
    pub jumps: Vec<Jump>,
    /// Bisection evaluations whose fixed point did not converge.
    pub unconverged_evaluations: usize,
}

fn evaluate<T: Scalar>(
    kernel: &StepKernel<T>,
    c: f64,
    cfg: &ThresholdConfig,
) -> Result<CurvePoint<T>> {
    let spec = BranchingSpec::new(kernel.clone(), T::lit(c))?;
    let p = prob_a(&spec, cfg.k, cfg.mode)?;
    Ok(CurvePoint {
        c,
        prob_a: p.value,
        converged: p.converged,
        iterations: p.profile.iterations,
    })
}

pub fn threshold_scan<T: Scalar>(
    kernel: &StepKernel<T>,
    cfg: &ThresholdConfig,
) -> Result<ThresholdScan<T>> {
    if !(cfg.c_lo >= 0.0 && cfg.c_lo < cfg.c_hi && cfg.c_hi.is_finite()) {
        return Err(invalid(format!(
            "need 0 <= c_lo < c_hi, got [{}, {}]",
            cfg.c_lo, cfg.c_hi
        )));
    }
    if !(cfg.eps_pa > 0.0) || !(cfg.tol_c > 0.0) {
        return Err(invalid("eps_pa and tol_c must be positive"));
    }
    if cfg.grid_points < 2 {
        return Err(invalid("the curve needs at least 2 points"));
    }
    if cfg.k < 2 {
        return Err(invalid(format!("k must be at least 2, got {}", cfg.k)));
    }
    let eps = T::lit(cfg.eps_pa);
    let mut unconverged = 0;
    let mut positive = |c: f64| -> Result<bool> {
        let p = evaluate(kernel, c, cfg)?;
        if !p.converged {
            unconverged += 1;
        }
        Ok(p.prob_a > eps)
    };
    let outcome = if positive(cfg.c_lo)? {
        ThresholdOutcome::BelowRange
    } else if !positive(cfg.c_hi)? {
        ThresholdOutcome::NoneInRange
    } else {
        let (mut lo, mut hi) = (cfg.c_lo, cfg.c_hi);
        while hi - lo > cfg.tol_c {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if positive(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        ThresholdOutcome::Found {
            c: 0.5 * (lo + hi),
            lo,
            hi,
        }
    };
    let last = (cfg.grid_points - 1) as f64;
    let curve = (0..cfg.grid_points)
        .into_par_iter()
        .map(|i| {
            let c = if i + 1 == cfg.grid_points {
                cfg.c_hi
            } else {
                cfg.c_lo + (cfg.c_hi - cfg.c_lo) * (i as f64) / last
            };
            evaluate(kernel, c, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let jumps = detect_jumps(&curve, cfg.min_jump);
    Ok(ThresholdScan {
        outcome,
        curve,
        jumps,
        unconverged_evaluations: unconverged,
    })
}

/// Intervals where `P(A)` rises by more than `min_jump` between neighbours.
pub fn detect_jumps<T: Scalar>(curve: &[CurvePoint<T>], min_jump: f64) -> Vec<Jump> {
    let mut jumps: Vec<Jump> = Vec::new();
    let mut open = false;
    for w in curve.windows(2) {
        let delta = w[1].prob_a.as_f64() - w[0].prob_a.as_f64();
        if delta > min_jump {
            match jumps.last_mut() {
                Some(j) if open => {
                    j.c_right = w[1].c;
                    j.delta += delta;
                }
                _ => jumps.push(Jump {
                    c_left: w[0].c,
                    c_right: w[1].c,
                    delta,
                }),
            }
            open = true;
        } else {
            open = false;
        }
    }
    jumps
}
