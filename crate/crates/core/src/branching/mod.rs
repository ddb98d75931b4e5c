//! Multi-type Poisson branching processes driven by a step kernel.
//!
//! A particle of type `x` has Poisson many children with types in `A` at
//! rate `int_A W(x, y) dy`. The exact side computes `P(A)` through the
//! `beta` fixed point; the sampled side simulates the process directly.

mod fixed_point;
mod poisson;
mod simulate;
mod threshold;

pub use fixed_point::{
    beta, prob_a, BetaProfile, FixedPointMode, ProbA, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
pub use poisson::{
    ln_factorial, poisson_pmf, psi, psi_tail, psi_tail_derivative, tightness_threshold,
};
pub use simulate::{
    sample_tree, sample_trees, simulate_and_check, BranchingSample, McEstimate, SampleNode,
    DEFAULT_POP_CAP, MC_BLOCK_CAP,
};
pub use threshold::{
    detect_jumps, threshold_scan, CurvePoint, Jump, ThresholdConfig, ThresholdOutcome,
    ThresholdScan,
};

use crate::error::{invalid, Result};
use crate::kernels::StepKernel;
use crate::scalar::{pairwise_sum, Scalar};

/// Root masses may be off from 1 by this much (relative to `M`).
const MASS_TOLERANCE: f64 = 1e-9;

/// The process `X^{c rho W}` together with its root-type law.
#[derive(Clone, Debug)]
pub struct BranchingSpec<T: Scalar> {
    kernel: StepKernel<T>,
    scale: T,
    rate_adjustment: T,
    root_masses: Vec<T>,
}

impl<T: Scalar> BranchingSpec<T> {
    /// Uniform root type, no rate adjustment.
    pub fn new(kernel: StepKernel<T>, scale: T) -> Result<Self> {
        if !(scale >= T::zero()) || !scale.is_finite() {
            return Err(invalid(format!(
                "scale must be finite and nonnegative, got {scale}"
            )));
        }
        let root_masses = kernel.lengths().to_vec();
        Ok(Self {
            kernel,
            scale,
            rate_adjustment: T::one(),
            root_masses,
        })
    }

    /// Process with rates `n/(n - abar)` times those of `scale * W`, where
    /// `abar = scale * bound(W)`. Requires `n > 3 abar`.
    pub fn dominating(kernel: StepKernel<T>, scale: T, n: usize) -> Result<Self> {
        let spec = Self::new(kernel, scale)?;
        let abar = spec.scale * spec.kernel.bound();
        let n_t = T::from_usize_lossy(n);
        if !(n_t > T::lit(3.0) * abar) {
            return Err(invalid(format!(
                "dominating process needs n > 3 abar (n = {n}, abar = {abar})"
            )));
        }
        let rate = n_t / (n_t - abar);
        spec.with_rate_adjustment(rate)
    }

    pub fn with_rate_adjustment(mut self, rate: T) -> Result<Self> {
        if !(rate >= T::one()) || !rate.is_finite() {
            return Err(invalid(format!(
                "rate adjustment must be finite and at least 1, got {rate}"
            )));
        }
        self.rate_adjustment = rate;
        Ok(self)
    }

    pub fn with_root_masses(mut self, masses: Vec<T>) -> Result<Self> {
        let m = self.kernel.num_blocks();
        if masses.len() != m {
            return Err(invalid(format!(
                "expected {m} root masses, got {}",
                masses.len()
            )));
        }
        if masses.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
            return Err(invalid("root masses must be finite and nonnegative"));
        }
        let total = pairwise_sum(&masses);
        let slack = T::lit(MASS_TOLERANCE) * T::from_usize_lossy(m.max(1));
        if (total - T::one()).abs() > slack {
            return Err(invalid(format!("root masses sum to {total}, expected 1")));
        }
        self.root_masses = masses;
        Ok(self)
    }

    pub fn kernel(&self) -> &StepKernel<T> {
        &self.kernel
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn rate_adjustment(&self) -> T {
        self.rate_adjustment
    }

    pub fn root_masses(&self) -> &[T] {
        &self.root_masses
    }

    pub fn num_types(&self) -> usize {
        self.kernel.num_blocks()
    }

    /// Factor multiplying the kernel: `scale * rate_adjustment`.
    pub fn multiplier(&self) -> T {
        self.scale * self.rate_adjustment
    }

    /// Same process with a different scale.
    pub fn with_scale(&self, scale: T) -> Result<Self> {
        if !(scale >= T::zero()) || !scale.is_finite() {
            return Err(invalid(format!(
                "scale must be finite and nonnegative, got {scale}"
            )));
        }
        let mut out = self.clone();
        out.scale = scale;
        Ok(out)
    }

    /// `h -> sum_j eff(h, j) |I_j| f(j)`.
    pub(crate) fn offspring_means(&self, f: &[T]) -> Vec<T> {
        let mult = self.multiplier();
        let mut out = self.kernel.apply(f);
        for v in &mut out {
            *v = (*v * mult).max(T::zero());
        }
        out
    }
}
