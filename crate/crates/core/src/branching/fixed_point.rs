//! The `beta` recursion and `P(A_d)`.

use super::poisson::poisson_tail;
use super::BranchingSpec;
use crate::error::{invalid, Result};
use crate::scalar::{CompensatedSum, Scalar};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Finite depth, or iteration to the maximal fixed point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FixedPointMode {
    Depth(u32),
    Limit { tol: f64, max_iter: usize },
}

impl FixedPointMode {
    pub fn limit() -> Self {
        FixedPointMode::Limit {
            tol: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl Default for FixedPointMode {
    fn default() -> Self {
        Self::limit()
    }
}

/// `beta(h)`: probability that a type in block `h` has property `B_d` (or `B`).
#[derive(Clone, Debug, PartialEq)]
pub struct BetaProfile<T> {
    pub beta: Vec<T>,
    pub mode: FixedPointMode,
    /// Number of recursion steps taken.
    pub iterations: usize,
    /// Max-norm change of the last step (zero for depth 0).
    pub residual: T,
    /// Always true in depth mode.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbA<T> {
    pub value: T,
    pub profile: BetaProfile<T>,
    pub converged: bool,
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

fn step<T: Scalar>(spec: &BranchingSpec<T>, k: u32, beta: &mut [T]) -> T {
    let means = spec.offspring_means(beta);
    let mut residual = T::zero();
    for (b, lam) in beta.iter_mut().zip(means) {
        // The exact iterates are nonincreasing; clamp away rounding noise.
        let next = poisson_tail(k - 1, lam).min(*b);
        residual = residual.max(*b - next);
        *b = next;
    }
    residual
}

fn run<T: Scalar>(spec: &BranchingSpec<T>, k: u32, mode: FixedPointMode) -> Result<BetaProfile<T>> {
    let mut beta = vec![T::one(); spec.num_types()];
    match mode {
        FixedPointMode::Depth(d) => {
            let mut residual = T::zero();
            for _ in 0..d {
                residual = step(spec, k, &mut beta);
            }
            Ok(BetaProfile {
                beta,
                mode,
                iterations: d as usize,
                residual,
                converged: true,
            })
        }
        FixedPointMode::Limit { tol, max_iter } => {
            if !(tol > 0.0) || max_iter == 0 {
                return Err(invalid("limit mode needs tol > 0 and max_iter >= 1"));
            }
            let tol = T::lit(tol);
            let mut residual = T::zero();
            let mut iterations = 0;
            let mut converged = false;
            while iterations < max_iter {
                residual = step(spec, k, &mut beta);
                iterations += 1;
                if residual < tol {
                    converged = true;
                    break;
                }
            }
            Ok(BetaProfile {
                beta,
                mode,
                iterations,
                residual,
                converged,
            })
        }
    }
}

/// Iterates `beta_d(h) = Psi_{k-1}(sum_j eff(h, j) |I_j| beta_{d-1}(j))` from `beta_0 = 1`.
///
/// Starting from one gives the maximal fixed point in limit mode.
pub fn beta<T: Scalar>(
    spec: &BranchingSpec<T>,
    k: u32,
    mode: FixedPointMode,
) -> Result<BetaProfile<T>> {
    check_k(k)?;
    run(spec, k, mode)
}

/// `P(A_d) = sum_h root(h) Psi_k(sum_j eff(h, j) |I_j| beta_{d-1}(j))`, or `P(A)` in limit mode.
pub fn prob_a<T: Scalar>(
    spec: &BranchingSpec<T>,
    k: u32,
    mode: FixedPointMode,
) -> Result<ProbA<T>> {
    check_k(k)?;
    let inner = match mode {
        FixedPointMode::Depth(0) => return Err(invalid("depth must be at least 1")),
        FixedPointMode::Depth(d) => FixedPointMode::Depth(d - 1),
        limit => limit,
    };
    let profile = run(spec, k, inner)?;
    let means = spec.offspring_means(&profile.beta);
    let mut acc = CompensatedSum::new();
    for (&root, lam) in spec.root_masses().iter().zip(means) {
        if root > T::zero() {
            acc.add(root * poisson_tail(k, lam));
        }
    }
    let value = acc.value().max(T::zero()).min(T::one());
    let converged = profile.converged;
    Ok(ProbA {
        value,
        profile,
        converged,
    })
}
