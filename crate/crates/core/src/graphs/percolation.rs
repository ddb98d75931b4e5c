//! Bond percolation `G_n(c/n)`: keep pair `{i, j}` with probability `min(c a_ij / n, 1)`.

use std::str::FromStr;

use rand::Rng;

use super::{SimpleGraph, WeightedDenseGraph};
use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PercolationStrategy {
    /// One counter-based uniform per unordered pair; `O(n^2)`.
    Naive,
    /// Geometric skipping at the dominating rate `min(c abar / n, 1)` then thinning; `O(n c abar)` expected.
    #[default]
    Fast,
}

impl FromStr for PercolationStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Self::Naive),
            "fast" => Ok(Self::Fast),
            other => Err(invalid(format!("unknown percolation strategy '{other}'"))),
        }
    }
}

/// Samples the percolated graph. Both strategies realize the same law but
/// consume randomness differently, so they do not produce the same graph for one seed.
pub fn percolate<T: Scalar>(
    g: &WeightedDenseGraph<T>,
    c: T,
    seed: u64,
    strategy: PercolationStrategy,
) -> Result<SimpleGraph> {
    if !(c >= T::zero()) || !c.is_finite() {
        return Err(invalid(format!(
            "percolation intensity must be finite and nonnegative, got {c}"
        )));
    }
    let n = g.n();
    let scale = c.as_f64() / n as f64;
    let keep_prob = |i: usize, j: usize| (scale * g.weight(i, j).as_f64()).min(1.0);
    if scale == 0.0 {
        return Ok(SimpleGraph::empty(n));
    }
    let rows: Vec<Vec<u32>> = match strategy {
        PercolationStrategy::Naive => (0..n)
            .map(|i| {
                (i + 1..n)
                    .filter(|&j| {
                        let p = keep_prob(i, j);
                        p > 0.0 && rng::unit_uniform(seed, (i * n + j) as u64) < p
                    })
                    .map(|j| j as u32)
                    .collect()
            })
            .collect(),
        PercolationStrategy::Fast => {
            let p_star = (scale * g.bound().as_f64()).min(1.0);
            if p_star <= 0.0 {
                return Ok(SimpleGraph::empty(n));
            }
            let log_q = (-p_star).ln_1p();
            (0..n)
                .map(|i| {
                    let mut r = rng::stream(seed, i as u64);
                    let mut row = Vec::new();
                    let mut j = i;
                    loop {
                        let skip = if p_star >= 1.0 {
                            0
                        } else {
                            // 1 - U lies in (0, 1], so the logarithm is finite.
                            let u: f64 = 1.0 - r.random::<f64>();
                            let s = (u.ln() / log_q).floor();
                            if s >= n as f64 {
                                break;
                            }
                            s as usize
                        };
                        j += 1 + skip;
                        if j >= n {
                            break;
                        }
                        let accept = keep_prob(i, j) / p_star;
                        if accept >= 1.0 || r.random::<f64>() < accept {
                            row.push(j as u32);
                        }
                    }
                    row
                })
                .collect()
        }
    };
    Ok(SimpleGraph::from_upper_rows(rows))
}
