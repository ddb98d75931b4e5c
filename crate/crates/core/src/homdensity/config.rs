//! Offspring-count configurations and their probabilities.

use crate::branching::{poisson_pmf, BranchingSample};
use crate::error::{invalid, Result};
use crate::kernels::StepKernel;
use crate::scalar::{pairwise_sum, Scalar};

/// Offspring counts of the first `depth + 1` generations.
///
/// At depth 0 only the root count is fixed. At depth `d >= 1` the root has
/// `count` ordered children, child `j` carrying its own depth `d - 1` config.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OffspringConfig {
    depth: u32,
    count: u32,
    children: Vec<OffspringConfig>,
}

impl OffspringConfig {
    /// Depth 0: the root has `k0` children.
    pub fn root_count(k0: u32) -> Self {
        Self {
            depth: 0,
            count: k0,
            children: Vec::new(),
        }
    }

    /// Root whose children have the given configs, all of the same depth.
    pub fn node(children: Vec<OffspringConfig>) -> Result<Self> {
        let Some(first) = children.first() else {
            return Err(invalid(
                "use OffspringConfig::childless for a root without children",
            ));
        };
        let d = first.depth;
        if children.iter().any(|c| c.depth != d) {
            return Err(invalid("child configs must share one depth"));
        }
        Ok(Self {
            depth: d + 1,
            count: children.len() as u32,
            children,
        })
    }

    /// Root without children, at the given depth.
    pub fn childless(depth: u32) -> Self {
        Self {
            depth,
            count: 0,
            children: Vec::new(),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `k_0`.
    pub fn count(&self) -> u32 {
        self.count
    }

    /// Empty at depth 0.
    pub fn children(&self) -> &[OffspringConfig] {
        &self.children
    }

    /// Largest count anywhere in the config.
    pub fn max_count(&self) -> u32 {
        self.children
            .iter()
            .map(OffspringConfig::max_count)
            .fold(self.count, u32::max)
    }

    /// Whether the sampled tree (from node `node`) realizes this config.
    pub fn matches(&self, sample: &BranchingSample, node: usize) -> bool {
        let n = &sample.nodes[node];
        if n.children.len() != self.count as usize {
            return false;
        }
        self.children
            .iter()
            .zip(&n.children)
            .all(|(c, &i)| c.matches(sample, i))
    }
}

/// `h -> g(x, K)` for `x` in block `h`.
pub fn config_prob_profile<T: Scalar>(config: &OffspringConfig, w: &StepKernel<T>) -> Vec<T> {
    let deg = w.degree_function();
    profile(config, w, &deg)
}

fn profile<T: Scalar>(config: &OffspringConfig, w: &StepKernel<T>, deg: &[T]) -> Vec<T> {
    if config.depth == 0 {
        return deg
            .iter()
            .map(|&l| poisson_pmf(u64::from(config.count), l))
            .collect();
    }
    // e^{-deg} / k0!  times  prod_j (W g_j)
    let mut acc: Vec<T> = deg.iter().map(|&l| poisson_pmf(0, l)).collect();
    let mut fact = T::one();
    for j in 2..=config.count {
        fact *= T::from_u32(j).expect("small integer");
    }
    for a in &mut acc {
        *a /= fact;
    }
    for child in &config.children {
        let below = w.apply(&profile(child, w, deg));
        for (a, b) in acc.iter_mut().zip(below) {
            *a *= b;
        }
    }
    acc
}

/// `g(x, K)` for `x` in `root_block`, or `P(N^d = K)` when no block is given.
pub fn config_prob<T: Scalar>(
    config: &OffspringConfig,
    w: &StepKernel<T>,
    root_block: Option<usize>,
) -> T {
    let g = config_prob_profile(config, w);
    match root_block {
        Some(h) => g[h],
        None => {
            let terms: Vec<T> = g.iter().zip(w.lengths()).map(|(&p, &l)| p * l).collect();
            pairwise_sum(&terms)
        }
    }
}
