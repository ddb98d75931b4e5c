//! Sampling the branching process.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Poisson;
use rayon::prelude::*;

use super::BranchingSpec;
use crate::error::{invalid, unsupported, Result};
use crate::rng;
use crate::scalar::Scalar;

/// Default population cap per trial.
pub const DEFAULT_POP_CAP: usize = 1_000_000;
/// Largest number of types the sampler tabulates (one categorical law per type).
pub const MC_BLOCK_CAP: usize = 2048;

/// Per-type offspring laws in `f64`.
struct Sampler {
    rates: Vec<f64>,
    poisson: Vec<Option<Poisson<f64>>>,
    child_types: Vec<Option<WeightedIndex<f64>>>,
    root: WeightedIndex<f64>,
}

impl Sampler {
    fn new<T: Scalar>(spec: &BranchingSpec<T>) -> Result<Self> {
        let m = spec.num_types();
        if m > MC_BLOCK_CAP {
            return Err(unsupported(format!(
                "sampling supports at most {MC_BLOCK_CAP} types, kernel has {m}"
            )));
        }
        let mult = spec.multiplier().as_f64();
        let lengths: Vec<f64> = spec.kernel().lengths().iter().map(|l| l.as_f64()).collect();
        let mut rates = Vec::with_capacity(m);
        let mut poisson = Vec::with_capacity(m);
        let mut child_types = Vec::with_capacity(m);
        for h in 0..m {
            let w: Vec<f64> = (0..m)
                .map(|j| mult * spec.kernel().value(h, j).as_f64() * lengths[j])
                .collect();
            let total: f64 = w.iter().sum();
            rates.push(total);
            if total > 0.0 {
                poisson
                    .push(Some(Poisson::new(total).map_err(|e| {
                        invalid(format!("offspring rate {total}: {e}"))
                    })?));
                child_types.push(Some(
                    WeightedIndex::new(&w).map_err(|e| invalid(e.to_string()))?,
                ));
            } else {
                poisson.push(None);
                child_types.push(None);
            }
        }
        let root_w: Vec<f64> = spec.root_masses().iter().map(|p| p.as_f64()).collect();
        let root = WeightedIndex::new(&root_w).map_err(|e| invalid(format!("root masses: {e}")))?;
        Ok(Self {
            rates,
            poisson,
            child_types,
            root,
        })
    }

    fn count<R: Rng>(&self, h: usize, rng: &mut R) -> u64 {
        match &self.poisson[h] {
            Some(p) => p.sample(rng) as u64,
            None => 0,
        }
    }

    fn child<R: Rng>(&self, h: usize, rng: &mut R) -> usize {
        self.child_types[h]
            .as_ref()
            .expect("positive rate")
            .sample(rng)
    }
}

struct CapHit;

struct Trial<'a, R> {
    sampler: &'a Sampler,
    rng: R,
    nodes: usize,
    cap: usize,
}

impl<R: Rng> Trial<'_, R> {
    /// Whether a node of type `h` has at least `need` children that in turn
    /// qualify (with `need = k - 1`) to `depth - 1` further generations.
    fn qualifies(&mut self, h: usize, depth: u32, need: u64, k: u64) -> Result<bool, CapHit> {
        if depth == 0 {
            return Ok(true);
        }
        let count = self.sampler.count(h, &mut self.rng);
        if count < need {
            return Ok(false);
        }
        self.nodes += count as usize;
        if self.nodes > self.cap {
            return Err(CapHit);
        }
        let mut good = 0;
        for i in 0..count {
            let child = self.sampler.child(h, &mut self.rng);
            if self.qualifies(child, depth - 1, k - 1, k)? {
                good += 1;
                if good >= need {
                    return Ok(true);
                }
            }
            if good + (count - i - 1) < need {
                return Ok(false);
            }
        }
        Ok(good >= need)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// Binomial standard error `sqrt(p (1 - p) / trials)`.
    pub std_error: f64,
    pub successes: u64,
    pub trials: u64,
    /// Trials stopped at the population cap; scored as failures.
    pub cap_hits: u64,
}

impl McEstimate {
    /// More than 1% of trials hit the population cap.
    pub fn cap_warning(&self) -> bool {
        self.cap_hits * 100 > self.trials
    }
}

/// Monte Carlo estimate of `P(A_d)`.
///
/// Trial `t` draws from `rng::stream(seed, t)`, so the result does not depend
/// on how trials are spread over threads.
pub fn simulate_and_check<T: Scalar>(
    spec: &BranchingSpec<T>,
    k: u32,
    d: u32,
    trials: u64,
    pop_cap: usize,
    seed: u64,
) -> Result<McEstimate> {
    if k < 2 {
        return Err(invalid(format!("k must be at least 2, got {k}")));
    }
    if trials == 0 || pop_cap == 0 {
        return Err(invalid("trials and pop_cap must be at least 1"));
    }
    let sampler = Sampler::new(spec)?;
    let (successes, cap_hits) = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, t);
            let root = sampler.root.sample(&mut rng);
            let mut trial = Trial {
                sampler: &sampler,
                rng,
                nodes: 1,
                cap: pop_cap,
            };
            match trial.qualifies(root, d, u64::from(k), u64::from(k)) {
                Ok(true) => (1u64, 0u64),
                Ok(false) => (0, 0),
                Err(CapHit) => (0, 1),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let p = successes as f64 / n;
    Ok(McEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / n).sqrt(),
        successes,
        trials,
        cap_hits,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleNode {
    pub block: usize,
    pub generation: u32,
    pub children: Vec<usize>,
}

/// A sampled family tree, generations `0..=max_depth`.
///
/// Nodes in the last generation are not expanded. Children of a node are
/// drawn as a Poisson total followed by iid types, so their order is
/// exchangeable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchingSample {
    pub nodes: Vec<SampleNode>,
    pub max_depth: u32,
    /// Some node of the last generation has a positive offspring rate.
    pub depth_capped: bool,
    /// Expansion stopped at the population cap; counts are then incomplete.
    pub population_capped: bool,
}

impl BranchingSample {
    pub fn root(&self) -> &SampleNode {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Event `A_d` evaluated on the materialized tree.
    pub fn satisfies_a(&self, k: u32, d: u32) -> Result<bool> {
        if self.population_capped || d > self.max_depth {
            return Err(invalid("sample does not determine the event to this depth"));
        }
        Ok(self.check(0, d, k, k))
    }

    fn check(&self, node: usize, depth: u32, need: u32, k: u32) -> bool {
        if depth == 0 {
            return true;
        }
        let good = self.nodes[node]
            .children
            .iter()
            .filter(|&&c| self.check(c, depth - 1, k - 1, k))
            .count();
        good >= need as usize
    }
}

/// Draws one tree to `max_depth` generations from `rng::stream(seed, index)`.
pub fn sample_tree<T: Scalar>(
    spec: &BranchingSpec<T>,
    max_depth: u32,
    pop_cap: usize,
    seed: u64,
    index: u64,
) -> Result<BranchingSample> {
    let sampler = Sampler::new(spec)?;
    Ok(sample_with(
        &sampler,
        max_depth,
        pop_cap,
        &mut rng::stream(seed, index),
    ))
}

/// Draws `count` trees with indices `0..count`, in parallel.
pub fn sample_trees<T: Scalar>(
    spec: &BranchingSpec<T>,
    max_depth: u32,
    pop_cap: usize,
    seed: u64,
    count: u64,
) -> Result<Vec<BranchingSample>> {
    let sampler = Sampler::new(spec)?;
    Ok((0..count)
        .into_par_iter()
        .map(|i| sample_with(&sampler, max_depth, pop_cap, &mut rng::stream(seed, i)))
        .collect())
}

fn sample_with<R: Rng>(
    sampler: &Sampler,
    max_depth: u32,
    pop_cap: usize,
    rng: &mut R,
) -> BranchingSample {
    let root = sampler.root.sample(rng);
    let mut nodes = vec![SampleNode {
        block: root,
        generation: 0,
        children: Vec::new(),
    }];
    let mut population_capped = false;
    let mut depth_capped = false;
    let mut next = 0;
    while next < nodes.len() {
        let SampleNode {
            block, generation, ..
        } = nodes[next];
        if generation == max_depth {
            depth_capped |= sampler.rates[block] > 0.0;
            next += 1;
            continue;
        }
        let count = sampler.count(block, rng) as usize;
        if nodes.len() + count > pop_cap.max(1) {
            population_capped = true;
            break;
        }
        for _ in 0..count {
            let child = sampler.child(block, rng);
            let id = nodes.len();
            nodes[next].children.push(id);
            nodes.push(SampleNode {
                block: child,
                generation: generation + 1,
                children: Vec::new(),
            });
        }
        next += 1;
    }
    BranchingSample {
        nodes,
        max_depth,
        depth_capped,
        population_capped,
    }
}
