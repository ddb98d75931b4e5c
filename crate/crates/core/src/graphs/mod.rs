//! Dense weighted graphs, their bond percolation, k-cores and short-cycle counts.

mod cycles;
mod kcore;
mod percolation;
mod simple;

use std::sync::Arc;

pub use cycles::{vertices_on_short_cycles, MAX_CYCLE_LEN};
pub use kcore::{core_numbers, k_core, KCore};
pub use percolation::{percolate, PercolationStrategy};
pub use simple::SimpleGraph;

use crate::error::{invalid, Result};
use crate::kernels::{BlockMatrix, KernelShape, Partition, StepKernel};
use crate::scalar::Scalar;

/// Largest modulus accepted for Paley graphs.
pub const PALEY_MAX_Q: u64 = 10_000_000;

/// Graph on `n` vertices with symmetric bounded edge weights and a zero diagonal.
#[derive(Debug, Clone)]
pub struct WeightedDenseGraph<T: Scalar> {
    matrix: BlockMatrix<T>,
    bound: T,
}

impl<T: Scalar> WeightedDenseGraph<T> {
    /// Graph from an explicit weight matrix.
    pub fn from_weights(weights: Vec<Vec<T>>) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(invalid("a graph needs at least one vertex"));
        }
        if weights.iter().any(|r| r.len() != n) {
            return Err(invalid("weight matrix must be square"));
        }
        let mut bound = T::zero();
        for i in 0..n {
            if weights[i][i] != T::zero() {
                return Err(invalid(format!("self-weight a[{i}][{i}] must be zero")));
            }
            for j in 0..n {
                let a = weights[i][j];
                if !(a >= T::zero()) || !a.is_finite() {
                    return Err(invalid(format!(
                        "weight a[{i}][{j}] must be finite and nonnegative"
                    )));
                }
                if a != weights[j][i] {
                    return Err(invalid(format!(
                        "weight matrix is not symmetric at ({i}, {j})"
                    )));
                }
                bound = bound.max(a);
            }
        }
        Ok(Self {
            matrix: BlockMatrix::dense(n, weights.into_iter().flatten().collect()),
            bound,
        })
    }

    /// Declares a larger weight bound `abar`.
    pub fn with_bound(mut self, bound: T) -> Result<Self> {
        if bound < self.bound {
            return Err(invalid("bound must dominate every weight"));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.matrix.size()
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> T {
        self.matrix.value(i, j)
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    pub fn matrix(&self) -> &BlockMatrix<T> {
        &self.matrix
    }
}

/// Recipe for a [`WeightedDenseGraph`].
#[derive(Debug, Clone)]
pub enum GraphGenSpec<T: Scalar> {
    /// Every off-diagonal weight equals `a`.
    Constant { n: usize, a: T },
    /// `a_ij = W(i/n, j/n)` for a step kernel, stored as lifted blocks.
    Block { n: usize, kernel: StepKernel<T> },
    /// Paley graph on `Z_q`: weight 1 iff `i - j` is a nonzero square mod `q`.
    Paley { q: u64 },
    /// `a_ij = W(i/n, j/n)` for any evaluable kernel.
    KernelGrid { n: usize, kernel: KernelShape<T> },
}

/// Builds the weighted graph described by `spec`.
pub fn generate<T: Scalar>(spec: &GraphGenSpec<T>) -> Result<WeightedDenseGraph<T>> {
    match spec {
        GraphGenSpec::Constant { n, a } => {
            check_n(*n)?;
            if !(*a >= T::zero()) || !a.is_finite() {
                return Err(invalid("constant weight must be finite and nonnegative"));
            }
            Ok(WeightedDenseGraph {
                matrix: BlockMatrix::lifted(BlockMatrix::dense(1, vec![*a]), vec![0; *n], true),
                bound: *a,
            })
        }
        GraphGenSpec::Block { n, kernel } => {
            check_n(*n)?;
            Ok(block_graph(*n, kernel))
        }
        GraphGenSpec::KernelGrid { n, kernel } => {
            check_n(*n)?;
            match kernel {
                KernelShape::Step(w) => Ok(block_graph(*n, w)),
                KernelShape::Function { f, bound } => Ok(WeightedDenseGraph {
                    matrix: BlockMatrix::grid(*n, Arc::clone(f)),
                    bound: *bound,
                }),
            }
        }
        GraphGenSpec::Paley { q } => {
            let residues = paley_residues(*q)?;
            let row = residues
                .into_iter()
                .map(|r| if r { T::one() } else { T::zero() })
                .collect();
            Ok(WeightedDenseGraph {
                matrix: BlockMatrix::circulant(row),
                bound: T::one(),
            })
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("a graph needs at least one vertex"));
    }
    if n > u32::MAX as usize {
        return Err(invalid("vertex count exceeds u32 range"));
    }
    Ok(())
}

fn block_graph<T: Scalar>(n: usize, kernel: &StepKernel<T>) -> WeightedDenseGraph<T> {
    let nn = T::from_usize_lossy(n);
    let map = (0..n)
        .map(|i| kernel.partition().block_of(T::from_usize_lossy(i) / nn))
        .collect();
    WeightedDenseGraph {
        matrix: BlockMatrix::lifted(kernel.matrix().clone(), map, true),
        bound: kernel.bound(),
    }
}

/// Deterministic trial division.
pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `r[d]` is true iff `d` is a nonzero quadratic residue mod `q`; validates the Paley conditions.
pub fn paley_residues(q: u64) -> Result<Vec<bool>> {
    if q > PALEY_MAX_Q {
        return Err(invalid(format!(
            "Paley modulus {q} exceeds the {PALEY_MAX_Q} cap"
        )));
    }
    if !is_prime(q) {
        return Err(invalid(format!("Paley modulus {q} is not prime")));
    }
    if q % 4 != 1 {
        return Err(invalid(format!("Paley modulus {q} is not 1 mod 4")));
    }
    let q = q as usize;
    let mut res = vec![false; q];
    for x in 1..q {
        res[(x * x) % q] = true;
    }
    Ok(res)
}

/// Step-kernel embedding: `n` equal blocks with block values `a_ij`.
pub fn embed_graph<T: Scalar>(g: &WeightedDenseGraph<T>) -> Result<StepKernel<T>> {
    // Graph construction already enforced symmetry, nonnegativity and the bound.
    StepKernel::from_parts_trusted(Partition::uniform(g.n()), g.matrix.clone(), g.bound)
}
