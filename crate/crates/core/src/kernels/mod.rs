//! Bounded kernels on `[0,1]^2` represented as symmetric step functions.
//!
//! A [`StepKernel`] is an interval partition of `[0,1]` together with a
//! nonnegative symmetric block matrix. Limit kernels, finitary
//! approximations, scaled kernels and graph embeddings all live in this one
//! representation, which makes every integral below an exact finite sum.

mod approx;
mod cut;
mod matrix;
mod preset;

use std::sync::Arc;

pub use approx::{finitary_ladder, finitary_lower_approx, DEFAULT_GRID_LEVEL};
pub use cut::{
    cut_distance, cut_norm, CutNorm, CutNormMode, CutNormStatus, DEFAULT_RESTARTS, EXACT_BLOCK_CAP,
};
pub use matrix::{BlockMatrix, Circulant, GridFn};
pub use preset::{KernelFile, KernelPreset, KernelShape};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Breaks closer than this are treated as the same boundary when merging partitions.
pub const BREAK_TOLERANCE: f64 = 1e-12;

/// Interval partition `0 = b_0 < b_1 < ... < b_M = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    breaks: Vec<T>,
    lengths: Vec<T>,
}

impl<T: Scalar> Partition<T> {
    pub fn from_breaks(breaks: Vec<T>) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(invalid("a partition needs at least two breaks"));
        }
        if breaks[0] != T::zero() || breaks[breaks.len() - 1] != T::one() {
            return Err(invalid("partition breaks must start at 0 and end at 1"));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("partition breaks must be strictly increasing"));
        }
        let lengths = breaks.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { breaks, lengths })
    }

    /// `n` equal blocks; lengths are exactly `1/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n >= 1, "uniform partition needs at least one block");
        let nn = T::from_usize_lossy(n);
        let mut breaks: Vec<T> = (0..n).map(|i| T::from_usize_lossy(i) / nn).collect();
        breaks.push(T::one());
        Self {
            breaks,
            lengths: vec![T::one() / nn; n],
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.lengths.len()
    }

    pub fn breaks(&self) -> &[T] {
        &self.breaks
    }

    pub fn lengths(&self) -> &[T] {
        &self.lengths
    }

    /// Block containing `x`, using half-open intervals `[b_h, b_{h+1})` and the last block closed.
    pub fn block_of(&self, x: T) -> usize {
        let m = self.num_blocks();
        let idx = self.breaks.partition_point(|&b| b <= x);
        idx.saturating_sub(1).min(m - 1)
    }

    fn contains_breaks_of(&self, other: &Self) -> bool {
        let tol = T::lit(BREAK_TOLERANCE);
        let mut i = 0;
        for &b in &other.breaks {
            while i < self.breaks.len() && self.breaks[i] < b - tol {
                i += 1;
            }
            if i == self.breaks.len() || (self.breaks[i] - b).abs() > tol {
                return false;
            }
        }
        true
    }

    /// Coarsest partition refining both inputs.
    pub fn common_refinement(a: &Self, b: &Self) -> Self {
        if a.contains_breaks_of(b) {
            return a.clone();
        }
        if b.contains_breaks_of(a) {
            return b.clone();
        }
        let tol = T::lit(BREAK_TOLERANCE);
        let mut merged: Vec<T> = a.breaks.iter().chain(&b.breaks).copied().collect();
        merged.sort_by(|x, y| x.partial_cmp(y).expect("finite breaks"));
        let mut out: Vec<T> = Vec::with_capacity(merged.len());
        for x in merged {
            match out.last() {
                Some(&last) if x - last <= tol => {}
                _ => out.push(x),
            }
        }
        *out.last_mut().expect("nonempty") = T::one();
        Self::from_breaks(out).expect("merged partition is valid")
    }

    /// For each block of `self`, the block of `coarse` containing it. `self` must refine `coarse`.
    fn coarsening_map(&self, coarse: &Self) -> Result<Vec<usize>> {
        if !self.contains_breaks_of(coarse) {
            return Err(invalid(
                "target partition does not refine the kernel's partition",
            ));
        }
        let two = T::lit(2.0);
        Ok((0..self.num_blocks())
            .map(|h| coarse.block_of((self.breaks[h] + self.breaks[h + 1]) / two))
            .collect())
    }
}

fn check_values<T: Scalar>(matrix: &BlockMatrix<T>, m: usize) -> Result<()> {
    if matrix.size() != m {
        return Err(invalid(format!(
            "value matrix has {} blocks but the partition has {m}",
            matrix.size()
        )));
    }
    if !matrix.is_symmetric() {
        return Err(invalid("kernel values must be symmetric"));
    }
    Ok(())
}

fn dense_from_rows<T: Scalar>(values: Vec<Vec<T>>) -> Result<BlockMatrix<T>> {
    let m = values.len();
    if values.iter().any(|row| row.len() != m) {
        return Err(invalid("kernel values must form a square matrix"));
    }
    let data: Vec<T> = values.into_iter().flatten().collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(invalid("kernel values must be finite"));
    }
    Ok(BlockMatrix::dense(m, data))
}

/// Bounded nonnegative symmetric step kernel.
#[derive(Debug, Clone)]
pub struct StepKernel<T: Scalar> {
    partition: Arc<Partition<T>>,
    matrix: BlockMatrix<T>,
    bound: T,
}

impl<T: Scalar> StepKernel<T> {
    /// Kernel from explicit breaks and a square value matrix; the bound is the largest entry.
    pub fn new(breaks: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        let partition = Partition::from_breaks(breaks)?;
        let matrix = dense_from_rows(values)?;
        Self::from_parts(partition, matrix, None)
    }

    /// Kernel on `values.len()` equal blocks.
    pub fn with_equal_blocks(values: Vec<Vec<T>>) -> Result<Self> {
        let matrix = dense_from_rows(values)?;
        Self::from_parts(Partition::uniform(matrix.size()), matrix, None)
    }

    pub fn constant(value: T) -> Result<Self> {
        Self::with_equal_blocks(vec![vec![value]])
    }

    /// Validates the invariants; `bound` defaults to the largest entry.
    pub fn from_parts(
        partition: Partition<T>,
        matrix: BlockMatrix<T>,
        bound: Option<T>,
    ) -> Result<Self> {
        check_values(&matrix, partition.num_blocks())?;
        let (lo, hi) = matrix.entry_range();
        if !(lo >= T::zero()) || !hi.is_finite() {
            return Err(invalid("kernel values must be finite and nonnegative"));
        }
        let bound = match bound {
            Some(b) if b < hi => {
                return Err(invalid(format!(
                    "bound {b} is below the largest kernel value {hi}"
                )));
            }
            Some(b) => b,
            None => hi,
        };
        Ok(Self {
            partition: Arc::new(partition),
            matrix,
            bound,
        })
    }

    /// Skips the O(M^2) invariant scan for matrices whose invariants hold by construction.
    pub(crate) fn from_parts_trusted(
        partition: Partition<T>,
        matrix: BlockMatrix<T>,
        bound: T,
    ) -> Result<Self> {
        if matrix.size() != partition.num_blocks() {
            return Err(invalid("value matrix does not match the partition"));
        }
        Ok(Self {
            partition: Arc::new(partition),
            matrix,
            bound,
        })
    }

    /// Replaces the bound; it must dominate every entry.
    pub fn with_bound(mut self, bound: T) -> Result<Self> {
        let (_, hi) = self.matrix.entry_range();
        if bound < hi {
            return Err(invalid(format!(
                "bound {bound} is below the largest kernel value {hi}"
            )));
        }
        self.bound = bound;
        Ok(self)
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn partition(&self) -> &Partition<T> {
        &self.partition
    }

    pub fn breaks(&self) -> &[T] {
        self.partition.breaks()
    }

    pub fn lengths(&self) -> &[T] {
        self.partition.lengths()
    }

    pub fn matrix(&self) -> &BlockMatrix<T> {
        &self.matrix
    }

    pub fn bound(&self) -> T {
        self.bound
    }

    pub fn value(&self, h: usize, k: usize) -> T {
        self.matrix.value(h, k)
    }

    /// Pointwise evaluation `W(x, y)`.
    pub fn eval(&self, x: T, y: T) -> T {
        self.matrix
            .value(self.partition.block_of(x), self.partition.block_of(y))
    }

    /// Integral operator on block functions: `(T_W f)(h) = sum_j W(h, j) |I_j| f(j)`.
    pub fn apply(&self, f: &[T]) -> Vec<T> {
        let weighted: Vec<T> = f.iter().zip(self.lengths()).map(|(&v, &l)| v * l).collect();
        self.matrix.matvec(&weighted)
    }

    /// Expected offspring count of a type in each block: `x -> int W(x, y) dy`.
    pub fn degree_function(&self) -> Vec<T> {
        self.apply(&vec![T::one(); self.num_blocks()])
    }

    /// `int int W`.
    pub fn integral(&self) -> T {
        let deg = self.degree_function();
        crate::scalar::pairwise_sum(
            &deg.iter()
                .zip(self.lengths())
                .map(|(&d, &l)| d * l)
                .collect::<Vec<_>>(),
        )
    }

    /// `lambda * W` with the bound scaled alike.
    pub fn scale(&self, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(invalid(format!(
                "scale factor must be finite and nonnegative, got {lambda}"
            )));
        }
        if lambda == T::one() {
            return Ok(self.clone());
        }
        Ok(Self {
            partition: self.partition.clone(),
            matrix: self.matrix.scaled(lambda),
            bound: self.bound * lambda,
        })
    }

    /// Same kernel expressed on a finer partition.
    pub fn refine(&self, target: &Partition<T>) -> Result<Self> {
        if *target == *self.partition {
            return Ok(self.clone());
        }
        let map = target.coarsening_map(&self.partition)?;
        Ok(Self {
            partition: Arc::new(target.clone()),
            matrix: BlockMatrix::lifted(self.matrix.clone(), map, false),
            bound: self.bound,
        })
    }

    /// Irreducible pieces: connected components of the positive-block graph.
    ///
    /// Blocks whose row is identically zero come out as singleton components,
    /// and the kernel vanishes between any two distinct components.
    pub fn irreducible_components(&self) -> Vec<Vec<usize>> {
        self.matrix.positive_components()
    }

    /// `W` restricted to `blocks x blocks` and zero elsewhere, on the same partition.
    pub fn restrict(&self, blocks: &[usize]) -> Self {
        let m = self.num_blocks();
        let mut keep = vec![false; m];
        for &b in blocks {
            keep[b] = true;
        }
        let mut data = vec![T::zero(); m * m];
        for h in 0..m {
            for k in 0..m {
                if keep[h] && keep[k] {
                    data[h * m + k] = self.value(h, k);
                }
            }
        }
        Self {
            partition: self.partition.clone(),
            matrix: BlockMatrix::dense(m, data),
            bound: self.bound,
        }
    }

    pub fn to_signed(&self) -> SignedStepKernel<T> {
        SignedStepKernel {
            partition: self.partition.clone(),
            matrix: self.matrix.clone(),
            bound: self.bound,
        }
    }

    /// Dense rows, for display and serialization.
    pub fn value_rows(&self) -> Vec<Vec<T>> {
        let m = self.num_blocks();
        self.matrix
            .to_dense_vec()
            .chunks(m)
            .map(|r| r.to_vec())
            .collect()
    }
}

/// Symmetric step function that may take negative values, such as a difference of two kernels.
#[derive(Debug, Clone)]
pub struct SignedStepKernel<T: Scalar> {
    partition: Arc<Partition<T>>,
    matrix: BlockMatrix<T>,
    bound: T,
}

impl<T: Scalar> SignedStepKernel<T> {
    pub fn new(breaks: Vec<T>, values: Vec<Vec<T>>) -> Result<Self> {
        let partition = Partition::from_breaks(breaks)?;
        let matrix = dense_from_rows(values)?;
        check_values(&matrix, partition.num_blocks())?;
        let (lo, hi) = matrix.entry_range();
        Ok(Self {
            partition: Arc::new(partition),
            matrix,
            bound: lo.abs().max(hi.abs()),
        })
    }

    pub fn with_equal_blocks(values: Vec<Vec<T>>) -> Result<Self> {
        let m = values.len();
        let mut breaks: Vec<T> = (0..m)
            .map(|i| T::from_usize_lossy(i) / T::from_usize_lossy(m))
            .collect();
        breaks.push(T::one());
        let mut out = Self::new(breaks, values)?;
        out.partition = Arc::new(Partition::uniform(m));
        Ok(out)
    }

    /// `a - b` on the common refinement of their partitions.
    pub fn difference(a: &StepKernel<T>, b: &StepKernel<T>) -> Self {
        Self::sum(&a.to_signed(), &b.to_signed().scale(-T::one()))
    }

    /// `u + v` on the common refinement of their partitions.
    pub fn sum(u: &Self, v: &Self) -> Self {
        let common = Partition::common_refinement(&u.partition, &v.partition);
        let lift = |s: &Self| -> BlockMatrix<T> {
            if common == *s.partition {
                s.matrix.clone()
            } else {
                let map = common
                    .coarsening_map(&s.partition)
                    .expect("common refinement refines both operands");
                BlockMatrix::lifted(s.matrix.clone(), map, false)
            }
        };
        let matrix = lift(u).plus(&lift(v));
        Self {
            partition: Arc::new(common),
            matrix,
            bound: u.bound + v.bound,
        }
    }

    /// `lambda * u` for any real `lambda`.
    pub fn scale(&self, lambda: T) -> Self {
        Self {
            partition: self.partition.clone(),
            matrix: self.matrix.scaled(lambda),
            bound: self.bound * lambda.abs(),
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn lengths(&self) -> &[T] {
        self.partition.lengths()
    }

    pub fn partition(&self) -> &Partition<T> {
        &self.partition
    }

    pub fn matrix(&self) -> &BlockMatrix<T> {
        &self.matrix
    }

    /// Upper bound on `|u|`.
    pub fn bound(&self) -> T {
        self.bound
    }

    pub fn value(&self, h: usize, k: usize) -> T {
        self.matrix.value(h, k)
    }

    /// `int int |u|`, an upper bound on the cut norm.
    pub fn l1_norm(&self) -> T {
        let m = self.num_blocks();
        let len = self.lengths();
        let mut acc = crate::scalar::CompensatedSum::new();
        for h in 0..m {
            for k in 0..m {
                acc.add(self.value(h, k).abs() * len[h] * len[k]);
            }
        }
        acc.value()
    }

    /// Block-area weighted matrix `u[h][k] |I_h| |I_k|`, row-major.
    pub(crate) fn weighted_dense(&self) -> Vec<T> {
        let m = self.num_blocks();
        let len = self.lengths();
        let mut data = self.matrix.to_dense_vec();
        for h in 0..m {
            for k in 0..m {
                data[h * m + k] *= len[h] * len[k];
            }
        }
        data
    }
}
