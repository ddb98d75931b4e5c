//! Kernel branching processes, inhomogeneous random graphs and their k-cores.
//!
//! The numerical routines are generic over the floating-point scalar; the
//! `*64` / `*32` aliases below pin the common choices.

// `!(x >= 0)` is how validators reject NaN along with negatives.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod branching;
pub mod error;
pub mod graphs;
pub mod homdensity;
pub mod kernels;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type StepKernel64 = kernels::StepKernel<f64>;
pub type StepKernel32 = kernels::StepKernel<f32>;
pub type SignedStepKernel64 = kernels::SignedStepKernel<f64>;
pub type SignedStepKernel32 = kernels::SignedStepKernel<f32>;
pub type WeightedDenseGraph64 = graphs::WeightedDenseGraph<f64>;
pub type WeightedDenseGraph32 = graphs::WeightedDenseGraph<f32>;
