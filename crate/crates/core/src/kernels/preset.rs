//! Named kernels and the JSON step-kernel file format.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GridFn, StepKernel};
use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// A kernel chosen by name on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelPreset {
    /// `W = a` everywhere.
    Constant(f64),
    /// 2000 on `[0,1/2]^2`, 2 on `(1/2,1]^2`, 1/100 across.
    RemarkA,
    /// 2 on `[0,1/2]^2`, 1 on `(1/2,1]^2`, 0 across.
    RemarkB,
    /// 1 on the two diagonal half-blocks, 0 across.
    Checkerboard,
    /// `W(x, y) = x y`, not a step function.
    Product,
    /// A step kernel read from a JSON file.
    CustomStep(PathBuf),
}

impl FromStr for KernelPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "constant" => Self::Constant(1.0),
            "remark-a" => Self::RemarkA,
            "remark-b" => Self::RemarkB,
            "checkerboard" => Self::Checkerboard,
            "product" => Self::Product,
            _ => {
                if let Some(a) = s.strip_prefix("constant:") {
                    let a: f64 = a
                        .parse()
                        .map_err(|_| invalid(format!("bad constant kernel value '{a}'")))?;
                    if !(a >= 0.0) || !a.is_finite() {
                        return Err(invalid(
                            "constant kernel value must be finite and nonnegative",
                        ));
                    }
                    Self::Constant(a)
                } else if let Some(p) = s.strip_prefix("file:") {
                    Self::CustomStep(PathBuf::from(p))
                } else if s.ends_with(".json") {
                    Self::CustomStep(PathBuf::from(s))
                } else {
                    return Err(invalid(format!("unknown kernel preset '{s}'")));
                }
            }
        })
    }
}

impl fmt::Display for KernelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(a) => write!(f, "constant:{a}"),
            Self::RemarkA => f.write_str("remark-a"),
            Self::RemarkB => f.write_str("remark-b"),
            Self::Checkerboard => f.write_str("checkerboard"),
            Self::Product => f.write_str("product"),
            Self::CustomStep(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Either a step kernel or a pointwise-evaluable bounded kernel.
#[derive(Clone)]
pub enum KernelShape<T: Scalar> {
    Step(StepKernel<T>),
    Function { f: GridFn<T>, bound: T },
}

impl<T: Scalar> fmt::Debug for KernelShape<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Step(w) => f.debug_tuple("Step").field(w).finish(),
            Self::Function { bound, .. } => write!(f, "Function {{ bound: {bound} }}"),
        }
    }
}

impl<T: Scalar> KernelShape<T> {
    pub fn eval(&self, x: T, y: T) -> T {
        match self {
            Self::Step(w) => w.eval(x, y),
            Self::Function { f, .. } => f(x, y),
        }
    }

    pub fn bound(&self) -> T {
        match self {
            Self::Step(w) => w.bound(),
            Self::Function { bound, .. } => *bound,
        }
    }

    pub fn as_step(&self) -> Option<&StepKernel<T>> {
        match self {
            Self::Step(w) => Some(w),
            Self::Function { .. } => None,
        }
    }
}

impl KernelPreset {
    pub fn resolve<T: Scalar>(&self) -> Result<KernelShape<T>> {
        let l = T::lit;
        let step = |rows: Vec<Vec<f64>>| -> Result<KernelShape<T>> {
            let rows = rows
                .into_iter()
                .map(|r| r.into_iter().map(l).collect())
                .collect();
            Ok(KernelShape::Step(StepKernel::with_equal_blocks(rows)?))
        };
        match self {
            Self::Constant(a) => step(vec![vec![*a]]),
            Self::RemarkA => step(vec![vec![2000.0, 0.01], vec![0.01, 2.0]]),
            Self::RemarkB => step(vec![vec![2.0, 0.0], vec![0.0, 1.0]]),
            Self::Checkerboard => step(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            Self::Product => Ok(KernelShape::Function {
                f: Arc::new(|x: T, y: T| x * y),
                bound: T::one(),
            }),
            Self::CustomStep(path) => Ok(KernelShape::Step(KernelFile::load(path)?)),
        }
    }
}

/// On-disk step kernel: `{"breaks": [...], "values": [[...], ...]}` with an optional `"bound"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KernelFile {
    pub breaks: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl KernelFile {
    pub fn parse<T: Scalar>(text: &str) -> Result<StepKernel<T>> {
        let raw: KernelFile = serde_json::from_str(text)?;
        raw.into_kernel()
    }

    pub fn load<T: Scalar>(path: &Path) -> Result<StepKernel<T>> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn into_kernel<T: Scalar>(self) -> Result<StepKernel<T>> {
        let breaks = self.breaks.into_iter().map(T::lit).collect();
        let values = self
            .values
            .into_iter()
            .map(|r| r.into_iter().map(T::lit).collect())
            .collect();
        let w = StepKernel::new(breaks, values)?;
        match self.bound {
            Some(b) => w.with_bound(T::lit(b)),
            None => Ok(w),
        }
    }

    pub fn from_kernel<T: Scalar>(w: &StepKernel<T>) -> Self {
        Self {
            breaks: w.breaks().iter().map(|b| b.as_f64()).collect(),
            values: w
                .value_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|v| v.as_f64()).collect())
                .collect(),
            bound: Some(w.bound().as_f64()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("kernel file serializes")
    }
}
