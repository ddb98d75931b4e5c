//! Finitary approximation from below on dyadic partitions.
//!
//! Block values are minima over a fixed evaluation grid, not essential
//! infima: the approximation is guaranteed to lie below the kernel at every
//! grid point and nowhere else.

use super::{BlockMatrix, KernelShape, Partition, StepKernel};
use crate::error::{invalid, unsupported, Result};
use crate::scalar::Scalar;

/// Default samples per cell side: `2^4 = 16`.
pub const DEFAULT_GRID_LEVEL: u32 = 4;
const MAX_TOTAL_LEVEL: u32 = 12;

/// `F_m` on `2^m` equal intervals, each cell valued by the minimum of `f` over
/// a `2^grid_level x 2^grid_level` sub-grid of cell points (left endpoints included).
pub fn finitary_lower_approx<T: Scalar>(
    f: &KernelShape<T>,
    m: u32,
    grid_level: u32,
) -> Result<StepKernel<T>> {
    let mut ladder = finitary_ladder(f, m, grid_level)?;
    Ok(ladder.pop().expect("ladder has m entries"))
}

/// `F_1, ..., F_{m_max}` evaluated on one shared global grid of `2^(m_max + grid_level)`
/// points per axis, so the sequence is pointwise nondecreasing in `m` on that grid.
pub fn finitary_ladder<T: Scalar>(
    f: &KernelShape<T>,
    m_max: u32,
    grid_level: u32,
) -> Result<Vec<StepKernel<T>>> {
    if m_max == 0 {
        return Err(invalid("finitary approximation level must be at least 1"));
    }
    let total = m_max + grid_level;
    if total > MAX_TOTAL_LEVEL {
        return Err(unsupported(format!(
            "evaluation grid of 2^{total} points per axis exceeds the 2^{MAX_TOTAL_LEVEL} cap"
        )));
    }
    let n = 1usize << total;
    let step = T::one() / T::from_usize_lossy(n);
    let coords: Vec<T> = (0..n).map(|i| T::from_usize_lossy(i) * step).collect();

    // Finest level first: the minimum over each finest cell, then coarsen by 2x2 minima.
    let mut level = m_max;
    let side = 1usize << level;
    let per = n / side;
    let mut mins = vec![T::infinity(); side * side];
    for (i, &x) in coords.iter().enumerate() {
        for (j, &y) in coords.iter().enumerate() {
            let v = f.eval(x, y).min(f.eval(y, x));
            let cell = (i / per) * side + j / per;
            if v < mins[cell] {
                mins[cell] = v;
            }
        }
    }
    let mut out = Vec::with_capacity(m_max as usize);
    loop {
        let side = 1usize << level;
        out.push(StepKernel::from_parts(
            Partition::uniform(side),
            BlockMatrix::dense(side, mins.clone()),
            Some(f.bound()),
        )?);
        if level == 1 {
            break;
        }
        let half = side / 2;
        let mut coarse = vec![T::infinity(); half * half];
        for h in 0..side {
            for k in 0..side {
                let c = &mut coarse[(h / 2) * half + k / 2];
                *c = c.min(mins[h * side + k]);
            }
        }
        mins = coarse;
        level -= 1;
    }
    out.reverse();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::KernelPreset;

    #[test]
    fn constant_is_reproduced_at_every_level() {
        let f = KernelShape::Step(StepKernel::constant(0.7f64).unwrap());
        for m in 1..4 {
            let fm = finitary_lower_approx(&f, m, 2).unwrap();
            assert!(fm.value_rows().iter().flatten().all(|&v| v == 0.7));
        }
    }

    #[test]
    fn aligned_step_kernel_is_a_fixed_point() {
        let w = StepKernel::with_equal_blocks(vec![
            vec![1.0, 0.5, 0.0, 0.2],
            vec![0.5, 2.0, 0.1, 0.0],
            vec![0.0, 0.1, 3.0, 0.4],
            vec![0.2, 0.0, 0.4, 0.9],
        ])
        .unwrap();
        let fm =
            finitary_lower_approx(&KernelShape::Step(w.clone()), 2, DEFAULT_GRID_LEVEL).unwrap();
        assert_eq!(fm.value_rows(), w.value_rows());
    }

    #[test]
    fn product_kernel_uses_cell_left_endpoints() {
        let f = KernelPreset::Product.resolve::<f64>().unwrap();
        let f1 = finitary_lower_approx(&f, 1, DEFAULT_GRID_LEVEL).unwrap();
        assert_eq!(f1.value_rows(), vec![vec![0.0, 0.0], vec![0.0, 0.25]]);
        let f2 = finitary_lower_approx(&f, 2, 3).unwrap();
        // Block (h, k) of the 4x4 approximation: (h/4) * (k/4).
        for h in 0..4 {
            for k in 0..4 {
                assert_eq!(f2.value(h, k), (h as f64 / 4.0) * (k as f64 / 4.0));
            }
        }
    }

    #[test]
    fn rejects_level_zero_and_oversized_grids() {
        let f = KernelPreset::Product.resolve::<f64>().unwrap();
        assert!(finitary_lower_approx(&f, 0, 2).is_err());
        assert!(matches!(
            finitary_lower_approx(&f, 10, 4),
            Err(crate::Error::Capability(_))
        ));
    }
}
