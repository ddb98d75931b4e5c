#![allow(dead_code, clippy::needless_range_loop)]

use proptest::prelude::*;

/// Breaks of a partition with `m` blocks, each block at least 1/(20m) long.
pub fn breaks(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, m).prop_map(|w| {
        let total: f64 = w.iter().sum();
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for x in &w[..w.len() - 1] {
            acc += x / total;
            out.push(acc);
        }
        out.push(1.0);
        out
    })
}

/// Symmetric `m x m` matrix with entries drawn from `range`.
pub fn symmetric(m: usize, range: std::ops::Range<f64>) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(range, m * (m + 1) / 2).prop_map(move |upper| {
        let mut rows = vec![vec![0.0; m]; m];
        let mut it = upper.into_iter();
        for h in 0..m {
            for k in h..m {
                let v = it.next().unwrap();
                rows[h][k] = v;
                rows[k][h] = v;
            }
        }
        rows
    })
}

/// Symmetric matrix where each entry is zero with probability about `zero_p`.
pub fn sparse_symmetric(m: usize, hi: f64, zero_p: f64) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..hi), m * (m + 1) / 2).prop_map(move |upper| {
        let mut rows = vec![vec![0.0; m]; m];
        let mut it = upper.into_iter();
        for h in 0..m {
            for k in h..m {
                let (u, v) = it.next().unwrap();
                let v = if u < zero_p { 0.0 } else { v };
                rows[h][k] = v;
                rows[k][h] = v;
            }
        }
        rows
    })
}

/// `(breaks, values)` of a step kernel with 1..=max_m blocks.
pub fn step_parts(
    max_m: usize,
    range: std::ops::Range<f64>,
) -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
    (1..=max_m).prop_flat_map(move |m| (breaks(m), symmetric(m, range.clone())))
}
