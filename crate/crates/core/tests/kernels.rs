mod common;

use std::sync::Arc;

use kcore_core::kernels::{
    finitary_ladder, finitary_lower_approx, KernelPreset, KernelShape, StepKernel,
};
use proptest::prelude::*;

/// `a + b cos(2 pi r (x - y)) + s x y`, symmetric and nonnegative.
fn smooth_kernel(a: f64, b: f64, r: f64, s: f64) -> KernelShape<f64> {
    KernelShape::Function {
        f: Arc::new(move |x: f64, y: f64| {
            a + b * (std::f64::consts::TAU * r * (x - y)).cos() + s * x * y
        }),
        bound: a + b + s,
    }
}

const LEVEL: u32 = 5;
const GRID: u32 = 3;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ladder_is_below_and_increasing(a in 1.0f64..2.0, b in 0.0f64..1.0, r in 0.5f64..3.0, s in 0.0f64..2.0) {
        let f = smooth_kernel(a, b, r, s);
        let ladder = finitary_ladder(&f, LEVEL, GRID).unwrap();
        prop_assert_eq!(ladder.len(), LEVEL as usize);
        let n = 1usize << (LEVEL + GRID);
        let mut l1 = Vec::new();
        for (i, fm) in ladder.iter().enumerate() {
            prop_assert_eq!(fm.num_blocks(), 1 << (i + 1));
            let mut dist = 0.0;
            for p in 0..n {
                for q in 0..n {
                    let (x, y) = (p as f64 / n as f64, q as f64 / n as f64);
                    let v = fm.eval(x, y);
                    prop_assert!(v <= f.eval(x, y));
                    if let Some(next) = ladder.get(i + 1) {
                        prop_assert!(v <= next.eval(x, y));
                    }
                    dist += f.eval(x, y) - v;
                }
            }
            l1.push(dist / (n * n) as f64);
        }
        for w in l1.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15);
        }
    }

    #[test]
    fn components_do_not_interact(m in 1usize..9, seed_rows in common::sparse_symmetric(8, 2.0, 0.7)) {
        let rows: Vec<Vec<f64>> = seed_rows[..m].iter().map(|r| r[..m].to_vec()).collect();
        let w = StepKernel::with_equal_blocks(rows).unwrap();
        let comps = w.irreducible_components();
        let mut label = vec![usize::MAX; m];
        for (c, blocks) in comps.iter().enumerate() {
            for &b in blocks {
                prop_assert_eq!(label[b], usize::MAX);
                label[b] = c;
            }
        }
        prop_assert!(label.iter().all(|&l| l != usize::MAX));
        for h in 0..m {
            for k in 0..m {
                if label[h] != label[k] {
                    prop_assert_eq!(w.value(h, k), 0.0);
                }
            }
        }
        // Each component is connected through positive entries.
        for blocks in &comps {
            let mut seen = vec![blocks[0]];
            let mut i = 0;
            while i < seen.len() {
                let h = seen[i];
                for &k in blocks {
                    if w.value(h, k) > 0.0 && !seen.contains(&k) {
                        seen.push(k);
                    }
                }
                i += 1;
            }
            prop_assert_eq!(seen.len(), blocks.len());
        }
    }

    #[test]
    fn scaling_scales_integral_and_degrees((b, v) in common::step_parts(6, 0.0..3.0), lambda in 0.0f64..5.0) {
        let w = StepKernel::new(b, v).unwrap();
        let s = w.scale(lambda).unwrap();
        prop_assert!((s.integral() - lambda * w.integral()).abs() <= 1e-12 * (1.0 + s.integral()));
        for (x, y) in s.degree_function().iter().zip(w.degree_function()) {
            prop_assert!((x - lambda * y).abs() <= 1e-12 * (1.0 + x));
        }
    }
}

#[test]
fn step_kernels_are_fixed_points() {
    let w = KernelPreset::RemarkA.resolve::<f64>().unwrap();
    let f = finitary_lower_approx(&w, 3, 2).unwrap();
    let step = w.as_step().unwrap();
    for p in 0..64 {
        for q in 0..64 {
            let (x, y) = (p as f64 / 64.0, q as f64 / 64.0);
            assert_eq!(f.eval(x, y), step.eval(x, y));
        }
    }
}

#[test]
fn presets_resolve() {
    for name in [
        "constant",
        "constant:0.5",
        "remark-a",
        "remark-b",
        "checkerboard",
        "product",
    ] {
        let p: KernelPreset = name.parse().unwrap();
        let k = p.resolve::<f64>().unwrap();
        assert!(k.bound() > 0.0);
        assert_eq!(p.to_string().parse::<KernelPreset>().unwrap(), p);
    }
    assert!("nonsense".parse::<KernelPreset>().is_err());
}
