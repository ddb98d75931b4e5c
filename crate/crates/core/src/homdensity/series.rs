//! Tree-series expansion of configuration probabilities.
//!
//! `g(x, K) = sum_m lambda_m t^x(T_m, W)`. At depth 0 with root count `k` the
//! terms are `(m + k)`-stars with `lambda_m = (-1)^m / (k! m!)`. Otherwise a
//! term is indexed by `(m_0, m_1, .., m_{k_0})`: its tree has `m_0` bare leaves
//! plus the child-series trees `T^j_{m_j}` hung below the root, and
//! `lambda = (-1)^{m_0} / (k_0! m_0!) prod_j lambda^j_{m_j}`.
//!
//! Every index component is truncated at `m_max`, which makes both the
//! included and the full absolute sums products of per-component factors.

use rayon::prelude::*;

use super::config::OffspringConfig;
use super::tree::RootedTree;
use crate::branching::ln_factorial;
use crate::error::{invalid, unsupported, Result};
use crate::kernels::StepKernel;
use crate::scalar::{pairwise_sum, Scalar};

pub const MAX_SERIES_DEPTH: u32 = 3;
pub const MAX_SERIES_COUNT: u32 = 6;
pub const MAX_SERIES_TERMS: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct TreeSeries<T: Scalar> {
    depth: u32,
    k0: u32,
    m_max: u32,
    abar: T,
    children: Vec<TreeSeries<T>>,
    len: usize,
    max_edges: usize,
    /// `sum |lambda_m| abar^{|E(T_m)|}` over kept terms.
    included: T,
    /// Same sum over all terms, kept or not.
    full: T,
    tail_bound: T,
}

/// `1/n!` for `n = 0..=m`.
fn inverse_factorials<T: Scalar>(m: u32) -> Vec<T> {
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut v = T::one();
    out.push(v);
    for i in 1..=m {
        v /= T::from_u32(i).expect("small integer");
        out.push(v);
    }
    out
}

/// `(sum_{m <= m_max} a^m/m!, sum_{m > m_max} a^m/m!)`, the second summed directly.
fn exp_split<T: Scalar>(a: T, m_max: u32) -> (T, T) {
    let inv = inverse_factorials::<T>(m_max);
    let mut head = Vec::with_capacity(inv.len());
    let mut p = T::one();
    for f in &inv {
        head.push(p * *f);
        p *= a;
    }
    if a == T::zero() {
        return (T::one(), T::zero());
    }
    let start = u64::from(m_max) + 1;
    let mut term = (T::from_u64(start).expect("integer") * a.ln() - ln_factorial::<T>(start)).exp();
    let mut tail = Vec::new();
    let mut i = start;
    loop {
        tail.push(term);
        i += 1;
        term *= a / T::from_u64(i).expect("integer");
        let it = T::from_u64(i).expect("integer");
        if term == T::zero() || (it > a && term <= T::epsilon() * T::lit(1e-3) * tail[0]) {
            break;
        }
    }
    (pairwise_sum(&head), pairwise_sum(&tail))
}

impl<T: Scalar> TreeSeries<T> {
    /// Builds the truncated series of `config` for kernels bounded by `abar`.
    pub fn new(config: &OffspringConfig, abar: T, m_max: u32) -> Result<Self> {
        if !(abar >= T::zero()) || !abar.is_finite() {
            return Err(invalid(format!(
                "abar must be finite and nonnegative, got {abar}"
            )));
        }
        if config.depth() > MAX_SERIES_DEPTH {
            return Err(unsupported(format!(
                "tree series supports depth <= {MAX_SERIES_DEPTH}, config has depth {}",
                config.depth()
            )));
        }
        if config.max_count() > MAX_SERIES_COUNT {
            return Err(unsupported(format!(
                "tree series supports counts <= {MAX_SERIES_COUNT}, config has {}",
                config.max_count()
            )));
        }
        Self::build(config, abar, m_max)
    }

    fn build(config: &OffspringConfig, abar: T, m_max: u32) -> Result<Self> {
        let k0 = config.count();
        let width = m_max as usize + 1;
        let (head, rest) = exp_split(abar, m_max);
        let pre = abar.powi(k0 as i32) * (-ln_factorial::<T>(u64::from(k0))).exp();
        if config.depth() == 0 {
            let included = pre * head;
            let tail_bound = pre * rest;
            return Ok(Self {
                depth: 0,
                k0,
                m_max,
                abar,
                children: Vec::new(),
                len: width,
                max_edges: m_max as usize + k0 as usize,
                included,
                full: included + tail_bound,
                tail_bound,
            });
        }
        let children = config
            .children()
            .iter()
            .map(|c| Self::build(c, abar, m_max))
            .collect::<Result<Vec<_>>>()?;
        let mut len = width;
        for c in &children {
            len = len
                .checked_mul(c.len)
                .filter(|&n| n <= MAX_SERIES_TERMS)
                .ok_or_else(|| {
                    unsupported(format!(
                        "tree series would exceed {MAX_SERIES_TERMS} terms; lower m_max"
                    ))
                })?;
        }
        // Factors (kept, omitted, all): the m_0 part, then abar * child sums.
        let inv_k0 = (-ln_factorial::<T>(u64::from(k0))).exp();
        let mut kept = vec![head];
        let mut omitted = vec![rest];
        let mut all = vec![head + rest];
        for c in &children {
            kept.push(abar * c.included);
            omitted.push(abar * c.tail_bound);
            all.push(abar * c.full);
        }
        // prod all - prod kept = sum_i (prod_{l<i} kept_l) omitted_i (prod_{l>i} all_l)
        let n = kept.len();
        let mut suffix = vec![T::one(); n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] * all[i];
        }
        let mut prefix = T::one();
        let mut pieces = Vec::with_capacity(n);
        for i in 0..n {
            pieces.push(prefix * omitted[i] * suffix[i + 1]);
            prefix *= kept[i];
        }
        let max_edges = m_max as usize + children.iter().map(|c| 1 + c.max_edges).sum::<usize>();
        Ok(Self {
            depth: config.depth(),
            k0,
            m_max,
            abar,
            children,
            len,
            max_edges,
            included: inv_k0 * prefix,
            full: inv_k0 * suffix[0],
            tail_bound: inv_k0 * pairwise_sum(&pieces),
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn m_max(&self) -> u32 {
        self.m_max
    }

    pub fn abar(&self) -> T {
        self.abar
    }

    /// `sum |lambda_m| abar^{|E(T_m)|}` over the omitted terms.
    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    /// Splits a term index into `m_0` and the child term indices.
    fn decode(&self, mut i: usize) -> (u32, Vec<usize>) {
        let width = self.m_max as usize + 1;
        let m0 = (i % width) as u32;
        i /= width;
        let mut sub = Vec::with_capacity(self.children.len());
        for c in &self.children {
            sub.push(i % c.len);
            i /= c.len;
        }
        (m0, sub)
    }

    pub fn coefficient(&self, i: usize) -> T {
        let (m0, sub) = self.decode(i);
        let sign = if m0 % 2 == 0 { T::one() } else { -T::one() };
        let own = sign
            * (-ln_factorial::<T>(u64::from(self.k0)) - ln_factorial::<T>(u64::from(m0))).exp();
        self.children
            .iter()
            .zip(sub)
            .fold(own, |acc, (c, t)| acc * c.coefficient(t))
    }

    pub fn tree(&self, i: usize) -> RootedTree {
        let (m0, sub) = self.decode(i);
        if self.depth == 0 {
            return RootedTree::star((m0 + self.k0) as usize);
        }
        let mut kids = vec![RootedTree::leaf(); m0 as usize];
        kids.extend(self.children.iter().zip(sub).map(|(c, t)| c.tree(t)));
        RootedTree::join(kids)
    }

    pub fn edge_count(&self, i: usize) -> usize {
        let (m0, sub) = self.decode(i);
        if self.depth == 0 {
            return (m0 + self.k0) as usize;
        }
        m0 as usize
            + self
                .children
                .iter()
                .zip(sub)
                .map(|(c, t)| 1 + c.edge_count(t))
                .sum::<usize>()
    }

    /// `h -> t^x(T_i, W)` for every term, given the degree profile.
    fn profiles(&self, w: &StepKernel<T>, deg: &[T]) -> Vec<Vec<T>> {
        let lifted: Vec<Vec<Vec<T>>> = self
            .children
            .iter()
            .map(|c| c.profiles(w, deg).iter().map(|p| w.apply(p)).collect())
            .collect();
        (0..self.len)
            .map(|i| self.profile_of(i, deg, &lifted))
            .collect()
    }

    fn profile_of(&self, i: usize, deg: &[T], lifted: &[Vec<Vec<T>>]) -> Vec<T> {
        let (m0, sub) = self.decode(i);
        let power = if self.depth == 0 { m0 + self.k0 } else { m0 };
        let mut out: Vec<T> = deg.iter().map(|d| d.powi(power as i32)).collect();
        for (u, &t) in lifted.iter().zip(&sub) {
            for (o, v) in out.iter_mut().zip(&u[t]) {
                *o *= *v;
            }
        }
        out
    }
}

/// Truncated series value with a certified error bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    /// Mathematical truncation error bound.
    pub tail_bound: T,
    /// Allowance for floating-point rounding in this sum and in a direct
    /// evaluation of the same probability.
    pub rounding_bound: T,
    pub error_bound: T,
}

/// Builds the series of `config` for kernels bounded by `abar`.
pub fn tree_series<T: Scalar>(
    config: &OffspringConfig,
    abar: T,
    m_max: u32,
) -> Result<TreeSeries<T>> {
    TreeSeries::new(config, abar, m_max)
}

/// `sum_m lambda_m t^x(T_m, W)` at `root_block`, or integrated over `x`.
pub fn eval_series<T: Scalar>(
    series: &TreeSeries<T>,
    w: &StepKernel<T>,
    root_block: Option<usize>,
) -> Result<SeriesValue<T>> {
    let slack = T::one() + T::lit(1e-12);
    if w.bound() > series.abar * slack {
        return Err(invalid(format!(
            "kernel bound {} exceeds the series bound {}",
            w.bound(),
            series.abar
        )));
    }
    let m = w.num_blocks();
    let weights: Vec<T> = match root_block {
        Some(h) if h >= m => {
            return Err(invalid(format!(
                "root block {h} out of range for {m} blocks"
            )))
        }
        Some(h) => (0..m)
            .map(|j| if j == h { T::one() } else { T::zero() })
            .collect(),
        None => w.lengths().to_vec(),
    };
    let deg = w.degree_function();
    let lifted: Vec<Vec<Vec<T>>> = series
        .children
        .iter()
        .map(|c| c.profiles(w, &deg).iter().map(|p| w.apply(p)).collect())
        .collect();
    let terms: Vec<(T, T)> = (0..series.len)
        .into_par_iter()
        .map(|i| {
            let profile = series.profile_of(i, &deg, &lifted);
            let dens: Vec<T> = profile.iter().zip(&weights).map(|(&p, &q)| p * q).collect();
            let t = series.coefficient(i) * pairwise_sum(&dens);
            (t, t.abs())
        })
        .collect();
    let (vals, abs): (Vec<T>, Vec<T>) = terms.into_iter().unzip();
    let value = pairwise_sum(&vals);
    let abs_sum = pairwise_sum(&abs);
    let log_len = T::from_u32(usize::BITS - series.len.leading_zeros()).expect("small integer");
    let ops =
        T::from_usize_lossy(series.max_edges + 2 * (series.depth as usize + 1) + 16) + log_len;
    let rounding_bound = T::lit(4.0) * ops * T::epsilon() * (abs_sum + T::one());
    Ok(SeriesValue {
        value,
        tail_bound: series.tail_bound,
        rounding_bound,
        error_bound: series.tail_bound + rounding_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homdensity::config_prob;

    #[test]
    fn base_coefficients() {
        for k in 1..5u32 {
            let s = tree_series::<f64>(&OffspringConfig::root_count(k), 1.0, 5).unwrap();
            let kf: f64 = (1..=k).map(f64::from).product();
            assert!((s.coefficient(0) - 1.0 / kf).abs() < 1e-15);
            assert!((s.coefficient(1) + 1.0 / kf).abs() < 1e-15);
            assert_eq!(s.tree(3), RootedTree::star(3 + k as usize));
        }
    }

    #[test]
    fn base_tail_by_direct_summation() {
        let s = tree_series::<f64>(&OffspringConfig::root_count(2), 1.0, 20).unwrap();
        let mut direct = 0.0;
        let mut f = (1..=20).map(f64::from).product::<f64>();
        for m in 21..60 {
            f *= m as f64;
            direct += 1.0 / (2.0 * f);
        }
        assert!((s.tail_bound() - direct).abs() <= 1e-12 * direct);
        assert!(s.tail_bound() < 1e-19);
    }

    #[test]
    fn single_child_matches_closed_form() {
        let c = 1.0f64;
        let w = StepKernel::constant(c).unwrap();
        let s = tree_series(&OffspringConfig::root_count(1), c, 20).unwrap();
        let v = eval_series(&s, &w, None).unwrap();
        assert!((v.value - c * (-c).exp()).abs() <= v.error_bound);
        assert!((v.value - c * (-c).exp()).abs() < 1e-15);
    }

    #[test]
    fn composite_tail_telescopes() {
        let cfg = OffspringConfig::node(vec![
            OffspringConfig::root_count(1),
            OffspringConfig::root_count(0),
        ])
        .unwrap();
        let small = tree_series::<f64>(&cfg, 1.5, 4).unwrap();
        let big = tree_series::<f64>(&cfg, 1.5, 9).unwrap();
        // Terms of `big` not in `small` plus `big`'s own tail make up `small`'s tail.
        let mut extra = 0.0;
        for i in 0..big.len() {
            let (m0, sub) = big.decode(i);
            let inside = m0 <= 4
                && big
                    .children
                    .iter()
                    .zip(&sub)
                    .all(|(c, &t)| c.decode(t).0 <= 4);
            if !inside {
                extra += big.coefficient(i).abs() * 1.5f64.powi(big.edge_count(i) as i32);
            }
        }
        let rel = (small.tail_bound() - (extra + big.tail_bound())).abs() / small.tail_bound();
        assert!(rel < 1e-10, "{rel}");
    }

    #[test]
    fn composite_matches_recursion() {
        let w = StepKernel::<f64>::new(vec![0.0, 0.4, 1.0], vec![vec![1.0, 0.3], vec![0.3, 0.8]])
            .unwrap();
        let cfg = OffspringConfig::node(vec![
            OffspringConfig::root_count(2),
            OffspringConfig::root_count(0),
        ])
        .unwrap();
        let s = tree_series(&cfg, 1.0, 12).unwrap();
        for root in [None, Some(0), Some(1)] {
            let v = eval_series(&s, &w, root).unwrap();
            let exact = config_prob(&cfg, &w, root);
            assert!(
                (v.value - exact).abs() <= v.error_bound,
                "{root:?}: {} vs {exact}",
                v.value
            );
        }
    }

    #[test]
    fn caps() {
        let deep = OffspringConfig::node(vec![OffspringConfig::node(vec![OffspringConfig::node(
            vec![OffspringConfig::root_count(1)],
        )
        .unwrap()])
        .unwrap()])
        .unwrap();
        assert_eq!(deep.depth(), 3);
        assert!(tree_series::<f64>(&deep, 1.0, 2).is_ok());
        let deeper = OffspringConfig::node(vec![deep]).unwrap();
        assert!(matches!(
            tree_series::<f64>(&deeper, 1.0, 2),
            Err(crate::Error::Capability(_))
        ));
        let wide = OffspringConfig::root_count(7);
        assert!(matches!(
            tree_series::<f64>(&wide, 1.0, 2),
            Err(crate::Error::Capability(_))
        ));
        let cfg = OffspringConfig::node(vec![OffspringConfig::root_count(2); 6]).unwrap();
        assert!(matches!(
            tree_series::<f64>(&cfg, 1.0, 20),
            Err(crate::Error::Capability(_))
        ));
        let w = StepKernel::<f64>::constant(2.0).unwrap();
        let s = tree_series(&OffspringConfig::root_count(1), 1.0, 5).unwrap();
        assert!(eval_series(&s, &w, None).is_err());
    }
}
