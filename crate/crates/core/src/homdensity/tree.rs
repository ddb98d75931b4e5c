//! Rooted trees and their vertex-prescribed homomorphism densities.

use std::fmt;

use crate::kernels::StepKernel;
use crate::scalar::{pairwise_sum, Scalar};

/// A finite rooted tree with ordered children.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RootedTree {
    children: Vec<RootedTree>,
}

impl RootedTree {
    pub fn leaf() -> Self {
        Self::default()
    }

    /// Root with `n` leaf children.
    pub fn star(n: usize) -> Self {
        Self {
            children: vec![Self::leaf(); n],
        }
    }

    /// New root whose children are the roots of `children`.
    pub fn join(children: Vec<RootedTree>) -> Self {
        Self { children }
    }

    /// Identifies the two roots.
    pub fn root_join(&self, other: &RootedTree) -> Self {
        let mut children = self.children.clone();
        children.extend(other.children.iter().cloned());
        Self { children }
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(|c| 1 + c.edge_count()).sum()
    }

    pub fn node_count(&self) -> usize {
        self.edge_count() + 1
    }

    pub fn height(&self) -> usize {
        self.children
            .iter()
            .map(|c| 1 + c.height())
            .max()
            .unwrap_or(0)
    }

    /// Same tree with every child list sorted by canonical form.
    pub fn canonical(&self) -> Self {
        let mut children: Vec<RootedTree> =
            self.children.iter().map(RootedTree::canonical).collect();
        children.sort_by_cached_key(|c| c.to_string());
        Self { children }
    }

    pub fn is_isomorphic(&self, other: &RootedTree) -> bool {
        self.canonical() == other.canonical()
    }
}

/// Nested parentheses, one pair per vertex: the single edge is `(())`.
impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for c in &self.children {
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// All rooted trees with at most `max_edges` edges, up to isomorphism,
/// ordered by size and each in canonical form.
pub fn enumerate_rooted_trees(max_edges: usize) -> Vec<RootedTree> {
    // by_nodes[n] holds the canonical trees with n nodes.
    let mut by_nodes: Vec<Vec<RootedTree>> = vec![Vec::new(), vec![RootedTree::leaf()]];
    for n in 2..=max_edges + 1 {
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        forests(&by_nodes, n - 1, (1, 0), &mut chosen, &mut out);
        let mut trees: Vec<RootedTree> = out
            .into_iter()
            .map(|c| RootedTree::join(c).canonical())
            .collect();
        trees.sort_by_cached_key(|t| t.to_string());
        trees.dedup();
        by_nodes.push(trees);
    }
    by_nodes.into_iter().flatten().collect()
}

/// Multisets of trees with `remaining` nodes in total, picked in
/// nondecreasing (size, index) order starting from `min`.
fn forests(
    by_nodes: &[Vec<RootedTree>],
    remaining: usize,
    min: (usize, usize),
    chosen: &mut Vec<RootedTree>,
    out: &mut Vec<Vec<RootedTree>>,
) {
    if remaining == 0 {
        out.push(chosen.clone());
        return;
    }
    for size in min.0..=remaining {
        let start = if size == min.0 { min.1 } else { 0 };
        for idx in start..by_nodes[size].len() {
            chosen.push(by_nodes[size][idx].clone());
            forests(by_nodes, remaining - size, (size, idx), chosen, out);
            chosen.pop();
        }
    }
}

/// `h -> t^x(T, W)` for `x` in block `h`.
pub fn tree_density_profile<T: Scalar>(t: &RootedTree, w: &StepKernel<T>) -> Vec<T> {
    let mut acc = vec![T::one(); w.num_blocks()];
    for c in &t.children {
        let below = w.apply(&tree_density_profile(c, w));
        for (a, b) in acc.iter_mut().zip(below) {
            *a *= b;
        }
    }
    acc
}

/// `t^x(T, W)` for `x` in `root_block`, or `t(T, W)` when no block is given.
pub fn tree_density<T: Scalar>(t: &RootedTree, w: &StepKernel<T>, root_block: Option<usize>) -> T {
    let profile = tree_density_profile(t, w);
    match root_block {
        Some(h) => profile[h],
        None => {
            let terms: Vec<T> = profile
                .iter()
                .zip(w.lengths())
                .map(|(&p, &l)| p * l)
                .collect();
            pairwise_sum(&terms)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_of_rooted_trees() {
        let trees = enumerate_rooted_trees(6);
        let mut by_edges = [0usize; 7];
        for t in &trees {
            by_edges[t.edge_count()] += 1;
        }
        assert_eq!(by_edges, [1, 1, 2, 4, 9, 20, 48]);
    }

    #[test]
    fn shape_helpers() {
        let path = RootedTree::join(vec![RootedTree::star(1)]);
        assert_eq!(path.to_string(), "((()))");
        assert_eq!(path.edge_count(), 2);
        assert_eq!(path.height(), 2);
        let t = RootedTree::join(vec![RootedTree::star(2), RootedTree::leaf()]);
        let u = RootedTree::join(vec![RootedTree::leaf(), RootedTree::star(2)]);
        assert_ne!(t, u);
        assert!(t.is_isomorphic(&u));
        assert_eq!(
            RootedTree::star(2).root_join(&RootedTree::star(1)),
            RootedTree::star(3)
        );
    }

    #[test]
    fn densities_of_small_trees() {
        let c = 1.7;
        let w = StepKernel::<f64>::constant(c).unwrap();
        assert!((tree_density(&RootedTree::star(1), &w, None) - c).abs() < 1e-15);
        assert!((tree_density(&RootedTree::star(2), &w, Some(0)) - c * c).abs() < 1e-15);
        let checker =
            StepKernel::<f64>::with_equal_blocks(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((tree_density(&RootedTree::star(1), &checker, None) - 0.5).abs() < 1e-15);
    }
}
