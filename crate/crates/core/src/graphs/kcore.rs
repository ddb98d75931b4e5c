//! Core decomposition by bucket-queue peeling.

use super::SimpleGraph;
use crate::error::{invalid, Result};

/// Members of the k-core, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KCore {
    pub members: Vec<u32>,
}

impl KCore {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Core number of every vertex (Batagelj-Zaversnik, linear time).
///
/// Vertices sit in an array sorted by current degree with one bucket per
/// degree; removing a vertex decrements its neighbors by swapping each to the
/// front of its bucket and moving the bucket boundary.
pub fn core_numbers(g: &SimpleGraph) -> Vec<u32> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let max_deg = *deg.iter().max().expect("nonempty");
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg.into_iter().map(|d| d as u32).collect()
}

/// Largest induced subgraph with minimum degree at least `k`; empty when none exists.
pub fn k_core(g: &SimpleGraph, k: u32) -> Result<KCore> {
    if k < 2 {
        return Err(invalid(format!("k-core needs k >= 2, got {k}")));
    }
    let members = core_numbers(g)
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c >= k)
        .map(|(v, _)| v as u32)
        .collect();
    Ok(KCore { members })
}
