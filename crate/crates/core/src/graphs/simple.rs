use std::io::{self, Write};

use crate::error::{invalid, Result};

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adjacency: Vec<Vec<u32>>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            adjacency: vec![Vec::new(); n],
        }
    }

    /// Builds from an edge list; duplicate edges are merged, loops rejected.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(invalid(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { adjacency })
    }

    /// From per-row upper-triangle neighbor lists (`j > i`, ascending).
    pub(crate) fn from_upper_rows(rows: Vec<Vec<u32>>) -> Self {
        let n = rows.len();
        let mut deg = vec![0usize; n];
        for (i, row) in rows.iter().enumerate() {
            deg[i] += row.len();
            for &j in row {
                deg[j as usize] += 1;
            }
        }
        let mut adjacency: Vec<Vec<u32>> = deg.iter().map(|&d| Vec::with_capacity(d)).collect();
        // Lower neighbors arrive in increasing i, so lists stay sorted.
        for (i, row) in rows.iter().enumerate() {
            for &j in row {
                adjacency[j as usize].push(i as u32);
            }
        }
        for (i, row) in rows.into_iter().enumerate() {
            adjacency[i].extend(row);
        }
        Self { adjacency }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as u32;
            list.iter()
                .copied()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    /// Subgraph induced by `keep`, relabelled to `0..keep.len()` in the given order.
    pub fn induced(&self, keep: &[u32]) -> Self {
        let mut index = vec![u32::MAX; self.n()];
        for (new, &old) in keep.iter().enumerate() {
            index[old as usize] = new as u32;
        }
        let edges = keep.iter().flat_map(|&u| {
            let index = &index;
            self.adjacency[u as usize]
                .iter()
                .filter(move |&&v| index[v as usize] != u32::MAX && u < v)
                .map(move |&v| (index[u as usize], index[v as usize]))
        });
        Self::from_edges(keep.len(), edges.collect::<Vec<_>>()).expect("induced subgraph is simple")
    }

    /// Writes one `u v` line per edge, 0-based, ascending.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{u} {v}")?;
        }
        Ok(())
    }
}
