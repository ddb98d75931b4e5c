//! Count of vertices lying on short cycles.

use std::collections::VecDeque;

use super::SimpleGraph;
use crate::error::{invalid, Result};

pub const MAX_CYCLE_LEN: usize = 12;

/// Number of vertices on at least one cycle of length `<= max_len`.
///
/// From each vertex `v` a breadth-first search to depth `max_len / 2` labels
/// every reached vertex with the neighbor of `v` it descends from. A non-tree
/// edge `(x, y)` joining two different labels closes a cycle through `v` of
/// length `d(x) + d(y) + 1`, and the shortest cycle through `v` is found this way.
pub fn vertices_on_short_cycles(g: &SimpleGraph, max_len: usize) -> Result<usize> {
    if !(3..=MAX_CYCLE_LEN).contains(&max_len) {
        return Err(invalid(format!(
            "max cycle length must be in 3..={MAX_CYCLE_LEN}, got {max_len}"
        )));
    }
    let n = g.n();
    let radius = max_len / 2;
    let mut dist = vec![usize::MAX; n];
    let mut branch = vec![u32::MAX; n];
    let mut visited: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    let mut count = 0;
    for v in 0..n {
        for &x in &visited {
            dist[x] = usize::MAX;
        }
        visited.clear();
        queue.clear();
        dist[v] = 0;
        visited.push(v);
        for &a in g.neighbors(v) {
            let a = a as usize;
            dist[a] = 1;
            branch[a] = a as u32;
            visited.push(a);
            queue.push_back(a);
        }
        let mut found = false;
        'bfs: while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                let y = y as usize;
                if y == v {
                    continue;
                }
                if dist[y] == usize::MAX {
                    if dist[x] < radius {
                        dist[y] = dist[x] + 1;
                        branch[y] = branch[x];
                        visited.push(y);
                        queue.push_back(y);
                    }
                } else if branch[y] != branch[x] && dist[x] + dist[y] < max_len {
                    found = true;
                    break 'bfs;
                }
            }
        }
        if found {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> SimpleGraph {
        SimpleGraph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn triangle_and_five_cycle() {
        assert_eq!(vertices_on_short_cycles(&cycle(3), 3).unwrap(), 3);
        assert_eq!(vertices_on_short_cycles(&cycle(5), 4).unwrap(), 0);
        assert_eq!(vertices_on_short_cycles(&cycle(5), 5).unwrap(), 5);
        assert_eq!(vertices_on_short_cycles(&cycle(6), 5).unwrap(), 0);
        assert_eq!(vertices_on_short_cycles(&cycle(6), 6).unwrap(), 6);
    }

    #[test]
    fn trees_have_none() {
        let star = SimpleGraph::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        let path = SimpleGraph::from_edges(8, (0..7).map(|i| (i, i + 1))).unwrap();
        for l in 3..=12 {
            assert_eq!(vertices_on_short_cycles(&star, l).unwrap(), 0);
            assert_eq!(vertices_on_short_cycles(&path, l).unwrap(), 0);
        }
    }

    #[test]
    fn square_with_tail_counts_only_cycle_vertices() {
        let g =
            SimpleGraph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5)]).unwrap();
        assert_eq!(vertices_on_short_cycles(&g, 3).unwrap(), 0);
        assert_eq!(vertices_on_short_cycles(&g, 4).unwrap(), 4);
    }

    #[test]
    fn rejects_out_of_range_lengths() {
        assert!(vertices_on_short_cycles(&cycle(3), 2).is_err());
        assert!(vertices_on_short_cycles(&cycle(3), 13).is_err());
    }
}
