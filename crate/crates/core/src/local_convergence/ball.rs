use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::graphs::Graph;
use crate::math;

use super::canonical_key;

/// Depth-`k` neighbourhood of a root: the subgraph induced by all vertices
/// within graph distance `k`, with BFS layer labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBall {
    graph: Graph,
    root: usize,
    depth: usize,
    layer: Vec<usize>,
}

impl RootedBall {
    pub(crate) fn from_parts(graph: Graph, root: usize, depth: usize, layer: Vec<usize>) -> Self {
        RootedBall { graph, root, depth, layer }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn layers(&self) -> &[usize] {
        &self.layer
    }

    /// Sub-ball of smaller depth around the same root.
    pub fn truncate(&self, k: usize) -> RootedBall {
        if k >= self.depth {
            return self.clone();
        }
        extract_ball(&self.graph, self.root, k)
    }

    /// Same ball with vertex `v` renamed `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> RootedBall {
        let mut layer = vec![0; self.layer.len()];
        for (v, &l) in self.layer.iter().enumerate() {
            layer[perm[v]] = l;
        }
        RootedBall { graph: self.graph.permuted(perm), root: perm[self.root], depth: self.depth, layer }
    }
}

/// BFS ball of radius `k` around `v`, keeping every edge between retained
/// vertices. The root becomes vertex 0 and vertices are numbered in BFS
/// order.
pub fn extract_ball(g: &Graph, v: usize, k: usize) -> RootedBall {
    let mut order = vec![v];
    let mut layer = vec![0];
    let mut index = alloc::collections::BTreeMap::new();
    index.insert(v, 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if layer[i] == k {
            continue;
        }
        let u = order[i];
        for &w in g.neighbors(u) {
            if let alloc::collections::btree_map::Entry::Vacant(e) = index.entry(w) {
                e.insert(order.len());
                queue.push_back(order.len());
                layer.push(layer[i] + 1);
                order.push(w);
            }
        }
    }
    let adj = order
        .iter()
        .map(|&u| g.neighbors(u).iter().filter_map(|w| index.get(w).copied()).collect())
        .collect();
    RootedBall { graph: Graph::from_adjacency(adj), root: 0, depth: k, layer }
}

/// Local distance `2^{-K}` where `K` is the largest depth (up to the common
/// depth of the two balls) at which the truncated balls are rooted-isomorphic.
///
/// Depth-0 balls are single roots and always agree, so the result is at most 1.
pub fn local_distance(a: &RootedBall, b: &RootedBall) -> f64 {
    let depth = a.depth.min(b.depth);
    let mut agree = 0;
    for k in 1..=depth {
        if canonical_key(&a.truncate(k)) == canonical_key(&b.truncate(k)) {
            agree = k;
        } else {
            break;
        }
    }
    math::powf(2.0, -(agree as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_cycle, generate_path, generate_star};

    #[test]
    fn depth_zero_is_single_root() {
        let g = generate_cycle(5).unwrap();
        let b = extract_ball(&g, 3, 0);
        assert_eq!(b.graph().n(), 1);
        assert_eq!(b.layers(), &[0]);
    }

    #[test]
    fn cycle_ball_is_centered_path() {
        let g = generate_cycle(10).unwrap();
        for v in 0..10 {
            let b = extract_ball(&g, v, 2);
            assert_eq!(b.graph().n(), 5);
            assert_eq!(b.graph().m(), 4);
            assert_eq!(canonical_key(&b), canonical_key(&extract_ball(&generate_path(5), 2, 2)));
        }
    }

    #[test]
    fn star_center_ball_is_whole_star() {
        let s = generate_star(6);
        let b = extract_ball(&s, 0, 1);
        assert_eq!((b.graph().n(), b.graph().m()), (7, 6));
    }

    #[test]
    fn keeps_edges_within_last_layer() {
        // triangle: depth-1 ball from any vertex keeps the edge between the two neighbours
        let g = generate_cycle(3).unwrap();
        let b = extract_ball(&g, 0, 1);
        assert_eq!(b.graph().m(), 3);
        assert_eq!(b.layers(), &[0, 1, 1]);
    }
}
