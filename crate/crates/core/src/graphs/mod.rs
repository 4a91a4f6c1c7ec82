//! Graph type, random graph families and degree statistics.

mod degree;
mod generators;
mod radius;
mod sparsity;
mod spatial;
mod ubgw;

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub use degree::{DegreeDistribution, DEFAULT_SUPPORT_CAP};
pub use generators::{
    generate_configuration_model, generate_cycle, generate_empty, generate_erdos_renyi,
    generate_lattice_box, generate_path, generate_random_regular, generate_star, giant_component,
};
pub use radius::{sample_radius, RadiusLaw};
pub use sparsity::top_eps_degree_sum;
pub use spatial::{generate_spatial_torus_graph, spatial_torus_from_parts, spatial_torus_sample, SpatialTorus};
pub use ubgw::{generate_ubgw_ball, DEFAULT_VERTEX_CAP};

/// Simple undirected graph on vertices `0..n`, stored in CSR form with sorted
/// neighbour lists. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    m: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Self-loops are dropped and parallel
    /// edges collapsed.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                continue;
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self::from_adjacency(adj))
    }

    /// Like [`Graph::from_edges`] but rejects loops and duplicates instead of
    /// silently simplifying.
    pub fn from_simple_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Self::from_edges(n, edges.iter().copied())?;
        if g.m != edges.len() {
            return Err(Error::InvalidGraph(format!(
                "{} edges given but only {} distinct non-loop edges",
                edges.len(),
                g.m
            )));
        }
        Ok(g)
    }

    pub(crate) fn from_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adj.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(list);
            offsets.push(neighbors.len());
        }
        let m = neighbors.len() / 2;
        Graph { offsets, neighbors, m }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m as f64 / self.n() as f64
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u).iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Checks symmetry, simplicity, sortedness and the edge count.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let mut total = 0usize;
        for v in 0..n {
            let nb = self.neighbors(v);
            total += nb.len();
            for w in nb.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidGraph(format!("neighbours of {v} not strictly sorted")));
                }
            }
            for &u in nb {
                if u >= n {
                    return Err(Error::InvalidGraph(format!("neighbour {u} of {v} out of range")));
                }
                if u == v {
                    return Err(Error::InvalidGraph(format!("self-loop at {v}")));
                }
                if !self.has_edge(u, v) {
                    return Err(Error::InvalidGraph(format!("edge {v}->{u} not symmetric")));
                }
            }
        }
        if total != 2 * self.m {
            return Err(Error::InvalidGraph(format!("degree sum {total} != 2m = {}", 2 * self.m)));
        }
        Ok(())
    }

    /// Multi-source BFS distances; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected-component label per vertex, labels numbered by smallest member.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.component_labels().1 == 1
    }

    /// Graph obtained by renaming vertex `v` to `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![Vec::new(); self.n()];
        for (u, v) in self.edges() {
            adj[perm[u]].push(perm[v]);
            adj[perm[v]].push(perm[u]);
        }
        Graph::from_adjacency(adj)
    }

    /// Subgraph induced by `keep` (in the given order, relabelled `0..keep.len()`).
    pub fn induced(&self, keep: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| self.neighbors(v).iter().filter(|&&w| index[w] != usize::MAX).map(|&w| index[w]).collect())
            .collect();
        Graph::from_adjacency(adj)
    }

    /// Disjoint union, with `other`'s vertices shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n();
        let edges = self.edges().chain(other.edges().map(|(u, v)| (u + shift, v + shift)));
        Graph::from_edges(shift + other.n(), edges).expect("indices in range")
    }
}
