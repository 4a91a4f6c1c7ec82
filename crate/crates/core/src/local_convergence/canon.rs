//! Canonical keys for rooted graphs.
//!
//! Pendant trees are stripped first and folded into vertex labels as nested
//! parenthesis codes, so tree-shaped balls reduce to a labelled root. What is
//! left (the root plus everything on a cycle or on a path between cycles) is
//! canonicalized by colour refinement and individualization, trying every
//! vertex of the first non-singleton cell and keeping the lexicographically
//! smallest encoding. Twin vertices are interchangeable, so only one vertex
//! per twin class is tried.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::RootedBall;
use crate::error::{Error, Result};

/// Default vertex cap for canonicalization.
pub const DEFAULT_KEY_CAP: usize = 10_000;

const TAG_BALL: u8 = 0x01;
const TAG_OVERSIZE: u8 = 0xFF;

/// Byte string identifying a rooted-isomorphism class.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    /// Reserved key for balls that exceed the canonicalization cap. Sorts
    /// after every ordinary key.
    pub fn oversize() -> Self {
        CanonicalKey(vec![TAG_OVERSIZE])
    }

    pub fn is_oversize(&self) -> bool {
        self.0 == [TAG_OVERSIZE]
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        CanonicalKey(bytes)
    }
}

pub fn canonical_key(ball: &RootedBall) -> CanonicalKey {
    canonical_key_with_cap(ball, DEFAULT_KEY_CAP).unwrap_or_else(|_| CanonicalKey::oversize())
}

/// Canonical key, or [`Error::BallTooLarge`] when the ball has more than
/// `cap` vertices.
pub fn canonical_key_with_cap(ball: &RootedBall, cap: usize) -> Result<CanonicalKey> {
    let g = ball.graph();
    if g.n() > cap {
        return Err(Error::BallTooLarge { cap });
    }
    let core = strip_pendant_trees(ball);
    Ok(CanonicalKey(core.canonical_encoding()))
}

/// Root plus non-pendant vertices, each carrying the code of its hanging forest.
struct Core {
    is_root: Vec<bool>,
    labels: Vec<Vec<u8>>,
    adj: Vec<Vec<usize>>,
}

fn strip_pendant_trees(ball: &RootedBall) -> Core {
    let g = ball.graph();
    let n = g.n();
    let root = ball.root();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut hanging: Vec<Vec<Vec<u8>>> = vec![Vec::new(); n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| v != root && degree[v] == 1).collect();
    while let Some(v) = queue.pop_front() {
        removed[v] = true;
        let mut code = vec![b'('];
        let mut children = core::mem::take(&mut hanging[v]);
        children.sort_unstable();
        for c in &children {
            code.extend_from_slice(c);
        }
        code.push(b')');
        let parent = g.neighbors(v).iter().copied().find(|&w| !removed[w]).expect("pendant vertex has a neighbour");
        hanging[parent].push(code);
        degree[parent] -= 1;
        if parent != root && degree[parent] == 1 {
            queue.push_back(parent);
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
    let mut index = vec![usize::MAX; n];
    for (i, &v) in keep.iter().enumerate() {
        index[v] = i;
    }
    let labels = keep
        .iter()
        .map(|&v| {
            let mut children = core::mem::take(&mut hanging[v]);
            children.sort_unstable();
            children.concat()
        })
        .collect();
    let adj = keep
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&w| !removed[w]).map(|&w| index[w]).collect())
        .collect();
    Core { is_root: keep.iter().map(|&v| v == root).collect(), labels, adj }
}

impl Core {
    fn len(&self) -> usize {
        self.adj.len()
    }

    fn canonical_encoding(&self) -> Vec<u8> {
        let initial = self.initial_colors();
        let colors = self.refine(initial);
        let mut best: Option<Vec<u8>> = None;
        self.search(colors, &mut best);
        best.expect("search visits at least one leaf")
    }

    /// Ranks of `(root flag, label, degree)`.
    fn initial_colors(&self) -> Vec<usize> {
        let keys: Vec<(bool, &[u8], usize)> =
            (0..self.len()).map(|v| (!self.is_root[v], self.labels[v].as_slice(), self.adj[v].len())).collect();
        rank_by(&keys)
    }

    /// Colour refinement to the coarsest equitable partition refining
    /// `colors`. New colours are ranks of (old colour, sorted neighbour
    /// colours), so the cell order is canonical.
    fn refine(&self, mut colors: Vec<usize>) -> Vec<usize> {
        let mut classes = count_classes(&colors);
        loop {
            let sigs: Vec<(usize, Vec<usize>)> = (0..self.len())
                .map(|v| {
                    let mut nb: Vec<usize> = self.adj[v].iter().map(|&w| colors[w]).collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = rank_by(&sigs);
            let next_classes = count_classes(&next);
            colors = next;
            if next_classes == classes {
                return colors;
            }
            classes = next_classes;
        }
    }

    fn search(&self, colors: Vec<usize>, best: &mut Option<Vec<u8>>) {
        let n = self.len();
        let mut cell_size = vec![0usize; n];
        for &c in &colors {
            cell_size[c] += 1;
        }
        let Some(target) = (0..n).find(|&c| cell_size[c] > 1) else {
            let enc = self.encode(&colors);
            if best.as_ref().is_none_or(|b| enc < *b) {
                *best = Some(enc);
            }
            return;
        };
        let mut seen_open: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut seen_closed: BTreeSet<Vec<usize>> = BTreeSet::new();
        for v in (0..n).filter(|&v| colors[v] == target) {
            let open = self.adj[v].clone();
            let mut closed = open.clone();
            let pos = closed.partition_point(|&w| w < v);
            closed.insert(pos, v);
            if seen_open.contains(&open) || seen_closed.contains(&closed) {
                continue;
            }
            seen_open.insert(open);
            seen_closed.insert(closed);
            // v goes first in its cell; everything else keeps its relative order
            let split: Vec<(usize, bool)> = (0..n).map(|w| (colors[w], w != v)).collect();
            self.search(self.refine(rank_by(&split)), best);
        }
    }

    /// Serialization under the discrete colouring `pos`.
    fn encode(&self, pos: &[usize]) -> Vec<u8> {
        let n = self.len();
        let mut order = vec![0; n];
        for v in 0..n {
            order[pos[v]] = v;
        }
        let mut out = vec![TAG_BALL];
        out.extend_from_slice(&(n as u32).to_le_bytes());
        for &v in &order {
            out.push(self.is_root[v] as u8);
            out.extend_from_slice(&(self.labels[v].len() as u32).to_le_bytes());
            out.extend_from_slice(&self.labels[v]);
        }
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for v in 0..n {
            for &w in &self.adj[v] {
                if pos[v] < pos[w] {
                    edges.push((pos[v] as u32, pos[w] as u32));
                }
            }
        }
        edges.sort_unstable();
        for (a, b) in edges {
            out.extend_from_slice(&a.to_be_bytes());
            out.extend_from_slice(&b.to_be_bytes());
        }
        out
    }
}

/// Dense ranks of `keys` (equal keys share a rank).
fn rank_by<K: Ord>(keys: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut rank = vec![0; keys.len()];
    let mut r = 0;
    for i in 0..idx.len() {
        if i > 0 && keys[idx[i]] != keys[idx[i - 1]] {
            r += 1;
        }
        rank[idx[i]] = r;
    }
    rank
}

fn count_classes(colors: &[usize]) -> usize {
    colors.iter().copied().max().map_or(0, |m| m + 1)
}
