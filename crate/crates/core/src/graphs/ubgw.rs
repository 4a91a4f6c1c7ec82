use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::{DegreeDistribution, Graph};
use crate::error::{Error, Result};
use crate::local_convergence::RootedBall;

/// Default vertex cap for sampled balls.
pub const DEFAULT_VERTEX_CAP: usize = 1_000_000;

/// Depth-`depth` ball of the unimodular Galton–Watson tree with degree law
/// `mu`: the root has `mu`-many children, every later vertex has children
/// from the size-biased law `(k+1) mu(k+1) / mean(mu)`, and generation
/// `depth` is left childless.
///
/// Vertices are numbered in BFS order with the root at 0. Any observable that
/// stops when the infection first reaches distance `depth` only ever uses the
/// vertices at depth `< depth`, so this truncation loses nothing for it.
pub fn generate_ubgw_ball<R: Rng + ?Sized>(
    mu: &DegreeDistribution,
    depth: usize,
    rng: &mut R,
    vertex_cap: usize,
) -> Result<RootedBall> {
    let offspring = mu.size_biased();
    let mut parent: Vec<usize> = vec![usize::MAX];
    let mut layer: Vec<usize> = vec![0];
    let mut frontier = 0..1;
    for d in 0..depth {
        let start = parent.len();
        for v in frontier.clone() {
            let children = if v == 0 {
                mu.sample(rng)
            } else {
                offspring.as_ref().map_or(0, |o| o.sample(rng))
            };
            if parent.len() + children > vertex_cap {
                return Err(Error::BallTooLarge { cap: vertex_cap });
            }
            parent.extend(core::iter::repeat_n(v, children));
            layer.extend(core::iter::repeat_n(d + 1, children));
        }
        frontier = start..parent.len();
        if frontier.is_empty() {
            break;
        }
    }
    let n = parent.len();
    let graph = Graph::from_edges(n, (1..n).map(|v| (parent[v], v)))?;
    Ok(RootedBall::from_parts(graph, 0, depth, layer))
}
