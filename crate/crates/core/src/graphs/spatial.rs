use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::{sample_radius, Graph, RadiusLaw};
use crate::error::{Error, Result};
use crate::rng::{open_closed01, seeded};

/// Augmented torus Gilbert graph together with the geometry it came from.
#[derive(Debug, Clone)]
pub struct SpatialTorus {
    pub graph: Graph,
    /// Sorted positions on `(-n/2, n/2]`; vertex `i` sits at `positions[i]`.
    pub positions: Vec<f64>,
    pub radii: Vec<f64>,
}

impl SpatialTorus {
    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }
}

/// Torus metric on a circle of circumference `len`.
#[inline]
pub fn torus_distance(x: f64, y: f64, len: f64) -> f64 {
    let d = (x - y).abs();
    d.min(len - d)
}

#[inline]
fn wrap(d: f64, len: f64) -> f64 {
    if d < 0.0 {
        d + len
    } else {
        d
    }
}

/// Samples `n` sorted uniform points on `(-n/2, n/2]` and i.i.d. radii.
pub fn spatial_torus_sample(n: usize, law: &RadiusLaw, seed: u64) -> Result<SpatialTorus> {
    if n < 4 || n % 2 == 1 {
        return Err(Error::Infeasible(format!("torus graph needs even n >= 4, got {n}")));
    }
    let mut rng = seeded(seed);
    let half = n as f64 / 2.0;
    let mut positions: Vec<f64> = (0..n).map(|_| half - n as f64 * rng.gen::<f64>()).collect();
    positions.sort_by(f64::total_cmp);
    let radii: Vec<f64> = (0..n).map(|_| sample_radius(law, open_closed01(&mut rng))).collect();
    spatial_torus_from_parts(positions, radii)
}

/// [`spatial_torus_sample`], graph only.
pub fn generate_spatial_torus_graph(n: usize, law: &RadiusLaw, seed: u64) -> Result<Graph> {
    spatial_torus_sample(n, law, seed).map(|s| s.graph)
}

/// Builds the graph from given sorted positions on `(-n/2, n/2]` and radii:
/// `i ~ j` iff `d_n(x_i, x_j) < r_i + r_j`, plus the ring `i ~ i+1` and
/// `0 ~ n-1`.
///
/// Each edge is discovered from its endpoint with the larger radius, which
/// only has to look within twice its own radius, so the expected work is
/// proportional to the sum of radii rather than `n^2`.
pub fn spatial_torus_from_parts(positions: Vec<f64>, radii: Vec<f64>) -> Result<SpatialTorus> {
    let n = positions.len();
    if radii.len() != n || n < 3 {
        return Err(Error::InvalidArgument(format!("{} positions, {} radii", n, radii.len())));
    }
    if positions.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("positions must be sorted".into()));
    }
    let len = n as f64;
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    for i in 0..n {
        let reach = 2.0 * radii[i];
        if reach <= 0.0 {
            continue;
        }
        let mut consider = |j: usize| {
            let d = torus_distance(positions[i], positions[j], len);
            if d < radii[i] + radii[j] && (radii[j] < radii[i] || (radii[j] == radii[i] && j > i)) {
                edges.push((i, j));
            }
        };
        // forward arc
        let mut steps = 0;
        let mut j = (i + 1) % n;
        while steps < n - 1 {
            let gap = wrap(positions[j] - positions[i], len);
            if gap >= reach {
                break;
            }
            consider(j);
            j = (j + 1) % n;
            steps += 1;
        }
        let forward = steps;
        // backward arc, skipping what the forward arc already covered
        let mut j = (i + n - 1) % n;
        let mut steps = 0;
        while steps + forward < n - 1 {
            let gap = wrap(positions[i] - positions[j], len);
            if gap >= reach {
                break;
            }
            consider(j);
            j = (j + n - 1) % n;
            steps += 1;
        }
    }
    let graph = Graph::from_edges(n, edges)?;
    Ok(SpatialTorus { graph, positions, radii })
}
