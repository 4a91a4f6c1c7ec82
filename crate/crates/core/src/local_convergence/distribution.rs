use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use super::{canonical_key_with_cap, extract_ball, CanonicalKey, RootedBall, DEFAULT_KEY_CAP};
use crate::error::{Error, Result};
use crate::graphs::{generate_ubgw_ball, DegreeDistribution, Graph, DEFAULT_VERTEX_CAP};
use crate::rng::seeded;

/// Law of the depth-`k` ball around a root, as weights on canonical keys.
#[derive(Debug, Clone, PartialEq)]
pub struct BallDistribution {
    depth: usize,
    atoms: BTreeMap<CanonicalKey, f64>,
}

impl BallDistribution {
    /// Normalizes per-key counts. Weights are `count / total`, so the result
    /// does not depend on the order in which counts were accumulated.
    pub fn from_counts(depth: usize, counts: BTreeMap<CanonicalKey, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let atoms = counts.into_iter().map(|(k, c)| (k, c as f64 / total as f64)).collect();
        BallDistribution { depth, atoms }
    }

    /// Takes weights as given; they must be non-negative and sum to 1 within `1e-9`.
    pub fn from_weights(depth: usize, atoms: BTreeMap<CanonicalKey, f64>) -> Result<Self> {
        let total: f64 = atoms.values().sum();
        if atoms.values().any(|w| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(alloc::format!("ball weights sum to {total}")));
        }
        Ok(BallDistribution { depth, atoms })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn atoms(&self) -> &BTreeMap<CanonicalKey, f64> {
        &self.atoms
    }

    pub fn weight(&self, key: &CanonicalKey) -> f64 {
        self.atoms.get(key).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.atoms.values().sum()
    }
}

/// Key of the depth-`k` ball around `v`, or the oversize key past the cap.
pub fn ball_key(g: &Graph, v: usize, k: usize) -> CanonicalKey {
    canonical_key_with_cap(&extract_ball(g, v, k), DEFAULT_KEY_CAP).unwrap_or_else(|_| CanonicalKey::oversize())
}

/// Fraction of vertices whose depth-`k` ball has each key. Oversized balls
/// keep their mass under [`CanonicalKey::oversize`].
pub fn empirical_ball_distribution(g: &Graph, k: usize) -> BallDistribution {
    let mut counts = BTreeMap::new();
    for v in 0..g.n() {
        *counts.entry(ball_key(g, v, k)).or_insert(0u64) += 1;
    }
    BallDistribution::from_counts(k, counts)
}

/// Source of i.i.d. rooted balls from a limit object.
pub trait BallSampler {
    /// A rooted ball of depth at least `depth`.
    fn sample<R: Rng + ?Sized>(&self, depth: usize, rng: &mut R) -> Result<RootedBall>;
}

/// Unimodular Galton–Watson tree with a given degree law.
#[derive(Debug, Clone)]
pub struct UbgwSampler {
    pub mu: DegreeDistribution,
    pub vertex_cap: usize,
}

impl UbgwSampler {
    pub fn new(mu: DegreeDistribution) -> Self {
        UbgwSampler { mu, vertex_cap: DEFAULT_VERTEX_CAP }
    }

    /// The `d`-regular tree.
    pub fn regular_tree(d: usize) -> Self {
        Self::new(DegreeDistribution::point_mass(d))
    }
}

impl BallSampler for UbgwSampler {
    fn sample<R: Rng + ?Sized>(&self, depth: usize, rng: &mut R) -> Result<RootedBall> {
        generate_ubgw_ball(&self.mu, depth, rng, self.vertex_cap)
    }
}

/// Monte Carlo estimate of the limit's depth-`k` ball law from `n_samples`
/// draws.
pub fn limit_ball_distribution<S: BallSampler, R: Rng + ?Sized>(
    sampler: &S,
    k: usize,
    n_samples: usize,
    rng: &mut R,
) -> BallDistribution {
    let mut counts = BTreeMap::new();
    for _ in 0..n_samples {
        let key = match sampler.sample(k, rng) {
            Ok(ball) => canonical_key_with_cap(&ball.truncate(k), DEFAULT_KEY_CAP).unwrap_or_else(|_| CanonicalKey::oversize()),
            Err(_) => CanonicalKey::oversize(),
        };
        *counts.entry(key).or_insert(0u64) += 1;
    }
    BallDistribution::from_counts(k, counts)
}

/// Total variation distance `(1/2) sum_h |a(h) - b(h)|`.
pub fn tv_distance(a: &BallDistribution, b: &BallDistribution) -> Result<f64> {
    if a.depth != b.depth {
        return Err(Error::DepthMismatch { left: a.depth, right: b.depth });
    }
    let mut sum = 0.0;
    for (key, wa) in &a.atoms {
        sum += (wa - b.weight(key)).abs();
    }
    for (key, wb) in &b.atoms {
        if !a.atoms.contains_key(key) {
            sum += wb;
        }
    }
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub graph_index: usize,
    pub n: usize,
    pub k: usize,
    pub tv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Per depth `0..=k_max`: whether TV is non-increasing along the sequence.
    pub monotone: Vec<bool>,
}

/// TV distance between each graph's empirical depth-`k` ball law and a
/// sampled estimate of the limit's, for every `k <= k_max`.
pub fn convergence_report<S: BallSampler>(
    graphs: &[Graph],
    sampler: &S,
    k_max: usize,
    n_samples: usize,
    seed: u64,
) -> Result<ConvergenceReport> {
    if graphs.is_empty() {
        return Err(Error::InvalidArgument("empty graph sequence".into()));
    }
    let mut rows = Vec::new();
    let mut monotone = Vec::new();
    for k in 0..=k_max {
        let limit = limit_ball_distribution(sampler, k, n_samples, &mut seeded(seed ^ k as u64));
        let mut prev = f64::INFINITY;
        let mut mono = true;
        for (i, g) in graphs.iter().enumerate() {
            let tv = tv_distance(&empirical_ball_distribution(g, k), &limit)?;
            mono &= tv <= prev;
            prev = tv;
            rows.push(ConvergenceRow { graph_index: i, n: g.n(), k, tv });
        }
        monotone.push(mono);
    }
    Ok(ConvergenceReport { rows, monotone })
}
