use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::graphs::Graph;
use crate::rng::exp1;

/// Runtime guard for a single trial. Hitting either limit censors the run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub horizon: f64,
    pub max_events: u64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { horizon: f64::INFINITY, max_events: u64::MAX }
    }

    pub fn horizon(horizon: f64) -> Self {
        Budget { horizon, max_events: u64::MAX }
    }

    pub fn events(max_events: u64) -> Self {
        Budget { horizon: f64::INFINITY, max_events }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extinction {
    /// Infected set became empty at this time.
    At(f64),
    /// Still alive when the budget ran out at this time.
    Censored(f64),
}

impl Extinction {
    pub fn time(&self) -> f64 {
        match *self {
            Extinction::At(t) | Extinction::Censored(t) => t,
        }
    }

    pub fn is_censored(&self) -> bool {
        matches!(self, Extinction::Censored(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstPassage {
    Hit(f64),
    /// Died out before reaching the radius.
    Never,
    Censored,
}

impl FirstPassage {
    pub fn is_hit(&self) -> bool {
        matches!(self, FirstPassage::Hit(_))
    }

    pub fn hit_before(&self, t: f64) -> bool {
        matches!(*self, FirstPassage::Hit(s) if s < t)
    }
}

/// What [`run_direct`] records besides the extinction time.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub budget: Budget,
    /// Radii `R` whose first-passage times `tau_R` are tracked (distances
    /// measured from the initial set).
    pub radii: Vec<usize>,
    /// Times at which to record the infected density; sorted on use.
    pub sample_times: Vec<f64>,
    /// Threshold `eps` for the low-density occupation fraction.
    pub eps_density: Option<f64>,
    /// Stop as soon as the infection reaches this distance.
    pub stop_at_radius: Option<usize>,
}

impl RunOptions {
    pub fn new(budget: Budget) -> Self {
        RunOptions { budget, radii: Vec::new(), sample_times: Vec::new(), eps_density: None, stop_at_radius: None }
    }
}

/// Geometric time grid `t0 * gamma^j` below `until`, preceded by 0.
pub fn geometric_grid(t0: f64, gamma: f64, until: f64) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut t = t0;
    while t <= until {
        out.push(t);
        t *= gamma;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub initial_size: usize,
    pub extinction: Extinction,
    /// `(R, tau_R)` in the order of [`RunOptions::radii`].
    pub first_passage: Vec<(usize, FirstPassage)>,
    /// `(t, |xi_t| / n)`, for every requested time the run got to.
    pub density_samples: Vec<(f64, f64)>,
    /// Fraction of `[0, T]` spent with at most `eps n` infected vertices,
    /// `T` being the horizon (or the stopping time if the horizon is
    /// infinite or the event budget ran out first).
    pub low_density_time: Option<f64>,
    pub events: u64,
}

/// Sum tree over vertex weights for degree-proportional sampling.
struct WeightTree {
    size: usize,
    tree: Vec<u64>,
}

impl WeightTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two().max(1);
        WeightTree { size, tree: vec![0; 2 * size] }
    }

    fn total(&self) -> u64 {
        self.tree[1]
    }

    fn set(&mut self, i: usize, w: u64) {
        let mut p = i + self.size;
        self.tree[p] = w;
        while p > 1 {
            p /= 2;
            self.tree[p] = self.tree[2 * p] + self.tree[2 * p + 1];
        }
    }

    /// Leaf `i` with `prefix(i) <= target < prefix(i + 1)`.
    fn find(&self, mut target: u64) -> usize {
        let mut p = 1;
        while p < self.size {
            if target < self.tree[2 * p] {
                p *= 2;
            } else {
                target -= self.tree[2 * p];
                p = 2 * p + 1;
            }
        }
        p - self.size
    }
}

struct State<'g> {
    g: &'g Graph,
    infected: Vec<bool>,
    list: Vec<usize>,
    pos: Vec<usize>,
    weights: WeightTree,
}

impl<'g> State<'g> {
    fn new(g: &'g Graph, initial: &[usize]) -> Self {
        let n = g.n();
        let mut s = State { g, infected: vec![false; n], list: Vec::new(), pos: vec![usize::MAX; n], weights: WeightTree::new(n) };
        for &a in initial {
            s.infect(a);
        }
        s
    }

    fn infect(&mut self, v: usize) -> bool {
        if self.infected[v] {
            return false;
        }
        self.infected[v] = true;
        self.pos[v] = self.list.len();
        self.list.push(v);
        self.weights.set(v, self.g.degree(v) as u64);
        true
    }

    fn recover_at(&mut self, idx: usize) {
        let v = self.list.swap_remove(idx);
        if idx < self.list.len() {
            self.pos[self.list[idx]] = idx;
        }
        self.infected[v] = false;
        self.weights.set(v, 0);
    }
}

/// Exact continuous-time simulation of the contact process from `initial`.
///
/// The total rate is `|xi| + lambda * sum_{v in xi} deg(v)`. A recovery hits
/// a uniform infected vertex; an infection picks an infected vertex with
/// probability proportional to its degree and a uniform neighbour of it,
/// and does nothing if that neighbour is already infected.
pub fn run_direct<R: Rng + ?Sized>(g: &Graph, lambda: f64, initial: &[usize], opts: &RunOptions, rng: &mut R) -> Trajectory {
    let n = g.n();
    let mut st = State::new(g, initial);
    let initial_size = st.list.len();

    let track_distance = !opts.radii.is_empty() || opts.stop_at_radius.is_some();
    let dist = if track_distance { g.bfs_distances(initial) } else { Vec::new() };
    let mut reached = 0usize;
    let mut radii: Vec<(usize, FirstPassage)> = opts.radii.iter().map(|&r| (r, FirstPassage::Censored)).collect();
    let mark_hits = |radii: &mut Vec<(usize, FirstPassage)>, reached: usize, t: f64| {
        for (r, fp) in radii.iter_mut() {
            if *r <= reached && !fp.is_hit() {
                *fp = FirstPassage::Hit(t);
            }
        }
    };
    if initial_size > 0 {
        mark_hits(&mut radii, 0, 0.0);
    }

    let mut samples = opts.sample_times.clone();
    samples.sort_by(f64::total_cmp);
    let mut next_sample = 0;
    let mut density_samples = Vec::new();

    let eps_count = opts.eps_density.map(|e| e * n as f64);
    let mut low_time = 0.0;

    let budget = opts.budget;
    let mut t = 0.0;
    let mut events = 0u64;
    let extinction = loop {
        let k = st.list.len();
        if k == 0 {
            break Extinction::At(t);
        }
        if let Some(stop) = opts.stop_at_radius {
            if reached >= stop {
                break Extinction::Censored(t);
            }
        }
        if events >= budget.max_events {
            break Extinction::Censored(t);
        }
        let pressure = st.weights.total();
        let rate = k as f64 + lambda * pressure as f64;
        let t_next = t + exp1(rng) / rate;
        let stop_at = t_next.min(budget.horizon);
        while next_sample < samples.len() && samples[next_sample] < stop_at {
            density_samples.push((samples[next_sample], k as f64 / n as f64));
            next_sample += 1;
        }
        if eps_count.is_some_and(|e| k as f64 <= e) {
            low_time += stop_at - t;
        }
        if t_next > budget.horizon {
            t = budget.horizon;
            if next_sample < samples.len() && samples[next_sample] <= t {
                density_samples.push((samples[next_sample], k as f64 / n as f64));
                next_sample += 1;
            }
            break Extinction::Censored(t);
        }
        t = t_next;
        events += 1;
        if rng.gen::<f64>() * rate < k as f64 {
            let idx = rng.gen_range(0..k);
            st.recover_at(idx);
        } else {
            let src = st.weights.find(rng.gen_range(0..pressure));
            let nb = g.neighbors(src);
            let target = nb[rng.gen_range(0..nb.len())];
            if st.infect(target) && track_distance && dist[target] > reached {
                reached = dist[target];
                mark_hits(&mut radii, reached, t);
            }
        }
    };

    let end = extinction.time();
    if let Extinction::At(_) = extinction {
        // the empty state persists up to the horizon
        while next_sample < samples.len() && samples[next_sample] <= budget.horizon {
            density_samples.push((samples[next_sample], 0.0));
            next_sample += 1;
        }
        for (_, fp) in radii.iter_mut() {
            if !fp.is_hit() {
                *fp = FirstPassage::Never;
            }
        }
    }
    let low_density_time = eps_count.and_then(|_| {
        let span = match extinction {
            Extinction::At(_) if budget.horizon.is_finite() => {
                low_time += budget.horizon - end;
                budget.horizon
            }
            _ => end,
        };
        (span > 0.0).then(|| low_time / span)
    });

    Trajectory { n, initial_size, extinction, first_passage: radii, density_samples, low_density_time, events }
}

/// First time the infection started at `v` reaches graph distance `radius`.
/// `Never` when it dies out first; `Censored` if the budget runs out.
pub fn first_passage_radius<R: Rng + ?Sized>(
    g: &Graph,
    lambda: f64,
    v: usize,
    radius: usize,
    budget: Budget,
    rng: &mut R,
) -> FirstPassage {
    if radius == 0 {
        return FirstPassage::Hit(0.0);
    }
    let opts = RunOptions { budget, radii: vec![radius], sample_times: Vec::new(), eps_density: None, stop_at_radius: Some(radius) };
    run_direct(g, lambda, &[v], &opts, rng).first_passage[0].1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_empty, generate_path, generate_star};
    use crate::rng::seeded;

    #[test]
    fn weight_tree_sampling() {
        let mut t = WeightTree::new(5);
        t.set(1, 3);
        t.set(4, 2);
        assert_eq!(t.total(), 5);
        let picks: Vec<usize> = (0..5).map(|x| t.find(x)).collect();
        assert_eq!(picks, vec![1, 1, 1, 4, 4]);
        t.set(1, 0);
        assert_eq!(t.find(0), 4);
    }

    #[test]
    fn zero_rate_never_spreads() {
        let g = generate_path(30);
        let mut rng = seeded(3);
        for _ in 0..200 {
            let mut opts = RunOptions::new(Budget::unlimited());
            opts.radii = vec![0, 1];
            let tr = run_direct(&g, 0.0, &[10, 11], &opts, &mut rng);
            assert_eq!(tr.events, 2);
            assert_eq!(tr.first_passage, vec![(0, FirstPassage::Hit(0.0)), (1, FirstPassage::Never)]);
        }
    }

    #[test]
    fn density_samples_and_occupation() {
        let g = generate_empty(4);
        let mut opts = RunOptions::new(Budget::horizon(100.0));
        opts.sample_times = vec![0.0, 1e-9, 50.0];
        opts.eps_density = Some(0.5);
        let tr = run_direct(&g, 1.0, &[0, 1, 2, 3], &opts, &mut seeded(1));
        assert_eq!(tr.density_samples[0], (0.0, 1.0));
        assert_eq!(tr.density_samples.len(), 3);
        assert_eq!(tr.density_samples[2].1, 0.0);
        let r = tr.low_density_time.unwrap();
        assert!(r > 0.5 && r <= 1.0);
    }

    #[test]
    fn censoring_by_events_and_horizon() {
        let g = generate_star(200);
        let all: Vec<usize> = (0..201).collect();
        let mut opts = RunOptions::new(Budget::events(1000));
        let tr = run_direct(&g, 2.0, &all, &opts, &mut seeded(2));
        assert!(tr.extinction.is_censored());
        assert_eq!(tr.events, 1000);
        opts.budget = Budget::horizon(0.5);
        let tr = run_direct(&g, 2.0, &all, &opts, &mut seeded(2));
        assert_eq!(tr.extinction, Extinction::Censored(0.5));
    }

    #[test]
    fn first_passage_edge_cases() {
        let g = generate_path(5);
        let mut rng = seeded(0);
        assert_eq!(first_passage_radius(&g, 1.0, 0, 0, Budget::unlimited(), &mut rng), FirstPassage::Hit(0.0));
        assert_eq!(first_passage_radius(&g, 0.0, 0, 1, Budget::unlimited(), &mut rng), FirstPassage::Never);
        // distance 10 does not exist in a path of 5
        assert_eq!(first_passage_radius(&g, 0.5, 0, 10, Budget::unlimited(), &mut rng), FirstPassage::Never);
    }
}
