use alloc::vec::Vec;

use rand::Rng;

use crate::graphs::Graph;
use crate::rng::exp1;

/// Infection arrow on an edge `(u, v)` with `u < v`; `forward` means `u -> v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrow {
    pub time: f64,
    pub forward: bool,
}

/// One realization of the graphical representation on `(0, horizon]`: a
/// rate-`2 lambda` Poisson process of arrows per edge, each pointing either
/// way with probability 1/2, and a rate-1 Poisson process of recovery marks
/// per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub horizon: f64,
    pub lambda: f64,
    pub n: usize,
    /// Edges `(u, v)`, `u < v`, in the graph's lexicographic edge order.
    pub edges: Vec<(usize, usize)>,
    /// Arrow times per edge, increasing.
    pub arrows: Vec<Vec<Arrow>>,
    /// Recovery times per vertex, increasing.
    pub recoveries: Vec<Vec<f64>>,
}

fn poisson_times<R: Rng + ?Sized>(rate: f64, horizon: f64, rng: &mut R) -> Vec<f64> {
    let mut out = Vec::new();
    if rate <= 0.0 {
        return out;
    }
    let mut t = exp1(rng) / rate;
    while t <= horizon {
        out.push(t);
        t += exp1(rng) / rate;
    }
    out
}

/// Samples a fresh graphical representation of `g` at infection rate `lambda`.
pub fn sample_timeline<R: Rng + ?Sized>(g: &Graph, lambda: f64, horizon: f64, rng: &mut R) -> Timeline {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let arrows = edges
        .iter()
        .map(|_| {
            poisson_times(2.0 * lambda, horizon, rng)
                .into_iter()
                .map(|time| Arrow { time, forward: rng.gen::<bool>() })
                .collect()
        })
        .collect();
    let recoveries = (0..g.n()).map(|_| poisson_times(1.0, horizon, rng)).collect();
    Timeline { horizon, lambda, n: g.n(), edges, arrows, recoveries }
}

impl Timeline {
    pub fn arrow_count(&self) -> usize {
        self.arrows.iter().map(Vec::len).sum()
    }

    pub fn recovery_count(&self) -> usize {
        self.recoveries.iter().map(Vec::len).sum()
    }

    /// Events in `(0, t]` only.
    pub fn restricted(&self, t: f64) -> Timeline {
        let t = t.min(self.horizon);
        Timeline {
            horizon: t,
            lambda: self.lambda,
            n: self.n,
            edges: self.edges.clone(),
            arrows: self.arrows.iter().map(|a| a.iter().copied().filter(|x| x.time <= t).collect()).collect(),
            recoveries: self.recoveries.iter().map(|r| r.iter().copied().filter(|&x| x <= t).collect()).collect(),
        }
    }

    /// Events in `(s, horizon]` moved to `(0, horizon - s]`.
    pub fn shifted(&self, s: f64) -> Timeline {
        Timeline {
            horizon: self.horizon - s,
            lambda: self.lambda,
            n: self.n,
            edges: self.edges.clone(),
            arrows: self
                .arrows
                .iter()
                .map(|a| a.iter().filter(|x| x.time > s).map(|x| Arrow { time: x.time - s, forward: x.forward }).collect())
                .collect(),
            recoveries: self.recoveries.iter().map(|r| r.iter().filter(|&&x| x > s).map(|&x| x - s).collect()).collect(),
        }
    }
}

/// Time reversal on `[0, t]`: an arrow `(s, u -> v)` becomes `(t - s, v -> u)`
/// and a recovery at `s` moves to `t - s`. Events at or after `t` are dropped.
pub fn reverse_timeline(tl: &Timeline, t: f64) -> Timeline {
    let t = t.min(tl.horizon);
    Timeline {
        horizon: t,
        lambda: tl.lambda,
        n: tl.n,
        edges: tl.edges.clone(),
        arrows: tl
            .arrows
            .iter()
            .map(|a| a.iter().rev().filter(|x| x.time < t).map(|x| Arrow { time: t - x.time, forward: !x.forward }).collect())
            .collect(),
        recoveries: tl.recoveries.iter().map(|r| r.iter().rev().filter(|&&x| x < t).map(|&x| t - x).collect()).collect(),
    }
}

/// Keeps each arrow independently with probability `ratio`; the result is a
/// graphical representation for rate `ratio * lambda` coupled below `tl`.
pub fn thin_timeline<R: Rng + ?Sized>(tl: &Timeline, ratio: f64, rng: &mut R) -> Timeline {
    debug_assert!((0.0..=1.0).contains(&ratio));
    let arrows = tl
        .arrows
        .iter()
        .map(|a| a.iter().copied().filter(|_| ratio >= 1.0 || rng.gen::<f64>() < ratio).collect())
        .collect();
    Timeline { lambda: tl.lambda * ratio, arrows, ..tl.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{generate_cycle, generate_erdos_renyi};
    use crate::rng::seeded;

    #[test]
    fn zero_rate_has_no_arrows() {
        let g = generate_cycle(6).unwrap();
        let tl = sample_timeline(&g, 0.0, 10.0, &mut seeded(1));
        assert_eq!(tl.arrow_count(), 0);
        assert!(tl.recovery_count() > 0);
        assert_eq!(reverse_timeline(&tl, 5.0).arrow_count(), 0);
    }

    #[test]
    fn lists_are_increasing_and_in_range() {
        let g = generate_erdos_renyi(12, 0.4, 3).unwrap();
        let tl = sample_timeline(&g, 1.5, 4.0, &mut seeded(2));
        for list in tl.recoveries.iter() {
            assert!(list.windows(2).all(|w| w[0] < w[1]));
            assert!(list.iter().all(|&x| x > 0.0 && x <= 4.0));
        }
        for list in tl.arrows.iter() {
            assert!(list.windows(2).all(|w| w[0].time < w[1].time));
        }
        let rev = reverse_timeline(&tl, 3.0);
        for list in rev.recoveries.iter() {
            assert!(list.windows(2).all(|w| w[0] < w[1]));
            assert!(list.iter().all(|&x| x > 0.0 && x <= 3.0));
        }
    }

    #[test]
    fn reversal_is_an_involution() {
        let g = generate_erdos_renyi(10, 0.5, 8).unwrap();
        let tl = sample_timeline(&g, 1.0, 5.0, &mut seeded(4));
        let t = 3.7;
        let back = reverse_timeline(&reverse_timeline(&tl, t), t);
        let orig = tl.restricted(t);
        assert_eq!(back.horizon, orig.horizon);
        for (a, b) in back.arrows.iter().zip(&orig.arrows) {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.forward, y.forward);
                assert!((x.time - y.time).abs() < 1e-12);
            }
        }
        for (a, b) in back.recoveries.iter().zip(&orig.recoveries) {
            assert_eq!(a.len(), b.len());
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12));
        }
    }

    #[test]
    fn thinning_extremes() {
        let g = generate_cycle(8).unwrap();
        let tl = sample_timeline(&g, 2.0, 3.0, &mut seeded(5));
        assert_eq!(thin_timeline(&tl, 1.0, &mut seeded(6)), tl);
        let none = thin_timeline(&tl, 0.0, &mut seeded(6));
        assert_eq!(none.arrow_count(), 0);
        assert_eq!(none.recoveries, tl.recoveries);
    }
}
