use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::direct::{Budget, Extinction};
use super::timeline::{sample_timeline, Timeline};
use crate::graphs::Graph;

#[derive(Debug, Clone, Copy)]
enum Event {
    Arrow { from: usize, to: usize },
    Recovery { v: usize },
}

/// All events of `tl` up to `t`, ordered by `(time, sequence number)` where
/// the sequence number is the position in the edge-then-vertex listing.
fn ordered_events(tl: &Timeline, t: f64) -> Vec<(f64, usize, Event)> {
    let mut events = Vec::with_capacity(tl.arrow_count() + tl.recovery_count());
    for (&(u, v), list) in tl.edges.iter().zip(&tl.arrows) {
        for a in list.iter().take_while(|a| a.time <= t) {
            let (from, to) = if a.forward { (u, v) } else { (v, u) };
            events.push((a.time, events.len(), Event::Arrow { from, to }));
        }
    }
    for (v, list) in tl.recoveries.iter().enumerate() {
        for &time in list.iter().take_while(|&&x| x <= t) {
            events.push((time, events.len(), Event::Recovery { v }));
        }
    }
    events.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    events
}

/// Result of sweeping a timeline forward.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub infected: Vec<bool>,
    /// First time the infected set became empty, if it did.
    pub extinction_time: Option<f64>,
}

/// Chronological sweep of `tl` on `[0, t]` from the infected indicator
/// `initial`. A vertex is infected at time `s` iff an infection path from an
/// initially infected vertex reaches it: arrows carry infection forward in
/// their direction, recovery marks cut paths.
pub fn evolve_sweep(tl: &Timeline, mut infected: Vec<bool>, t: f64) -> Sweep {
    let mut count = infected.iter().filter(|&&b| b).count();
    let mut extinction_time = (count == 0).then_some(0.0);
    if count > 0 {
        for (time, _, ev) in ordered_events(tl, t) {
            match ev {
                Event::Arrow { from, to } => {
                    if infected[from] && !infected[to] {
                        infected[to] = true;
                        count += 1;
                    }
                }
                Event::Recovery { v } => {
                    if infected[v] {
                        infected[v] = false;
                        count -= 1;
                        if count == 0 {
                            extinction_time = Some(time);
                            break;
                        }
                    }
                }
            }
        }
    }
    Sweep { infected, extinction_time }
}

/// `xi_t^A` under the timeline: the sorted set of vertices reachable at time
/// `t` by an infection path from `A` at time 0.
pub fn evolve(g: &Graph, tl: &Timeline, initial: &[usize], t: f64) -> Vec<usize> {
    debug_assert_eq!(g.n(), tl.n);
    debug_assert!(t <= tl.horizon);
    let mut state = vec![false; g.n()];
    for &a in initial {
        state[a] = true;
    }
    let sweep = evolve_sweep(tl, state, t);
    (0..g.n()).filter(|&v| sweep.infected[v]).collect()
}

/// Extinction time from `initial` computed by sweeping freshly sampled
/// timeline segments of length `segment`, one after another. Independent
/// Poisson processes on disjoint windows glue into one graphical
/// representation, so this has the law of the contact process.
pub fn timeline_extinction_time<R: Rng + ?Sized>(
    g: &Graph,
    lambda: f64,
    initial: &[usize],
    segment: f64,
    budget: Budget,
    rng: &mut R,
) -> Extinction {
    let mut state = vec![false; g.n()];
    for &a in initial {
        state[a] = true;
    }
    let mut offset = 0.0;
    let mut events = 0u64;
    loop {
        if state.iter().all(|&b| !b) {
            return Extinction::At(offset);
        }
        if offset >= budget.horizon || events >= budget.max_events {
            return Extinction::Censored(offset);
        }
        let len = segment.min(budget.horizon - offset);
        let tl = sample_timeline(g, lambda, len, rng);
        events += (tl.arrow_count() + tl.recovery_count()) as u64;
        let sweep = evolve_sweep(&tl, state, len);
        if let Some(t) = sweep.extinction_time {
            return Extinction::At(offset + t);
        }
        state = sweep.infected;
        offset += len;
    }
}
