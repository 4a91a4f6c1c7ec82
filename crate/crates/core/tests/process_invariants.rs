//! Pathwise properties of the graphical representation and statistical
//! checks of the direct engine.

mod common;

use cplab_core::contact_process::{
    ctmc_exact_expected_extinction, evolve, first_passage_radius, reverse_timeline, run_direct, sample_timeline,
    thin_timeline, timeline_extinction_time, Budget, Extinction, FirstPassage, RunOptions, Timeline,
};
use cplab_core::graphs::{generate_empty, generate_erdos_renyi, generate_star, Graph};
use cplab_core::math::harmonic;
use cplab_core::rng::{seeded, trial_rng, SimRng};
use common::{ks_one_sample, mean_and_se};
use rand::Rng;

/// Reachability by explicit path search over (vertex, entry time) states:
/// from an entry at `(u, s)` the path may sit at `u` until the next recovery
/// mark and leave along any outgoing arrow in between.
fn reach_by_paths(tl: &Timeline, from: &[usize], t: f64) -> Vec<usize> {
    let n = tl.n;
    let mut out_arrows: Vec<Vec<(f64, usize)>> = vec![Vec::new(); n];
    for (&(u, v), list) in tl.edges.iter().zip(&tl.arrows) {
        for a in list {
            if a.time <= t {
                if a.forward {
                    out_arrows[u].push((a.time, v));
                } else {
                    out_arrows[v].push((a.time, u));
                }
            }
        }
    }
    let next_recovery = |u: usize, s: f64| tl.recoveries[u].iter().copied().find(|&r| r > s && r <= t);
    let mut stack: Vec<(usize, f64)> = from.iter().map(|&a| (a, 0.0)).collect();
    let mut seen: std::collections::HashSet<(usize, u64)> = std::collections::HashSet::new();
    let mut alive = vec![false; n];
    while let Some((u, s)) = stack.pop() {
        if !seen.insert((u, s.to_bits())) {
            continue;
        }
        let end = next_recovery(u, s);
        if end.is_none() {
            alive[u] = true;
        }
        let end = end.unwrap_or(f64::INFINITY);
        for &(time, w) in &out_arrows[u] {
            if time > s && time < end {
                stack.push((w, time));
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

fn random_subset(n: usize, rng: &mut SimRng) -> Vec<usize> {
    let p = rng.gen_range(0.0..0.6);
    (0..n).filter(|_| rng.gen::<f64>() < p).collect()
}

fn random_instance(i: u64) -> (Graph, Timeline, SimRng) {
    let mut rng = trial_rng(99, i);
    let n = rng.gen_range(1..=20);
    let p = rng.gen_range(0.05..0.5);
    let g = generate_erdos_renyi(n, p, rng.gen()).unwrap();
    let lambda = rng.gen_range(0.0..3.0);
    let horizon = rng.gen_range(0.1..4.0);
    let tl = sample_timeline(&g, lambda, horizon, &mut rng);
    (g, tl, rng)
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

#[test]
fn sweep_agrees_with_path_search() {
    for i in 0..1000 {
        let (g, tl, mut rng) = random_instance(i);
        let a = random_subset(g.n(), &mut rng);
        let t = rng.gen_range(0.0..=tl.horizon);
        assert_eq!(evolve(&g, &tl, &a, t), reach_by_paths(&tl, &a, t), "instance {i}");
    }
}

#[test]
fn additivity_and_attractivity() {
    for i in 0..1000 {
        let (g, tl, mut rng) = random_instance(1000 + i);
        let a = random_subset(g.n(), &mut rng);
        let b = random_subset(g.n(), &mut rng);
        let t = rng.gen_range(0.0..=tl.horizon);
        let ea = evolve(&g, &tl, &a, t);
        let eb = evolve(&g, &tl, &b, t);
        let eab = evolve(&g, &tl, &union(&a, &b), t);
        assert_eq!(eab, union(&ea, &eb), "additivity, instance {i}");
        assert!(is_subset(&ea, &eab) && is_subset(&eb, &eab));
        assert!(evolve(&g, &tl, &[], t).is_empty());
    }
}

#[test]
fn flow_property() {
    for i in 0..1000 {
        let (g, tl, mut rng) = random_instance(2000 + i);
        let a = random_subset(g.n(), &mut rng);
        let s = rng.gen_range(0.0..=tl.horizon);
        let t = rng.gen_range(0.0..=tl.horizon - s);
        let mid = evolve(&g, &tl, &a, s);
        let shifted = tl.shifted(s);
        assert_eq!(evolve(&g, &tl, &a, s + t), evolve(&g, &shifted, &mid, t), "instance {i}");
    }
}

#[test]
fn thinning_is_monotone() {
    for i in 0..1000 {
        let (g, tl, mut rng) = random_instance(3000 + i);
        let a = random_subset(g.n(), &mut rng);
        let thin = thin_timeline(&tl, rng.gen_range(0.0..=1.0), &mut rng);
        for j in 0..=8 {
            let t = tl.horizon * j as f64 / 8.0;
            assert!(is_subset(&evolve(&g, &thin, &a, t), &evolve(&g, &tl, &a, t)), "instance {i}");
        }
    }
}

#[test]
fn pathwise_self_duality() {
    for i in 0..1000 {
        let (g, tl, mut rng) = random_instance(4000 + i);
        let a = random_subset(g.n(), &mut rng);
        let b = random_subset(g.n(), &mut rng);
        let t = rng.gen_range(0.0..=tl.horizon);
        let forward = evolve(&g, &tl, &a, t).iter().any(|v| b.contains(v));
        let rev = reverse_timeline(&tl, t);
        let backward = evolve(&g, &rev, &b, t).iter().any(|v| a.contains(v));
        assert_eq!(forward, backward, "instance {i}");
    }
}

#[test]
fn timeline_counts_have_poisson_means() {
    let g = Graph::from_edges(2, [(0, 1)]).unwrap();
    let (lambda, horizon) = (0.7, 3.0);
    let mut rng = seeded(8);
    let mut rec = Vec::new();
    let mut fwd = Vec::new();
    let mut bwd = Vec::new();
    for _ in 0..10_000 {
        let tl = sample_timeline(&g, lambda, horizon, &mut rng);
        rec.push(tl.recoveries[0].len() as f64);
        fwd.push(tl.arrows[0].iter().filter(|a| a.forward).count() as f64);
        bwd.push(tl.arrows[0].iter().filter(|a| !a.forward).count() as f64);
    }
    let (m, se) = mean_and_se(&rec);
    assert!((m - horizon).abs() < 3.0 * se, "recoveries {m}");
    for xs in [&fwd, &bwd] {
        let (m, se) = mean_and_se(xs);
        assert!((m - lambda * horizon).abs() < 3.0 * se, "arrows {m}");
    }
}

fn extinction_times(g: &Graph, lambda: f64, a: &[usize], trials: u64, seed: u64) -> Vec<f64> {
    let opts = RunOptions::new(Budget::unlimited());
    (0..trials)
        .map(|i| match run_direct(g, lambda, a, &opts, &mut trial_rng(seed, i)).extinction {
            Extinction::At(t) => t,
            Extinction::Censored(_) => unreachable!("no budget"),
        })
        .collect()
}

#[test]
fn isolated_vertex_dies_at_rate_one() {
    let g = generate_empty(1);
    let mut times = extinction_times(&g, 5.0, &[0], 100_000, 1);
    let (m, se) = mean_and_se(&times);
    assert!((m - 1.0).abs() < 3.0 * se);
    let p = ks_one_sample(&mut times, |x| 1.0 - (-x).exp());
    assert!(p > 0.01, "KS p = {p}");
}

#[test]
fn single_edge_mean_extinction() {
    let g = Graph::from_edges(2, [(0, 1)]).unwrap();
    let times = extinction_times(&g, 1.0, &[0, 1], 100_000, 2);
    let (m, se) = mean_and_se(&times);
    assert!((m - 2.0).abs() < 3.0 * se, "{m}");
}

#[test]
fn pure_death_is_max_of_exponentials() {
    let g = generate_empty(6);
    for m in [1usize, 3, 6] {
        let a: Vec<usize> = (0..m).collect();
        let times = extinction_times(&g, 0.0, &a, 50_000, 3 + m as u64);
        let (mean, se) = mean_and_se(&times);
        assert!((mean - harmonic(m)).abs() < 3.0 * se);
    }
}

#[test]
fn star_centre_reaches_a_leaf_first_with_competing_rates() {
    for &(k, lambda) in &[(3usize, 0.5), (10, 0.2)] {
        let g = generate_star(k);
        let trials = 40_000;
        let hits = (0..trials)
            .filter(|&i| first_passage_radius(&g, lambda, 0, 1, Budget::unlimited(), &mut trial_rng(5, i)).is_hit())
            .count();
        let p = k as f64 * lambda / (1.0 + k as f64 * lambda);
        let f = hits as f64 / trials as f64;
        assert!((f - p).abs() < 3.0 * (p * (1.0 - p) / trials as f64).sqrt(), "k={k}: {f} vs {p}");
    }
}

#[test]
fn engines_agree_with_the_exact_chain() {
    let cases = [(generate_star(3), 1.0), (generate_erdos_renyi(6, 0.5, 3).unwrap(), 0.6)];
    for (g, lambda) in cases {
        let all: Vec<usize> = (0..g.n()).collect();
        let exact = ctmc_exact_expected_extinction(&g, lambda, &all).unwrap();
        let direct = extinction_times(&g, lambda, &all, 20_000, 11);
        let (m, se) = mean_and_se(&direct);
        assert!((m - exact).abs() < 3.0 * se, "direct {m} vs {exact}");
        let swept: Vec<f64> = (0..20_000)
            .map(|i| timeline_extinction_time(&g, lambda, &all, 2.0, Budget::unlimited(), &mut trial_rng(12, i)).time())
            .collect();
        let (m, se) = mean_and_se(&swept);
        assert!((m - exact).abs() < 3.0 * se, "timeline {m} vs {exact}");
    }
}

#[test]
fn zero_rate_run_never_infects() {
    let g = generate_star(20);
    let mut opts = RunOptions::new(Budget::unlimited());
    opts.radii = vec![1, 2];
    for i in 0..500 {
        let tr = run_direct(&g, 0.0, &[0], &opts, &mut trial_rng(4, i));
        assert_eq!(tr.events, 1);
        assert_eq!(tr.first_passage[0].1, FirstPassage::Never);
    }
}
