use cp_lab::estimators::{
    almostlocal_diagnostic, estimate_density, estimate_eta_geq_r, estimate_star_extinction, estimate_z_geq_r,
    star_growth_fit, tightness_diagnostic, VertexSample,
};
use cp_lab::pool::TrialPool;
use cp_lab::stats::{agree_within, Estimate, DEFAULT_LEVEL};
use cplab_core::contact_process::{ctmc_exact_expected_extinction, Budget};
use cplab_core::graphs::{generate_configuration_model, generate_cycle, generate_empty, generate_star, DegreeDistribution};
use cplab_core::math::harmonic;
use proptest::prelude::*;

fn pool() -> TrialPool {
    TrialPool::sequential()
}

const BUDGET: Budget = Budget { horizon: f64::INFINITY, max_events: 10_000_000 };

#[test]
fn eta_vanishes_without_infection() {
    let mu = DegreeDistribution::poisson(3.0, 64).unwrap();
    let e = estimate_eta_geq_r(&mu, 0.0, 2, 500, BUDGET, 1, &pool());
    assert_eq!((e.mean, e.stderr), (0.0, 0.0));
}

#[test]
fn eta_at_radius_one_on_a_three_regular_root() {
    let mu = DegreeDistribution::point_mass(3);
    for (i, lambda) in [0.3, 1.0, 2.5].into_iter().enumerate() {
        let e = estimate_eta_geq_r(&mu, lambda, 1, 20_000, BUDGET, 10 + i as u64, &pool());
        let exact = 3.0 * lambda / (1.0 + 3.0 * lambda);
        assert!(e.within_se(exact, 3.0), "lambda {lambda}: {} vs {exact}", e.mean);
    }
}

#[test]
fn eta_is_nonincreasing_in_radius() {
    let mu = DegreeDistribution::poisson(3.0, 64).unwrap();
    let est: Vec<Estimate> = (1..=4).map(|r| estimate_eta_geq_r(&mu, 1.0, r, 4000, BUDGET, 20 + r as u64, &pool())).collect();
    for w in est.windows(2) {
        let slack = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        assert!(w[1].mean <= w[0].mean + slack, "{} then {}", w[0].mean, w[1].mean);
    }
}

#[test]
fn z_trivial_cases() {
    let g = generate_configuration_model(300, &DegreeDistribution::poisson(3.0, 64).unwrap(), 3).unwrap();
    let z0 = estimate_z_geq_r(&g, 1.0, 0, 1, VertexSample::All, BUDGET, 1, &pool());
    assert_eq!(z0.estimate.mean, 1.0);
    let z = estimate_z_geq_r(&g, 0.0, 1, 2, VertexSample::Uniform(100), BUDGET, 1, &pool());
    assert_eq!(z.estimate.mean, 0.0);
    assert_eq!(z.per_vertex.len(), 100);
    assert!(z.per_vertex.iter().all(|v| v.hits == 0 && v.trials == 2));
}

#[test]
fn density_examples() {
    let g = generate_cycle(50).unwrap();
    let times = [0.0, 0.5, 1.0, 2.0];
    let pure = estimate_density(&g, 0.0, &times, 400, u64::MAX, 4, &pool());
    assert_eq!((pure[0].1.mean, pure[0].1.stderr), (1.0, 0.0));
    for (t, e) in &pure[1..] {
        assert!(e.within_se((-t).exp(), 3.0), "t {t}: {} vs {}", e.mean, (-t).exp());
    }
    let single = generate_empty(1);
    for (t, e) in estimate_density(&single, 5.0, &[0.7, 1.5], 4000, u64::MAX, 5, &pool()) {
        assert!(e.within_se((-t).exp(), 3.0), "t {t}: {}", e.mean);
    }
}

#[test]
fn star_extinction_matches_chain_and_harmonic_numbers() {
    let g = generate_star(3);
    let exact = ctmc_exact_expected_extinction(&g, 1.0, &[0, 1, 2, 3]).unwrap();
    let s = estimate_star_extinction(3, 1.0, 20_000, BUDGET, 6, &pool());
    assert!(s.estimate.within_se(exact, 3.0), "{} vs {exact}", s.estimate.mean);
    for k in [1, 5, 20] {
        let s = estimate_star_extinction(k, 0.0, 20_000, BUDGET, 7, &pool());
        assert!(s.estimate.within_se(harmonic(k + 1), 3.0), "k {k}: {} vs {}", s.estimate.mean, harmonic(k + 1));
        assert_eq!(s.estimate.n_censored, 0);
    }
}

#[test]
fn star_growth_is_positive_for_strong_infection() {
    let fit = star_growth_fit(&[5, 10, 15, 20], 1.0, 200, Budget::events(1_000_000), 500, 0.99, 8, &pool());
    assert!(fit.slope > 0.0 && fit.ci.0 > 0.0, "slope {} ci {:?}", fit.slope, fit.ci);
    assert_eq!(fit.stars.len(), 4);
}

#[test]
fn pure_death_quantiles_are_exponential() {
    let graphs = vec![generate_empty(10), generate_empty(1000), generate_cycle(100).unwrap()];
    let rows = tightness_diagnostic(&graphs, 0.0, &[0.9], 4000, BUDGET, 9, &pool());
    for r in &rows {
        assert!((r.quantile - 10f64.ln()).abs() <= 3.0 * r.stderr, "n {}: {}", r.n, r.quantile);
    }
    let slack = 3.0 * (rows[0].stderr.powi(2) + rows[1].stderr.powi(2)).sqrt();
    assert!((rows[0].quantile - rows[1].quantile).abs() <= slack);
}

#[test]
fn subcritical_cycle_quantiles_are_stable() {
    let graphs = vec![generate_cycle(1000).unwrap(), generate_cycle(10_000).unwrap()];
    let rows = tightness_diagnostic(&graphs, 0.1, &[0.99], 4000, BUDGET, 10, &pool());
    let (a, b) = (rows[0].quantile, rows[1].quantile);
    assert!((a - b).abs() < 0.2 * a.min(b), "{a} vs {b}");
}

#[test]
fn almostlocal_examples() {
    let g = generate_configuration_model(400, &DegreeDistribution::poisson(3.0, 64).unwrap(), 11).unwrap();
    let t = 1.2;
    let rows = almostlocal_diagnostic(&g, 0.0, t, &[0, 1, 2], 4000, u64::MAX, 12, &pool());
    assert!(rows[0].1.within_se(1.0 - (-t).exp(), 3.0), "{}", rows[0].1.mean);
    assert!(rows[1..].iter().all(|(_, e)| e.mean == 0.0));

    let rows = almostlocal_diagnostic(&g, 1.0, 4.0, &[0, 1, 2, 3], 4000, 10_000_000, 13, &pool());
    for w in rows.windows(2) {
        let slack = 3.0 * (w[0].1.stderr.powi(2) + w[1].1.stderr.powi(2)).sqrt();
        assert!(w[1].1.mean <= w[0].1.mean + slack);
    }
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let g = generate_configuration_model(200, &DegreeDistribution::poisson(3.0, 64).unwrap(), 14).unwrap();
    let (one, four) = (TrialPool::sequential(), TrialPool::new(4));
    assert_eq!(
        estimate_density(&g, 1.0, &[1.0, 3.0], 64, u64::MAX, 15, &one),
        estimate_density(&g, 1.0, &[1.0, 3.0], 64, u64::MAX, 15, &four)
    );
    let mu = DegreeDistribution::poisson(3.0, 64).unwrap();
    assert_eq!(
        estimate_eta_geq_r(&mu, 0.8, 3, 300, BUDGET, 16, &one),
        estimate_eta_geq_r(&mu, 0.8, 3, 300, BUDGET, 16, &four)
    );
    let a = estimate_z_geq_r(&g, 0.8, 2, 1, VertexSample::All, BUDGET, 17, &one);
    let b = estimate_z_geq_r(&g, 0.8, 2, 1, VertexSample::All, BUDGET, 17, &four);
    assert_eq!(a.estimate, b.estimate);
    assert_eq!(a.per_vertex, b.per_vertex);
}

#[test]
fn z_on_regular_graph_tracks_eta_of_the_tree() {
    let mu = DegreeDistribution::point_mass(3);
    let g = generate_configuration_model(2000, &mu, 18).unwrap();
    let z = estimate_z_geq_r(&g, 0.7, 1, 4, VertexSample::All, BUDGET, 19, &pool());
    let eta = estimate_eta_geq_r(&mu, 0.7, 1, 8000, BUDGET, 20, &pool());
    assert!(agree_within(&z.estimate, &eta, 3.0), "{} vs {}", z.estimate.mean, eta.mean);
}

proptest! {
    #[test]
    fn proportion_invariants(n in 1usize..500, frac in 0.0f64..=1.0, level in 0.5f64..0.999) {
        let s = ((n as f64) * frac).round() as usize;
        let e = Estimate::proportion(s, n, 0, level);
        prop_assert!(e.stderr >= 0.0);
        prop_assert!(0.0 <= e.ci.0 && e.ci.0 <= e.mean && e.mean <= e.ci.1 && e.ci.1 <= 1.0);
    }

    #[test]
    fn mean_invariants(values in proptest::collection::vec(-1e3f64..1e3, 1..60), c in 0usize..5) {
        let c = c.min(values.len());
        let e = Estimate::mean(&values, c, DEFAULT_LEVEL);
        prop_assert!(e.stderr >= 0.0);
        prop_assert!(e.ci.0 <= e.mean && e.mean <= e.ci.1);
        prop_assert!(e.n_censored <= e.n_samples);
    }
}
