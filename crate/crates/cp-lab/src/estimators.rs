//! Monte Carlo estimators for the process observables.
//!
//! Every estimator takes a master seed and a [`TrialPool`]; trial `i` uses
//! its own stream, so estimates do not depend on the thread count.

#![allow(clippy::too_many_arguments)]

use rand::Rng;
use serde::Serialize;

use cplab_core::contact_process::{
    first_passage_radius, run_direct, timeline_extinction_time, Budget, Extinction, FirstPassage, RunOptions,
};
use cplab_core::graphs::{generate_star, generate_ubgw_ball, DegreeDistribution, Graph, DEFAULT_VERTEX_CAP};

use crate::pool::TrialPool;
use crate::stats::{self, Estimate, DEFAULT_LEVEL};

/// `eta_{>=R}`: probability that the infection from the root of the
/// unimodular Galton–Watson tree reaches distance `R` before dying out,
/// averaged over the tree.
///
/// Each sample draws a fresh depth-`R` ball. Balls over the vertex cap and
/// runs over the budget count as successes and as censored, which can only
/// bias the estimate upwards.
pub fn estimate_eta_geq_r(
    mu: &DegreeDistribution,
    lambda: f64,
    radius: usize,
    n_samples: usize,
    budget: Budget,
    seed: u64,
    pool: &TrialPool,
) -> Estimate {
    let outcomes = pool.run(n_samples, seed, |_, rng| match generate_ubgw_ball(mu, radius, rng, DEFAULT_VERTEX_CAP) {
        Ok(ball) => first_passage_radius(ball.graph(), lambda, ball.root(), radius, budget, rng),
        Err(_) => FirstPassage::Censored,
    });
    proportion_of_hits(&outcomes)
}

fn proportion_of_hits(outcomes: &[FirstPassage]) -> Estimate {
    let censored = outcomes.iter().filter(|o| matches!(o, FirstPassage::Censored)).count();
    let hits = outcomes.iter().filter(|o| o.is_hit()).count() + censored;
    Estimate::proportion(hits, outcomes.len(), censored, DEFAULT_LEVEL)
}

/// Which vertices [`estimate_z_geq_r`] starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexSample {
    /// Every vertex once per trial round.
    All,
    /// This many uniform draws with replacement.
    Uniform(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexSuccess {
    pub vertex: usize,
    pub hits: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZEstimate {
    /// Estimate of `E[Z_{>=R}] / N`.
    pub estimate: Estimate,
    pub per_vertex: Vec<VertexSuccess>,
}

/// Mean of `Z_{>=R} / N`, the fraction of vertices whose infection reaches
/// distance `R`, estimated by running [`first_passage_radius`] from sampled
/// vertices. The standard error comes from the spread of per-vertex success
/// fractions.
pub fn estimate_z_geq_r(
    g: &Graph,
    lambda: f64,
    radius: usize,
    trials_per_vertex: usize,
    vertices: VertexSample,
    budget: Budget,
    seed: u64,
    pool: &TrialPool,
) -> ZEstimate {
    if radius == 0 {
        return ZEstimate { estimate: Estimate::exact(1.0), per_vertex: Vec::new() };
    }
    let chosen: Vec<usize> = match vertices {
        VertexSample::All => (0..g.n()).collect(),
        VertexSample::Uniform(k) => {
            let mut rng = cplab_core::rng::seeded(seed ^ 0x5eed_5eed);
            (0..k).map(|_| rng.gen_range(0..g.n())).collect()
        }
    };
    let tpv = trials_per_vertex.max(1);
    let outcomes =
        pool.run(chosen.len() * tpv, seed, |i, rng| first_passage_radius(g, lambda, chosen[i / tpv], radius, budget, rng));
    let mut per_vertex = Vec::with_capacity(chosen.len());
    let mut fractions = Vec::with_capacity(chosen.len());
    let mut censored = 0;
    for (j, &v) in chosen.iter().enumerate() {
        let slice = &outcomes[j * tpv..(j + 1) * tpv];
        let c = slice.iter().filter(|o| matches!(o, FirstPassage::Censored)).count();
        let hits = slice.iter().filter(|o| o.is_hit()).count() + c;
        censored += c;
        fractions.push(hits as f64 / tpv as f64);
        per_vertex.push(VertexSuccess { vertex: v, hits, trials: tpv });
    }
    let mut estimate = Estimate::mean(&fractions, censored, DEFAULT_LEVEL);
    estimate.n_samples = outcomes.len();
    ZEstimate { estimate, per_vertex }
}

/// Density `|xi_t| / N` from the all-infected start at each requested time.
/// Runs censored by the event budget before reaching a time are left out of
/// that time's mean and counted as censored.
pub fn estimate_density(
    g: &Graph,
    lambda: f64,
    times: &[f64],
    n_trials: usize,
    max_events: u64,
    seed: u64,
    pool: &TrialPool,
) -> Vec<(f64, Estimate)> {
    let horizon = times.iter().copied().fold(0.0, f64::max);
    let all: Vec<usize> = (0..g.n()).collect();
    let mut opts = RunOptions::new(Budget { horizon, max_events });
    opts.sample_times = times.to_vec();
    let runs = pool.run(n_trials, seed, |_, rng| run_direct(g, lambda, &all, &opts, rng).density_samples);
    times
        .iter()
        .map(|&t| {
            let values: Vec<f64> =
                runs.iter().filter_map(|s| s.iter().find(|(st, _)| *st == t).map(|&(_, d)| d)).collect();
            let censored = n_trials - values.len();
            let est = if values.is_empty() {
                Estimate { n_censored: censored, ..Estimate::exact(f64::NAN) }
            } else {
                Estimate::mean(&values, censored, DEFAULT_LEVEL)
            };
            (t, est)
        })
        .collect()
}

/// Extinction times of a batch of runs; censored runs keep their stopping
/// time as a lower bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtinctionSample {
    pub times: Vec<f64>,
    pub censored: Vec<bool>,
}

impl ExtinctionSample {
    fn from_outcomes(outcomes: Vec<Extinction>) -> Self {
        ExtinctionSample {
            times: outcomes.iter().map(Extinction::time).collect(),
            censored: outcomes.iter().map(Extinction::is_censored).collect(),
        }
    }

    pub fn n_censored(&self) -> usize {
        self.censored.iter().filter(|&&c| c).count()
    }

    pub fn median(&self) -> f64 {
        stats::median(&self.times)
    }

    pub fn mean(&self) -> Estimate {
        Estimate::mean(&self.times, self.n_censored(), DEFAULT_LEVEL)
    }
}

/// Extinction times from `initial` with the direct engine.
pub fn direct_extinction_sample(
    g: &Graph,
    lambda: f64,
    initial: &[usize],
    n_trials: usize,
    budget: Budget,
    seed: u64,
    pool: &TrialPool,
) -> ExtinctionSample {
    let opts = RunOptions::new(budget);
    ExtinctionSample::from_outcomes(pool.run(n_trials, seed, |_, rng| run_direct(g, lambda, initial, &opts, rng).extinction))
}

/// Extinction times from `initial` by sweeping sampled graphical
/// representations segment by segment.
pub fn timeline_extinction_sample(
    g: &Graph,
    lambda: f64,
    initial: &[usize],
    n_trials: usize,
    budget: Budget,
    seed: u64,
    pool: &TrialPool,
) -> ExtinctionSample {
    let segment = 4.0;
    ExtinctionSample::from_outcomes(
        pool.run(n_trials, seed, |_, rng| timeline_extinction_time(g, lambda, initial, segment, budget, rng)),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarExtinction {
    pub k: usize,
    /// Mean extinction time (censored runs enter with their lower bound).
    pub estimate: Estimate,
    pub median: f64,
    pub log_mean: f64,
    pub sample: ExtinctionSample,
}

/// Extinction time of the star with `k` leaves from the all-infected start.
pub fn estimate_star_extinction(
    k: usize,
    lambda: f64,
    n_trials: usize,
    budget: Budget,
    seed: u64,
    pool: &TrialPool,
) -> StarExtinction {
    let g = generate_star(k);
    let all: Vec<usize> = (0..g.n()).collect();
    let sample = direct_extinction_sample(&g, lambda, &all, n_trials, budget, seed, pool);
    let log_mean = sample.times.iter().map(|t| t.ln()).sum::<f64>() / n_trials as f64;
    StarExtinction { k, estimate: sample.mean(), median: sample.median(), log_mean, sample }
}

/// Slope of `ln(median extinction time)` against `k`, with a percentile
/// bootstrap interval over trials.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    pub slope: f64,
    pub ci: (f64, f64),
    pub ci_level: f64,
    pub stars: Vec<StarExtinction>,
}

pub fn star_growth_fit(
    ks: &[usize],
    lambda: f64,
    n_trials: usize,
    budget: Budget,
    bootstrap_reps: usize,
    level: f64,
    seed: u64,
    pool: &TrialPool,
) -> GrowthFit {
    let stars: Vec<StarExtinction> = ks
        .iter()
        .enumerate()
        .map(|(i, &k)| estimate_star_extinction(k, lambda, n_trials, budget, seed.wrapping_add(i as u64), pool))
        .collect();
    let x: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let fit = |groups: &[Vec<f64>]| {
        let y: Vec<f64> = groups.iter().map(|g| stats::median(g).ln()).collect();
        stats::ls_slope(&x, &y)
    };
    let groups: Vec<Vec<f64>> = stars.iter().map(|s| s.sample.times.clone()).collect();
    let slope = fit(&groups);
    let reps = stats::bootstrap(&groups, bootstrap_reps, seed ^ 0xb007, fit);
    GrowthFit { slope, ci: stats::percentile_interval(&reps, level), ci_level: level, stars }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRow {
    pub graph_index: usize,
    pub n: usize,
    pub level: f64,
    pub quantile: f64,
    /// Bootstrap standard error of the sample quantile.
    pub stderr: f64,
    pub n_censored: usize,
}

/// Empirical quantiles of the extinction time from a single uniformly chosen
/// vertex, per graph. Stable quantiles along the sequence indicate tightness;
/// upper quantiles growing with `n` indicate its failure.
pub fn tightness_diagnostic(
    graphs: &[Graph],
    lambda: f64,
    levels: &[f64],
    n_trials: usize,
    budget: Budget,
    seed: u64,
    pool: &TrialPool,
) -> Vec<TightnessRow> {
    let opts = RunOptions::new(budget);
    let mut rows = Vec::new();
    for (gi, g) in graphs.iter().enumerate() {
        let outcomes = pool.run(n_trials, seed.wrapping_add(gi as u64), |_, rng| {
            let root = rng.gen_range(0..g.n());
            run_direct(g, lambda, &[root], &opts, rng).extinction
        });
        let sample = ExtinctionSample::from_outcomes(outcomes);
        let mut sorted = sample.times.clone();
        sorted.sort_by(f64::total_cmp);
        for &level in levels {
            let reps = stats::bootstrap(std::slice::from_ref(&sample.times), 200, seed ^ gi as u64, |g| {
                let mut v = g[0].clone();
                v.sort_by(f64::total_cmp);
                stats::quantile(&v, level)
            });
            rows.push(TightnessRow {
                graph_index: gi,
                n: g.n(),
                level,
                quantile: stats::quantile(&sorted, level),
                stderr: stats::sample_variance(&reps).sqrt(),
                n_censored: sample.n_censored(),
            });
        }
    }
    rows
}

/// `P(xi_t^o = {}, tau_R(o) < t)` from a uniform root `o`, for each `R`.
/// Runs that exhaust the event budget before `t` count as censored
/// non-events.
pub fn almostlocal_diagnostic(
    g: &Graph,
    lambda: f64,
    t: f64,
    radii: &[usize],
    n_trials: usize,
    max_events: u64,
    seed: u64,
    pool: &TrialPool,
) -> Vec<(usize, Estimate)> {
    let mut opts = RunOptions::new(Budget { horizon: t, max_events });
    opts.radii = radii.to_vec();
    let runs = pool.run(n_trials, seed, |_, rng| {
        let root = rng.gen_range(0..g.n());
        let tr = run_direct(g, lambda, &[root], &opts, rng);
        let censored = tr.extinction.is_censored() && tr.extinction.time() < t;
        let dead = matches!(tr.extinction, Extinction::At(s) if s <= t);
        (censored, dead, tr.first_passage)
    });
    let censored = runs.iter().filter(|r| r.0).count();
    radii
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let hits = runs.iter().filter(|(_, dead, fp)| *dead && fp[j].1.hit_before(t)).count();
            (r, Estimate::proportion(hits, n_trials, censored, DEFAULT_LEVEL))
        })
        .collect()
}

/// Low-density occupation `r(eps, T)`: the fraction of `[0, T]` with at most
/// `eps N` infected vertices, from the all-infected start.
pub fn estimate_low_density_fraction(
    g: &Graph,
    lambda: f64,
    eps: f64,
    horizon: f64,
    n_trials: usize,
    max_events: u64,
    seed: u64,
    pool: &TrialPool,
) -> Estimate {
    let all: Vec<usize> = (0..g.n()).collect();
    let mut opts = RunOptions::new(Budget { horizon, max_events });
    opts.eps_density = Some(eps);
    let runs = pool.run(n_trials, seed, |_, rng| {
        let tr = run_direct(g, lambda, &all, &opts, rng);
        (tr.low_density_time.unwrap_or(0.0), tr.extinction.is_censored() && tr.extinction.time() < horizon)
    });
    let values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    Estimate::mean(&values, runs.iter().filter(|r| r.1).count(), DEFAULT_LEVEL)
}
