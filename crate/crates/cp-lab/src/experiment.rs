//! Preset experiments.
//!
//! Every preset computes all of its tables in memory first; the output
//! directory is only touched once the whole run has succeeded, so a failed
//! run leaves no files behind. CSV bodies depend only on the configuration
//! and seed. The wall-clock timestamp lives in `manifest.json` alone.

use std::path::{Path, PathBuf};

use rand::Rng;
use serde_json::json;
use statrs::distribution::{Binomial, DiscreteCDF};

use cplab_core::contact_process::{evolve, reverse_timeline, sample_timeline, thin_timeline, Budget};
use cplab_core::graphs::{
    generate_erdos_renyi, generate_spatial_torus_graph, spatial_torus_sample, top_eps_degree_sum, DegreeDistribution,
    RadiusLaw,
};
use cplab_core::local_convergence::{empirical_ball_distribution, limit_ball_distribution, tv_distance, UbgwSampler};
use cplab_core::rng::{seeded, SimRng};
use cplab_core::Graph;

use crate::config::{ConfigError, DegreeSpec, ExperimentConfig, GraphSpec};
use crate::estimators::{
    almostlocal_diagnostic, direct_extinction_sample, estimate_density, estimate_eta_geq_r,
    estimate_low_density_fraction, estimate_z_geq_r, star_growth_fit, tightness_diagnostic, VertexSample,
};
use crate::io::{write_ball_distribution, write_estimates, write_table, EstimateRecord, FormatError};
use crate::pool::TrialPool;
use crate::stats::{sample_variance, Estimate};

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Core(#[from] cplab_core::Error),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl ExperimentError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

type Result<T, E = ExperimentError> = std::result::Result<T, E>;

pub struct Preset {
    pub name: &'static str,
    pub help: &'static str,
    run: fn(&mut Ctx) -> Result<()>,
}

pub static PRESETS: &[Preset] = &[
    Preset {
        name: "duality-check",
        help: "Pathwise self-duality: on random small graphs, the forward process from A meets B at time t \
               exactly when the process on the reversed graphical representation from B meets A. \
               Writes duality.csv with a pathwise_agree column.",
        run: duality_check,
    },
    Preset {
        name: "coupling-check",
        help: "Monotone coupling properties on shared graphical representations: attractivity, additivity, \
               the flow property and monotonicity under thinning of infection arrows. Writes coupling.csv.",
        run: coupling_check,
    },
    Preset {
        name: "metastable-upper",
        help: "Upper bound on the metastable density: from the all-infected start the density at time t stays \
               below the probability eta_{>=R} that the infection of the limiting tree's root reaches distance R. \
               Writes metastable.csv and estimates.csv.",
        run: metastable_upper,
    },
    Preset {
        name: "slow-extinction",
        help: "Slow extinction on the augmented torus graph with heavy-tailed radii: its large hubs keep the \
               infection alive far longer than on a configuration model with the same mean degree. \
               Writes slow_extinction.csv and estimates.csv.",
        run: slow_extinction,
    },
    Preset {
        name: "star-survival",
        help: "Stars survive exponentially long in the number of leaves: fits the slope of log median \
               extinction time against k with a bootstrap interval. Writes star.csv and star_growth.csv.",
        run: star_survival,
    },
    Preset {
        name: "sparsity",
        help: "Sparsity of high-degree vertices: the degree mass carried by the top eps fraction of vertices, \
               and the fraction of time r(eps, T) the density spends below eps. Writes sparsity.csv and \
               estimates.csv.",
        run: sparsity,
    },
    Preset {
        name: "tightness",
        help: "Tightness of extinction times from a uniform root along a graph sequence: quantiles that stay \
               stable in n versus upper quantiles that diverge. Writes tightness.csv.",
        run: tightness,
    },
    Preset {
        name: "lln",
        help: "Law of large numbers for Z_{>=R}/N, the fraction of vertices whose infection reaches distance R: \
               its mean matches eta_{>=R} of the local limit and its spread across graph realizations shrinks \
               with n. Writes lln.csv, lln_variance.csv and estimates.csv.",
        run: lln,
    },
    Preset {
        name: "local-convergence",
        help: "Local convergence of random graphs to their Galton-Watson limit: total variation distance between \
               empirical and limiting depth-k ball laws along a sequence of sizes. Writes local_convergence.csv \
               and the sampled limit law.",
        run: local_convergence,
    },
    Preset {
        name: "almostlocal",
        help: "The joint event that a single-root infection has died by time t after reaching distance R, \
               whose R-limit governs the metastable lower bound. Writes estimates.csv.",
        run: almostlocal,
    },
    Preset {
        name: "max-radius",
        help: "Largest radius of the augmented torus graph: empirical frequency of {max radius <= n / ln^q n} \
               over independent seeds against the closed form (1 - survival)^n. Writes max_radius.csv.",
        run: max_radius,
    },
];

pub fn preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// What a finished run wrote.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub out: PathBuf,
    pub files: Vec<PathBuf>,
    /// Whether some estimate had more censored trials than allowed.
    pub censoring_overrun: bool,
}

impl ExperimentReport {
    pub fn exit_code(&self) -> i32 {
        if self.censoring_overrun {
            2
        } else {
            0
        }
    }
}

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    pool: &'a TrialPool,
    records: Vec<EstimateRecord>,
    tables: Vec<(String, Vec<u8>)>,
    max_censored: f64,
    overrun: bool,
}

impl Ctx<'_> {
    fn seed(&self, tag: u64) -> u64 {
        splitmix(self.cfg.seed ^ splitmix(tag))
    }

    fn trials(&self, default: usize) -> usize {
        self.cfg.run.trials.unwrap_or(default)
    }

    fn samples(&self, default: usize) -> usize {
        self.cfg.run.samples.unwrap_or(default)
    }

    fn max_events(&self, default: u64) -> u64 {
        self.cfg.run.max_events.unwrap_or(default)
    }

    fn lambdas(&self, default: &[f64]) -> Vec<f64> {
        self.cfg.run.lambdas.clone().unwrap_or_else(|| default.to_vec())
    }

    fn graph_spec(&self, default: GraphSpec) -> GraphSpec {
        self.cfg.graph.clone().unwrap_or(default)
    }

    fn check(&mut self, e: &Estimate) {
        if e.n_samples > 0 && e.n_censored as f64 > self.max_censored * e.n_samples as f64 {
            self.overrun = true;
        }
    }

    fn record(&mut self, estimator: &str, params: serde_json::Value, estimate: Estimate, seed: u64) {
        self.check(&estimate);
        self.records.push(EstimateRecord::new(estimator, params, estimate, seed));
    }

    fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut body = Vec::new();
        write_table(header, rows, &mut body)?;
        self.tables.push((name.into(), body));
        Ok(())
    }
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs the configured preset and writes its artifacts under `out`
/// (created if missing).
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path, pool: &TrialPool) -> Result<ExperimentReport> {
    cfg.validate()?;
    let preset = preset(&cfg.preset).ok_or_else(|| ConfigError::Invalid(format!("unknown preset {:?}", cfg.preset)))?;
    let mut ctx = Ctx {
        cfg,
        pool,
        records: Vec::new(),
        tables: Vec::new(),
        max_censored: cfg.run.max_censored_fraction.unwrap_or(1.0),
        overrun: false,
    };
    (preset.run)(&mut ctx)?;
    if !ctx.records.is_empty() {
        let mut body = Vec::new();
        write_estimates(&ctx.records, &mut body)?;
        ctx.tables.push(("estimates.csv".into(), body));
    }

    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ExperimentError::Io { path, source }
    };
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let mut files = Vec::new();
    for (name, body) in &ctx.tables {
        let path = out.join(name);
        std::fs::write(&path, body).map_err(io_err(&path))?;
        files.push(path);
    }
    let created = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let manifest = json!({
        "preset": cfg.preset,
        "seed": cfg.seed,
        "threads": pool.threads(),
        "config": cfg,
        "config_toml": cfg.to_toml(),
        "versions": { "cp-lab": env!("CARGO_PKG_VERSION"), "cplab-core": cplab_core::VERSION },
        "created_unix": created,
        "files": ctx.tables.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        "censoring_overrun": ctx.overrun,
    });
    let path = out.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    std::fs::write(&path, text).map_err(io_err(&path))?;
    files.push(path);
    Ok(ExperimentReport { out: out.to_path_buf(), files, censoring_overrun: ctx.overrun })
}

/// Degree law of the local limit, for families that have one.
fn limit_law(spec: &GraphSpec) -> Result<Option<DegreeDistribution>> {
    Ok(match spec {
        GraphSpec::Configuration { degrees, .. } => Some(degrees.build()?),
        GraphSpec::Regular { d, .. } => Some(DegreeDistribution::point_mass(*d)),
        _ => None,
    })
}

fn poisson3(n: usize) -> GraphSpec {
    GraphSpec::Configuration { n, degrees: DegreeSpec::Poisson { mean: 3.0, cap: None }, giant: false }
}

fn sized(spec: &GraphSpec, sizes: &Option<Vec<usize>>, default: &[usize]) -> Result<Vec<GraphSpec>> {
    match sizes {
        None if default.is_empty() => Ok(vec![spec.clone()]),
        None => Ok(default.iter().filter_map(|&n| spec.with_n(n)).collect()),
        Some(list) => list
            .iter()
            .map(|&n| {
                spec.with_n(n)
                    .ok_or_else(|| ConfigError::Invalid("run.sizes needs a graph family with a size parameter".into()).into())
            })
            .collect(),
    }
}

fn subset(n: usize, rng: &mut SimRng) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.3)).collect()
}

fn contains_any(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|v| b.binary_search(v).is_ok())
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut u: Vec<usize> = a.iter().chain(b).copied().collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// A random instance for the pathwise checks: the configured graph or a
/// random graph on at most 20 vertices, a rate and a time.
fn random_instance(fixed: &Option<Graph>, lambdas: &Option<Vec<f64>>, i: usize, rng: &mut SimRng) -> (Graph, f64, f64) {
    let g = match fixed {
        Some(g) => g.clone(),
        None => {
            let n = rng.gen_range(2..=20);
            let p = rng.gen_range(0.1..0.5);
            generate_erdos_renyi(n, p, rng.gen()).expect("valid parameters")
        }
    };
    let lambda = match lambdas {
        Some(l) if !l.is_empty() => l[i % l.len()],
        _ => rng.gen_range(0.2..3.0),
    };
    let t = rng.gen_range(0.1..3.0);
    (g, lambda, t)
}

fn fixed_graph(ctx: &Ctx) -> Result<Option<Graph>> {
    ctx.cfg.graph.as_ref().map(|s| s.build(ctx.seed(0))).transpose().map_err(Into::into)
}

fn duality_check(ctx: &mut Ctx) -> Result<()> {
    let fixed = fixed_graph(ctx)?;
    let lambdas = ctx.cfg.run.lambdas.clone();
    let rows = ctx.pool.run(ctx.trials(1000), ctx.seed(1), |i, rng| {
        let (g, lambda, t) = random_instance(&fixed, &lambdas, i, rng);
        let a = subset(g.n(), rng);
        let b = subset(g.n(), rng);
        let tl = sample_timeline(&g, lambda, t, rng);
        let forward = contains_any(&evolve(&g, &tl, &a, t), &b);
        let backward = contains_any(&evolve(&g, &reverse_timeline(&tl, t), &b, t), &a);
        vec![
            i.to_string(),
            g.n().to_string(),
            g.m().to_string(),
            lambda.to_string(),
            t.to_string(),
            a.len().to_string(),
            b.len().to_string(),
            forward.to_string(),
            backward.to_string(),
            (forward == backward).to_string(),
        ]
    });
    ctx.table(
        "duality.csv",
        &["instance", "n", "m", "lambda", "t", "size_a", "size_b", "forward_hit", "dual_hit", "pathwise_agree"],
        &rows,
    )
}

fn coupling_check(ctx: &mut Ctx) -> Result<()> {
    let fixed = fixed_graph(ctx)?;
    let lambdas = ctx.cfg.run.lambdas.clone();
    let rows = ctx.pool.run(ctx.trials(1000), ctx.seed(2), |i, rng| {
        let (g, lambda, t) = random_instance(&fixed, &lambdas, i, rng);
        let a = subset(g.n(), rng);
        let b = subset(g.n(), rng);
        let s = rng.gen_range(0.0..t);
        let tl = sample_timeline(&g, lambda, t, rng);
        let ea = evolve(&g, &tl, &a, t);
        let eb = evolve(&g, &tl, &b, t);
        let ab = union(&a, &b);
        let eab = evolve(&g, &tl, &ab, t);
        let attractive = is_subset(&ea, &eab) && is_subset(&eb, &eab);
        let additive = eab == union(&ea, &eb);
        let mid = evolve(&g, &tl, &a, s);
        let flow = evolve(&g, &tl.shifted(s), &mid, t - s) == ea;
        let ratio = rng.gen_range(0.0..=1.0);
        let thin = thin_timeline(&tl, ratio, rng);
        let thinning = is_subset(&evolve(&g, &thin, &a, t), &ea);
        vec![
            i.to_string(),
            g.n().to_string(),
            lambda.to_string(),
            t.to_string(),
            s.to_string(),
            ratio.to_string(),
            attractive.to_string(),
            additive.to_string(),
            flow.to_string(),
            thinning.to_string(),
        ]
    });
    ctx.table(
        "coupling.csv",
        &["instance", "n", "lambda", "t", "s", "thin_ratio", "attractive", "additive", "flow", "thinning"],
        &rows,
    )
}

fn metastable_upper(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.graph_spec(poisson3(1000));
    let g = spec.build(ctx.seed(0))?;
    let law = limit_law(&spec)?;
    let times = ctx.cfg.run.times.clone().unwrap_or_else(|| vec![(g.n() as f64).ln()]);
    let radius = ctx.cfg.run.radii.as_ref().and_then(|r| r.first().copied()).unwrap_or(4);
    let trials = ctx.trials(20);
    let samples = ctx.samples(2000);
    let max_events = ctx.max_events(100_000_000);
    let mut rows = Vec::new();
    for (li, lambda) in ctx.lambdas(&[0.3, 0.8]).into_iter().enumerate() {
        let seed = ctx.seed(100 + li as u64);
        let density = estimate_density(&g, lambda, &times, trials, max_events, seed, ctx.pool);
        let eta = law.as_ref().map(|mu| {
            let seed = ctx.seed(200 + li as u64);
            (estimate_eta_geq_r(mu, lambda, radius, samples, Budget::events(max_events), seed, ctx.pool), seed)
        });
        if let Some((e, seed)) = &eta {
            ctx.record("eta_geq_r", json!({ "lambda": lambda, "R": radius }), *e, *seed);
        }
        for (t, d) in density {
            ctx.record("density", json!({ "lambda": lambda, "t": t, "n": g.n() }), d, seed);
            let (eta_mean, eta_se, holds) = match &eta {
                Some((e, _)) => {
                    let bound = e.mean + 3.0 * (e.stderr.powi(2) + d.stderr.powi(2)).sqrt() + 0.05;
                    (e.mean.to_string(), e.stderr.to_string(), (d.mean <= bound).to_string())
                }
                None => (String::new(), String::new(), String::new()),
            };
            rows.push(vec![
                lambda.to_string(),
                t.to_string(),
                g.n().to_string(),
                d.mean.to_string(),
                d.stderr.to_string(),
                d.n_censored.to_string(),
                (-t).exp().to_string(),
                radius.to_string(),
                eta_mean,
                eta_se,
                holds,
            ]);
        }
    }
    ctx.table(
        "metastable.csv",
        &[
            "lambda",
            "t",
            "n",
            "density",
            "density_stderr",
            "n_censored",
            "pure_death",
            "R",
            "eta_geq_r",
            "eta_stderr",
            "bound_holds",
        ],
        &rows,
    )
}

fn slow_extinction(ctx: &mut Ctx) -> Result<()> {
    let (sizes, p) = match &ctx.cfg.graph {
        Some(GraphSpec::Spatial { n, p }) => (ctx.cfg.run.sizes.clone().unwrap_or(vec![*n]), *p),
        None => (ctx.cfg.run.sizes.clone().unwrap_or(vec![2000]), ctx.cfg.run.p.unwrap_or(1.5)),
        Some(_) => return Err(ConfigError::Invalid("slow-extinction needs the spatial graph family".into()).into()),
    };
    let law = RadiusLaw::new(p)?;
    let trials = ctx.trials(50);
    let budget = Budget::events(ctx.max_events(10_000_000));
    let mut rows = Vec::new();
    for (ni, &n) in sizes.iter().enumerate() {
        let spatial = generate_spatial_torus_graph(n, &law, ctx.seed(300 + ni as u64))?;
        let mean = spatial.mean_degree();
        let cap = (4.0 * mean + 40.0).ceil() as usize;
        let cm_spec = GraphSpec::Configuration { n, degrees: DegreeSpec::Poisson { mean, cap: Some(cap) }, giant: false };
        let cm = cm_spec.build(ctx.seed(400 + ni as u64))?;
        for (li, lambda) in ctx.lambdas(&[0.2]).into_iter().enumerate() {
            let tag = 1000 * ni as u64 + li as u64;
            let mut medians = Vec::new();
            let mut row = vec![n.to_string(), p.to_string(), lambda.to_string()];
            for (name, g, seed) in [("spatial", &spatial, ctx.seed(500 + tag)), ("configuration", &cm, ctx.seed(600 + tag))] {
                let all: Vec<usize> = (0..g.n()).collect();
                let sample = direct_extinction_sample(g, lambda, &all, trials, budget, seed, ctx.pool);
                ctx.record(
                    "extinction_time",
                    json!({ "graph": name, "n": n, "p": p, "lambda": lambda }),
                    sample.mean(),
                    seed,
                );
                medians.push(sample.median());
                row.extend([g.mean_degree().to_string(), sample.median().to_string(), sample.n_censored().to_string()]);
            }
            row.push((medians[0] / medians[1]).to_string());
            rows.push(row);
        }
    }
    ctx.table(
        "slow_extinction.csv",
        &[
            "n",
            "p",
            "lambda",
            "spatial_mean_degree",
            "spatial_median",
            "spatial_censored",
            "cm_mean_degree",
            "cm_median",
            "cm_censored",
            "median_ratio",
        ],
        &rows,
    )
}

fn star_survival(ctx: &mut Ctx) -> Result<()> {
    let ks = ctx.cfg.run.ks.clone().unwrap_or(vec![50, 100, 200, 400]);
    let trials = ctx.trials(200);
    let reps = ctx.cfg.run.replicates.unwrap_or(1000);
    let budget = Budget::events(ctx.max_events(1_000_000));
    let mut stars = Vec::new();
    let mut fits = Vec::new();
    for (li, lambda) in ctx.lambdas(&[0.5]).into_iter().enumerate() {
        let seed = ctx.seed(700 + li as u64);
        let fit = star_growth_fit(&ks, lambda, trials, budget, reps, 0.99, seed, ctx.pool);
        for s in &fit.stars {
            ctx.check(&s.estimate);
            stars.push(vec![
                lambda.to_string(),
                s.k.to_string(),
                s.median.to_string(),
                s.estimate.mean.to_string(),
                s.estimate.stderr.to_string(),
                s.log_mean.to_string(),
                s.estimate.n_samples.to_string(),
                s.estimate.n_censored.to_string(),
            ]);
        }
        fits.push(vec![
            lambda.to_string(),
            fit.slope.to_string(),
            fit.ci.0.to_string(),
            fit.ci.1.to_string(),
            fit.ci_level.to_string(),
            seed.to_string(),
        ]);
    }
    ctx.table("star.csv", &["lambda", "k", "median", "mean", "stderr", "log_mean", "n", "n_censored"], &stars)?;
    ctx.table("star_growth.csv", &["lambda", "slope", "ci_lo", "ci_hi", "ci_level", "seed"], &fits)
}

fn sparsity(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.graph_spec(GraphSpec::Spatial { n: 2000, p: 1.5 });
    let g = spec.build(ctx.seed(0))?;
    let eps = ctx.cfg.run.eps.clone().unwrap_or(vec![0.01, 0.05, 0.1]);
    let rows: Vec<Vec<String>> =
        eps.iter().map(|&e| vec![g.n().to_string(), e.to_string(), top_eps_degree_sum(&g, e).to_string()]).collect();
    ctx.table("sparsity.csv", &["n", "eps", "top_eps_degree_sum"], &rows)?;
    let horizon = ctx.cfg.run.times.as_ref().and_then(|t| t.last().copied()).unwrap_or(10.0);
    let trials = ctx.trials(20);
    let max_events = ctx.max_events(10_000_000);
    for (li, lambda) in ctx.lambdas(&[0.2]).into_iter().enumerate() {
        for (ei, &e) in eps.iter().enumerate() {
            let seed = ctx.seed(800 + 100 * li as u64 + ei as u64);
            let est = estimate_low_density_fraction(&g, lambda, e, horizon, trials, max_events, seed, ctx.pool);
            ctx.record("low_density_fraction", json!({ "lambda": lambda, "eps": e, "T": horizon, "n": g.n() }), est, seed);
        }
    }
    Ok(())
}

fn tightness(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.graph_spec(GraphSpec::Cycle { n: 1000 });
    let specs = sized(&spec, &ctx.cfg.run.sizes, &[1000, 10_000])?;
    let graphs = specs.iter().enumerate().map(|(i, s)| s.build(ctx.seed(900 + i as u64))).collect::<Result<Vec<_>, _>>()?;
    let levels = ctx.cfg.run.quantiles.clone().unwrap_or(vec![0.5, 0.9, 0.99]);
    let trials = ctx.trials(1000);
    let budget = Budget::events(ctx.max_events(10_000_000));
    let mut rows = Vec::new();
    for (li, lambda) in ctx.lambdas(&[0.1]).into_iter().enumerate() {
        let seed = ctx.seed(1000 + li as u64);
        for r in tightness_diagnostic(&graphs, lambda, &levels, trials, budget, seed, ctx.pool) {
            if r.n_censored as f64 > ctx.max_censored * trials as f64 {
                ctx.overrun = true;
            }
            rows.push(vec![
                lambda.to_string(),
                r.graph_index.to_string(),
                r.n.to_string(),
                r.level.to_string(),
                r.quantile.to_string(),
                r.stderr.to_string(),
                trials.to_string(),
                r.n_censored.to_string(),
            ]);
        }
    }
    ctx.table("tightness.csv", &["lambda", "graph", "n", "level", "quantile", "stderr", "trials", "n_censored"], &rows)
}

fn lln(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.graph_spec(poisson3(1000));
    let law = limit_law(&spec)?
        .ok_or_else(|| ConfigError::Invalid("lln needs a configuration or regular graph family".into()))?;
    let specs = sized(&spec, &ctx.cfg.run.sizes, &[])?;
    let replicates = ctx.cfg.run.replicates.unwrap_or(5);
    let radius = ctx.cfg.run.radii.as_ref().and_then(|r| r.first().copied()).unwrap_or(2);
    let tpv = ctx.trials(1);
    let samples = ctx.samples(4000);
    let budget = Budget::events(ctx.max_events(10_000_000));
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (li, lambda) in ctx.lambdas(&[0.5]).into_iter().enumerate() {
        let eta_seed = ctx.seed(1100 + li as u64);
        let eta = estimate_eta_geq_r(&law, lambda, radius, samples, budget, eta_seed, ctx.pool);
        ctx.record("eta_geq_r", json!({ "lambda": lambda, "R": radius }), eta, eta_seed);
        for (si, s) in specs.iter().enumerate() {
            let mut means = Vec::new();
            for rep in 0..replicates {
                let tag = 10_000 * li as u64 + 100 * si as u64 + rep as u64;
                let g = s.build(ctx.seed(1200 + tag))?;
                let seed = ctx.seed(1300 + tag);
                let z = estimate_z_geq_r(&g, lambda, radius, tpv, VertexSample::All, budget, seed, ctx.pool);
                ctx.check(&z.estimate);
                rows.push(vec![
                    lambda.to_string(),
                    g.n().to_string(),
                    rep.to_string(),
                    z.estimate.mean.to_string(),
                    z.estimate.stderr.to_string(),
                    z.estimate.n_censored.to_string(),
                ]);
                means.push((g.n(), z.estimate.mean));
            }
            let values: Vec<f64> = means.iter().map(|m| m.1).collect();
            let pooled = Estimate::mean(&values, 0, crate::stats::DEFAULT_LEVEL);
            summary.push(vec![
                lambda.to_string(),
                means.first().map_or(0, |m| m.0).to_string(),
                replicates.to_string(),
                pooled.mean.to_string(),
                pooled.stderr.to_string(),
                sample_variance(&values).to_string(),
                eta.mean.to_string(),
                eta.stderr.to_string(),
            ]);
        }
    }
    ctx.table("lln.csv", &["lambda", "n", "replicate", "z_over_n", "stderr", "n_censored"], &rows)?;
    ctx.table(
        "lln_variance.csv",
        &["lambda", "n", "graphs", "z_over_n_mean", "z_over_n_stderr", "variance", "eta_geq_r", "eta_stderr"],
        &summary,
    )
}

fn local_convergence(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.graph_spec(GraphSpec::Regular { n: 100, d: 3 });
    let law = limit_law(&spec)?
        .ok_or_else(|| ConfigError::Invalid("local-convergence needs a configuration or regular graph family".into()))?;
    let specs = sized(&spec, &ctx.cfg.run.sizes, &[100, 1000, 10_000])?;
    let depth = ctx.cfg.run.depth.unwrap_or(2);
    let sampler = UbgwSampler::new(law);
    let limit = limit_ball_distribution(&sampler, depth, ctx.samples(2000), &mut seeded(ctx.seed(1400)));
    let mut rows = Vec::new();
    let mut prev = f64::INFINITY;
    for (i, s) in specs.iter().enumerate() {
        let g = s.build(ctx.seed(1500 + i as u64))?;
        let tv = tv_distance(&empirical_ball_distribution(&g, depth), &limit)?;
        rows.push(vec![g.n().to_string(), depth.to_string(), tv.to_string(), (tv <= prev).to_string()]);
        prev = tv;
    }
    ctx.table("local_convergence.csv", &["n", "depth", "tv", "nonincreasing"], &rows)?;
    let mut body = Vec::new();
    write_ball_distribution(&limit, &mut body)?;
    ctx.tables.push((format!("limit_balls_depth{depth}.csv"), body));
    Ok(())
}

fn almostlocal(ctx: &mut Ctx) -> Result<()> {
    let spec = ctx.graph_spec(poisson3(1000));
    let g = spec.build(ctx.seed(0))?;
    let times = ctx.cfg.run.times.clone().unwrap_or(vec![5.0]);
    let radii = ctx.cfg.run.radii.clone().unwrap_or(vec![0, 1, 2, 3]);
    let trials = ctx.trials(1000);
    let max_events = ctx.max_events(10_000_000);
    for (li, lambda) in ctx.lambdas(&[0.5]).into_iter().enumerate() {
        for (ti, &t) in times.iter().enumerate() {
            let seed = ctx.seed(1600 + 100 * li as u64 + ti as u64);
            for (r, est) in almostlocal_diagnostic(&g, lambda, t, &radii, trials, max_events, seed, ctx.pool) {
                ctx.record("almostlocal", json!({ "lambda": lambda, "t": t, "R": r, "n": g.n() }), est, seed);
            }
        }
    }
    Ok(())
}

/// Indices `[lo, hi]` holding the central `level` mass of `Binomial(n, p)`.
pub fn binomial_acceptance_region(n: usize, p: f64, level: f64) -> (u64, u64) {
    let dist = Binomial::new(p, n as u64).expect("valid binomial");
    let tail = (1.0 - level) / 2.0;
    let first = |target: f64| (0..=n as u64).find(|&k| dist.cdf(k) >= target).unwrap_or(n as u64);
    (first(tail), first(1.0 - tail))
}

fn max_radius(ctx: &mut Ctx) -> Result<()> {
    let sizes = ctx.cfg.run.sizes.clone().unwrap_or(vec![10_000]);
    let p = match &ctx.cfg.graph {
        Some(GraphSpec::Spatial { p, .. }) => *p,
        _ => ctx.cfg.run.p.unwrap_or(1.5),
    };
    let q = ctx.cfg.run.exponent.unwrap_or(1.6);
    let law = RadiusLaw::new(p)?;
    let trials = ctx.trials(200);
    let mut rows = Vec::new();
    for (ni, &n) in sizes.iter().enumerate() {
        let threshold = n as f64 / (n as f64).ln().powf(q);
        let base = ctx.seed(1700 + ni as u64);
        let maxima = ctx
            .pool
            .run(trials, base, |_, rng| spatial_torus_sample(n, &law, rng.gen()).map(|s| s.max_radius()));
        let maxima = maxima.into_iter().collect::<Result<Vec<_>, _>>()?;
        let hits = maxima.iter().filter(|&&r| r <= threshold).count();
        let closed = law.max_cdf(n, threshold);
        let (lo, hi) = binomial_acceptance_region(trials, closed, 0.99);
        rows.push(vec![
            n.to_string(),
            p.to_string(),
            q.to_string(),
            threshold.to_string(),
            closed.to_string(),
            hits.to_string(),
            trials.to_string(),
            (hits as f64 / trials as f64).to_string(),
            lo.to_string(),
            hi.to_string(),
            (lo as usize <= hits && hits <= hi as usize).to_string(),
        ]);
    }
    ctx.table(
        "max_radius.csv",
        &[
            "n",
            "p",
            "exponent",
            "threshold",
            "closed_form",
            "hits",
            "trials",
            "frequency",
            "region_lo",
            "region_hi",
            "within_99",
        ],
        &rows,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_names_are_unique() {
        let mut names: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), PRESETS.len());
    }

    #[test]
    fn binomial_region_brackets_the_mean() {
        let (lo, hi) = binomial_acceptance_region(200, 0.5, 0.99);
        assert!(lo < 100 && hi > 100);
        assert_eq!(binomial_acceptance_region(10, 0.0, 0.99), (0, 0));
        assert_eq!(binomial_acceptance_region(10, 1.0, 0.99), (10, 10));
    }

    #[test]
    fn splitmix_spreads_tags() {
        assert_ne!(splitmix(0), splitmix(1));
    }
}
