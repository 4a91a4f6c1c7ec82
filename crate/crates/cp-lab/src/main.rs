use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde_json::json;

use cp_lab::config::{DegreeSpec, ExperimentConfig, GraphSpec};
use cp_lab::estimators::{
    almostlocal_diagnostic, estimate_density, estimate_eta_geq_r, estimate_low_density_fraction,
    estimate_star_extinction, estimate_z_geq_r, star_growth_fit, tightness_diagnostic, VertexSample,
};
use cp_lab::experiment::{run_experiment, PRESETS};
use cp_lab::io::{read_edge_list, write_ball_distribution, write_edge_list, write_estimates, write_table, write_trajectories, EstimateRecord};
use cp_lab::pool::{TrialPool, THREADS_ENV};
use cplab_core::contact_process::{run_direct, Budget, RunOptions};
use cplab_core::graphs::DegreeDistribution;
use cplab_core::local_convergence::{empirical_ball_distribution, limit_ball_distribution, UbgwSampler};
use cplab_core::rng::seeded;
use cplab_core::Graph;

/// Contact-process experiments on sparse random graphs.
#[derive(Parser)]
#[command(name = "cp-lab", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the configuration).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output path: a directory for `experiment`, a file otherwise (default stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for trials.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write it as an edge list.
    Gen(GraphArgs),
    /// Run the direct engine on an edge-list graph and write one trajectory row per trial.
    Sim(SimArgs),
    /// Run a named estimator and write CSV rows.
    Estimate(EstimateArgs),
    /// Run a preset experiment from a configuration file.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// configuration, regular, star, cycle, lattice, spatial, erdos-renyi or empty.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of star leaves.
    #[arg(long)]
    k: Option<usize>,
    /// Degree of a random regular graph.
    #[arg(long)]
    d: Option<usize>,
    /// Edge probability (erdos-renyi) or radius exponent (spatial).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    side: Option<usize>,
    /// Poisson mean of the configuration-model degree law.
    #[arg(long)]
    mean: Option<f64>,
    /// Explicit degree pmf `p0,p1,...` for the configuration model.
    #[arg(long, value_delimiter = ',')]
    pmf: Option<Vec<f64>>,
    /// Keep only the giant component.
    #[arg(long)]
    giant: bool,
}

#[derive(Args)]
struct SimArgs {
    /// Edge-list file.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    lambda: f64,
    /// `all` or a comma-separated vertex list.
    #[arg(long, default_value = "all")]
    initial: String,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = f64::INFINITY)]
    horizon: f64,
    #[arg(long, default_value_t = u64::MAX)]
    max_events: u64,
    /// Radii whose first-passage times are reported.
    #[arg(long, value_delimiter = ',')]
    radii: Vec<usize>,
    /// Density threshold for the low-density occupation fraction.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args)]
struct EstimateArgs {
    /// eta, z, density, star, star-growth, tightness, almostlocal, low-density or balls.
    name: String,
    /// Edge-list file (repeat for tightness).
    #[arg(long)]
    graph: Vec<PathBuf>,
    /// Limit degree law: Poisson mean.
    #[arg(long)]
    mean: Option<f64>,
    /// Limit degree law: point mass at `d`.
    #[arg(long)]
    d: Option<usize>,
    /// Limit degree law: explicit pmf.
    #[arg(long, value_delimiter = ',')]
    pmf: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 1)]
    radius: usize,
    #[arg(long, value_delimiter = ',')]
    radii: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    times: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.9,0.99")]
    levels: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 10_000_000)]
    max_events: u64,
    #[arg(long, default_value_t = 1000)]
    replicates: usize,
}

#[derive(Args)]
struct ExperimentArgs {
    /// List the presets and exit.
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let presets: String = PRESETS.iter().map(|p| format!("  {}\n      {}\n", p.name, p.help)).collect();
    let cmd = Cli::command().mut_subcommand("experiment", |c| c.after_long_help(format!("Presets:\n{presets}")));
    let cli = match Cli::from_arg_matches(&cmd.get_matches()) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn pool(cli: &Cli) -> TrialPool {
    cli.threads.map_or_else(TrialPool::from_env, TrialPool::new)
}

fn output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_graph(path: &Path) -> anyhow::Result<Graph> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_edge_list(BufReader::new(f)).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Gen(args) => gen(&cli, args),
        Command::Sim(args) => sim(&cli, args),
        Command::Estimate(args) => estimate(&cli, args),
        Command::Experiment(args) => experiment(&cli, args),
    }
}

fn graph_spec(args: &GraphArgs) -> anyhow::Result<GraphSpec> {
    let family = args.family.as_deref().context("--family is required without --config")?;
    let need = |v: Option<usize>, flag: &str| v.with_context(|| format!("--family {family} needs --{flag}"));
    let needf = |v: Option<f64>, flag: &str| v.with_context(|| format!("--family {family} needs --{flag}"));
    Ok(match family {
        "configuration" => {
            let degrees = match (&args.pmf, args.mean, args.d) {
                (Some(p), _, _) => DegreeSpec::Pmf { p: p.clone() },
                (None, Some(mean), _) => DegreeSpec::Poisson { mean, cap: None },
                (None, None, Some(k)) => DegreeSpec::Fixed { k },
                _ => bail!("--family configuration needs --mean, --pmf or --d"),
            };
            GraphSpec::Configuration { n: need(args.n, "n")?, degrees, giant: args.giant }
        }
        "regular" => GraphSpec::Regular { n: need(args.n, "n")?, d: need(args.d, "d")? },
        "star" => GraphSpec::Star { k: need(args.k, "k")? },
        "cycle" => GraphSpec::Cycle { n: need(args.n, "n")? },
        "lattice" => GraphSpec::Lattice { dim: need(args.dim, "dim")?, side: need(args.side, "side")? },
        "spatial" => GraphSpec::Spatial { n: need(args.n, "n")?, p: needf(args.p, "p")? },
        "erdos-renyi" => GraphSpec::ErdosRenyi { n: need(args.n, "n")?, p: needf(args.p, "p")? },
        "empty" => GraphSpec::Empty { n: need(args.n, "n")? },
        other => bail!("unknown graph family {other:?}"),
    })
}

fn load_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    Ok(ExperimentConfig::load(path)?)
}

fn gen(cli: &Cli, args: &GraphArgs) -> anyhow::Result<u8> {
    let (spec, seed) = match &cli.config {
        Some(path) => {
            let cfg = load_config(path)?;
            (cfg.graph.context("configuration has no [graph] section")?, cli.seed.unwrap_or(cfg.seed))
        }
        None => (graph_spec(args)?, cli.seed.unwrap_or(0)),
    };
    let g = spec.build(seed)?;
    let mut w = output(cli.out.as_deref())?;
    write_edge_list(&g, &mut w)?;
    w.flush()?;
    Ok(0)
}

fn sim(cli: &Cli, args: &SimArgs) -> anyhow::Result<u8> {
    let g = load_graph(&args.graph)?;
    let initial: Vec<usize> = if args.initial == "all" {
        (0..g.n()).collect()
    } else {
        let mut v = args
            .initial
            .split(',')
            .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad vertex {s:?} in --initial")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        if let Some(&bad) = v.iter().find(|&&x| x >= g.n()) {
            bail!("initial vertex {bad} out of range for n = {}", g.n());
        }
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut opts = RunOptions::new(Budget { horizon: args.horizon, max_events: args.max_events });
    opts.radii = args.radii.clone();
    opts.eps_density = args.eps;
    let seed = cli.seed.unwrap_or(0);
    let runs = pool(cli).run(args.trials, seed, |_, rng| run_direct(&g, args.lambda, &initial, &opts, rng));
    let mut w = output(cli.out.as_deref())?;
    write_trajectories(&args.radii, &runs, &mut w)?;
    w.flush()?;
    Ok(0)
}

fn degree_law(args: &EstimateArgs) -> anyhow::Result<DegreeDistribution> {
    Ok(match (&args.pmf, args.mean, args.d) {
        (Some(p), _, _) => DegreeDistribution::from_pmf(p.clone())?,
        (None, Some(mean), _) => DegreeDistribution::poisson(mean, cplab_core::graphs::DEFAULT_SUPPORT_CAP)?,
        (None, None, Some(d)) => DegreeDistribution::point_mass(d),
        _ => bail!("this estimator needs a degree law: --mean, --pmf or --d"),
    })
}

fn single_graph(args: &EstimateArgs) -> anyhow::Result<Graph> {
    match args.graph.as_slice() {
        [path] => load_graph(path),
        _ => bail!("estimator {:?} needs exactly one --graph", args.name),
    }
}

fn estimate(cli: &Cli, args: &EstimateArgs) -> anyhow::Result<u8> {
    let seed = cli.seed.unwrap_or(0);
    let pool = pool(cli);
    let budget = Budget::events(args.max_events);
    let lambda = args.lambda;
    let mut records = Vec::new();
    let mut w = output(cli.out.as_deref())?;
    match args.name.as_str() {
        "eta" => {
            let mu = degree_law(args)?;
            let e = estimate_eta_geq_r(&mu, lambda, args.radius, args.samples, budget, seed, &pool);
            records.push(EstimateRecord::new("eta_geq_r", json!({ "lambda": lambda, "R": args.radius }), e, seed));
        }
        "z" => {
            let g = single_graph(args)?;
            let z = estimate_z_geq_r(&g, lambda, args.radius, args.trials, VertexSample::All, budget, seed, &pool);
            records.push(EstimateRecord::new("z_geq_r", json!({ "lambda": lambda, "R": args.radius }), z.estimate, seed));
        }
        "density" => {
            let g = single_graph(args)?;
            if args.times.is_empty() {
                bail!("density needs --times");
            }
            for (t, e) in estimate_density(&g, lambda, &args.times, args.trials, args.max_events, seed, &pool) {
                records.push(EstimateRecord::new("density", json!({ "lambda": lambda, "t": t }), e, seed));
            }
        }
        "star" => {
            if args.k.is_empty() {
                bail!("star needs --k");
            }
            for (i, &k) in args.k.iter().enumerate() {
                let s = seed.wrapping_add(i as u64);
                let st = estimate_star_extinction(k, lambda, args.trials, budget, s, &pool);
                records.push(EstimateRecord::new("star_extinction", json!({ "lambda": lambda, "k": k }), st.estimate, s));
            }
        }
        "star-growth" => {
            if args.k.len() < 2 {
                bail!("star-growth needs at least two values of --k");
            }
            let fit = star_growth_fit(&args.k, lambda, args.trials, budget, args.replicates, 0.99, seed, &pool);
            let row = vec![
                lambda.to_string(),
                fit.slope.to_string(),
                fit.ci.0.to_string(),
                fit.ci.1.to_string(),
                fit.ci_level.to_string(),
                seed.to_string(),
            ];
            write_table(&["lambda", "slope", "ci_lo", "ci_hi", "ci_level", "seed"], &[row], &mut w)?;
            w.flush()?;
            return Ok(0);
        }
        "tightness" => {
            if args.graph.len() < 2 {
                bail!("tightness needs at least two --graph files");
            }
            let graphs = args.graph.iter().map(|p| load_graph(p)).collect::<anyhow::Result<Vec<_>>>()?;
            let rows: Vec<Vec<String>> = tightness_diagnostic(&graphs, lambda, &args.levels, args.trials, budget, seed, &pool)
                .into_iter()
                .map(|r| {
                    vec![
                        r.graph_index.to_string(),
                        r.n.to_string(),
                        r.level.to_string(),
                        r.quantile.to_string(),
                        r.stderr.to_string(),
                        r.n_censored.to_string(),
                    ]
                })
                .collect();
            write_table(&["graph", "n", "level", "quantile", "stderr", "n_censored"], &rows, &mut w)?;
            w.flush()?;
            return Ok(0);
        }
        "almostlocal" => {
            let g = single_graph(args)?;
            let t = *args.times.first().context("almostlocal needs --times")?;
            let radii = if args.radii.is_empty() { vec![args.radius] } else { args.radii.clone() };
            for (r, e) in almostlocal_diagnostic(&g, lambda, t, &radii, args.trials, args.max_events, seed, &pool) {
                records.push(EstimateRecord::new("almostlocal", json!({ "lambda": lambda, "t": t, "R": r }), e, seed));
            }
        }
        "low-density" => {
            let g = single_graph(args)?;
            let horizon = *args.times.first().context("low-density needs --times")?;
            let e = estimate_low_density_fraction(&g, lambda, args.eps, horizon, args.trials, args.max_events, seed, &pool);
            records.push(EstimateRecord::new(
                "low_density_fraction",
                json!({ "lambda": lambda, "eps": args.eps, "T": horizon }),
                e,
                seed,
            ));
        }
        "balls" => {
            let dist = if args.graph.is_empty() {
                let sampler = UbgwSampler::new(degree_law(args)?);
                limit_ball_distribution(&sampler, args.depth, args.samples, &mut seeded(seed))
            } else {
                empirical_ball_distribution(&single_graph(args)?, args.depth)
            };
            write_ball_distribution(&dist, &mut w)?;
            w.flush()?;
            return Ok(0);
        }
        other => bail!("unknown estimator {other:?}"),
    }
    write_estimates(&records, &mut w)?;
    w.flush()?;
    Ok(0)
}

fn experiment(cli: &Cli, args: &ExperimentArgs) -> anyhow::Result<u8> {
    if args.list {
        for p in PRESETS {
            println!("{}\n    {}", p.name, p.help);
        }
        return Ok(0);
    }
    let path = cli.config.as_deref().context("experiment needs --config")?;
    let mut cfg = load_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = Some(threads);
    }
    cfg.validate()?;
    let out = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("cp-lab-out").join(&cfg.preset));
    let pool = cfg.threads.map_or_else(TrialPool::from_env, TrialPool::new);
    let report = run_experiment(&cfg, &out, &pool)?;
    if report.censoring_overrun {
        eprintln!("censored fraction exceeded run.max_censored_fraction; results written to {}", out.display());
    }
    Ok(report.exit_code() as u8)
}
