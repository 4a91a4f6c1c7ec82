//! Experiment configuration (TOML). Parsing is strict: unknown keys,
//! missing seeds and non-positive counts are all errors.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cplab_core::graphs::{
    generate_configuration_model, generate_cycle, generate_empty, generate_erdos_renyi, generate_lattice_box,
    generate_random_regular, generate_spatial_torus_graph, generate_star, giant_component, DegreeDistribution,
    RadiusLaw, DEFAULT_SUPPORT_CAP,
};
use cplab_core::Graph;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("cannot build graph: {0}")]
    Graph(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DegreeSpec {
    Poisson { mean: f64, cap: Option<usize> },
    Fixed { k: usize },
    Pmf { p: Vec<f64> },
}

impl DegreeSpec {
    pub fn build(&self) -> Result<DegreeDistribution, ConfigError> {
        match self {
            DegreeSpec::Poisson { mean, cap } => DegreeDistribution::poisson(*mean, cap.unwrap_or(DEFAULT_SUPPORT_CAP)),
            DegreeSpec::Fixed { k } => Ok(DegreeDistribution::point_mass(*k)),
            DegreeSpec::Pmf { p } => DegreeDistribution::from_pmf(p.clone()),
        }
        .map_err(|e| ConfigError::Graph(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Configuration {
        n: usize,
        degrees: DegreeSpec,
        #[serde(default)]
        giant: bool,
    },
    Regular { n: usize, d: usize },
    Star { k: usize },
    Cycle { n: usize },
    Lattice { dim: usize, side: usize },
    Spatial { n: usize, p: f64 },
    ErdosRenyi { n: usize, p: f64 },
    Empty { n: usize },
    File { path: PathBuf },
}

impl GraphSpec {
    /// The same family at another size; `None` for sizeless families.
    pub fn with_n(&self, size: usize) -> Option<GraphSpec> {
        let mut s = self.clone();
        match &mut s {
            GraphSpec::Configuration { n, .. }
            | GraphSpec::Regular { n, .. }
            | GraphSpec::Cycle { n }
            | GraphSpec::Spatial { n, .. }
            | GraphSpec::ErdosRenyi { n, .. }
            | GraphSpec::Empty { n } => *n = size,
            GraphSpec::Star { k } => *k = size.saturating_sub(1),
            GraphSpec::Lattice { .. } | GraphSpec::File { .. } => return None,
        }
        Some(s)
    }

    pub fn build(&self, seed: u64) -> Result<Graph, ConfigError> {
        let g = |r: cplab_core::Result<Graph>| r.map_err(|e| ConfigError::Graph(e.to_string()));
        match self {
            GraphSpec::Configuration { n, degrees, giant } => {
                let g = g(generate_configuration_model(*n, &degrees.build()?, seed))?;
                if *giant {
                    Ok(giant_component(&g).map_err(|e| ConfigError::Graph(e.to_string()))?.0)
                } else {
                    Ok(g)
                }
            }
            GraphSpec::Regular { n, d } => g(generate_random_regular(*n, *d, seed)),
            GraphSpec::Star { k } => Ok(generate_star(*k)),
            GraphSpec::Cycle { n } => g(generate_cycle(*n)),
            GraphSpec::Lattice { dim, side } => g(generate_lattice_box(*dim, *side)),
            GraphSpec::Spatial { n, p } => {
                let law = RadiusLaw::new(*p).map_err(|e| ConfigError::Graph(e.to_string()))?;
                g(generate_spatial_torus_graph(*n, &law, seed))
            }
            GraphSpec::ErdosRenyi { n, p } => g(generate_erdos_renyi(*n, *p, seed)),
            GraphSpec::Empty { n } => Ok(generate_empty(*n)),
            GraphSpec::File { path } => {
                let f = std::fs::File::open(path).map_err(|e| ConfigError::Graph(format!("{}: {e}", path.display())))?;
                crate::io::read_edge_list(std::io::BufReader::new(f)).map_err(|e| ConfigError::Graph(e.to_string()))
            }
        }
    }
}

/// Grids, counts and budgets. Every field is optional; presets fill in
/// their own defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub lambdas: Option<Vec<f64>>,
    pub times: Option<Vec<f64>>,
    pub radii: Option<Vec<usize>>,
    pub sizes: Option<Vec<usize>>,
    pub ks: Option<Vec<usize>>,
    pub eps: Option<Vec<f64>>,
    pub quantiles: Option<Vec<f64>>,
    pub trials: Option<usize>,
    pub samples: Option<usize>,
    pub replicates: Option<usize>,
    pub depth: Option<usize>,
    pub p: Option<f64>,
    /// Exponent `q` of the max-radius threshold `n / ln^q n`.
    pub exponent: Option<f64>,
    pub max_events: Option<u64>,
    /// Largest tolerated fraction of censored trials in any estimate before
    /// the run exits with status 2. Defaults to 1 (no limit).
    pub max_censored_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub preset: String,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub graph: Option<GraphSpec>,
    #[serde(default)]
    pub run: RunSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let r = &self.run;
        for (name, v) in [("trials", r.trials), ("samples", r.samples), ("replicates", r.replicates)] {
            if v == Some(0) {
                return Err(invalid(format!("run.{name} must be positive")));
            }
        }
        if r.max_events == Some(0) {
            return Err(invalid("run.max_events must be positive"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads must be positive"));
        }
        if let Some(f) = r.max_censored_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(invalid("run.max_censored_fraction must lie in [0, 1]"));
            }
        }
        if r.lambdas.as_ref().is_some_and(|l| l.iter().any(|x| !(*x >= 0.0 && x.is_finite()))) {
            return Err(invalid("run.lambdas must be finite and non-negative"));
        }
        if r.times.as_ref().is_some_and(|l| l.iter().any(|x| !(*x >= 0.0 && x.is_finite()))) {
            return Err(invalid("run.times must be finite and non-negative"));
        }
        if r.eps.as_ref().is_some_and(|l| l.iter().any(|x| !(*x > 0.0 && *x <= 1.0))) {
            return Err(invalid("run.eps entries must lie in (0, 1]"));
        }
        if r.quantiles.as_ref().is_some_and(|l| l.iter().any(|x| !(*x >= 0.0 && *x <= 1.0))) {
            return Err(invalid("run.quantiles must lie in [0, 1]"));
        }
        for (name, list) in [("sizes", &r.sizes), ("ks", &r.ks)] {
            if list.as_ref().is_some_and(|l| l.is_empty() || l.contains(&0)) {
                return Err(invalid(format!("run.{name} must be non-empty and positive")));
            }
        }
        if !crate::experiment::PRESETS.iter().any(|p| p.name == self.preset) {
            return Err(invalid(format!("unknown preset {:?}", self.preset)));
        }
        Ok(())
    }
}
