use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sqc_core::DiagRule;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the built-in default.
#[derive(Clone, Debug, Default, Args)]
pub struct RunArgs {
    /// Number of columns (n >= 3)
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of rows (m >= n + 1); defaults to n + 1
    #[arg(long)]
    pub m: Option<usize>,
    /// Weight of |X|^2 + |X|^4; chosen from the field moments when absent
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fraction of the admissible epsilon range used by the automatic choice
    #[arg(long)]
    pub safety: Option<f64>,
    /// Penalty weight on |X - PX|^2; searched for when absent
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random direction samples per convexity probe
    #[arg(long)]
    pub samples: Option<usize>,
    /// Local refinements per convexity probe
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Points on the coefficient sphere
    #[arg(long)]
    pub grid: Option<usize>,
    /// Angular radius (rad) of the excluded axis neighbourhoods
    #[arg(long)]
    pub exclusion: Option<f64>,
    /// Quadrature nodes per active torus axis
    #[arg(long)]
    pub nodes: Option<usize>,
    /// alpha1, alpha2, or a comma list of 1/2 with n - 3 entries
    #[arg(long = "diag-rule")]
    pub diag_rule: Option<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML or JSON file with the same keys as the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Keys accepted in a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    n: Option<usize>,
    m: Option<usize>,
    epsilon: Option<f64>,
    safety: Option<f64>,
    k: Option<f64>,
    seed: Option<u64>,
    samples: Option<usize>,
    restarts: Option<usize>,
    grid: Option<usize>,
    exclusion: Option<f64>,
    nodes: Option<usize>,
    #[serde(alias = "diag-rule")]
    diag_rule: Option<String>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl ConfigFile {
    fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        let parse_err = |message: String| ConfigError::Parse {
            path: path.to_owned(),
            message,
        };
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| parse_err(e.to_string()))
        }
    }
}

/// Fully resolved run parameters, echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub epsilon: Option<f64>,
    pub safety: f64,
    pub k: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub restarts: usize,
    pub grid_resolution: usize,
    pub exclusion_radius: f64,
    pub nodes_per_axis: usize,
    pub diag_rule: String,
    #[serde(skip)]
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 3,
            m: 4,
            epsilon: None,
            safety: 0.5,
            k: None,
            seed: 0,
            samples: 100_000,
            restarts: 32,
            grid_resolution: 4096,
            exclusion_radius: 0.1,
            nodes_per_axis: sqc_core::torus::DEFAULT_NODES,
            diag_rule: "alpha1".into(),
            output_path: None,
            format: Format::Json,
        }
    }
}

impl RunConfig {
    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(args: &RunArgs) -> Result<Self, ConfigError> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let d = RunConfig::default();
        let n = args.n.or(file.n).unwrap_or(d.n);
        let cfg = RunConfig {
            n,
            m: args.m.or(file.m).unwrap_or(n + 1),
            epsilon: args.epsilon.or(file.epsilon),
            safety: args.safety.or(file.safety).unwrap_or(d.safety),
            k: args.k.or(file.k),
            seed: args.seed.or(file.seed).unwrap_or(d.seed),
            samples: args.samples.or(file.samples).unwrap_or(d.samples),
            restarts: args.restarts.or(file.restarts).unwrap_or(d.restarts),
            grid_resolution: args.grid.or(file.grid).unwrap_or(d.grid_resolution),
            exclusion_radius: args.exclusion.or(file.exclusion).unwrap_or(d.exclusion_radius),
            nodes_per_axis: args.nodes.or(file.nodes).unwrap_or(d.nodes_per_axis),
            diag_rule: args
                .diag_rule
                .clone()
                .or(file.diag_rule)
                .unwrap_or(d.diag_rule),
            output_path: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.n < 3 {
            return bad(format!("n = {} but the construction needs n >= 3", self.n));
        }
        if self.m < self.n + 1 {
            return bad(format!("m = {} but m >= n + 1 = {} is required", self.m, self.n + 1));
        }
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return bad(format!("safety {} outside (0, 1)", self.safety));
        }
        if let Some(e) = self.epsilon {
            if !(e.is_finite() && e > 0.0) {
                return bad(format!("epsilon {e} must be positive"));
            }
        }
        if let Some(k) = self.k {
            if !(k.is_finite() && k >= 0.0) {
                return bad(format!("k {k} must be nonnegative"));
            }
        }
        if self.samples == 0 || self.restarts == 0 || self.nodes_per_axis == 0 {
            return bad("samples, restarts and nodes must be positive".into());
        }
        if self.grid_resolution < 16 {
            return bad(format!("grid {} < 16", self.grid_resolution));
        }
        if !(self.exclusion_radius > 0.0 && self.exclusion_radius < std::f64::consts::FRAC_PI_4) {
            return bad(format!("exclusion {} outside (0, pi/4)", self.exclusion_radius));
        }
        self.diag_rule()?;
        Ok(())
    }

    pub fn diag_rule(&self) -> Result<DiagRule, ConfigError> {
        let rule: DiagRule = self
            .diag_rule
            .parse()
            .map_err(|e: sqc_core::Error| ConfigError::Invalid(e.to_string()))?;
        if let DiagRule::Pattern(p) = &rule {
            if p.len() != self.n - 3 {
                return Err(ConfigError::Invalid(format!(
                    "diag-rule pattern has {} entries, n = {} needs {}",
                    p.len(),
                    self.n,
                    self.n - 3
                )));
            }
        }
        Ok(rule)
    }
}
