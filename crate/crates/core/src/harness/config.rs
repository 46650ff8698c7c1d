//! TOML run configuration.
//!
//! ```toml
//! seeds = [0, 1, 2]
//! output_dir = "out"
//! trace_format = "csv"
//!
//! [problem]
//! kind = "logistic_l1"
//! dim = 20
//! pool_size = 500
//!
//! [algorithm]
//! eta2 = 5e-5
//! delta_max = 1e10
//! max_iters = 300
//! ```
//!
//! Unknown keys anywhere are rejected. Every default is written back when a
//! run echoes its resolved configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::problems::{BoxBudgetQuadratic, LogisticL1, SmoothQuadratic, StochasticProblem};
use crate::{Error, Result, TrustRegionConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TraceFormat {
    #[default]
    Csv,
    Jsonl,
}

impl TraceFormat {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Jsonl => "jsonl",
        }
    }
}

/// Built-in problem selector and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    LogisticL1 {
        #[serde(default = "default_logistic_dim")]
        dim: usize,
        #[serde(default = "default_pool")]
        pool_size: usize,
        #[serde(default = "default_lambda")]
        lambda: f64,
        /// Seed of the synthetic pool, independent of the run seeds.
        #[serde(default)]
        seed: u64,
        /// Load the pool from a CSV file instead of generating it.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pool_csv: Option<PathBuf>,
    },
    SmoothQuadratic {
        #[serde(default = "default_quadratic_dim")]
        dim: usize,
        #[serde(default = "default_noise")]
        noise: f64,
        #[serde(default)]
        seed: u64,
    },
    BoxBudgetQuadratic {
        #[serde(default = "default_quadratic_dim")]
        dim: usize,
        #[serde(default)]
        seed: u64,
    },
}

fn default_logistic_dim() -> usize {
    20
}
fn default_pool() -> usize {
    500
}
fn default_lambda() -> f64 {
    1e-2
}
fn default_quadratic_dim() -> usize {
    5
}
fn default_noise() -> f64 {
    0.1
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self::LogisticL1 {
            dim: default_logistic_dim(),
            pool_size: default_pool(),
            lambda: default_lambda(),
            seed: 0,
            pool_csv: None,
        }
    }
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Box<dyn StochasticProblem>> {
        Ok(match self {
            Self::LogisticL1 { dim, pool_size, lambda, seed, pool_csv } => match pool_csv {
                Some(path) => Box::new(LogisticL1::read_pool_csv(path, *lambda)?),
                None => {
                    if *dim == 0 || *pool_size < 2 {
                        return Err(Error::Config("logistic_l1 needs dim ≥ 1 and pool_size ≥ 2".into()));
                    }
                    Box::new(LogisticL1::new(*dim, *pool_size, *lambda, *seed))
                }
            },
            Self::SmoothQuadratic { dim, noise, seed } => {
                if *dim == 0 || !(*noise >= 0.0) {
                    return Err(Error::Config("smooth_quadratic needs dim ≥ 1 and noise ≥ 0".into()));
                }
                Box::new(SmoothQuadratic::new(*dim, *noise, *seed))
            }
            Self::BoxBudgetQuadratic { dim, seed } => {
                if *dim < 2 {
                    return Err(Error::Config("box_budget_quadratic needs dim ≥ 2".into()));
                }
                Box::new(BoxBudgetQuadratic::new(*dim, *seed))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// One run per seed; each overrides `algorithm.seed`.
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub trace_format: TraceFormat,
    /// Threshold used for `T_ε` and the summability sums in reports.
    pub report_eps: f64,
    pub problem: ProblemSpec,
    pub algorithm: TrustRegionConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seeds: vec![0],
            output_dir: PathBuf::from("out"),
            trace_format: TraceFormat::Csv,
            report_eps: 1e-3,
            problem: ProblemSpec::default(),
            algorithm: TrustRegionConfig::table2(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.resolve()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Resolves derived parameters and validates everything.
    pub fn resolve(&mut self) -> Result<Vec<String>> {
        if self.seeds.is_empty() {
            return Err(Error::Config("seeds must not be empty".into()));
        }
        if !(self.report_eps > 0.0) {
            return Err(Error::Config(format!("report_eps must be positive, got {}", self.report_eps)));
        }
        self.algorithm.resolve()?;
        self.algorithm.validate()
    }

    /// The configuration with every default spelled out.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Algorithm parameters for one seed.
    pub fn for_seed(&self, seed: u64) -> TrustRegionConfig {
        TrustRegionConfig { seed, ..self.algorithm.clone() }
    }
}
