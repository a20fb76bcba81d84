use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use tongue_atlas_core::tracer::TracerConfig;
use tongue_atlas_core::FinderConfig;

use crate::Usage;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

/// Everything a run needs. Keys match the command-line flags; flags given
/// on the command line override values from a `--config` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    pub grid_points: usize,
    pub root_tol: f64,
    pub match_tol: f64,
    pub max_iter: usize,
    pub boundary_tol: f64,
    pub border_tol: f64,
    #[serde(alias = "format")]
    pub output_format: OutputFormat,
    #[serde(alias = "out", skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_omega: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_seeds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line_j: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_j: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let f = FinderConfig::default();
        let t = TracerConfig::default();
        Self {
            grid_points: f.grid_points,
            root_tol: f.root_tol,
            match_tol: f.match_tol,
            max_iter: f.max_iter,
            boundary_tol: t.boundary_tol,
            border_tol: t.border_tol,
            output_format: OutputFormat::default(),
            output_path: None,
            p: None,
            j: None,
            k: None,
            omega: None,
            k_min: None,
            k_max: None,
            n_k: None,
            omega_min: None,
            omega_max: None,
            n_omega: None,
            step: None,
            p_max: None,
            n_seeds: None,
            n_iters: None,
            n_max: None,
            case: None,
            line_j: None,
            seed_k: None,
            seed_theta: None,
            seed_j: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg = serde_json::from_str(&text)
            .map_err(|e| Usage(format!("invalid config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    pub fn finder(&self) -> FinderConfig {
        FinderConfig {
            grid_points: self.grid_points,
            root_tol: self.root_tol,
            match_tol: self.match_tol,
            max_iter: self.max_iter,
        }
    }

    pub fn tracer(&self) -> TracerConfig {
        TracerConfig {
            finder: self.finder(),
            boundary_tol: self.boundary_tol,
            border_tol: self.border_tol,
            ..TracerConfig::default()
        }
    }

    /// The config as echoed into JSON output: without the output path, so
    /// the same run written to two places gives identical files.
    pub fn echo(&self) -> serde_json::Value {
        let mut c = self.clone();
        c.output_path = None;
        serde_json::to_value(c).expect("config serializes")
    }
}

/// A required parameter, or a validation error naming its flag.
pub fn need<T: Copy>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| Usage(format!("missing --{flag} (flag or config key)")).into())
}
