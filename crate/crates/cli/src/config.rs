use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use breaklab::{ContinuedFraction, MapSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Target {
    /// Leading partial quotients; the tail is all ones.
    #[serde(default = "ones")]
    pub quotients: Vec<u64>,
    pub depth: usize,
}

fn ones() -> Vec<u64> {
    vec![1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub maps: Vec<MapSpec>,
    pub target: Target,
    pub levels: [usize; 2],
    #[serde(default)]
    pub deltas: Vec<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_osc")]
    pub oscillation_l: Vec<usize>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    /// Partition CSV checked for coverage by `verify`, resolved against the config's directory.
    #[serde(default)]
    pub partition_fixture: Option<PathBuf>,
}

fn default_resolution() -> f64 {
    2e-3
}
fn default_precision() -> u32 {
    53
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_samples() -> usize {
    1000
}
fn default_osc() -> Vec<usize> {
    vec![2, 4, 6]
}
fn default_eps() -> Vec<f64> {
    vec![0.1, 0.25, 0.5]
}

/// `A..B`, inclusive at both ends.
pub fn parse_levels(s: &str) -> Result<[usize; 2]> {
    let (a, b) = s
        .split_once("..")
        .with_context(|| format!("levels `{s}` is not of the form A..B"))?;
    Ok([a.trim().parse()?, b.trim().parse()?])
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>)> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg: Self = serde_json::from_slice(&bytes)
            .with_context(|| format!("parsing {}", path.display()))?;
        if let (Some(f), Some(dir)) = (&cfg.partition_fixture, path.parent()) {
            cfg.partition_fixture = Some(dir.join(f));
        }
        Ok((cfg, bytes))
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.schema_version == SCHEMA_VERSION,
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            self.schema_version
        );
        ensure!(!self.maps.is_empty(), "config lists no maps");
        let [a, b] = self.levels;
        ensure!(a >= 1 && a <= b, "levels {a}..{b} must satisfy 1 <= A <= B");
        if self.target.depth < b + 2 {
            bail!(
                "target depth {} must be at least max level + 2 = {}",
                self.target.depth,
                b + 2
            );
        }
        ensure!(self.samples > 0, "samples must be positive");
        ensure!(self.resolution > 0.0, "resolution must be positive");
        Ok(())
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<usize> {
        self.levels[0]..=self.levels[1]
    }

    pub fn target_cf(&self) -> Result<ContinuedFraction> {
        let cf = ContinuedFraction::from_quotients(self.target.quotients.clone())?;
        Ok(cf.extended(self.target.depth.max(cf.depth()))?)
    }

    pub fn map_specs(&self) -> Vec<MapSpec> {
        self.maps
            .iter()
            .map(|m| MapSpec {
                precision: self.precision,
                ..m.clone()
            })
            .collect()
    }
}
