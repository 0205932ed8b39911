//! Run configuration read from TOML.
//!
//! ```toml
//! seed = 7
//! out = "results"
//!
//! [geometry]
//! theta = 1.5707963267948966   # symmetric pair of disks with this overlap angle
//! radius = 1.0
//! # or an explicit list:
//! # disks = [{ center = [0.0, 0.0], radius = 1.0 }, { center = [1.2, 0.3], radius = 0.8 }]
//!
//! [discretization]
//! bandwidth = 32
//!
//! [quadrature]
//! profile = "standard"
//!
//! [problem]
//! data = "source"              # constant | manufactured | source
//! source = [3.0, 2.0]
//!
//! [experiment]
//! iterations = 50
//! initial = "random"           # zero | random
//! thetas = [0.7853981633974483, 1.5707963267948966]
//! bandwidths = [16, 32, 64]
//! ```

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc as Shared;

use num_complex::Complex64;
use serde::Deserialize;

use crate::geometry::{intersect, Disk, TwoDiskGeometry};
use crate::manufactured::Manufactured;
use crate::quadrature::Profile;
use crate::schwarz::{decompose, BoundaryData};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub discretization: Discretization,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub experiment: ExperimentConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub theta: Option<f64>,
    #[serde(default = "one")]
    pub radius: f64,
    pub disks: Option<Vec<DiskSpec>>,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self { theta: None, radius: 1.0, disks: None }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Discretization {
    #[serde(default = "default_bandwidth")]
    pub bandwidth: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self { bandwidth: default_bandwidth() }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub profile: Option<Profile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    #[default]
    Constant,
    Manufactured,
    Source,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub data: DataKind,
    #[serde(default = "one")]
    pub value: f64,
    #[serde(default = "default_k")]
    pub k: i32,
    #[serde(default = "default_source")]
    pub source: [f64; 2],
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self { data: DataKind::default(), value: 1.0, k: default_k(), source: default_source() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Initial {
    Zero,
    #[default]
    Random,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub initial: Initial,
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default = "default_bandwidths")]
    pub bandwidths: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self { iterations: default_iterations(), initial: Initial::default(), thetas: Vec::new(), bandwidths: default_bandwidths() }
    }
}

fn one() -> f64 {
    1.0
}
fn default_bandwidth() -> usize {
    32
}
fn default_k() -> i32 {
    1
}
fn default_source() -> [f64; 2] {
    [3.0, 2.0]
}
fn default_iterations() -> usize {
    50
}
fn default_bandwidths() -> Vec<usize> {
    vec![16, 32, 64]
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let disks = self.disks()?;
        decompose(&disks).map_err(|e| invalid(e.to_string()))?;
        if !overlap_connected(&disks) {
            return Err(invalid("geometry: the disks must form a connected overlapping union"));
        }
        if self.discretization.bandwidth == 0 || self.discretization.bandwidth > 1024 {
            return Err(invalid("discretization.bandwidth must lie in 1..=1024"));
        }
        if self.experiment.bandwidths.iter().any(|&l| l == 0 || l > 1024) {
            return Err(invalid("experiment.bandwidths must lie in 1..=1024"));
        }
        if let Some(t) = self.experiment.thetas.iter().find(|t| !(**t > 0.0 && **t < PI)) {
            return Err(invalid(format!("experiment.thetas entry {t} outside (0, pi)")));
        }
        match self.problem.data {
            DataKind::Manufactured => {
                if disks.len() != 2 {
                    return Err(invalid("problem.data = \"manufactured\" needs exactly two disks"));
                }
                if self.problem.k < 1 {
                    return Err(invalid("problem.k must be >= 1"));
                }
            }
            DataKind::Source => {
                let p = Complex64::new(self.problem.source[0], self.problem.source[1]);
                if disks.iter().any(|d| d.depth(p) >= 0.0) {
                    return Err(invalid("problem.source must lie outside every disk"));
                }
            }
            DataKind::Constant => {}
        }
        Ok(())
    }

    pub fn disks(&self) -> Result<Vec<Disk>, ConfigError> {
        let g = &self.geometry;
        match (&g.disks, g.theta) {
            (Some(_), Some(_)) => Err(invalid("geometry: give either theta or disks, not both")),
            (Some(list), None) => {
                if list.len() < 2 {
                    return Err(invalid("geometry.disks needs at least two disks"));
                }
                list.iter()
                    .map(|d| Disk::new(Complex64::new(d.center[0], d.center[1]), d.radius).map_err(|e| invalid(e.to_string())))
                    .collect()
            }
            (None, theta) => {
                let geom = TwoDiskGeometry::symmetric(theta.unwrap_or(PI / 2.0), g.radius).map_err(|e| invalid(e.to_string()))?;
                Ok(geom.disks.to_vec())
            }
        }
    }

    /// The two-disk geometry, for commands that need one.
    pub fn pair(&self) -> Result<TwoDiskGeometry, ConfigError> {
        let disks = self.disks()?;
        if disks.len() != 2 {
            return Err(invalid(format!("this command needs exactly two disks, got {}", disks.len())));
        }
        intersect(disks[0], disks[1]).map_err(|e| invalid(e.to_string()))
    }

    pub fn boundary(&self) -> Result<BoundaryData, ConfigError> {
        let disks = self.disks()?;
        Ok(match self.problem.data {
            DataKind::Constant => {
                let v = self.problem.value;
                Shared::new(move |_, _| Complex64::new(v, 0.0))
            }
            DataKind::Manufactured => Manufactured::new(&self.pair()?, self.problem.k).map_err(|e| invalid(e.to_string()))?.boundary(),
            DataKind::Source => {
                let p = Complex64::new(self.problem.source[0], self.problem.source[1]);
                Shared::new(move |j, phi| Complex64::new((disks[j].point_at(phi) - p).norm().ln(), 0.0))
            }
        })
    }
}

fn overlap_connected(disks: &[Disk]) -> bool {
    let mut seen = vec![false; disks.len()];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..disks.len() {
            if !seen[j] && (disks[i].center - disks[j].center).norm() < disks[i].radius + disks[j].radius {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_symmetric_right_angle() {
        let cfg = RunConfig::parse("").unwrap();
        let g = cfg.pair().unwrap();
        assert!((g.theta - PI / 2.0).abs() < 1e-12);
        assert_eq!(cfg.discretization.bandwidth, 32);
    }

    #[test]
    fn explicit_disks() {
        let cfg = RunConfig::parse(
            "[geometry]\ndisks = [{ center = [0.0, 0.0], radius = 1.0 }, { center = [1.2, 0.3], radius = 0.8 }, { center = [2.2, 0.0], radius = 0.7 }]\n",
        )
        .unwrap();
        assert_eq!(cfg.disks().unwrap().len(), 3);
        assert!(cfg.pair().is_err());
    }

    #[test]
    fn rejects_bad_input() {
        for text in [
            "bogus = 1",
            "[geometry]\ntheta = 1.0\nextra = 2",
            "[geometry]\ntheta = 4.0",
            "[quadrature]\nprofile = \"turbo\"",
            "[problem]\ndata = \"source\"\nsource = [0.1, 0.0]",
            "[geometry]\ndisks = [{ center = [0.0, 0.0], radius = 1.0 }, { center = [5.0, 0.0], radius = 1.0 }]",
            "seed = \"x\"",
        ] {
            assert!(RunConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn source_data_is_harmonic_log() {
        let cfg = RunConfig::parse("[problem]\ndata = \"source\"\nsource = [4.0, 0.0]").unwrap();
        let g = cfg.boundary().unwrap();
        let d = cfg.disks().unwrap()[0];
        let v = g(0, 0.3);
        assert!((v.re - (d.point_at(0.3) - Complex64::new(4.0, 0.0)).norm().ln()).abs() < 1e-15);
    }
}
