//! Run configuration (TOML) and the builtin presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::{DiscreteOperatorPair, Geometry};
use crate::eigensolve::SolverSettings;
use crate::inequalities::{Bump, PowerCutoff, RadialProfile, ScaledProfile, TruncatedGaussian, DEFAULT_SLACK};
use crate::mesh::{Grid3D, RadialMesh};
use crate::weights::{TabulatedWeight, WeightSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeometryConfig {
    /// Graded radial mesh on `[0, radius]`; `grading` is the element growth
    /// factor at `elements` elements.
    Radial {
        radius: f64,
        elements: usize,
        #[serde(default = "one")]
        grading: f64,
    },
    /// Uniform grid on `[-half_width, half_width]^3`.
    Grid { half_width: f64, nodes: usize },
}

fn one() -> f64 {
    1.0
}

impl GeometryConfig {
    pub fn build(&self) -> Result<Geometry> {
        match *self {
            GeometryConfig::Radial {
                radius,
                elements,
                grading,
            } => Ok(Geometry::Radial(RadialMesh::new(radius, elements, grading)?)),
            GeometryConfig::Grid { half_width, nodes } => Ok(Geometry::Grid(Grid3D::new(half_width, nodes)?)),
        }
    }

    pub fn radius(&self) -> f64 {
        match *self {
            GeometryConfig::Radial { radius, .. } => radius,
            GeometryConfig::Grid { half_width, .. } => half_width,
        }
    }

    /// The same radial mesh family at `elements` elements: the grading is
    /// rescaled as `q^{M0/M}` so the node distribution keeps its shape.
    pub fn refined(&self, elements: usize) -> Result<Self> {
        match *self {
            GeometryConfig::Radial {
                radius,
                elements: m0,
                grading,
            } => Ok(GeometryConfig::Radial {
                radius,
                elements,
                grading: grading.powf(m0 as f64 / elements as f64),
            }),
            GeometryConfig::Grid { .. } => Err(Error::config(
                "converge",
                "refinement ladders are defined for radial geometries",
            )),
        }
    }

    pub fn with_radius(&self, r: f64) -> Self {
        let mut g = self.clone();
        match &mut g {
            GeometryConfig::Radial { radius, .. } => *radius = r,
            GeometryConfig::Grid { half_width, .. } => *half_width = r,
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_count() -> usize {
    6
}
fn default_tolerance() -> f64 {
    1e-10
}
fn default_max_iterations() -> usize {
    2000
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            count: default_count(),
            tolerance: default_tolerance(),
            max_iterations: default_max_iterations(),
        }
    }
}

/// A full problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub dimension: usize,
    pub alpha: f64,
    pub weight: WeightSpec,
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl ProblemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dimension < 3 {
            return Err(Error::config(
                "problem.dimension",
                format!("N must be at least 3, got {}", self.dimension),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::config(
                "problem.alpha",
                format!("alpha must lie in the open interval (0,2), got {}", self.alpha),
            ));
        }
        if matches!(self.geometry, GeometryConfig::Grid { .. }) && self.dimension != 3 {
            return Err(Error::config(
                "problem.geometry",
                "grid geometry requires dimension = 3",
            ));
        }
        if self.solver.count == 0 {
            return Err(Error::config(
                "problem.solver.count",
                "eigenvalue count must be at least 1",
            ));
        }
        if !(self.solver.tolerance > 0.0) {
            return Err(Error::config("problem.solver.tolerance", "tolerance must be positive"));
        }
        self.weight.validate()?;
        self.geometry.build()?;
        Ok(())
    }

    pub fn settings(&self, seed: u64) -> SolverSettings {
        SolverSettings {
            count: self.solver.count,
            tolerance: self.solver.tolerance,
            max_iterations: self.solver.max_iterations,
            seed,
            ..SolverSettings::default()
        }
    }

    pub fn assemble(&self) -> Result<DiscreteOperatorPair> {
        self.validate()?;
        DiscreteOperatorPair::assemble(&self.geometry.build()?, self.dimension, self.alpha, &self.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    /// Element counts, strictly increasing.
    pub elements: Vec<usize>,
    /// Optional truncation radii, run at the finest element count.
    #[serde(default)]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileConfig {
    TruncatedGaussian {
        width: f64,
    },
    Bump {
        radius: f64,
    },
    /// Hardy near-optimizer, shrunk into the domain when needed.
    PowerCutoff {
        epsilon: f64,
    },
}

impl ProfileConfig {
    pub fn build(&self, dimension: usize, alpha: f64, radius: f64) -> Result<Box<dyn RadialProfile>> {
        match *self {
            ProfileConfig::TruncatedGaussian { width } if width > 0.0 => {
                Ok(Box::new(TruncatedGaussian { width, radius }))
            }
            ProfileConfig::Bump { radius: rho } if rho > 0.0 && rho <= radius => Ok(Box::new(Bump { radius: rho })),
            ProfileConfig::PowerCutoff { epsilon } if epsilon > 0.0 => {
                let p = PowerCutoff::new(dimension, alpha, epsilon);
                if epsilon >= p.beta() {
                    return Err(Error::config(
                        "check.profiles",
                        "power-cutoff epsilon must be below (N-2+alpha)/2",
                    ));
                }
                Ok(Box::new(ScaledProfile {
                    inner: p,
                    factor: (radius / 2.0).min(1.0),
                }))
            }
            _ => Err(Error::config(
                "check.profiles",
                "profile parameters must be positive and fit inside the domain",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    #[serde(default = "default_profiles")]
    pub profiles: Vec<ProfileConfig>,
    #[serde(default = "default_random")]
    pub random_vectors: usize,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_profiles() -> Vec<ProfileConfig> {
    vec![
        ProfileConfig::TruncatedGaussian { width: 1.0 },
        ProfileConfig::TruncatedGaussian { width: 2.0 },
        ProfileConfig::Bump { radius: 1.0 },
        ProfileConfig::Bump { radius: 3.0 },
        ProfileConfig::PowerCutoff { epsilon: 0.25 },
    ]
}
fn default_random() -> usize {
    100
}
fn default_slack() -> f64 {
    DEFAULT_SLACK
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            profiles: default_profiles(),
            random_vectors: default_random(),
            slack: default_slack(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    /// File name of the golden file inside the output directory.
    #[serde(default = "default_golden")]
    pub golden: String,
}

fn default_modes() -> usize {
    4
}
fn default_rtol() -> f64 {
    1e-12
}
fn default_golden() -> String {
    "golden.json".into()
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            modes: default_modes(),
            rtol: default_rtol(),
            golden: default_golden(),
        }
    }
}

fn default_seed() -> u64 {
    42
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    #[serde(default)]
    pub converge: Option<ConvergeConfig>,
    #[serde(default)]
    pub check: CheckConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RunConfig {
    /// Parses and validates a TOML document; tabulated weight paths are
    /// resolved against `base`.
    pub fn from_toml(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text)?;
        if let WeightSpec::Tabulated(t) = &mut cfg.problem.weight {
            if let Some(path) = t.path.clone() {
                if t.radii.is_empty() {
                    let full = match base {
                        Some(b) if path.is_relative() => b.join(&path),
                        _ => path.clone(),
                    };
                    let mut loaded = TabulatedWeight::from_csv(&full)?;
                    loaded.interpolation = t.interpolation;
                    loaded.path = Some(path);
                    *t = loaded;
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text, path.parent())
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| *t)
            .ok_or_else(|| {
                Error::config(
                    "preset",
                    format!("unknown preset '{name}'; known: {}", preset_names().join(", ")),
                )
            })?;
        Self::from_toml(text, None)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem.validate()?;
        if let Some(c) = &self.converge {
            if c.elements.len() < 3 {
                return Err(Error::config(
                    "converge.elements",
                    "refinement ladder needs at least 3 rungs",
                ));
            }
            if c.elements.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::config(
                    "converge.elements",
                    "refinement ladder must be strictly increasing",
                ));
            }
            if c.radii.windows(2).any(|w| w[1] <= w[0]) || c.radii.iter().any(|&r| !(r > 0.0)) {
                return Err(Error::config(
                    "converge.radii",
                    "radii must be positive and strictly increasing",
                ));
            }
        }
        if !(self.check.slack >= 0.0) {
            return Err(Error::config("check.slack", "slack must be nonnegative"));
        }
        if self.oracle.modes == 0 {
            return Err(Error::config("oracle.modes", "at least one mode is required"));
        }
        if !(self.oracle.rtol > 0.0 && self.oracle.rtol < 1e-3) {
            return Err(Error::config(
                "oracle.rtol",
                "integrator tolerance must lie in (0, 1e-3)",
            ));
        }
        Ok(())
    }
}

/// Builtin presets, `(name, TOML)`.
pub const PRESETS: &[(&str, &str)] = &[
    ("gaussian-n3-a0.5", include_str!("../presets/gaussian-n3-a0.5.toml")),
    ("gaussian-n3-a1", include_str!("../presets/gaussian-n3-a1.toml")),
    ("gaussian-n3-a1.5", include_str!("../presets/gaussian-n3-a1.5.toml")),
    ("ring-n3-a0.5", include_str!("../presets/ring-n3-a0.5.toml")),
    ("ring-n3-a1", include_str!("../presets/ring-n3-a1.toml")),
    ("ring-n3-a1.5", include_str!("../presets/ring-n3-a1.5.toml")),
    ("compact-n3-a1", include_str!("../presets/compact-n3-a1.toml")),
    ("indicator-n3-a1", include_str!("../presets/indicator-n3-a1.toml")),
    ("classical-ball", include_str!("../presets/classical-ball.toml")),
    ("remark-n3-a1", include_str!("../presets/remark-n3-a1.toml")),
    ("ring-tiny", include_str!("../presets/ring-tiny.toml")),
    ("gaussian-3d", include_str!("../presets/gaussian-3d.toml")),
    ("gaussian-3d-small", include_str!("../presets/gaussian-3d-small.toml")),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
