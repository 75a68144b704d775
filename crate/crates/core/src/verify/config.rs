//! TOML experiment configuration. Unknown keys are rejected at every level.
//!
//! ```toml
//! method = "dense"            # dense | iterative | auto
//! k_max = 8                   # checks run for k = 1..=k_max
//! kappas = [0.5, 0.1, 0.01]   # observable-diameter levels, each in (0, 1)
//!
//! [output]
//! dir = "out"                 # JSON reports and the CSV summary
//! csv = "summary.csv"
//!
//! [caps]
//! vertices = 250000           # largest grid built
//! enumeration = 50000000      # largest lattice box enumerated
//! exact_spectrum = 50         # exact eigenvalues computed per model
//!
//! [tolerances]
//! eigenvalue_rel = 0.02       # |λ_k/λ_k(exact) − 1|; omit to only report.
//!                             # A model entry may set its own.
//! coarea_rel = 1e-10
//! coarea_samples = 5          # random functions per model
//!
//! [optimality]
//! n = [2, 3]
//! a = [0.1, 0.5, 0.9]
//!
//! [[model]]
//! kind = "circle"
//! a = 6.283185307179586
//! points = 256
//!
//! [[model]]
//! kind = "torus"
//! n = 2
//! a = 0.5
//! counts = [16, 64]           # or points_per_unit = 16
//! eigenvalue_rel = 0.01
//!
//! [[model]]
//! kind = "graph"
//! path = "graphs/petersen.graph"   # relative to the config file
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_spaces::{ModelSpace, Resolution, TorusSpec, DEFAULT_ENUMERATION_CAP, DEFAULT_VERTEX_CAP};
use crate::spectra::Method;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_kappas")]
    pub kappas: Vec<f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub caps: Caps,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub optimality: Option<OptimalityConfig>,
    #[serde(rename = "model", default)]
    pub models: Vec<ModelConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default = "default_csv")]
    pub csv: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    #[serde(default = "default_vertex_cap")]
    pub vertices: usize,
    #[serde(default = "default_enumeration_cap")]
    pub enumeration: u64,
    #[serde(default = "default_exact_spectrum")]
    pub exact_spectrum: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub eigenvalue_rel: Option<f64>,
    #[serde(default = "default_coarea_rel")]
    pub coarea_rel: f64,
    #[serde(default = "default_coarea_samples")]
    pub coarea_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimalityConfig {
    pub n: Vec<usize>,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Circle { a: f64, points: usize, eigenvalue_rel: Option<f64> },
    Torus { n: usize, a: f64, counts: Option<Vec<usize>>, points_per_unit: Option<f64>, eigenvalue_rel: Option<f64> },
    Graph { path: PathBuf, name: Option<String>, eigenvalue_rel: Option<f64> },
}

fn default_method() -> Method {
    Method::Auto
}
fn default_k_max() -> usize {
    8
}
fn default_kappas() -> Vec<f64> {
    vec![0.5, 0.1, 0.01]
}
fn default_csv() -> String {
    "summary.csv".into()
}
fn default_vertex_cap() -> usize {
    DEFAULT_VERTEX_CAP
}
fn default_enumeration_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP as u64
}
fn default_exact_spectrum() -> usize {
    50
}
fn default_coarea_rel() -> f64 {
    1e-10
}
fn default_coarea_samples() -> usize {
    5
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, csv: default_csv() }
    }
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            vertices: default_vertex_cap(),
            enumeration: default_enumeration_cap(),
            exact_spectrum: default_exact_spectrum(),
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { eigenvalue_rel: None, coarea_rel: default_coarea_rel(), coarea_samples: default_coarea_samples() }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            method: default_method(),
            k_max: default_k_max(),
            kappas: default_kappas(),
            output: OutputConfig::default(),
            caps: Caps::default(),
            tolerances: Tolerances::default(),
            optimality: None,
            models: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads a config file; relative graph paths are resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for m in &mut config.models {
            if let ModelConfig::Graph { path, .. } = m {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::Config("k_max must be at least 1".into()));
        }
        if let Some(&k) = self.kappas.iter().find(|&&k| !(k > 0.0 && k < 1.0)) {
            return Err(Error::Config(format!("kappa {k} outside (0, 1)")));
        }
        if self.caps.exact_spectrum < 2 {
            return Err(Error::Config("caps.exact_spectrum must be at least 2".into()));
        }
        if let Some(opt) = &self.optimality {
            if opt.n.iter().any(|&n| n < 2) || opt.a.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
                return Err(Error::Config("optimality scan needs n ≥ 2 and a in (0, 1)".into()));
            }
        }
        for m in &self.models {
            m.validate()?;
        }
        Ok(())
    }
}

/// A model after parsing: either a flat model space or an abstract graph file.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Space(ModelSpace<f64>),
    File { name: String, path: PathBuf },
}

impl ModelSource {
    pub fn label(&self) -> String {
        match self {
            ModelSource::Space(m) => m.label(),
            ModelSource::File { name, .. } => format!("graph:{name}"),
        }
    }
}

impl ModelConfig {
    fn validate(&self) -> Result<()> {
        if let ModelConfig::Torus { counts, points_per_unit, .. } = self {
            if counts.is_some() == points_per_unit.is_some() {
                return Err(Error::Config("torus needs exactly one of `counts` or `points_per_unit`".into()));
            }
        }
        self.source().map(|_| ())
    }

    /// The model's eigenvalue tolerance, falling back to `default`.
    pub fn eigenvalue_rel(&self, default: Option<f64>) -> Option<f64> {
        match self {
            ModelConfig::Circle { eigenvalue_rel, .. }
            | ModelConfig::Torus { eigenvalue_rel, .. }
            | ModelConfig::Graph { eigenvalue_rel, .. } => eigenvalue_rel.or(default),
        }
    }

    pub fn source(&self) -> Result<ModelSource> {
        Ok(match self {
            ModelConfig::Circle { a, points, .. } => {
                if *points < 3 {
                    return Err(Error::BadResolution(format!("a circle needs at least 3 points, got {points}")));
                }
                if !(*a > 0.0) {
                    return Err(Error::BadParameter(format!("circle length must be positive, got {a}")));
                }
                ModelSource::Space(ModelSpace::Circle { a: *a, points: *points })
            }
            ModelConfig::Torus { n, a, counts, points_per_unit, .. } => {
                let resolution = match (counts, points_per_unit) {
                    (Some(c), _) => Resolution::Counts(c.clone()),
                    (None, Some(r)) => Resolution::PerUnit(*r),
                    (None, None) => return Err(Error::Config("torus needs `counts` or `points_per_unit`".into())),
                };
                ModelSource::Space(ModelSpace::Torus(TorusSpec::new(*n, *a, resolution)?))
            }
            ModelConfig::Graph { path, name, .. } => {
                let name = name.clone().unwrap_or_else(|| {
                    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "graph".into())
                });
                ModelSource::File { name, path: path.clone() }
            }
        })
    }

    /// Parses the command-line form: `circle:a=1:N=64`,
    /// `torus:n=2:a=0.5:N=16x64`, `torus:n=2:a=0.5:ppu=16` or
    /// `graph:path/to/file`. Fields may also be separated by commas.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        if kind == "graph" {
            if rest.is_empty() {
                return Err(Error::Config("graph model needs a path".into()));
            }
            return Ok(ModelConfig::Graph { path: PathBuf::from(rest), name: None, eigenvalue_rel: None });
        }
        let mut fields = std::collections::BTreeMap::new();
        for part in rest.split([':', ',']).filter(|p| !p.is_empty()) {
            let (k, v) =
                part.split_once('=').ok_or_else(|| Error::Config(format!("model field `{part}` is not key=value")))?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let take_f64 = |fields: &mut std::collections::BTreeMap<String, String>, key: &str| -> Result<Option<f64>> {
            fields
                .remove(key)
                .map(|v| v.parse::<f64>().map_err(|_| Error::Config(format!("`{key}` must be a number, got `{v}`"))))
                .transpose()
        };
        let parsed = match kind {
            "circle" => {
                let a = take_f64(&mut fields, "a")?.ok_or_else(|| Error::Config("circle needs `a`".into()))?;
                let points = fields
                    .remove("N")
                    .ok_or_else(|| Error::Config("circle needs `N`".into()))?
                    .parse()
                    .map_err(|_| Error::Config("`N` must be an integer".into()))?;
                ModelConfig::Circle { a, points, eigenvalue_rel: None }
            }
            "torus" => {
                let n = fields
                    .remove("n")
                    .ok_or_else(|| Error::Config("torus needs `n`".into()))?
                    .parse()
                    .map_err(|_| Error::Config("`n` must be an integer".into()))?;
                let a = take_f64(&mut fields, "a")?.ok_or_else(|| Error::Config("torus needs `a`".into()))?;
                let counts = fields
                    .remove("N")
                    .map(|v| {
                        v.split('x')
                            .map(|c| c.parse::<usize>().map_err(|_| Error::Config(format!("bad count list `{v}`"))))
                            .collect::<Result<Vec<_>>>()
                    })
                    .transpose()?;
                let points_per_unit = take_f64(&mut fields, "ppu")?;
                ModelConfig::Torus { n, a, counts, points_per_unit, eigenvalue_rel: None }
            }
            other => return Err(Error::Config(format!("unknown model kind `{other}`"))),
        };
        if let Some(k) = fields.keys().next() {
            return Err(Error::Config(format!("unknown model field `{k}`")));
        }
        parsed.validate()?;
        Ok(parsed)
    }
}
