//! The declarative run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use dibalance::classifiers::{ClassifierKind, ClassifierSpec};
use dibalance::dataset::{synthetic_schema, SyntheticSpec};
use dibalance::{GridSpec, LossWeights, QuadrantCounts, Schema};

/// Where records come from. Exactly one field must be set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSource {
    pub csv: Option<PathBuf>,
    pub synthetic: Option<SyntheticConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticConfig {
    /// Quadrant sizes in `(p_f, p_uf, up_f, up_uf)` order.
    pub counts: [usize; 4],
    #[serde(default)]
    pub bias: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
}

fn default_noise() -> f64 {
    1.0
}

impl SyntheticConfig {
    pub fn spec(&self) -> SyntheticSpec {
        SyntheticSpec {
            noise: self.noise,
            ..SyntheticSpec::new(QuadrantCounts::from_array(self.counts), self.bias)
        }
    }
}

/// A classifier given either by name or as a table with hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassifierEntry {
    Name(ClassifierKind),
    Spec(ClassifierSpec),
}

impl ClassifierEntry {
    pub fn spec(&self) -> ClassifierSpec {
        match self {
            ClassifierEntry::Name(k) => ClassifierSpec::default_for(*k),
            ClassifierEntry::Spec(s) => s.clone(),
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_split() -> [f64; 3] {
    [0.6, 0.2, 0.2]
}

fn default_classifiers() -> Vec<ClassifierEntry> {
    ClassifierKind::ALL.into_iter().map(ClassifierEntry::Name).collect()
}

/// Everything a command needs; flags may override `seed` and `out`.
///
/// `grid.weights` is replaced by `weights` before any search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    pub data: DataSource,
    /// Required for CSV data; synthetic data carries its own schema.
    #[serde(default)]
    pub schema: Option<Schema>,
    /// Train, level-0 test and level-1 test fractions.
    #[serde(default = "default_split")]
    pub split: [f64; 3],
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<ClassifierEntry>,
    #[serde(default)]
    pub weights: LossWeights,
}

impl RunConfig {
    pub fn synthetic(counts: [usize; 4], bias: f64) -> Self {
        Self {
            seed: 0,
            out: default_out(),
            data: DataSource {
                csv: None,
                synthetic: Some(SyntheticConfig {
                    counts,
                    bias,
                    noise: default_noise(),
                }),
            },
            schema: None,
            split: default_split(),
            grid: GridSpec::default(),
            classifiers: default_classifiers(),
            weights: LossWeights::default(),
        }
    }

    /// Reads TOML, a JSON config, or a command manifest (its `config` field).
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            let mut v: serde_json::Value = serde_json::from_str(&text).context("parsing JSON config")?;
            if let Some(inner) = v.get_mut("config") {
                v = inner.take();
            }
            serde_json::from_value(v).context("invalid config")?
        } else {
            toml::from_str(&text).context("invalid config")?
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        match (&self.data.csv, &self.data.synthetic) {
            (Some(_), Some(_)) | (None, None) => bail!("data: set exactly one of `csv` or `synthetic`"),
            (Some(_), None) if self.schema.is_none() => bail!("schema is required for CSV data"),
            (None, Some(s)) => s.spec().validate()?,
            _ => {}
        }
        if let Some(s) = &self.schema {
            s.validate()?;
        }
        if self.split.iter().any(|f| !(*f >= 0.0)) || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            bail!("split fractions {:?} must be non-negative and sum to 1", self.split);
        }
        self.weights.validate()?;
        if self.classifiers.is_empty() {
            bail!("no classifiers configured");
        }
        for c in &self.classifiers {
            c.spec().validate()?;
        }
        self.effective_grid().validate()?;
        Ok(())
    }

    pub fn schema(&self) -> Schema {
        self.schema.clone().unwrap_or_else(synthetic_schema)
    }

    pub fn effective_grid(&self) -> GridSpec {
        GridSpec {
            weights: self.weights,
            ..self.grid.clone()
        }
    }

    pub fn classifier_specs(&self) -> Vec<ClassifierSpec> {
        self.classifiers.iter().map(ClassifierEntry::spec).collect()
    }
}
