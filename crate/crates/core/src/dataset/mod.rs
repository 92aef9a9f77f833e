//! Tabular data ingestion, quadrant partitioning and preprocessing.

mod io;
mod pipeline;
mod split;
mod synthetic;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use io::{load_csv, read_csv, write_csv};
pub use pipeline::{FeatureLayout, FeaturePipeline, PipelineError};
pub use split::{stratified_split, Splits};
pub use synthetic::{generate_synthetic, synthetic_schema, SyntheticSpec};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("schema error: column `{0}` not found in header")]
    MissingColumn(String),
    #[error("schema error: row {row}: label value `{value}` is neither favourable nor unfavourable")]
    UnknownLabel { row: usize, value: String },
    #[error("row {row}: column `{column}`: cannot parse `{value}` as a number")]
    ParseNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("schema error: {0}")]
    InvalidSchema(String),
    #[error("split fractions must be positive and sum to 1, got {0:?}")]
    InvalidFractions([f64; 3]),
    #[error("invalid synthetic spec: {0}")]
    InvalidSynthetic(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub kind: FeatureKind,
}

impl FeatureColumn {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Numeric,
        }
    }

    pub fn categorical(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Categorical,
        }
    }
}

/// Predicate selecting the privileged group from the sensitive column.
///
/// Everything the predicate rejects is unprivileged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrivilegedWhen {
    /// Categorical equality.
    Equals(String),
    /// Numeric `value >= threshold`.
    AtLeast(f64),
    /// Numeric `value < threshold`.
    Below(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub features: Vec<FeatureColumn>,
    pub label: String,
    pub favourable: String,
    pub unfavourable: String,
    pub sensitive: String,
    pub privileged: PrivilegedWhen,
}

impl Schema {
    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.favourable == self.unfavourable {
            return Err(DatasetError::InvalidSchema(
                "favourable and unfavourable label values must differ".into(),
            ));
        }
        if self.features.iter().any(|f| f.name == self.label) {
            return Err(DatasetError::InvalidSchema(format!(
                "label column `{}` cannot also be a feature",
                self.label
            )));
        }
        if self.label == self.sensitive {
            return Err(DatasetError::InvalidSchema(
                "label and sensitive columns must differ".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for f in &self.features {
            if !seen.insert(f.name.as_str()) {
                return Err(DatasetError::InvalidSchema(format!(
                    "duplicate feature column `{}`",
                    f.name
                )));
            }
        }
        Ok(())
    }

    pub fn numeric_features(&self) -> impl Iterator<Item = &FeatureColumn> {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Numeric)
    }

    pub fn categorical_features(&self) -> impl Iterator<Item = &FeatureColumn> {
        self.features
            .iter()
            .filter(|f| f.kind == FeatureKind::Categorical)
    }

    /// Classifies a raw sensitive-attribute cell. `row` is only used for
    /// error messages.
    pub fn is_privileged(&self, raw: &str, row: usize) -> Result<bool, DatasetError> {
        let raw = raw.trim();
        let parse = || {
            raw.parse::<f64>().map_err(|_| DatasetError::ParseNumeric {
                row,
                column: self.sensitive.clone(),
                value: raw.to_string(),
            })
        };
        Ok(match &self.privileged {
            PrivilegedWhen::Equals(v) => raw == v,
            PrivilegedWhen::AtLeast(t) => parse()? >= *t,
            PrivilegedWhen::Below(t) => parse()? < *t,
        })
    }

    pub(crate) fn label_of(&self, raw: &str, row: usize) -> Result<Label, DatasetError> {
        let raw = raw.trim();
        if raw == self.favourable {
            Ok(Label::Favourable)
        } else if raw == self.unfavourable {
            Ok(Label::Unfavourable)
        } else {
            Err(DatasetError::UnknownLabel {
                row,
                value: raw.to_string(),
            })
        }
    }

    pub(crate) fn label_text(&self, label: Label) -> &str {
        match label {
            Label::Favourable => &self.favourable,
            Label::Unfavourable => &self.unfavourable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Favourable,
    Unfavourable,
}

impl Label {
    pub fn is_unfavourable(self) -> bool {
        self == Label::Unfavourable
    }
}

/// One of the four privilege x favourability cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrant {
    PrivilegedFavourable,
    PrivilegedUnfavourable,
    UnprivilegedFavourable,
    UnprivilegedUnfavourable,
}

impl Quadrant {
    /// Canonical order: p_f, p_uf, up_f, up_uf.
    pub const ALL: [Quadrant; 4] = [
        Quadrant::PrivilegedFavourable,
        Quadrant::PrivilegedUnfavourable,
        Quadrant::UnprivilegedFavourable,
        Quadrant::UnprivilegedUnfavourable,
    ];

    pub fn of(privileged: bool, label: Label) -> Self {
        match (privileged, label) {
            (true, Label::Favourable) => Quadrant::PrivilegedFavourable,
            (true, Label::Unfavourable) => Quadrant::PrivilegedUnfavourable,
            (false, Label::Favourable) => Quadrant::UnprivilegedFavourable,
            (false, Label::Unfavourable) => Quadrant::UnprivilegedUnfavourable,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Quadrant::PrivilegedFavourable => "p_f",
            Quadrant::PrivilegedUnfavourable => "p_uf",
            Quadrant::UnprivilegedFavourable => "up_f",
            Quadrant::UnprivilegedUnfavourable => "up_uf",
        }
    }
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Instance counts of the four quadrants.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadrantCounts {
    pub p_f: usize,
    pub p_uf: usize,
    pub up_f: usize,
    pub up_uf: usize,
}

impl QuadrantCounts {
    pub fn new(p_f: usize, p_uf: usize, up_f: usize, up_uf: usize) -> Self {
        Self {
            p_f,
            p_uf,
            up_f,
            up_uf,
        }
    }

    pub fn from_array(a: [usize; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.p_f, self.p_uf, self.up_f, self.up_uf]
    }

    pub fn get(&self, q: Quadrant) -> usize {
        self.as_array()[q.index()]
    }

    pub fn total(&self) -> usize {
        self.p_f + self.p_uf + self.up_f + self.up_uf
    }

    pub fn privileged(&self) -> usize {
        self.p_f + self.p_uf
    }

    pub fn unprivileged(&self) -> usize {
        self.up_f + self.up_uf
    }

    pub fn favourable(&self) -> usize {
        self.p_f + self.up_f
    }

    pub fn unfavourable(&self) -> usize {
        self.p_uf + self.up_uf
    }

    /// First empty quadrant, if any.
    pub fn empty_quadrant(&self) -> Option<Quadrant> {
        Quadrant::ALL.into_iter().find(|&q| self.get(q) == 0)
    }
}

impl fmt::Display for QuadrantCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p_f={} p_uf={} up_f={} up_uf={}",
            self.p_f, self.p_uf, self.up_f, self.up_uf
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    /// Numeric features in schema order.
    pub numeric: Vec<f64>,
    /// Categorical features in schema order.
    pub categorical: Vec<String>,
    pub label: Label,
    pub privileged: bool,
    /// Raw sensitive-attribute cell, kept for round-tripping.
    pub sensitive: String,
}

impl Record {
    pub fn quadrant(&self) -> Quadrant {
        Quadrant::of(self.privileged, self.label)
    }
}

/// An ordered, immutable collection of records sharing one schema.
#[derive(Clone, Debug)]
pub struct Dataset {
    schema: Arc<Schema>,
    records: Vec<Record>,
}

impl Dataset {
    /// Builds a dataset, checking every record's width against the schema.
    pub fn new(schema: Arc<Schema>, records: Vec<Record>) -> Result<Self, DatasetError> {
        let n_num = schema.numeric_features().count();
        let n_cat = schema.categorical_features().count();
        if let Some(i) = records
            .iter()
            .position(|r| r.numeric.len() != n_num || r.categorical.len() != n_cat)
        {
            return Err(DatasetError::InvalidSchema(format!(
                "record {i} does not match the schema's feature layout"
            )));
        }
        Ok(Self { schema, records })
    }

    pub fn schema(&self) -> &Arc<Schema> {
        &self.schema
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn quadrant_counts(&self) -> QuadrantCounts {
        quadrant_counts(self)
    }

    /// Record indices per quadrant, each in ascending order.
    pub fn quadrant_indices(&self) -> [Vec<usize>; 4] {
        let mut out: [Vec<usize>; 4] = Default::default();
        for (i, r) in self.records.iter().enumerate() {
            out[r.quadrant().index()].push(i);
        }
        out
    }

    /// New dataset holding the records at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: Arc::clone(&self.schema),
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.records.iter().map(|r| r.label)
    }
}

/// Counts records per quadrant.
pub fn quadrant_counts(d: &Dataset) -> QuadrantCounts {
    let mut c = [0usize; 4];
    for r in d.records() {
        c[r.quadrant().index()] += 1;
    }
    QuadrantCounts::from_array(c)
}
