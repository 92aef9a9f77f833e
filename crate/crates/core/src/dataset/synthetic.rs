use std::sync::Arc;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{
    Dataset, DatasetError, FeatureColumn, Label, PrivilegedWhen, Quadrant, QuadrantCounts,
    Record, Schema,
};

/// Mean shift of each signal feature for unfavourable records.
const SIGNAL_SEPARATION: [f64; 3] = [2.5, 2.0, 1.5];
/// Mean shift of the nuisance feature for unprivileged records.
const NUISANCE_GROUP_SHIFT: f64 = 1.0;
/// Mean shift of the nuisance feature for unfavourable records at bias 1.
const NUISANCE_LABEL_SHIFT: f64 = 1.5;
const CHANNELS: [&str; 3] = ["branch", "phone", "web"];
const CHANNEL_WEIGHTS: [[f64; 3]; 2] = [[0.4, 0.35, 0.25], [0.2, 0.3, 0.5]];

/// Parameters of the planted-bias generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub counts: QuadrantCounts,
    /// Label dependence of the privilege-correlated nuisance feature, in [0, 1].
    pub bias: f64,
    /// Standard deviation of the signal features.
    #[serde(default = "default_noise")]
    pub noise: f64,
}

fn default_noise() -> f64 {
    1.0
}

impl SyntheticSpec {
    pub fn new(counts: QuadrantCounts, bias: f64) -> Self {
        Self {
            counts,
            bias,
            noise: default_noise(),
        }
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if !(0.0..=1.0).contains(&self.bias) {
            return Err(DatasetError::InvalidSynthetic(format!(
                "bias {} outside [0, 1]",
                self.bias
            )));
        }
        if !(self.noise > 0.0 && self.noise.is_finite()) {
            return Err(DatasetError::InvalidSynthetic(format!(
                "noise {} must be positive",
                self.noise
            )));
        }
        Ok(())
    }
}

/// Schema of generated datasets: three Gaussian signal features, a nuisance
/// feature, a categorical channel, sensitive column `group` (privileged value
/// `priv`) and label column `label` (`1` is unfavourable).
pub fn synthetic_schema() -> Schema {
    Schema {
        features: vec![
            FeatureColumn::numeric("x1"),
            FeatureColumn::numeric("x2"),
            FeatureColumn::numeric("x3"),
            FeatureColumn::numeric("nuisance"),
            FeatureColumn::categorical("channel"),
        ],
        label: "label".into(),
        favourable: "0".into(),
        unfavourable: "1".into(),
        sensitive: "group".into(),
        privileged: PrivilegedWhen::Equals("priv".into()),
    }
}

/// Generates a dataset whose quadrant counts equal `spec.counts` exactly.
///
/// Signal features are class-conditional Gaussians. The nuisance feature is
/// shifted for the unprivileged group and, scaled by `bias`, for the
/// unfavourable label, so a model trained on group-skewed data learns to use
/// group membership as a proxy.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channel_dists = CHANNEL_WEIGHTS.map(|w| WeightedIndex::new(w).unwrap());

    let mut records = Vec::with_capacity(spec.counts.total());
    for q in Quadrant::ALL {
        let privileged = q.index() < 2;
        let label = if q.index() % 2 == 0 {
            Label::Favourable
        } else {
            Label::Unfavourable
        };
        let y = if label.is_unfavourable() { 1.0 } else { 0.0 };
        let u = if privileged { 0.0 } else { 1.0 };
        for _ in 0..spec.counts.get(q) {
            let mut numeric: Vec<f64> = SIGNAL_SEPARATION
                .iter()
                .map(|sep| sep * y + spec.noise * rng.sample::<f64, _>(StandardNormal))
                .collect();
            numeric.push(
                NUISANCE_GROUP_SHIFT * u
                    + spec.bias * NUISANCE_LABEL_SHIFT * y
                    + rng.sample::<f64, _>(StandardNormal),
            );
            let channel = CHANNELS[channel_dists[y as usize].sample(&mut rng)];
            records.push(Record {
                numeric,
                categorical: vec![channel.to_string()],
                label,
                privileged,
                sensitive: if privileged { "priv" } else { "unpriv" }.to_string(),
            });
        }
    }
    records.shuffle(&mut rng);
    Dataset::new(Arc::new(synthetic_schema()), records)
}
