use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::plan::{QuadrantRatios, SamplingPlan};
use super::{BalanceError, BalanceParams};
use crate::dataset::QuadrantCounts;

/// The four fixed sampling setups of the exploratory analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetupPreset {
    /// Every quadrant gets a quarter of the sample.
    DoubleBalanced,
    /// 50% unfavourable inside each group; group split as in the source.
    UnfavourableBalanced,
    /// Groups equalized inside each label; label split as in the source.
    PrivilegeBalanced,
    /// Source proportions.
    DoubleImbalanced,
}

impl SetupPreset {
    pub const ALL: [SetupPreset; 4] = [
        SetupPreset::DoubleBalanced,
        SetupPreset::UnfavourableBalanced,
        SetupPreset::PrivilegeBalanced,
        SetupPreset::DoubleImbalanced,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SetupPreset::DoubleBalanced => "double-balanced",
            SetupPreset::UnfavourableBalanced => "unfavourable-balanced",
            SetupPreset::PrivilegeBalanced => "privilege-balanced",
            SetupPreset::DoubleImbalanced => "double-imbalanced",
        }
    }

    /// The balance triple that reproduces this preset.
    pub fn params(self) -> BalanceParams {
        let (alpha, beta, gamma) = match self {
            SetupPreset::DoubleBalanced => (1.0, 1.0, 1.0),
            SetupPreset::UnfavourableBalanced => (0.0, 1.0, 1.0),
            SetupPreset::PrivilegeBalanced => (1.0, 0.0, 1.0),
            SetupPreset::DoubleImbalanced => (0.0, 0.0, 0.0),
        };
        BalanceParams { alpha, beta, gamma }
    }

    /// Target quadrant proportions, written out directly from the setup's
    /// definition.
    pub fn target_proportions(self, c: &QuadrantCounts) -> QuadrantRatios {
        let total = c.total() as f64;
        let p = c.privileged() as f64 / total;
        let f = c.favourable() as f64 / total;
        match self {
            SetupPreset::DoubleBalanced => QuadrantRatios::from_array([0.25; 4]),
            SetupPreset::UnfavourableBalanced => {
                QuadrantRatios::from_array([p / 2.0, p / 2.0, (1.0 - p) / 2.0, (1.0 - p) / 2.0])
            }
            SetupPreset::PrivilegeBalanced => {
                QuadrantRatios::from_array([f / 2.0, (1.0 - f) / 2.0, f / 2.0, (1.0 - f) / 2.0])
            }
            SetupPreset::DoubleImbalanced => QuadrantRatios::of_counts(c),
        }
    }
}

impl fmt::Display for SetupPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SetupPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SetupPreset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}`"))
    }
}

pub fn preset_plan(c: &QuadrantCounts, s: SetupPreset) -> Result<SamplingPlan, BalanceError> {
    if let Some(q) = c.empty_quadrant() {
        return Err(BalanceError::EmptyQuadrant(q));
    }
    let mut plan = SamplingPlan::from_ratios(*c, s.target_proportions(c));
    plan.params = Some(s.params());
    Ok(plan)
}
