//! Sampling plans that move a dataset toward a target balance structure.
//!
//! Three parameters in `[0, 1]` interpolate, respectively, the privileged
//! fraction toward 0.5, the favourable fraction toward 0.5, and the
//! privileged group's favourability advantage toward parity. From those
//! targets the four quadrant ratios follow in closed form.

mod lattice;
mod plan;
mod preset;
mod sample;

use serde::{Deserialize, Serialize};

use crate::dataset::Quadrant;

pub use lattice::{bound_at, lattice_bound, max_sample_size, LatticeBound, LatticeStep};
pub use plan::{
    check_restrictions, compute_plan, quadrant_bounds, range_interval, source_advantage,
    Interval, QuadrantRatios, RestrictionVerdict, SamplingPlan,
};
pub use preset::{preset_plan, SetupPreset};
pub use sample::{apportion, materialize_sample};

/// Numeric tolerance for plan invariants.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum BalanceError {
    #[error("parameter {name} = {value} outside [0, 1]")]
    ParamOutOfRange { name: &'static str, value: f64 },
    #[error("quadrant {0} is empty; sampling ratios are undefined")]
    EmptyQuadrant(Quadrant),
    #[error(
        "no sampling ratios satisfy {params}: favourable rates would be \
         {fav_rate_privileged:.6} (privileged) and {fav_rate_unprivileged:.6} (unprivileged)"
    )]
    InfeasibleRates {
        params: BalanceParams,
        fav_rate_privileged: f64,
        fav_rate_unprivileged: f64,
    },
    #[error("sample of size {size} is infeasible: quadrant {quadrant} needs {needed} but has {available}")]
    Infeasible {
        size: usize,
        quadrant: Quadrant,
        needed: usize,
        available: usize,
    },
    #[error("lattice step {0} does not divide [0, 1] evenly")]
    InvalidStep(f64),
}

/// The `(alpha, beta, gamma)` balance triple.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BalanceParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl BalanceParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, BalanceError> {
        let p = Self { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub const IDENTITY: BalanceParams = BalanceParams {
        alpha: 0.0,
        beta: 0.0,
        gamma: 0.0,
    };

    pub const EQUILIBRIUM: BalanceParams = BalanceParams {
        alpha: 1.0,
        beta: 1.0,
        gamma: 1.0,
    };

    pub fn validate(&self) -> Result<(), BalanceError> {
        for (name, value) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(BalanceError::ParamOutOfRange { name, value });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for BalanceParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {}, {})", self.alpha, self.beta, self.gamma)
    }
}
