use serde::{Deserialize, Serialize};

use super::plan::{compute_plan, quadrant_bounds};
use super::{BalanceError, BalanceParams};
use crate::dataset::QuadrantCounts;
use crate::par::{self, Execution};

/// A step that divides `[0, 1]` into a whole number of intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeStep {
    divisions: u32,
}

impl LatticeStep {
    pub fn new(step: f64) -> Result<Self, BalanceError> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(BalanceError::InvalidStep(step));
        }
        let n = (1.0 / step).round();
        if (n * step - 1.0).abs() > 1e-9 {
            return Err(BalanceError::InvalidStep(step));
        }
        Ok(Self { divisions: n as u32 })
    }

    pub fn divisions(&self) -> u32 {
        self.divisions
    }

    /// The lattice coordinate `i / divisions`.
    pub fn value(&self, i: u32) -> f64 {
        i as f64 / self.divisions as f64
    }

    pub fn params(&self, i: u32, j: u32, k: u32) -> BalanceParams {
        BalanceParams {
            alpha: self.value(i),
            beta: self.value(j),
            gamma: self.value(k),
        }
    }
}

/// Result of scanning the parameter lattice for the tightest size bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBound {
    pub size: usize,
    /// First lattice point (lexicographically) attaining `size`.
    pub argmin: BalanceParams,
    /// Lattice points whose targets admit no valid ratios.
    pub infeasible_points: usize,
}

/// `floor(min_q count_q / ratio_q)` at one parameter point.
pub fn bound_at(c: &QuadrantCounts, b: BalanceParams) -> Result<usize, BalanceError> {
    let plan = compute_plan(c, b)?;
    Ok(quadrant_bounds(&plan)
        .into_iter()
        .flatten()
        .min()
        .expect("ratios sum to one, so at least one is positive"))
}

/// Largest sample size whose quadrant ratios are satisfiable at every point
/// of the `{0, step, ..., 1}^3` lattice.
pub fn max_sample_size(c: &QuadrantCounts, step: f64) -> Result<usize, BalanceError> {
    lattice_bound(c, LatticeStep::new(step)?, Execution::default()).map(|b| b.size)
}

/// Scans the lattice, skipping points with no valid ratios.
pub fn lattice_bound(
    c: &QuadrantCounts,
    step: LatticeStep,
    exec: Execution,
) -> Result<LatticeBound, BalanceError> {
    if let Some(q) = c.empty_quadrant() {
        return Err(BalanceError::EmptyQuadrant(q));
    }
    let n = step.divisions();
    // One task per alpha slice; each returns (min size, argmin, skipped).
    let slices = par::map_range(exec, n as usize + 1, |i| {
        let i = i as u32;
        let mut best: Option<(usize, BalanceParams)> = None;
        let mut skipped = 0usize;
        for j in 0..=n {
            for k in 0..=n {
                let b = step.params(i, j, k);
                match bound_at(c, b) {
                    Ok(size) => {
                        if best.is_none_or(|(s, _)| size < s) {
                            best = Some((size, b));
                        }
                    }
                    Err(BalanceError::InfeasibleRates { .. }) => skipped += 1,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok((best, skipped))
    });

    let mut best: Option<(usize, BalanceParams)> = None;
    let mut infeasible_points = 0;
    for slice in slices {
        let (b, skipped) = slice?;
        infeasible_points += skipped;
        if let Some((size, p)) = b {
            if best.is_none_or(|(s, _)| size < s) {
                best = Some((size, p));
            }
        }
    }
    if infeasible_points > 0 {
        log::warn!("{infeasible_points} lattice point(s) admit no valid sampling ratios and were skipped");
    }
    // The identity point is always feasible.
    let (size, argmin) = best.expect("identity lattice point is feasible");
    Ok(LatticeBound {
        size,
        argmin,
        infeasible_points,
    })
}
