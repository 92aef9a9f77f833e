use serde::{Deserialize, Serialize};

use super::{BalanceError, BalanceParams, TOLERANCE};
use crate::dataset::{Quadrant, QuadrantCounts};

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

/// The closed interval between `x` and `y`, whichever order they come in.
pub fn range_interval(x: f64, y: f64) -> Interval {
    Interval {
        lo: x.min(y),
        hi: x.max(y),
    }
}

/// Target fraction of the sample per quadrant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuadrantRatios {
    pub p_f: f64,
    pub p_uf: f64,
    pub up_f: f64,
    pub up_uf: f64,
}

impl QuadrantRatios {
    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            p_f: a[0],
            p_uf: a[1],
            up_f: a[2],
            up_uf: a[3],
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p_f, self.p_uf, self.up_f, self.up_uf]
    }

    pub fn get(&self, q: Quadrant) -> f64 {
        self.as_array()[q.index()]
    }

    /// Source proportions of `c`.
    pub fn of_counts(c: &QuadrantCounts) -> Self {
        let total = c.total() as f64;
        Self::from_array(c.as_array().map(|n| n as f64 / total))
    }
}

/// Quadrant ratios plus the intermediate quantities they were derived from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub counts: QuadrantCounts,
    /// `None` for plans built directly from ratios.
    pub params: Option<BalanceParams>,
    /// Privileged share of the sample (P').
    pub privileged_fraction: f64,
    /// Favourable share of the sample (F').
    pub favourable_fraction: f64,
    /// Privileged favourable rate over unprivileged favourable rate (A').
    pub advantage: f64,
    /// Favourable rate inside the privileged group (F'_p).
    pub fav_rate_privileged: f64,
    /// Favourable rate inside the unprivileged group (F'_up).
    pub fav_rate_unprivileged: f64,
    pub ratios: QuadrantRatios,
    pub sample_size: Option<usize>,
}

impl SamplingPlan {
    /// Builds a plan from explicit quadrant ratios, recovering the
    /// intermediates from them.
    pub fn from_ratios(counts: QuadrantCounts, ratios: QuadrantRatios) -> Self {
        let privileged = ratios.p_f + ratios.p_uf;
        let favourable = ratios.p_f + ratios.up_f;
        let fav_rate_privileged = ratios.p_f / privileged;
        let fav_rate_unprivileged = ratios.up_f / (1.0 - privileged);
        Self {
            counts,
            params: None,
            privileged_fraction: privileged,
            favourable_fraction: favourable,
            advantage: fav_rate_privileged / fav_rate_unprivileged,
            fav_rate_privileged,
            fav_rate_unprivileged,
            ratios,
            sample_size: None,
        }
    }

    pub fn with_size(mut self, size: usize) -> Self {
        self.sample_size = Some(size);
        self
    }
}

/// Favourability advantage of the privileged group in `c`:
/// `(p_f / |p|) / (up_f / |up|)`.
pub fn source_advantage(c: &QuadrantCounts) -> f64 {
    (c.p_f as f64 / c.privileged() as f64) / (c.up_f as f64 / c.unprivileged() as f64)
}

/// Computes the quadrant ratios for balance parameters `b`.
///
/// Fails when a source quadrant is empty, or when the three targets admit no
/// ratios in `[0, 1]` (a group's favourable rate would exceed 1). The second
/// case happens for extreme label skew combined with group equalization.
pub fn compute_plan(c: &QuadrantCounts, b: BalanceParams) -> Result<SamplingPlan, BalanceError> {
    b.validate()?;
    if let Some(q) = c.empty_quadrant() {
        return Err(BalanceError::EmptyQuadrant(q));
    }
    let total = c.total() as f64;
    let privileged = c.privileged() as f64 / total * (1.0 - b.alpha) + 0.5 * b.alpha;
    let favourable = c.favourable() as f64 / total * (1.0 - b.beta) + 0.5 * b.beta;
    let advantage = source_advantage(c) * (1.0 - b.gamma) + b.gamma;

    let fav_up = favourable / (1.0 + advantage * privileged - privileged);
    let fav_p = advantage * fav_up;
    if fav_p > 1.0 + TOLERANCE || fav_up > 1.0 + TOLERANCE {
        return Err(BalanceError::InfeasibleRates {
            params: b,
            fav_rate_privileged: fav_p,
            fav_rate_unprivileged: fav_up,
        });
    }
    let (fav_p, fav_up) = (fav_p.min(1.0), fav_up.min(1.0));

    let ratios = QuadrantRatios {
        p_f: privileged * fav_p,
        p_uf: privileged * (1.0 - fav_p),
        up_f: (1.0 - privileged) * fav_up,
        up_uf: (1.0 - privileged) * (1.0 - fav_up),
    };
    Ok(SamplingPlan {
        counts: *c,
        params: Some(b),
        privileged_fraction: privileged,
        favourable_fraction: favourable,
        advantage,
        fav_rate_privileged: fav_p,
        fav_rate_unprivileged: fav_up,
        ratios,
        sample_size: None,
    })
}

/// Largest sample size each quadrant can support on its own,
/// `floor(count / ratio)`; `None` where the ratio is zero.
pub fn quadrant_bounds(plan: &SamplingPlan) -> [Option<usize>; 4] {
    let counts = plan.counts.as_array();
    let ratios = plan.ratios.as_array();
    std::array::from_fn(|i| {
        (ratios[i] > 0.0).then(|| {
            let x = counts[i] as f64 / ratios[i];
            (x + TOLERANCE * x.max(1.0)).floor() as usize
        })
    })
}

/// Restriction indices 1 to 6 violated by a plan; empty means pass.
///
/// Each of the three interval checks covers two restrictions: leaving the
/// interval past the source value violates the odd one (more imbalance than
/// the source), leaving it past the balance target violates the even one
/// (roles swapped).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionVerdict {
    pub violated: Vec<u8>,
}

impl RestrictionVerdict {
    pub fn passed(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Checks the plan's ratios against the restriction intervals derived from
/// the source counts.
pub fn check_restrictions(c: &QuadrantCounts, plan: &SamplingPlan) -> RestrictionVerdict {
    let total = c.total() as f64;
    let r = &plan.ratios;
    let privileged = r.p_f + r.p_uf;
    let favourable = r.p_f + r.up_f;
    let advantage = (r.p_f / privileged) / (r.up_f / (1.0 - privileged));

    let checks = [
        (privileged, c.privileged() as f64 / total, 0.5, 1u8),
        (favourable, c.favourable() as f64 / total, 0.5, 3),
        (advantage, source_advantage(c), 1.0, 5),
    ];
    let violated = checks
        .into_iter()
        .filter_map(|(value, source, target, first)| {
            if range_interval(source, target).contains(value, TOLERANCE) {
                None
            } else if value.is_nan() || (value - target).signum() == (source - target).signum() || source == target {
                // Outside the interval on the source side.
                Some(first)
            } else {
                Some(first + 1)
            }
        })
        .collect();
    RestrictionVerdict { violated }
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Independent route to the ratios: the constraint system is solved by
    //! bisection on the privileged-favourable ratio, never touching the
    //! closed form for the per-group rates.
    use super::*;

    pub fn targets(c: &QuadrantCounts, b: BalanceParams) -> (f64, f64, f64) {
        let d = c.total() as f64;
        let p = c.privileged() as f64 / d;
        let f = c.favourable() as f64 / d;
        let a = (c.p_f as f64 / c.privileged() as f64) / (c.up_f as f64 / c.unprivileged() as f64);
        (
            p + (0.5 - p) * b.alpha,
            f + (0.5 - f) * b.beta,
            a + (1.0 - a) * b.gamma,
        )
    }

    /// Returns `None` when no non-negative solution exists.
    pub fn solve(c: &QuadrantCounts, b: BalanceParams) -> Option<[f64; 4]> {
        let (pp, ff, aa) = targets(c, b);
        // With x = r_pf the first two equations fix the rest:
        // r_puf = P' - x, r_upf = F' - x, r_upuf = 1 - P' - F' + x.
        let lo0 = (pp + ff - 1.0).max(0.0);
        let hi0 = pp.min(ff);
        let adv = |x: f64| (x / pp) / ((ff - x) / (1.0 - pp));
        let (mut lo, mut hi) = (lo0, hi0);
        if !(adv(lo) <= aa && adv(hi) >= aa) {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if adv(mid) < aa {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        Some([x, pp - x, ff - x, 1.0 - pp - ff + x])
    }
}
