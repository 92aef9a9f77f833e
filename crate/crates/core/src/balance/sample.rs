use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::plan::{QuadrantRatios, SamplingPlan};
use super::BalanceError;
use crate::dataset::{Dataset, Quadrant};
use crate::seed;

/// Splits `size` into integer quadrant sizes by largest remainder.
///
/// Quotas are floored, then the leftover units go to the largest fractional
/// parts; ties go to the earlier quadrant. The result always sums to `size`.
pub fn apportion(size: usize, ratios: &QuadrantRatios) -> [usize; 4] {
    let quotas = ratios.as_array().map(|r| size as f64 * r.max(0.0));
    let mut sizes = quotas.map(|q| (q + 1e-9).floor() as usize);
    let remainders: [f64; 4] = std::array::from_fn(|i| quotas[i] - sizes[i] as f64);

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| remainders[b].total_cmp(&remainders[a]).then(a.cmp(&b)));
    let assigned: usize = sizes.iter().sum();
    if assigned <= size {
        for &i in order.iter().cycle().take(size - assigned) {
            sizes[i] += 1;
        }
    } else {
        // Only reachable through rounding noise in the quotas.
        let mut excess = assigned - size;
        for &i in order.iter().rev() {
            let take = excess.min(sizes[i]);
            sizes[i] -= take;
            excess -= take;
        }
    }
    sizes
}

/// Draws a sample of exactly `size` records following `plan`.
///
/// Quadrant sizes come from [`apportion`]; each quadrant is sampled uniformly
/// without replacement from its own seeded stream. The sample keeps the
/// source record order.
pub fn materialize_sample(
    d: &Dataset,
    plan: &SamplingPlan,
    size: usize,
    seed: u64,
) -> Result<Dataset, BalanceError> {
    let sizes = apportion(size, &plan.ratios);
    let pools = d.quadrant_indices();
    for q in Quadrant::ALL {
        let (needed, available) = (sizes[q.index()], pools[q.index()].len());
        if needed > available {
            return Err(BalanceError::Infeasible {
                size,
                quadrant: q,
                needed,
                available,
            });
        }
    }

    let mut picked = Vec::with_capacity(size);
    for q in Quadrant::ALL {
        let pool = &pools[q.index()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[q.index() as u64]));
        let chosen = rand::seq::index::sample(&mut rng, pool.len(), sizes[q.index()]);
        picked.extend(chosen.into_iter().map(|k| pool[k]));
    }
    picked.sort_unstable();
    Ok(d.subset(&picked))
}
