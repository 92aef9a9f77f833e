use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Dataset, DatasetError, Quadrant};
use crate::seed;

/// Training split plus the two held-out evaluation splits.
#[derive(Clone, Debug)]
pub struct Splits {
    pub train: Dataset,
    pub test0: Dataset,
    pub test1: Dataset,
}

/// Splits every quadrant independently into `(train, test0, test1)`
/// proportions. Held-out sizes are floored; the remainder goes to `train`.
/// Each split keeps the input's record order.
pub fn stratified_split(
    d: &Dataset,
    fractions: [f64; 3],
    seed: u64,
) -> Result<Splits, DatasetError> {
    let sum: f64 = fractions.iter().sum();
    if fractions.iter().any(|&f| !(f > 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(DatasetError::InvalidFractions(fractions));
    }

    let mut parts: [Vec<usize>; 3] = Default::default();
    for (q, mut idx) in Quadrant::ALL.into_iter().zip(d.quadrant_indices()) {
        let n = idx.len();
        if n > 0 && n < 3 {
            log::warn!("quadrant {q} has only {n} record(s); split is degenerate");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed::derive(seed, &[q.index() as u64]));
        idx.shuffle(&mut rng);
        let n0 = floor_count(n, fractions[1]);
        let n1 = floor_count(n, fractions[2]);
        let (held0, rest) = idx.split_at(n0);
        let (held1, train) = rest.split_at(n1);
        parts[0].extend_from_slice(train);
        parts[1].extend_from_slice(held0);
        parts[2].extend_from_slice(held1);
    }
    for p in parts.iter_mut() {
        p.sort_unstable();
    }
    let [train, test0, test1] = parts;
    Ok(Splits {
        train: d.subset(&train),
        test0: d.subset(&test0),
        test1: d.subset(&test1),
    })
}

fn floor_count(n: usize, fraction: f64) -> usize {
    ((n as f64 * fraction + 1e-9).floor() as usize).min(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::test_util::with_counts;
    use crate::dataset::QuadrantCounts;

    #[test]
    fn sixty_twenty_twenty_per_quadrant() {
        let d = with_counts([100, 100, 100, 100]);
        let s = stratified_split(&d, [0.6, 0.2, 0.2], 1).unwrap();
        assert_eq!(s.train.quadrant_counts(), QuadrantCounts::new(60, 60, 60, 60));
        assert_eq!(s.test0.quadrant_counts(), QuadrantCounts::new(20, 20, 20, 20));
        assert_eq!(s.test1.quadrant_counts(), QuadrantCounts::new(20, 20, 20, 20));
    }

    #[test]
    fn leftovers_go_to_train() {
        let d = with_counts([7, 3, 2, 1]);
        let s = stratified_split(&d, [0.6, 0.2, 0.2], 1).unwrap();
        assert_eq!(s.test0.quadrant_counts(), QuadrantCounts::new(1, 0, 0, 0));
        assert_eq!(s.train.quadrant_counts(), QuadrantCounts::new(5, 3, 2, 1));
    }

    #[test]
    fn deterministic_for_seed() {
        let d = with_counts([50, 20, 30, 10]);
        let a = stratified_split(&d, [0.6, 0.2, 0.2], 9).unwrap();
        let b = stratified_split(&d, [0.6, 0.2, 0.2], 9).unwrap();
        assert_eq!(a.train.records(), b.train.records());
        assert_eq!(a.test0.records(), b.test0.records());
        assert_eq!(a.test1.records(), b.test1.records());
        let c = stratified_split(&d, [0.6, 0.2, 0.2], 10).unwrap();
        assert_ne!(a.test0.records(), c.test0.records());
    }

    #[test]
    fn rejects_bad_fractions() {
        let d = with_counts([5, 5, 5, 5]);
        assert!(matches!(
            stratified_split(&d, [0.5, 0.5, 0.1], 0),
            Err(DatasetError::InvalidFractions(_))
        ));
        assert!(stratified_split(&d, [1.0, 0.0, 0.0], 0).is_err());
    }

    #[test]
    fn union_is_a_permutation() {
        let d = with_counts([37, 11, 23, 5]);
        let s = stratified_split(&d, [0.5, 0.3, 0.2], 4).unwrap();
        let key = |r: &crate::dataset::Record| format!("{r:?}");
        let mut all: Vec<String> = d.records().iter().map(key).collect();
        let mut got: Vec<String> = [&s.train, &s.test0, &s.test1]
            .iter()
            .flat_map(|p| p.records().iter().map(key))
            .collect();
        all.sort();
        got.sort();
        assert_eq!(all, got);
    }
}
