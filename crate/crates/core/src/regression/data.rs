use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::curve::{cell_index, StepCurve};

/// Observed `(x, y)` pairs with `x` in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<(f64, f64)>,
    /// Seed the data were generated from, when synthetic.
    pub seed: Option<u64>,
}

impl Dataset {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Dataset { points, seed: None }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` points with `x ~ U[0, 1)` and `y = fstar(x) + N(0, 1)` noise.
pub fn gen_dataset(fstar: &StepCurve, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let x: f64 = rng.random();
            let noise: f64 = rng.sample(StandardNormal);
            (x, fstar.values()[cell_index(x, fstar.depth())] + noise)
        })
        .collect();
    Dataset { points, seed: Some(seed) }
}

/// Sufficient statistics of the responses falling in one cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellStats {
    pub count: u64,
    pub sum_y: f64,
    pub sum_y2: f64,
}

impl CellStats {
    fn merge(self, other: CellStats) -> CellStats {
        CellStats {
            count: self.count + other.count,
            sum_y: self.sum_y + other.sum_y,
            sum_y2: self.sum_y2 + other.sum_y2,
        }
    }
}

/// Per-cell statistics on the depth-`depth` dyadic partition.
pub fn cell_stats(d: &Dataset, depth: u32) -> Vec<CellStats> {
    let mut cells = alloc::vec![CellStats::default(); 1usize << depth];
    for &(x, y) in &d.points {
        let c = &mut cells[cell_index(x.clamp(0.0, 1.0), depth)];
        c.count += 1;
        c.sum_y += y;
        c.sum_y2 += y * y;
    }
    cells
}

/// Merge sibling cells: depth `k` statistics to depth `k - 1`.
pub(crate) fn coarsen(stats: &[CellStats]) -> Vec<CellStats> {
    stats.chunks(2).map(|pair| pair[0].merge(pair[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_dataset() {
        let d = gen_dataset(&StepCurve::constant(0.0), 0, 1);
        assert!(d.is_empty());
        assert!(cell_stats(&d, 3).iter().all(|c| *c == CellStats::default()));
    }

    #[test]
    fn cell_stats_examples() {
        let d = Dataset::new(vec![(0.3, 2.0)]);
        let s = cell_stats(&d, 2);
        assert_eq!(s[1], CellStats { count: 1, sum_y: 2.0, sum_y2: 4.0 });
        assert_eq!(s.iter().map(|c| c.count).sum::<u64>(), 1);
        let d = Dataset::new(vec![(0.1, 1.0), (0.2, 3.0)]);
        assert_eq!(cell_stats(&d, 0), vec![CellStats { count: 2, sum_y: 4.0, sum_y2: 10.0 }]);
    }

    #[test]
    fn coarsening_matches_direct() {
        let d = gen_dataset(&StepCurve::constant(1.0), 500, 9);
        let fine = cell_stats(&d, 4);
        let coarse = coarsen(&coarsen(&fine));
        let direct = cell_stats(&d, 2);
        for (a, b) in coarse.iter().zip(&direct) {
            assert_eq!(a.count, b.count);
            assert!((a.sum_y - b.sum_y).abs() < 1e-9);
        }
    }

    #[test]
    fn reproducible_and_in_range() {
        let f = StepCurve::new(1, vec![0.0, 3.0]).unwrap();
        let a = gen_dataset(&f, 100, 42);
        assert_eq!(a, gen_dataset(&f, 100, 42));
        assert_ne!(a, gen_dataset(&f, 100, 43));
        assert!(a.points.iter().all(|(x, _)| (0.0..=1.0).contains(x)));
        assert_eq!(a.seed, Some(42));
    }

    #[test]
    fn sample_mean_of_noise() {
        // 4-sigma CLT band for the mean of 10^5 unit-variance draws
        let band = 4.0 / (1e5f64).sqrt();
        for seed in 0..10 {
            for level in [0.0, 5.0] {
                let d = gen_dataset(&StepCurve::constant(level), 100_000, seed);
                let mean = d.points.iter().map(|p| p.1).sum::<f64>() / d.len() as f64;
                assert!((mean - level).abs() < band, "seed {seed}, level {level}: {mean}");
            }
        }
    }
}
