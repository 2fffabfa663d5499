//! Deterministic sample sets over `window × fundamental domain`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::models::{FlowModel, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    /// Points per axis of the regular grid over `s`, the first and the flow coordinate.
    pub grid: usize,
    /// Additional uniform random points.
    pub random: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling { grid: 64, random: 1000, seed: 0 }
    }
}

impl Sampling {
    pub fn new(grid: usize, random: usize, seed: u64) -> Self {
        Sampling { grid, random, seed }
    }

    /// Grid points first (lexicographic in `s`, then coordinates), then random
    /// points, then the model's distinguished points at evenly spaced `s`.
    pub fn points(&self, model: &FlowModel, window: (f64, f64)) -> Vec<(f64, Point)> {
        let d = model.domain();
        let n = self.grid;
        let (a, b) = window;
        let s_at = |k: usize| if n > 1 { a + (b - a) * k as f64 / (n - 1) as f64 } else { 0.5 * (a + b) };
        let mut out = Vec::with_capacity(n * n * n + self.random);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.push((s_at(k), [d.axis_value(0, i, n), d.centre(1), d.axis_value(2, j, n)]));
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        for _ in 0..self.random {
            let s = rng.gen_range(a..=b);
            out.push((s, d.random_point(&mut rng)));
        }
        for p in model.distinguished_points() {
            for k in 0..n.max(2) {
                out.push((a + (b - a) * k as f64 / (n.max(2) - 1) as f64, p));
            }
        }
        out
    }

    /// Base points only: the `grid × grid` base grid plus random points.
    pub fn base_points(&self, model: &FlowModel) -> Vec<Point> {
        let mut out = model.base_grid(self.grid);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let d = model.domain();
        for _ in 0..self.random {
            out.push(d.random_point(&mut rng));
        }
        out.extend(model.distinguished_points());
        out
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_determinism() {
        let s = Sampling::new(4, 10, 7);
        let a = s.points(&FlowModel::Cat, (-1.0, 1.0));
        assert_eq!(a.len(), 64 + 10);
        assert_eq!(a, s.points(&FlowModel::Cat, (-1.0, 1.0)));
        assert_eq!(a[0].0, -1.0);
        assert_eq!(a[63].0, 1.0);
        assert!(a.iter().all(|(s, _)| (-1.0..=1.0).contains(s)));
    }
}
