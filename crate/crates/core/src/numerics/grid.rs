//! Logarithmically spaced sample grids.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub per_decade: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        Self { lo: 1e-8, hi: 1e8, per_decade: 64 }
    }
}

impl LogGrid {
    pub fn new(lo: f64, hi: f64, per_decade: usize) -> Self {
        Self { lo, hi, per_decade }
    }

    pub fn len(&self) -> usize {
        let decades = (self.hi / self.lo).log10();
        (decades * self.per_decade as f64).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Points `lo * 10^{i/per_decade}`; the last point is exactly `hi`.
    pub fn points(&self) -> Vec<f64> {
        let n = self.len();
        let (l0, l1) = (self.lo.ln(), self.hi.ln());
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.hi
                } else if i == 0 {
                    self.lo
                } else {
                    (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect()
    }

    /// Same range, `factor` times denser.
    pub fn refined(&self, factor: usize) -> Self {
        Self { per_decade: self.per_decade * factor, ..*self }
    }

    pub fn describe(&self) -> String {
        format!("log grid [{:e}, {:e}], {} points/decade", self.lo, self.hi, self.per_decade)
    }
}
