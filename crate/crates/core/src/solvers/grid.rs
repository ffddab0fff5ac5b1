use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dyadic exponent accepted; `0.5^k` stays far from subnormal.
pub const MAX_K: u32 = 40;

/// Uniform grid `t_n = t0 + n h` with `h = 0.5^k`, covering `[t0, tf]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    t0: f64,
    tf: f64,
    k: u32,
    n_steps: usize,
}

impl TimeGrid {
    /// `N = max(1, round((tf - t0) / h))` steps, so the last point is within
    /// `h / 2` of `tf`.
    pub fn new(t0: f64, tf: f64, k: u32) -> Result<Self> {
        if !(t0.is_finite() && tf.is_finite() && t0 < tf) {
            return Err(Error::InvalidInterval { a: t0, b: tf });
        }
        if k > MAX_K {
            return Err(Error::InvalidArgument(format!("k = {k} exceeds the maximum {MAX_K}")));
        }
        let h = 0.5f64.powi(k as i32);
        let steps = ((tf - t0) / h).round();
        if steps > 1e12 {
            return Err(Error::InvalidArgument(format!(
                "grid with {steps:e} steps is too large"
            )));
        }
        Ok(Self {
            t0,
            tf,
            k,
            n_steps: (steps as usize).max(1),
        })
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn tf(&self) -> f64 {
        self.tf
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn h(&self) -> f64 {
        0.5f64.powi(self.k as i32)
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.h()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|n| self.time(n))
    }

    /// Index stride of this grid's points inside a finer grid over the same
    /// interval: `fine.time(n * stride) == self.time(n)`.
    pub fn stride_in(&self, fine: &TimeGrid) -> Result<usize> {
        if fine.k < self.k || fine.t0 != self.t0 || fine.tf != self.tf {
            return Err(Error::InvalidArgument(format!(
                "grid k = {} does not nest inside grid k = {}",
                self.k, fine.k
            )));
        }
        let stride = 1usize << (fine.k - self.k);
        if self.n_steps * stride != fine.n_steps {
            return Err(Error::InvalidArgument(
                "grid lengths do not nest; (tf - t0) is not a multiple of the coarse step".into(),
            ));
        }
        Ok(stride)
    }
}
