use alloc::vec::Vec;
use core::f64::consts::TAU;

use super::FloatMatrix;
use crate::error::{Error, Result};

/// Uniform periodic grid `t_i = 2πi/n + offset`, `i = 0..n`.
///
/// Every point carries the quadrature weight `2π/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    offset: f64,
}

impl GridSpec {
    /// `offset` must lie in `[0, 2π/n)`.
    pub fn new(n: usize, offset: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid needs at least one point".into()));
        }
        let spacing = TAU / n as f64;
        if !offset.is_finite() || offset < 0.0 || offset >= spacing {
            return Err(Error::InvalidParameter(alloc::format!(
                "grid offset {offset} not in [0, {spacing})"
            )));
        }
        Ok(Self { n, offset })
    }

    /// Grid with zero offset.
    pub fn aligned(n: usize) -> Result<Self> {
        Self::new(n, 0.0)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn offset(&self) -> f64 {
        self.offset
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        TAU / self.n as f64
    }

    /// Quadrature weight of each point.
    #[inline]
    pub fn weight(&self) -> f64 {
        self.spacing()
    }

    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n as f64 + self.offset
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

/// Kernel matrix `K_ij = 1 + cos(s_i - t_j)`.
pub fn sample_kernel(s_grid: &GridSpec, t_grid: &GridSpec) -> FloatMatrix {
    let s = s_grid.points();
    let t = t_grid.points();
    FloatMatrix::from_fn(s.len(), t.len(), |i, j| 1.0 + libm::cos(s[i] - t[j]))
        .expect("cosine samples are finite")
}
