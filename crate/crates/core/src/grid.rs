//! Uniform sampling window on the real line and its dual wavenumber grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform grid on `[-L, L)` with `n` nodes `q_j = -L + j Δ`.
///
/// Wavenumbers are stored in FFT order: entry `m` holds `2π m̃ / (n Δ)`
/// where `m̃ = m` for `m < n/2` and `m̃ = m - n` otherwise, so the signed
/// indices cover `[-n/2, n/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    n: usize,
    half_width: f64,
    spacing: f64,
}

impl Grid {
    pub fn new(n: usize, half_width: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "sample count must be a power of two >= 8, got {n}"
            )));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        Ok(Self {
            n,
            half_width,
            spacing: 2.0 * half_width / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Signed index `m̃` of storage slot `m`.
    pub fn signed_index(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, m: usize) -> f64 {
        self.signed_index(m) as f64 * self.wavenumber_spacing()
    }

    pub fn wavenumbers(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n).map(move |m| self.wavenumber(m))
    }

    /// `Δk = 2π / (n Δ)`.
    pub fn wavenumber_spacing(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.spacing)
    }

    /// Largest wavenumber magnitude on the grid, `π / Δ`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }

    /// Storage slot holding `-k` for the coefficient at slot `m`.
    pub fn mirror(&self, m: usize) -> usize {
        (self.n - m) % self.n
    }

    /// Same window sampled `factor` times more densely.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        Grid::new(self.n * factor, self.half_width)
    }
}

/// Builds the working grid; see [`Grid::new`].
pub fn make_grid(n: usize, half_width: f64) -> Result<Grid> {
    Grid::new(n, half_width)
}
