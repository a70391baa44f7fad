//! Sampled fields, continuous-convention discrete Fourier transforms and the
//! hyperbolic Fourier multipliers.
//!
//! The transforms approximate
//!
//! ```text
//! F{f}(k)    = ∫ f(q) e^{-ikq} dq
//! F⁻¹{F}(q)  = (1/2π) ∫ F(k) e^{ikq} dk
//! ```
//!
//! on a [`Grid`]. Forward is `Δ · e^{ikL} · DFT(f)`; the phase factor moves the
//! origin of the DFT from the left window edge `-L` to `q = 0`.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Default relative edge tolerance for the decay check in [`forward_transform`].
pub const DEFAULT_EDGE_TOLERANCE: f64 = 1e-10;

/// Relative asymmetry above which [`inverse_transform`] refuses a spectrum.
pub const HERMITIAN_TOLERANCE: f64 = 1e-9;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

/// Real samples `f(q_j)`, one per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.n()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pointwise map; the result is re-validated for finiteness.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Self::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &RealField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        self.map(|v| factor * v)
    }

    pub fn max_abs_diff(&self, other: &RealField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub(crate) fn check_same_grid(&self, other: &RealField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid(
                "fields are sampled on different grids".into(),
            ));
        }
        Ok(())
    }

    /// True when both edge samples are within `rel_tol · max|f|`.
    pub fn edge_decayed(&self, rel_tol: f64) -> bool {
        let limit = rel_tol * self.max_abs();
        let first = self.values[0].abs();
        let last = self.values[self.values.len() - 1].abs();
        first <= limit && last <= limit
    }
}

/// Record of the spectral cutoff applied before a multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffReport {
    /// Absolute magnitude below which coefficients were zeroed.
    pub threshold: f64,
    /// Largest |k| whose coefficient survived, `None` if none did.
    pub max_retained_wavenumber: Option<f64>,
    pub zeroed: usize,
}

/// Gate applied to a spectrum before any exponentially growing multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCutoff {
    /// Coefficients with `|F̂| < rel · max|F̂|` are zeroed.
    pub rel: f64,
    /// Optional hard cap: coefficients with `|k| > k_max` are zeroed too.
    pub k_max: Option<f64>,
}

impl Default for SpectralCutoff {
    fn default() -> Self {
        Self {
            rel: 1e-13,
            k_max: None,
        }
    }
}

impl SpectralCutoff {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel >= 0.0) || !self.rel.is_finite() {
            return Err(Error::param("cutoff_rel", format!("must be >= 0, got {}", self.rel)));
        }
        if let Some(k) = self.k_max {
            if !(k > 0.0) {
                return Err(Error::param("k_max", format!("must be positive, got {k}")));
            }
        }
        Ok(())
    }
}

/// Complex coefficients `F̂(k_m)` in grid storage order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
    edge_warning: bool,
    cutoff: Option<CutoffReport>,
}

impl Spectrum {
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::LengthMismatch {
                expected: grid.n(),
                got: coeffs.len(),
            });
        }
        Ok(Self {
            grid,
            coeffs,
            edge_warning: false,
            cutoff: None,
        })
    }

    /// Samples a function of `k` at every grid wavenumber.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            coeffs: grid.wavenumbers().map(f).collect(),
            edge_warning: false,
            cutoff: None,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Set when the source field had not decayed at the window edges.
    pub fn edge_warning(&self) -> bool {
        self.edge_warning
    }

    /// Cutoff applied by the last multiplier, if any.
    pub fn cutoff(&self) -> Option<&CutoffReport> {
        self.cutoff.as_ref()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Largest `|F̂(k) - conj(F̂(-k))|` relative to `max|F̂|`, with its slot.
    pub fn hermitian_asymmetry(&self) -> (f64, usize) {
        let scale = self.max_abs();
        if scale == 0.0 {
            return (0.0, 0);
        }
        let mut worst = (0.0, 0);
        for m in 0..self.coeffs.len() {
            let partner = self.coeffs[self.grid.mirror(m)].conj();
            let a = (self.coeffs[m] - partner).norm() / scale;
            if a > worst.0 {
                worst = (a, m);
            }
        }
        worst
    }

    /// Multiplies coefficient `m` by `factor(k_m)` after the cutoff gate.
    ///
    /// Gated coefficients are set to zero without evaluating `factor`, so an
    /// overflowing multiplier far beyond the cutoff never produces `0 · ∞`.
    pub fn apply_multiplier(
        &self,
        cutoff: &SpectralCutoff,
        factor: impl Fn(f64) -> f64,
    ) -> Result<Spectrum> {
        cutoff.validate()?;
        let threshold = cutoff.rel * self.max_abs();
        let mut zeroed = 0;
        let mut max_retained: Option<f64> = None;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| {
                let k = self.grid.wavenumber(m);
                let beyond_cap = cutoff.k_max.is_some_and(|kmax| k.abs() > kmax);
                if c.norm() < threshold || beyond_cap {
                    zeroed += 1;
                    Complex64::new(0.0, 0.0)
                } else {
                    if c.norm() > 0.0 {
                        max_retained = Some(max_retained.map_or(k.abs(), |v| v.max(k.abs())));
                    }
                    c * factor(k)
                }
            })
            .collect();
        Ok(Spectrum {
            grid: self.grid,
            coeffs,
            edge_warning: self.edge_warning,
            cutoff: Some(CutoffReport {
                threshold,
                max_retained_wavenumber: max_retained,
                zeroed,
            }),
        })
    }

    /// Multiplier `sinh(k d) / k`, taking the value `d` at `k = 0`.
    pub fn apply_sinh_multiplier(&self, depth_arg: f64, cutoff: &SpectralCutoff) -> Result<Spectrum> {
        check_depth(depth_arg)?;
        self.apply_multiplier(cutoff, |k| sinh_over_k(k, depth_arg))
    }

    /// Multiplier `cosh(k d)`.
    pub fn apply_cosh_multiplier(&self, depth_arg: f64, cutoff: &SpectralCutoff) -> Result<Spectrum> {
        check_depth(depth_arg)?;
        self.apply_multiplier(cutoff, |k| (k * depth_arg).cosh())
    }
}

fn check_depth(depth_arg: f64) -> Result<()> {
    if !(depth_arg > 0.0) || !depth_arg.is_finite() {
        return Err(Error::param("depth", format!("must be positive, got {depth_arg}")));
    }
    Ok(())
}

/// `sinh(k d) / k` with its removable singularity filled by the limit `d`.
pub fn sinh_over_k(k: f64, depth: f64) -> f64 {
    if k == 0.0 {
        depth
    } else {
        (k * depth).sinh() / k
    }
}

pub fn forward_transform(f: &RealField) -> Spectrum {
    forward_transform_with(f, DEFAULT_EDGE_TOLERANCE)
}

/// Forward transform with an explicit relative edge tolerance for the
/// decay warning.
pub fn forward_transform_with(f: &RealField, edge_tolerance: f64) -> Spectrum {
    let grid = *f.grid();
    let n = grid.n();
    let mut buf: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(n, false).process(&mut buf);
    let dq = grid.spacing();
    let half = grid.half_width();
    for (m, c) in buf.iter_mut().enumerate() {
        let phase = grid.wavenumber(m) * half;
        *c *= Complex64::from_polar(dq, phase);
    }
    // Real input: pair coefficients so F̂(-k) = conj F̂(k) holds exactly.
    let coeffs: Vec<Complex64> = (0..n)
        .map(|m| 0.5 * (buf[m] + buf[grid.mirror(m)].conj()))
        .collect();
    Spectrum {
        grid,
        coeffs,
        edge_warning: !f.edge_decayed(edge_tolerance),
        cutoff: None,
    }
}

pub fn inverse_transform(s: &Spectrum) -> Result<RealField> {
    let (asymmetry, index) = s.hermitian_asymmetry();
    if asymmetry > HERMITIAN_TOLERANCE {
        return Err(Error::HermitianViolation { index, asymmetry });
    }
    let grid = *s.grid();
    let n = grid.n();
    let half = grid.half_width();
    let mut buf: Vec<Complex64> = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, &c)| c * Complex64::from_polar(1.0, -grid.wavenumber(m) * half))
        .collect();
    plan(n, true).process(&mut buf);
    // (1/2π) Σ F̂ e^{ikq} Δk with Δk = 2π/(nΔ)
    let norm = 1.0 / (n as f64 * grid.spacing());
    RealField::new(grid, buf.into_iter().map(|c| c.re * norm).collect())
}

/// Trapezoid approximation of `(∫ |f|² dq)^{1/2}` over the sampled window.
pub fn l2_norm(f: &RealField) -> f64 {
    let v = f.values();
    let sum: f64 = v.iter().map(|x| x * x).sum();
    let ends = 0.5 * (v[0] * v[0] + v[v.len() - 1] * v[v.len() - 1]);
    (f.grid().spacing() * (sum - ends)).max(0.0).sqrt()
}

/// `(1/2π) Σ |F̂(k_m)|² Δk`, the spectral side of the discrete Parseval identity.
pub fn spectral_energy(s: &Spectrum) -> f64 {
    let dk = s.grid().wavenumber_spacing();
    s.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() * dk / (2.0 * std::f64::consts::PI)
}
