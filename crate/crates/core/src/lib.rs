//! Free-surface reconstruction of solitary water waves from bed-pressure
//! traces, and the stability of that reconstruction under errors in the
//! wave speed, the pressure trace and the depth.
//!
//! The pipeline is `𝔭 → g = (1-2κ𝔭)^{-1/2} - 1 → ĝ → η = F⁻¹[sinh(kd)/k ĝ]`,
//! evaluated with FFTs on a uniform window of the real line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod error_analysis;
pub mod experiments;
pub mod grid;
pub mod reconstruction;
pub mod spectral;
pub mod wave_model;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid};
pub use spectral::{
    forward_transform, inverse_transform, l2_norm, RealField, SpectralCutoff, Spectrum,
};
pub use wave_model::{PerturbationSpec, PhysicalParams, PressureTrace};
