//! Free-surface reconstruction from a bed-pressure trace.
//!
//! With `g = (1 - 2κ𝔭)^{-1/2} - 1` the profile is given parametrically by
//!
//! ```text
//! x(q) = q + ∫_{-∞}^{q} F⁻¹[cosh(kd) ĝ](s) ds
//! η(q) = F⁻¹[sinh(kd)/k · ĝ](q)
//! ```
//!
//! Perturbed reconstructions replace `κ, 𝔭, d` by `κ+ε, 𝔭+δ, d+γ`.

use crate::error::{Error, Result};
use crate::spectral::{
    forward_transform, inverse_transform, RealField, SpectralCutoff, Spectrum,
};
use crate::wave_model::{
    check_admissibility, delta_field, PerturbationSpec, PhysicalParams, DEFAULT_MARGIN_FLOOR,
};

/// Gravitational acceleration used by the linear baseline when none is given.
pub const DEFAULT_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionDiagnostics {
    /// Largest |k| kept by the spectral cutoff on `ĝ`.
    pub cutoff_wavenumber: Option<f64>,
    /// `g` had not decayed at the window edges.
    pub edge_warning: bool,
    /// `x(q)` failed to be strictly increasing.
    pub non_monotone_x: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub eta: RealField,
    pub x_of_q: RealField,
    pub params_used: PhysicalParams,
    pub perturbation_used: PerturbationSpec,
    pub diagnostics: ReconstructionDiagnostics,
}

impl ReconstructionResult {
    pub fn grid(&self) -> &crate::grid::Grid {
        self.eta.grid()
    }
}

/// `g_{ε,δ}(q) = (1 - 2(κ+ε)(𝔭(q)+δ(q)))^{-1/2} - 1`.
pub fn compute_g(p: &RealField, kappa: f64, spec: &PerturbationSpec) -> Result<RealField> {
    spec.validate()?;
    let grid = *p.grid();
    let k = kappa + spec.epsilon;
    let values = p
        .values()
        .iter()
        .enumerate()
        .map(|(j, &pv)| {
            let q = grid.node(j);
            let load = 2.0 * k * (pv + spec.delta_at(q));
            let radicand = 1.0 - load;
            if radicand <= DEFAULT_MARGIN_FLOOR {
                Err(Error::RadicandNonPositive {
                    q,
                    value: radicand,
                    floor: DEFAULT_MARGIN_FLOOR,
                })
            } else {
                // (1-x)^{-1/2} - 1 without cancellation for small x
                let root = radicand.sqrt();
                Ok(load / (root * (1.0 + root)))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    RealField::new(grid, values)
}

fn eta_from_spectrum(g_hat: &Spectrum, depth_arg: f64, cutoff: &SpectralCutoff) -> Result<(RealField, Spectrum)> {
    let shaped = g_hat.apply_sinh_multiplier(depth_arg, cutoff)?;
    Ok((inverse_transform(&shaped)?, shaped))
}

fn x_from_spectrum(
    g_hat: &Spectrum,
    depth_arg: f64,
    cutoff: &SpectralCutoff,
) -> Result<(RealField, bool)> {
    let shaped = g_hat.apply_cosh_multiplier(depth_arg, cutoff)?;
    let integrand = inverse_transform(&shaped)?;
    let grid = *integrand.grid();
    let h = grid.spacing();
    let v = integrand.values();
    let mut x = Vec::with_capacity(grid.n());
    let mut acc = 0.0;
    x.push(grid.node(0));
    for j in 1..grid.n() {
        acc += 0.5 * h * (v[j - 1] + v[j]);
        x.push(grid.node(j) + acc);
    }
    let monotone = x.windows(2).all(|w| w[1] > w[0]);
    Ok((RealField::new(grid, x)?, monotone))
}

/// `η = F⁻¹[sinh(k d)/k · ĝ]`.
pub fn reconstruct_eta(g: &RealField, depth_arg: f64, cutoff: &SpectralCutoff) -> Result<RealField> {
    Ok(eta_from_spectrum(&forward_transform(g), depth_arg, cutoff)?.0)
}

/// `x(q_j) = q_j + ∫_{-L}^{q_j} F⁻¹[cosh(k d) ĝ] ds` by the cumulative
/// trapezoid rule. The returned flag is `true` when `x` is strictly
/// increasing.
pub fn reconstruct_x(
    g: &RealField,
    depth_arg: f64,
    cutoff: &SpectralCutoff,
) -> Result<(RealField, bool)> {
    x_from_spectrum(&forward_transform(g), depth_arg, cutoff)
}

/// Full reconstruction from the (possibly perturbed) inputs. Both
/// multipliers use the perturbed depth `d + γ`.
pub fn reconstruct_full(
    p: &RealField,
    params: &PhysicalParams,
    spec: &PerturbationSpec,
    cutoff: &SpectralCutoff,
) -> Result<ReconstructionResult> {
    let report = check_admissibility(p, params, spec)?;
    if !report.passed() {
        return Err(Error::Inadmissible(report.to_string()));
    }
    let g = compute_g(p, params.kappa(), spec)?;
    let depth = report.perturbed_depth;
    let g_hat = forward_transform(&g);
    let (eta, shaped) = eta_from_spectrum(&g_hat, depth, cutoff)?;
    let (x_of_q, monotone) = x_from_spectrum(&g_hat, depth, cutoff)?;
    Ok(ReconstructionResult {
        eta,
        x_of_q,
        params_used: *params,
        perturbation_used: *spec,
        diagnostics: ReconstructionDiagnostics {
            cutoff_wavenumber: shaped.cutoff().and_then(|c| c.max_retained_wavenumber),
            edge_warning: g_hat.edge_warning(),
            non_monotone_x: !monotone,
        },
    })
}

/// Linear transfer-function recovery `η = F⁻¹[cosh(k d) F{𝔭}] / g`.
pub fn linear_baseline_eta(
    p: &RealField,
    depth: f64,
    gravity: f64,
    cutoff: &SpectralCutoff,
) -> Result<RealField> {
    if !(gravity > 0.0) || !gravity.is_finite() {
        return Err(Error::param("gravity", format!("must be positive, got {gravity}")));
    }
    let shaped = forward_transform(p).apply_cosh_multiplier(depth, cutoff)?;
    inverse_transform(&shaped)?.scale(1.0 / gravity)
}

/// Inputs `(𝔭 + δ)` actually fed to the reconstruction for `spec`.
pub fn perturbed_pressure(p: &RealField, spec: &PerturbationSpec) -> Result<RealField> {
    p.add(&delta_field(p.grid(), spec)?)
}
