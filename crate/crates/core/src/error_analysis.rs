//! Reconstruction error under perturbed inputs, its two-term split, decay and
//! exponent fits, and the sublinear error-bound evaluator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::sweep::{SweepChannel, SweepRecord};
use crate::grid::Grid;
use crate::reconstruction::{compute_g, reconstruct_eta};
use crate::spectral::{forward_transform, l2_norm, RealField, SpectralCutoff, Spectrum};
use crate::wave_model::{check_admissibility, PerturbationSpec, PhysicalParams};

/// Default `(k_lo, k_hi)` window for [`fit_decay`].
pub const DEFAULT_DECAY_WINDOW: (f64, f64) = (1.0, 4.0);

/// Smallest coefficient magnitude that enters a decay fit.
const DECAY_FLOOR: f64 = 1e-300;

/// `E` together with the two pieces of the triangle-inequality split:
///
/// * `term_i`  = `‖F⁻¹[(sinh(k(d+γ)) - sinh(kd))/k · ĝ₀,₀]‖`
/// * `term_ii` = `‖F⁻¹[sinh(k(d+γ))/k · (ĝ_{ε,δ} - ĝ₀,₀)]‖`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorSplit {
    pub error: f64,
    pub term_i: f64,
    pub term_ii: f64,
}

impl ErrorSplit {
    /// `term_i + term_ii - error`; non-negative up to rounding.
    pub fn triangle_slack(&self) -> f64 {
        self.term_i + self.term_ii - self.error
    }
}

/// Reusable error evaluator: caches the unperturbed `g` and `η` so that
/// sweeps only pay for the perturbed reconstruction.
#[derive(Debug, Clone)]
pub struct ErrorEvaluator {
    p: RealField,
    params: PhysicalParams,
    cutoff: SpectralCutoff,
    g0: RealField,
    eta0: RealField,
}

impl ErrorEvaluator {
    pub fn new(p: RealField, params: PhysicalParams, cutoff: SpectralCutoff) -> Result<Self> {
        let zero = PerturbationSpec::zero();
        let report = check_admissibility(&p, &params, &zero)?;
        if !report.passed() {
            return Err(Error::Inadmissible(report.to_string()));
        }
        let g0 = compute_g(&p, params.kappa(), &zero)?;
        let eta0 = reconstruct_eta(&g0, params.depth(), &cutoff)?;
        Ok(Self {
            p,
            params,
            cutoff,
            g0,
            eta0,
        })
    }

    pub fn pressure(&self) -> &RealField {
        &self.p
    }

    pub fn params(&self) -> &PhysicalParams {
        &self.params
    }

    /// Unperturbed auxiliary field `g₀,₀`.
    pub fn g0(&self) -> &RealField {
        &self.g0
    }

    pub fn eta0(&self) -> &RealField {
        &self.eta0
    }

    pub fn split(&self, spec: &PerturbationSpec) -> Result<ErrorSplit> {
        let report = check_admissibility(&self.p, &self.params, spec)?;
        if !report.passed() {
            return Err(Error::Inadmissible(report.to_string()));
        }
        let depth = report.perturbed_depth;
        let g = compute_g(&self.p, self.params.kappa(), spec)?;
        let eta = reconstruct_eta(&g, depth, &self.cutoff)?;
        let eta_depth_only = if spec.gamma == 0.0 {
            self.eta0.clone()
        } else {
            reconstruct_eta(&self.g0, depth, &self.cutoff)?
        };
        Ok(ErrorSplit {
            error: l2_norm(&eta.sub(&self.eta0)?),
            term_i: l2_norm(&eta_depth_only.sub(&self.eta0)?),
            term_ii: l2_norm(&eta.sub(&eta_depth_only)?),
        })
    }

    pub fn error(&self, spec: &PerturbationSpec) -> Result<f64> {
        Ok(self.split(spec)?.error)
    }
}

/// `E(ε,δ,γ) = ‖η_{ε,δ,γ} - η‖_{L²_q}`.
pub fn error_e(
    p: &RealField,
    params: &PhysicalParams,
    spec: &PerturbationSpec,
    cutoff: &SpectralCutoff,
) -> Result<f64> {
    ErrorEvaluator::new(p.clone(), *params, *cutoff)?.error(spec)
}

pub fn error_split(
    p: &RealField,
    params: &PhysicalParams,
    spec: &PerturbationSpec,
    cutoff: &SpectralCutoff,
) -> Result<ErrorSplit> {
    ErrorEvaluator::new(p.clone(), *params, *cutoff)?.split(spec)
}

/// Exponential decay fit `|F̂(k)| ≈ ĉ e^{-σ̂|k|}` over a wavenumber window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub sigma_hat: f64,
    pub c_hat: f64,
    pub window: (f64, f64),
    /// RMS residual of the log-magnitude fit.
    pub residual: f64,
    pub points: usize,
}

struct LineFit {
    slope: f64,
    intercept: f64,
    rms: f64,
    r_squared: f64,
}

fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Some(LineFit {
        slope,
        intercept,
        rms: (sse / n).sqrt(),
        r_squared,
    })
}

/// Least-squares line through `log|F̂(k)|` against `|k|` for
/// `k_lo ≤ |k| ≤ k_hi`, pooling both signs of `k`.
pub fn fit_decay(s: &Spectrum, window: (f64, f64)) -> Result<DecayFit> {
    let (k_lo, k_hi) = window;
    let grid: &Grid = s.grid();
    if !(k_lo >= 0.0 && k_lo < k_hi && k_hi <= grid.nyquist()) {
        return Err(Error::DegenerateFit(format!(
            "window ({k_lo}, {k_hi}) must satisfy 0 <= k_lo < k_hi <= {}",
            grid.nyquist()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = s
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(m, c)| {
            let k = grid.wavenumber(m).abs();
            let mag = c.norm();
            (k >= k_lo && k <= k_hi && mag > DECAY_FLOOR).then(|| (k, mag.ln()))
        })
        .unzip();
    if xs.len() < 8 {
        return Err(Error::DegenerateFit(format!(
            "only {} usable wavenumbers in ({k_lo}, {k_hi}); need 8",
            xs.len()
        )));
    }
    let line = fit_line(&xs, &ys)
        .ok_or_else(|| Error::DegenerateFit("window holds a single wavenumber".into()))?;
    let sigma_hat = -line.slope;
    if !(sigma_hat > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "spectrum does not decay over the window (slope {})",
            line.slope
        )));
    }
    Ok(DecayFit {
        sigma_hat,
        c_hat: line.intercept.exp(),
        window,
        residual: line.rms,
        points: xs.len(),
    })
}

/// Decay fit of `ĝ₀,₀` for the trace `p`.
pub fn fit_g_decay(p: &RealField, kappa: f64, window: (f64, f64)) -> Result<DecayFit> {
    let g = compute_g(p, kappa, &PerturbationSpec::zero())?;
    fit_decay(&forward_transform(&g), window)
}

/// Power-law fit `E ≈ e^{intercept} s^{α̂}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentFit {
    pub alpha_hat: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares slope of `log E` against `log s` for `(s, E)` pairs.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ExponentFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "need at least 4 points, got {}",
            points.len()
        )));
    }
    if let Some((s, e)) = points.iter().find(|(s, e)| !(*s > 0.0) || !(*e > 0.0)) {
        return Err(Error::DegenerateFit(format!(
            "sizes and errors must be positive (got s = {s}, E = {e})"
        )));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(0.0, f64::max);
    if (hi / lo).log10() < 1.0 - 1e-12 {
        return Err(Error::DegenerateFit(format!(
            "sizes span {:.3} decades; need at least 1",
            (hi / lo).log10()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let line = fit_line(&xs, &ys).expect("span checked above");
    Ok(ExponentFit {
        alpha_hat: line.slope,
        intercept: line.intercept,
        r_squared: line.r_squared,
        points: points.len(),
    })
}

/// `(|value|, E)` for admissible records with a positive size and error.
pub fn fit_points(records: &[SweepRecord]) -> Vec<(f64, f64)> {
    records
        .iter()
        .filter_map(|r| {
            let e = r.error_l2?;
            let s = r.param_value.abs();
            (s > 0.0 && e > 0.0).then_some((s, e))
        })
        .collect()
}

/// Shortest run of the smallest sizes that spans one decade; all points if
/// no run does.
pub fn smallest_decade(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let Some(&(first, _)) = sorted.first() else {
        return sorted;
    };
    match sorted.iter().position(|p| p.0 >= 10.0 * first * (1.0 - 1e-12)) {
        Some(end) => sorted[..=end].to_vec(),
        None => sorted,
    }
}

/// Exponent fit over the admissible rows of a sweep.
pub fn fit_exponent(records: &[SweepRecord]) -> Result<ExponentFit> {
    fit_power_law(&fit_points(records))
}

/// Exponent fit restricted to the smallest decade of perturbation sizes,
/// where the small-perturbation asymptotics apply.
pub fn fit_exponent_small(records: &[SweepRecord]) -> Result<ExponentFit> {
    fit_power_law(&smallest_decade(&fit_points(records)))
}

/// Arguments of the error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInputs {
    pub sigma: f64,
    /// The constant `𝒜₂`; `𝒜₁ = ‖𝔭‖^β 𝒜₂`.
    pub a2: f64,
    pub kappa: f64,
    pub d: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub delta_norm: f64,
    pub p_norm: f64,
}

impl BoundInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > self.gamma) {
            return Err(Error::param(
                "sigma",
                format!("must exceed gamma ({} <= {})", self.sigma, self.gamma),
            ));
        }
        if !(self.d + self.gamma > 0.0) {
            return Err(Error::param("gamma", "d + gamma must be positive"));
        }
        if !(self.a2 >= 0.0) || !(self.delta_norm >= 0.0) || !(self.p_norm >= 0.0) {
            return Err(Error::param("bound inputs", "a2 and norms must be non-negative"));
        }
        Ok(())
    }

    /// `β = (σ - γ)/(d + σ)`, in `(0, 1)` for valid inputs. The signed `γ` is
    /// used, so negative depth errors raise the exponent.
    pub fn exponent(&self) -> f64 {
        (self.sigma - self.gamma) / (self.d + self.sigma)
    }
}

/// Right-hand side of the bound
///
/// ```text
/// (|γ| |κ|^β + (d+γ) |ε|^β) 𝒜₁ + (d+γ) ‖δ‖^β |κ|^β 𝒜₂,   𝒜₁ = ‖𝔭‖^β 𝒜₂.
/// ```
pub fn evaluate_bound(inputs: &BoundInputs) -> Result<f64> {
    inputs.validate()?;
    let beta = inputs.exponent();
    let dg = inputs.d + inputs.gamma;
    let kb = inputs.kappa.abs().powf(beta);
    let a1 = inputs.p_norm.powf(beta) * inputs.a2;
    Ok((inputs.gamma.abs() * kb + dg * inputs.epsilon.abs().powf(beta)) * a1
        + dg * inputs.delta_norm.powf(beta) * kb * inputs.a2)
}

/// Fixed quantities needed to turn a sweep row into [`BoundInputs`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundContext {
    pub sigma: f64,
    pub kappa: f64,
    pub depth: f64,
    pub p_norm: f64,
    pub delta_width: f64,
}

impl BoundContext {
    pub fn inputs(&self, channel: SweepChannel, value: f64, a2: f64) -> BoundInputs {
        let spec = channel.spec(value, self.delta_width);
        BoundInputs {
            sigma: self.sigma,
            a2,
            kappa: self.kappa,
            d: self.depth,
            gamma: spec.gamma,
            epsilon: spec.epsilon,
            delta_norm: spec.delta_norm(),
            p_norm: self.p_norm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationRow {
    pub param_value: f64,
    pub error_l2: f64,
    pub bound_value: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorizationReport {
    pub a2: f64,
    pub calibration_value: f64,
    pub rows: Vec<MajorizationRow>,
    /// Parameter values where the bound fell below the measured error.
    pub violations: Vec<f64>,
}

/// Calibrates `𝒜₂` so the bound equals `E` at the largest admissible
/// perturbation, then compares bound and `E` at every smaller point.
pub fn bound_majorization(
    records: &[SweepRecord],
    ctx: &BoundContext,
) -> Result<MajorizationReport> {
    let usable: Vec<(&SweepRecord, f64)> = records
        .iter()
        .filter_map(|r| r.error_l2.map(|e| (r, e)))
        .filter(|(r, e)| *e > 0.0 && r.param_value != 0.0)
        .collect();
    let &(top, e_top) = usable
        .iter()
        .max_by(|a, b| a.0.param_value.abs().total_cmp(&b.0.param_value.abs()))
        .ok_or_else(|| Error::DegenerateFit("no admissible sweep point to calibrate".into()))?;
    let shape = evaluate_bound(&ctx.inputs(top.param_name, top.param_value, 1.0))?;
    if !(shape > 0.0) {
        return Err(Error::DegenerateFit("bound shape vanishes at calibration point".into()));
    }
    let a2 = e_top / shape;
    let mut rows = Vec::with_capacity(usable.len());
    let mut violations = Vec::new();
    for &(r, e) in &usable {
        let bound = evaluate_bound(&ctx.inputs(r.param_name, r.param_value, a2))?;
        let smaller = r.param_value.abs() < top.param_value.abs();
        let ok = !smaller || bound >= e;
        if !ok {
            violations.push(r.param_value);
        }
        rows.push(MajorizationRow {
            param_value: r.param_value,
            error_l2: e,
            bound_value: bound,
            ok,
        });
    }
    Ok(MajorizationReport {
        a2,
        calibration_value: top.param_value,
        rows,
        violations,
    })
}
