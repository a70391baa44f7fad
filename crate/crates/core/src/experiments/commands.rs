use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_analysis::{
    bound_majorization, fit_decay, fit_exponent_small, BoundContext, DecayFit, ErrorEvaluator,
    ExponentFit, MajorizationReport,
};
use crate::experiments::config::RunConfig;
use crate::experiments::output::{
    profile_csv, read_sweep_csv, spectrum_csv, sweep_csv, write_file,
};
use crate::experiments::plot::render_svg;
use crate::experiments::sweep::{run_sweep, Spacing, SweepPlan, SweepRecord};
use crate::reconstruction::{
    compute_g, linear_baseline_eta, perturbed_pressure, reconstruct_full,
};
use crate::spectral::{forward_transform, l2_norm};
use crate::wave_model::{check_trace_admissibility, PerturbationSpec};

#[derive(Debug, Clone)]
pub struct ReconstructSummary {
    pub files: Vec<PathBuf>,
    pub eta_peak: f64,
    pub cutoff_wavenumber: Option<f64>,
    pub edge_warning: bool,
    pub non_monotone_x: bool,
}

/// Writes `profile.csv` and `spectrum.csv` for a single reconstruction.
pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<ReconstructSummary> {
    let out = cfg.out_dir()?;
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let cutoff = cfg.cutoff()?;
    let spec = cfg.perturbation()?;
    let trace = cfg.trace()?;

    let report = check_trace_admissibility(&trace, &grid, &params, &spec)?;
    if !report.passed() {
        return Err(Error::Inadmissible(report.to_string()));
    }
    let p = trace.sample(&grid)?;
    let result = reconstruct_full(&p, &params, &spec, &cutoff)?;
    let baseline = linear_baseline_eta(
        &perturbed_pressure(&p, &spec)?,
        params.depth() + spec.gamma,
        cfg.gravity,
        &cutoff,
    )?;
    let g_hat = forward_transform(&compute_g(&p, params.kappa(), &spec)?);

    let profile = out.join("profile.csv");
    let spectrum = out.join("spectrum.csv");
    write_file(&profile, &profile_csv(&result, &baseline))?;
    write_file(&spectrum, &spectrum_csv(&g_hat))?;

    Ok(ReconstructSummary {
        files: vec![profile, spectrum],
        eta_peak: result.eta.values().iter().copied().fold(f64::NEG_INFINITY, f64::max),
        cutoff_wavenumber: result.diagnostics.cutoff_wavenumber,
        edge_warning: result.diagnostics.edge_warning,
        non_monotone_x: result.diagnostics.non_monotone_x,
    })
}

#[derive(Debug, Clone)]
pub struct SweepSummary {
    pub files: Vec<PathBuf>,
    pub records: Vec<SweepRecord>,
    pub fit: Option<ExponentFit>,
    pub decay: Option<DecayFit>,
    pub majorization: Option<MajorizationReport>,
}

/// Runs one perturbation sweep and writes `sweep_<channel>.csv` and `.svg`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepSummary> {
    let out = cfg.out_dir()?;
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let cutoff = cfg.cutoff()?;
    let trace = cfg.trace()?;
    let p = trace.sample(&grid)?;
    let evaluator = ErrorEvaluator::new(p, params, cutoff)?;
    let plan = SweepPlan {
        channel: cfg.channel,
        values: cfg.sweep_values()?,
        delta_width: cfg.delta_width,
        jobs: cfg.jobs,
    };
    let mut records = run_sweep(&evaluator, &trace, &grid, &plan)?;
    let admissible = records.iter().filter(|r| r.admissible).count();
    if admissible < 4 {
        return Err(Error::DegenerateFit(format!(
            "only {admissible} admissible sweep points; need at least 4"
        )));
    }

    let decay = fit_decay(&forward_transform(evaluator.g0()), cfg.fit_window()).ok();
    let majorization = decay.and_then(|d| {
        let ctx = BoundContext {
            sigma: d.sigma_hat,
            kappa: params.kappa(),
            depth: params.depth(),
            p_norm: l2_norm(evaluator.pressure()),
            delta_width: cfg.delta_width,
        };
        bound_majorization(&records, &ctx).ok()
    });
    if let Some(rep) = &majorization {
        for r in records.iter_mut() {
            r.bound_value = rep
                .rows
                .iter()
                .find(|row| row.param_value == r.param_value)
                .map(|row| row.bound_value);
        }
    }
    let fit = fit_exponent_small(&records).ok();

    let stem = format!("sweep_{}", cfg.channel);
    let csv_path = out.join(format!("{stem}.csv"));
    let svg_path = out.join(format!("{stem}.svg"));
    write_file(&csv_path, &sweep_csv(&records, fit.as_ref()))?;
    let log_log = cfg.spacing == Spacing::Log;
    let points: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| {
            let x = if log_log { r.param_value.abs() } else { r.param_value };
            r.error_l2.map(|e| (x, e))
        })
        .collect();
    let svg = render_svg(
        &format!("Reconstruction error vs {}", cfg.channel),
        cfg.channel.name(),
        "E (L2 in q)",
        &points,
        log_log,
    );
    write_file(&svg_path, &svg)?;

    Ok(SweepSummary {
        files: vec![csv_path, svg_path],
        records,
        fit,
        decay,
        majorization,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub n: usize,
    pub half_width: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhysicsInfo {
    pub speed: f64,
    pub depth: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub grid: GridInfo,
    pub physics: PhysicsInfo,
    pub tabulated_trace: bool,
    pub decay_fit: DecayFit,
    pub cutoff_rel: f64,
    pub k_max: Option<f64>,
    pub cutoff_wavenumber: Option<f64>,
    pub edge_warning: bool,
    pub p_norm: f64,
    pub sweep_csv: Option<PathBuf>,
    pub majorization: Option<MajorizationReport>,
}

/// Decay fit of `ĝ₀,₀`, cutoff diagnostics, and an optional bound-vs-error
/// table for a previously written sweep; written to `diagnostics.json`.
pub fn cmd_diagnose(cfg: &RunConfig) -> Result<(PathBuf, Diagnostics)> {
    let out = cfg.out_dir()?;
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let cutoff = cfg.cutoff()?;
    let trace = cfg.trace()?;
    let p = trace.sample(&grid)?;
    let g0 = compute_g(&p, params.kappa(), &PerturbationSpec::zero())?;
    let g_hat = forward_transform(&g0);
    let decay = fit_decay(&g_hat, cfg.fit_window())?;
    let gated = g_hat.apply_sinh_multiplier(params.depth(), &cutoff)?;
    let p_norm = l2_norm(&p);

    let majorization = match &cfg.sweep_csv {
        Some(path) => {
            let records = read_sweep_csv(path)?;
            let ctx = BoundContext {
                sigma: decay.sigma_hat,
                kappa: params.kappa(),
                depth: params.depth(),
                p_norm,
                delta_width: cfg.delta_width,
            };
            Some(bound_majorization(&records, &ctx)?)
        }
        None => None,
    };

    let diag = Diagnostics {
        grid: GridInfo {
            n: grid.n(),
            half_width: grid.half_width(),
        },
        physics: PhysicsInfo {
            speed: params.speed(),
            depth: params.depth(),
            kappa: params.kappa(),
        },
        tabulated_trace: !trace.is_closed_form(),
        decay_fit: decay,
        cutoff_rel: cutoff.rel,
        k_max: cutoff.k_max,
        cutoff_wavenumber: gated.cutoff().and_then(|c| c.max_retained_wavenumber),
        edge_warning: g_hat.edge_warning(),
        p_norm,
        sweep_csv: cfg.sweep_csv.clone(),
        majorization,
    };
    let path = out.join("diagnostics.json");
    let mut text = serde_json::to_string_pretty(&diag).expect("diagnostics serialize");
    text.push('\n');
    write_file(&path, &text)?;
    Ok((path, diag))
}
