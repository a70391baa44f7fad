//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use wave_recover::error_analysis::{error_split, fit_decay, fit_exponent, ErrorEvaluator};
use wave_recover::experiments::{cmd_diagnose, cmd_sweep, RunConfig, SweepChannel, SweepRecord};
use wave_recover::reconstruction::{compute_g, reconstruct_eta};
use wave_recover::spectral::spectral_energy;
use wave_recover::wave_model::{check_admissibility, paper_pressure_trace, paper_pressure_value, pressure_from_g};
use wave_recover::{
    forward_transform, inverse_transform, l2_norm, make_grid, PerturbationSpec, PhysicalParams,
    RealField, SpectralCutoff, Spectrum,
};

use common::*;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, start: Instant, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("{what} took {t:?} (limit {limit:?})"))
}

fn paper() -> PhysicalParams {
    PhysicalParams::new(2.0, 1.0).unwrap()
}

fn default_grid() -> wave_recover::Grid {
    make_grid(4096, 30.0).unwrap()
}

fn c1_closed_form_identity() -> Result<String, String> {
    let start = Instant::now();
    let grid = default_grid();
    let g = RealField::from_fn(grid, |q| (-q * q / 2.0).exp()).unwrap();
    let from_g = pressure_from_g(&g, 0.25).map_err(|e| e.to_string())?;
    let diff = paper_pressure_trace(&grid).max_abs_diff(&from_g);
    within(Duration::from_secs(1), start, "identity")?;
    ensure(diff <= 1e-13, format!("max diff {diff:e}"))?;
    Ok(format!("max diff {diff:.2e}"))
}

fn c2_peak_values() -> Result<String, String> {
    let p0 = paper_pressure_value(0.0);
    let grid = default_grid();
    let g = compute_g(&paper_pressure_trace(&grid), 0.25, &PerturbationSpec::zero()).map_err(|e| e.to_string())?;
    let g0 = g.values()[grid.n() / 2];
    ensure(grid.node(grid.n() / 2) == 0.0, "centre node is not q = 0")?;
    ensure((p0 - 1.5).abs() <= 1e-15, format!("p(0) = {p0}"))?;
    ensure((g0 - 1.0).abs() <= 1e-15, format!("g(0) = {g0}"))?;
    Ok(format!("p(0) = {p0}, g(0) = {g0}"))
}

fn c3_spectral_infrastructure() -> Result<String, String> {
    let start = Instant::now();
    let grid = make_grid(1024, 30.0).unwrap();
    // Deterministic rough field.
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let rough: Vec<f64> = (0..grid.n())
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    let f = RealField::new(grid, rough).unwrap();
    let back = inverse_transform(&forward_transform(&f)).map_err(|e| e.to_string())?;
    let rt = f.max_abs_diff(&back) / f.max_abs();
    ensure(rt <= 1e-12, format!("round trip {rt:e}"))?;

    let gauss = RealField::from_fn(grid, |q| (-q * q / 2.0).exp()).unwrap();
    let s = forward_transform(&gauss);
    let l2 = l2_norm(&gauss).powi(2);
    let parseval = (spectral_energy(&s) - l2).abs() / l2;
    ensure(parseval <= 1e-10, format!("Parseval {parseval:e}"))?;

    let mut worst: f64 = 0.0;
    for (m, c) in s.coeffs().iter().enumerate() {
        let k = grid.wavenumber(m);
        if k.abs() <= 8.0 {
            worst = worst.max((c - Complex64::new((2.0 * PI).sqrt() * (-k * k / 2.0).exp(), 0.0)).norm());
        }
    }
    ensure(worst <= 1e-10, format!("Gaussian transform {worst:e}"))?;
    within(Duration::from_secs(5), start, "spectral checks")?;
    Ok(format!("round trip {rt:.1e}, Parseval {parseval:.1e}, Gaussian {worst:.1e}"))
}

fn c4_eta_peak() -> Result<String, String> {
    let grid = default_grid();
    let g = compute_g(&paper_pressure_trace(&grid), 0.25, &PerturbationSpec::zero()).map_err(|e| e.to_string())?;
    let eta = reconstruct_eta(&g, 1.0, &SpectralCutoff::default()).map_err(|e| e.to_string())?;
    let eta0 = eta.values()[grid.n() / 2];
    let series = eta_peak_series();
    let quad = adaptive_simpson(&|t: f64| (t * t / 2.0).exp(), 0.0, 1.0, 1e-15);
    ensure((series - quad).abs() < 1e-13, "series and quadrature oracles disagree")?;
    ensure((eta0 - series).abs() <= 1e-6, format!("eta(0) = {eta0}, oracle {series}"))?;
    Ok(format!("eta(0) = {eta0:.10}, oracle {series:.10}"))
}

fn c5_zero_perturbation() -> Result<String, String> {
    let grid = default_grid();
    let p = paper_pressure_trace(&grid);
    let ev = ErrorEvaluator::new(p.clone(), paper(), SpectralCutoff::default()).map_err(|e| e.to_string())?;
    let e0 = ev.error(&PerturbationSpec::zero()).map_err(|e| e.to_string())?;
    ensure(e0 == 0.0, format!("E(0,0,0) = {e0:e}"))?;
    let mut worst: f64 = 0.0;
    for (spec, depth_channel) in [
        (PerturbationSpec::zero().with_epsilon(1e-3), false),
        (PerturbationSpec::zero().with_delta_amplitude(1e-2), false),
        (PerturbationSpec::zero().with_gamma(1e-2), true),
    ] {
        let s = error_split(&p, &paper(), &spec, &SpectralCutoff::default()).map_err(|e| e.to_string())?;
        let term = if depth_channel { s.term_i } else { s.term_ii };
        worst = worst.max((s.error - term).abs() / s.error);
    }
    ensure(worst <= 1e-10, format!("split mismatch {worst:e}"))?;
    Ok(format!("E(0,0,0) = 0, split mismatch {worst:.1e}"))
}

fn c6_first_order() -> Result<String, String> {
    let grid = default_grid();
    let ev = ErrorEvaluator::new(paper_pressure_trace(&grid), paper(), SpectralCutoff::default())
        .map_err(|e| e.to_string())?;
    let speed_oracle = 1e-4 * l2_on(|q| sinh_shift(d_gamma_d_kappa, q, 1.0), 30.0, 6000);
    let depth_oracle = 1e-4 * l2_on(|q| cosh_shift(gaussian, q, 1.0), 30.0, 6000);
    let e_eps = ev.error(&PerturbationSpec::zero().with_epsilon(1e-4)).map_err(|e| e.to_string())?;
    let e_gam = ev.error(&PerturbationSpec::zero().with_gamma(1e-4)).map_err(|e| e.to_string())?;
    let r_eps = (e_eps - speed_oracle).abs() / speed_oracle;
    let r_gam = (e_gam - depth_oracle).abs() / depth_oracle;
    ensure(r_eps <= 0.02, format!("epsilon: E = {e_eps:e}, oracle {speed_oracle:e}"))?;
    ensure(r_gam <= 0.02, format!("gamma: E = {e_gam:e}, oracle {depth_oracle:e}"))?;
    Ok(format!("epsilon rel {r_eps:.2e}, gamma rel {r_gam:.2e}"))
}

fn c7_admissibility() -> Result<String, String> {
    let grid = default_grid();
    let p = paper_pressure_trace(&grid);
    let check = |spec: PerturbationSpec| check_admissibility(&p, &paper(), &spec).map(|r| r.passed());
    let eps = check(PerturbationSpec::zero().with_epsilon(1.0 / 12.0)).map_err(|e| e.to_string())?;
    let gam = check(PerturbationSpec::zero().with_gamma(-1.0)).map_err(|e| e.to_string())?;
    let zero = check(PerturbationSpec::zero()).map_err(|e| e.to_string())?;
    ensure(!eps, "epsilon = 1/12 accepted")?;
    ensure(!gam, "gamma = -1 accepted")?;
    ensure(zero, "zero spec rejected")?;
    Ok("epsilon = 1/12 rejected, gamma = -1 rejected, zero accepted".into())
}

fn default_sweep(channel: SweepChannel, dir: &std::path::Path) -> Result<wave_recover::experiments::commands::SweepSummary, String> {
    let cfg = RunConfig {
        channel,
        out: dir.to_path_buf(),
        ..RunConfig::default()
    };
    cmd_sweep(&cfg).map_err(|e| e.to_string())
}

fn strictly_increasing(records: &[SweepRecord]) -> bool {
    let e: Vec<f64> = records.iter().filter_map(|r| r.error_l2).collect();
    e.len() == records.len() && e.windows(2).all(|w| w[1] > w[0])
}

fn c8_sweeps() -> Result<String, String> {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for channel in [SweepChannel::Epsilon, SweepChannel::DeltaAmplitude, SweepChannel::Gamma] {
        let s = default_sweep(channel, dir.path())?;
        ensure(s.records.len() == 20, format!("{channel}: {} rows", s.records.len()))?;
        ensure(strictly_increasing(&s.records), format!("{channel}: E not strictly increasing"))?;
        if channel == SweepChannel::Epsilon {
            let fit = s.fit.ok_or("epsilon: no exponent fit")?;
            ensure(
                fit.alpha_hat > 0.0 && fit.alpha_hat <= 1.05 && fit.r_squared >= 0.99,
                format!("alpha_hat {} r2 {}", fit.alpha_hat, fit.r_squared),
            )?;
            let full = fit_exponent(&s.records).map_err(|e| e.to_string())?;
            notes.push(format!(
                "alpha_hat {:.4} (r2 {:.6}; full range {:.3})",
                fit.alpha_hat, fit.r_squared, full.alpha_hat
            ));
        }
    }
    within(Duration::from_secs(30), start, "sweeps")?;
    notes.push("three sweeps strictly increasing".into());
    Ok(notes.join(", "))
}

fn c9_fit_recovery() -> Result<String, String> {
    let grid = default_grid();
    let planted = Spectrum::from_fn(grid, |k| Complex64::new((-2.0 * k.abs()).exp(), 0.0));
    let direct = fit_decay(&planted, (1.0, 4.0)).map_err(|e| e.to_string())?;
    ensure((direct.sigma_hat - 2.0).abs() <= 1e-6, format!("planted spectrum sigma {}", direct.sigma_hat))?;

    // End to end: a trace whose auxiliary field has transform e^{-2|k|}.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("planted.csv");
    write_lorentzian_trace(&csv, 4096, 30.0, 2.0);
    let cfg = RunConfig {
        pressure_csv: Some(csv),
        out: dir.path().to_path_buf(),
        ..RunConfig::default()
    };
    let (_, diag) = cmd_diagnose(&cfg).map_err(|e| e.to_string())?;
    let sigma = diag.decay_fit.sigma_hat;
    ensure((sigma - 2.0).abs() <= 1e-6, format!("planted trace sigma {sigma}"))?;

    let records: Vec<SweepRecord> = (0..=12)
        .map(|i| {
            let s = 1e-4 * 10f64.powf(i as f64 / 4.0);
            SweepRecord {
                param_name: SweepChannel::Epsilon,
                param_value: s,
                error_l2: Some(3.0 * s.sqrt()),
                term_i: Some(0.0),
                term_ii: Some(3.0 * s.sqrt()),
                bound_value: None,
                admissible: true,
            }
        })
        .collect();
    let fit = fit_exponent(&records).map_err(|e| e.to_string())?;
    ensure((fit.alpha_hat - 0.5).abs() <= 1e-10, format!("planted alpha {}", fit.alpha_hat))?;
    Ok(format!(
        "sigma {:.9} (spectrum), {sigma:.9} (trace); alpha {:.12}",
        direct.sigma_hat, fit.alpha_hat
    ))
}

fn c10_majorization() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for channel in [SweepChannel::Epsilon, SweepChannel::DeltaAmplitude, SweepChannel::Gamma] {
        let s = default_sweep(channel, dir.path())?;
        let m = s.majorization.ok_or(format!("{channel}: no majorization report"))?;
        let sigma = s.decay.map(|d| d.sigma_hat).unwrap_or(f64::NAN);
        ensure(m.rows.len() == 20, format!("{channel}: {} rows compared", m.rows.len()))?;
        ensure(
            m.violations.is_empty(),
            format!("{channel}: violations at {:?}", m.violations),
        )?;
        notes.push(format!("{channel} 0/{} (sigma {sigma:.4})", m.rows.len() - 1));
    }
    Ok(format!("violations: {}", notes.join(", ")))
}

fn c11_determinism() -> Result<String, String> {
    let (a, b) = (
        tempfile::tempdir().map_err(|e| e.to_string())?,
        tempfile::tempdir().map_err(|e| e.to_string())?,
    );
    for dir in [&a, &b] {
        let status = bin()
            .args(["sweep", "--channel", "epsilon", "--out"])
            .arg(dir.path())
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), String::from_utf8_lossy(&status.stderr).to_string())?;
    }
    let x = std::fs::read(a.path().join("sweep_epsilon.csv")).map_err(|e| e.to_string())?;
    let y = std::fs::read(b.path().join("sweep_epsilon.csv")).map_err(|e| e.to_string())?;
    ensure(x == y, "sweep CSVs differ")?;
    Ok(format!("{} identical bytes", x.len()))
}

fn main() {
    let checks: [(&str, Check); 11] = [
        ("closed-form identity", c1_closed_form_identity),
        ("peak values", c2_peak_values),
        ("spectral infrastructure", c3_spectral_infrastructure),
        ("reconstruction spot value", c4_eta_peak),
        ("zero-perturbation exactness", c5_zero_perturbation),
        ("first-order oracles", c6_first_order),
        ("admissibility gates", c7_admissibility),
        ("sweep properties", c8_sweeps),
        ("fit recovery", c9_fit_recovery),
        ("bound majorization", c10_majorization),
        ("determinism", c11_determinism),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
