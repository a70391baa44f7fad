//! Independent numerical oracles: plain quadrature and complex evaluation,
//! no FFTs.
#![allow(dead_code)]

use num_complex::Complex64;

/// Adaptive Simpson quadrature of `f` on `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    // Split first so oscillatory integrands are resolved before adapting.
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (x0, x1) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (f0, f1, fm) = (f(x0), f(x1), f(0.5 * (x0 + x1)));
            let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            step(f, x0, x1, f0, fm, f1, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// Composite Simpson on `[a, b]` with `intervals` (even) subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    assert!(intervals.is_multiple_of(2));
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `F⁻¹[sinh(k d)/k · φ̂](q) = ∫₀^d Re φ(q + i t) dt` for `φ` real on the
/// real axis and holomorphic in the strip `|Im z| ≤ d`.
pub fn sinh_shift(phi: impl Fn(Complex64) -> Complex64, q: f64, d: f64) -> f64 {
    simpson(|t| phi(Complex64::new(q, t)).re, 0.0, d, 400)
}

/// `F⁻¹[cosh(k d) φ̂](q) = Re φ(q + i d)`.
pub fn cosh_shift(phi: impl Fn(Complex64) -> Complex64, q: f64, d: f64) -> f64 {
    phi(Complex64::new(q, d)).re
}

pub fn gaussian(z: Complex64) -> Complex64 {
    (-z * z / 2.0).exp()
}

/// `∂Γ/∂κ = 𝔭 (1-2κ𝔭)^{-3/2}` for the closed-form trace at `κ = 1/4`,
/// where `(1-2κ𝔭)^{-1/2} = 1 + g` and `𝔭 = 2g(2+g)/(1+g)²` give
/// `2 g (2+g)(1+g)` with `g = e^{-z²/2}`.
pub fn d_gamma_d_kappa(z: Complex64) -> Complex64 {
    let g = gaussian(z);
    2.0 * g * (2.0 + g) * (1.0 + g)
}

/// L² norm over `[-l, l]` by composite Simpson.
pub fn l2_on(f: impl Fn(f64) -> f64, l: f64, intervals: usize) -> f64 {
    simpson(|q| f(q).powi(2), -l, l, intervals).sqrt()
}

/// `Σ 1/((2n+1) 2ⁿ n!)`, the peak of `F⁻¹[sinh(k)/k · √(2π) e^{-k²/2}]`.
pub fn eta_peak_series() -> f64 {
    let mut sum = 0.0;
    let mut term_den = 1.0; // 2ⁿ n!
    for n in 0..40 {
        if n > 0 {
            term_den *= 2.0 * n as f64;
        }
        sum += 1.0 / ((2 * n + 1) as f64 * term_den);
    }
    sum
}

/// Writes the trace whose auxiliary field (at `κ = 1/4`) is the periodized
/// Lorentzian with transform exactly `e^{-a|k|}` on the grid `(n, l)`.
pub fn write_lorentzian_trace(path: &std::path::Path, n: usize, l: f64, a: f64) {
    let period = 2.0 * l;
    let w = 2.0 * std::f64::consts::PI / period;
    let mut text = String::from("q,p\n");
    for j in 0..n {
        let q = -l + j as f64 * period / n as f64;
        let g = (w * a).sinh() / ((w * a).cosh() - (w * q).cos()) / period;
        let p = (1.0 - (1.0 + g).powi(-2)) / 0.5;
        text.push_str(&format!("{q:.16e},{p:.16e}\n"));
    }
    std::fs::write(path, text).unwrap();
}

pub fn bin() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_wave-recover"))
}

/// Parsed numeric CSV body (header and `#` lines skipped).
pub fn read_rows(path: &std::path::Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
