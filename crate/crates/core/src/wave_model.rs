//! Physical parameters, bed-pressure traces, the three-channel perturbation
//! model and its admissibility conditions.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::spectral::RealField;

/// Smallest radicand accepted as strictly positive.
pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-8;

/// Width of the Gaussian pressure perturbation when none is given.
pub const DEFAULT_DELTA_WIDTH: f64 = 2.0;

/// Oversampling used when a trace can be evaluated off the working grid.
pub const CLOSED_FORM_OVERSAMPLING: usize = 4;

/// Wave speed `c` and undisturbed depth `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    speed: f64,
    depth: f64,
}

impl PhysicalParams {
    pub fn new(speed: f64, depth: f64) -> Result<Self> {
        if !(speed > 0.0) || !speed.is_finite() {
            return Err(Error::param("speed", format!("must be positive, got {speed}")));
        }
        if !(depth > 0.0) || !depth.is_finite() {
            return Err(Error::param("depth", format!("must be positive, got {depth}")));
        }
        Ok(Self { speed, depth })
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    /// `κ = 1/c²`.
    pub fn kappa(&self) -> f64 {
        1.0 / (self.speed * self.speed)
    }
}

/// Measurement errors in the three inputs: `κ → κ+ε`, `𝔭 → 𝔭+δ` with
/// `δ(q) = a e^{-q²/(2θ²)}`, and `d → d+γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub epsilon: f64,
    pub delta_amplitude: f64,
    pub delta_width: f64,
    pub gamma: f64,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self::zero()
    }
}

impl PerturbationSpec {
    pub const fn zero() -> Self {
        Self {
            epsilon: 0.0,
            delta_amplitude: 0.0,
            delta_width: DEFAULT_DELTA_WIDTH,
            gamma: 0.0,
        }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        Self { epsilon, ..self }
    }

    pub fn with_delta_amplitude(self, delta_amplitude: f64) -> Self {
        Self { delta_amplitude, ..self }
    }

    pub fn with_delta_width(self, delta_width: f64) -> Self {
        Self { delta_width, ..self }
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn is_zero(&self) -> bool {
        self.epsilon == 0.0 && self.delta_amplitude == 0.0 && self.gamma == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta_width > 0.0) || !self.delta_width.is_finite() {
            return Err(Error::param(
                "delta_width",
                format!("must be positive, got {}", self.delta_width),
            ));
        }
        for (name, v) in [
            ("epsilon", self.epsilon),
            ("delta_amplitude", self.delta_amplitude),
            ("gamma", self.gamma),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// `δ(q)`.
    pub fn delta_at(&self, q: f64) -> f64 {
        let w = self.delta_width;
        self.delta_amplitude * (-q * q / (2.0 * w * w)).exp()
    }

    /// `‖δ‖_{L²} = |a| (θ √π)^{1/2}` in closed form.
    pub fn delta_norm(&self) -> f64 {
        self.delta_amplitude.abs() * (self.delta_width * std::f64::consts::PI.sqrt()).sqrt()
    }
}

/// `𝔭(q) = 2(2+e^{-q²/2}) / (2+e^{-q²/2}+e^{q²/2})`, the trace whose
/// auxiliary function at `κ = 1/4` is exactly `e^{-q²/2}`.
pub fn paper_pressure_value(q: f64) -> f64 {
    let small = (-q * q / 2.0).exp();
    let large = (q * q / 2.0).exp();
    2.0 * (2.0 + small) / (2.0 + small + large)
}

pub fn paper_pressure_trace(grid: &Grid) -> RealField {
    RealField::from_fn(*grid, paper_pressure_value).expect("closed-form trace is finite")
}

pub fn delta_field(grid: &Grid, spec: &PerturbationSpec) -> Result<RealField> {
    spec.validate()?;
    RealField::from_fn(*grid, |q| spec.delta_at(q))
}

/// Inverts `g = (1-2κ𝔭)^{-1/2} - 1`: `𝔭 = (1 - (1+g)^{-2}) / (2κ)`,
/// evaluated as `g(2+g) / (2κ(1+g)²)`.
pub fn pressure_from_g(g: &RealField, kappa: f64) -> Result<RealField> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::param("kappa", format!("must be positive, got {kappa}")));
    }
    if let Some(j) = g.values().iter().position(|&v| !(1.0 + v > 0.0)) {
        return Err(Error::param(
            "g",
            format!("1 + g must be positive; fails at q = {}", g.grid().node(j)),
        ));
    }
    g.map(|v| {
        let s = 1.0 + v;
        v * (2.0 + v) / (2.0 * kappa * s * s)
    })
}

/// Two-column `(q, p)` trace read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedTrace {
    q: Vec<f64>,
    p: Vec<f64>,
}

impl TabulatedTrace {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::param("pressure table", "q and p columns differ in length"));
        }
        if q.len() < 4 {
            return Err(Error::param("pressure table", "need at least 4 samples"));
        }
        if q.iter().chain(&p).any(|v| !v.is_finite()) {
            return Err(Error::param("pressure table", "non-finite entry"));
        }
        if q.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("pressure table", "q must be strictly increasing"));
        }
        Ok(Self { q, p })
    }

    /// Reads `q,p` rows; a non-numeric first row is treated as a header and
    /// lines starting with `#` are skipped.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| csv_error(path, e))?;
        let (mut q, mut p) = (Vec::new(), Vec::new());
        for (row, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            if rec.len() != 2 {
                return Err(Error::Parse {
                    path: path.into(),
                    reason: format!("row {}: expected 2 columns, found {}", row + 1, rec.len()),
                });
            }
            let parsed = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match parsed {
                (Ok(a), Ok(b)) => {
                    q.push(a);
                    p.push(b);
                }
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::Parse {
                        path: path.into(),
                        reason: format!("row {}: non-numeric value", row + 1),
                    })
                }
            }
        }
        Self::new(q, p).map_err(|e| Error::Parse {
            path: path.into(),
            reason: e.to_string(),
        })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Natural cubic spline through the table, evaluated on `grid`. Nodes
    /// outside the tabulated range are set to zero (decayed far field).
    pub fn resample(&self, grid: &Grid) -> Result<RealField> {
        let spline = NaturalSpline::new(&self.q, &self.p);
        RealField::from_fn(*grid, |x| spline.eval(x).unwrap_or(0.0))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::Parse {
            path: path.into(),
            reason: e.to_string(),
        }
    }
}

struct NaturalSpline<'a> {
    x: &'a [f64],
    y: &'a [f64],
    m: Vec<f64>,
}

impl<'a> NaturalSpline<'a> {
    fn new(x: &'a [f64], y: &'a [f64]) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second-derivative system.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut upper = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Self { x, y, m }
    }

    fn eval(&self, t: f64) -> Option<f64> {
        let (x, y, m) = (self.x, self.y, &self.m);
        let last = x.len() - 1;
        if t < x[0] || t > x[last] {
            return None;
        }
        let i = match x.partition_point(|&v| v <= t) {
            0 => 0,
            p => (p - 1).min(last - 1),
        };
        if t == x[i] {
            return Some(y[i]);
        }
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - t) / h;
        let b = (t - x[i]) / h;
        Some(
            a * y[i]
                + b * y[i + 1]
                + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0,
        )
    }
}

/// Source of the bed-pressure trace `𝔭`.
#[derive(Debug, Clone, PartialEq)]
pub enum PressureTrace {
    /// The closed-form trace of [`paper_pressure_value`].
    PaperClosedForm,
    /// Trace whose auxiliary function is `e^{-q²/2}` at the given `κ`.
    GaussianG { kappa: f64 },
    Tabulated(TabulatedTrace),
}

impl PressureTrace {
    pub fn is_closed_form(&self) -> bool {
        !matches!(self, PressureTrace::Tabulated(_))
    }

    pub fn sample(&self, grid: &Grid) -> Result<RealField> {
        match self {
            PressureTrace::PaperClosedForm => Ok(paper_pressure_trace(grid)),
            PressureTrace::GaussianG { kappa } => {
                let g = RealField::from_fn(*grid, |q| (-q * q / 2.0).exp())?;
                pressure_from_g(&g, *kappa)
            }
            PressureTrace::Tabulated(t) => t.resample(grid),
        }
    }
}

/// Outcome of the radicand and depth checks.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    /// Minimum of `1 - 2(κ+ε)(𝔭+δ)` over the checked nodes.
    pub min_radicand: f64,
    pub argmin_q: f64,
    pub margin_floor: f64,
    /// `min_radicand - margin_floor`; negative means violation.
    pub radicand_margin: f64,
    pub radicand_ok: bool,
    /// `d + γ`.
    pub perturbed_depth: f64,
    pub depth_ok: bool,
    /// Number of nodes the radicand was evaluated on.
    pub nodes_checked: usize,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.radicand_ok && self.depth_ok
    }
}

impl fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "ok" } else { "FAILED" };
        writeln!(
            f,
            "  radicand 1 - 2(kappa+eps)(p+delta) > {:e}: {} (min {:e} at q = {}, margin {:e}, {} nodes)",
            self.margin_floor,
            verdict(self.radicand_ok),
            self.min_radicand,
            self.argmin_q,
            self.radicand_margin,
            self.nodes_checked
        )?;
        write!(
            f,
            "  perturbed depth d+gamma > 0: {} (d+gamma = {})",
            verdict(self.depth_ok),
            self.perturbed_depth
        )
    }
}

/// Checks both admissibility conditions on the samples of `p`.
pub fn check_admissibility(
    p: &RealField,
    params: &PhysicalParams,
    spec: &PerturbationSpec,
) -> Result<AdmissibilityReport> {
    check_admissibility_with(p, params, spec, DEFAULT_MARGIN_FLOOR)
}

pub fn check_admissibility_with(
    p: &RealField,
    params: &PhysicalParams,
    spec: &PerturbationSpec,
    margin_floor: f64,
) -> Result<AdmissibilityReport> {
    spec.validate()?;
    let grid = p.grid();
    let kappa = params.kappa() + spec.epsilon;
    let (min_radicand, argmin) = p
        .values()
        .iter()
        .enumerate()
        .map(|(j, &pv)| {
            let q = grid.node(j);
            (1.0 - 2.0 * kappa * (pv + spec.delta_at(q)), j)
        })
        .fold((f64::INFINITY, 0), |acc, cur| if cur.0 < acc.0 { cur } else { acc });
    let perturbed_depth = params.depth() + spec.gamma;
    Ok(AdmissibilityReport {
        min_radicand,
        argmin_q: grid.node(argmin),
        margin_floor,
        radicand_margin: min_radicand - margin_floor,
        radicand_ok: min_radicand > margin_floor,
        perturbed_depth,
        depth_ok: perturbed_depth > 0.0,
        nodes_checked: grid.n(),
    })
}

/// Admissibility for a trace source: closed-form traces are checked on a
/// [`CLOSED_FORM_OVERSAMPLING`]× refined grid, tabulated traces on `grid`.
pub fn check_trace_admissibility(
    trace: &PressureTrace,
    grid: &Grid,
    params: &PhysicalParams,
    spec: &PerturbationSpec,
) -> Result<AdmissibilityReport> {
    let check_grid = if trace.is_closed_form() {
        grid.refined(CLOSED_FORM_OVERSAMPLING)?
    } else {
        *grid
    };
    let p = trace.sample(&check_grid)?;
    check_admissibility(&p, params, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::spectral::l2_norm;

    fn paper_params() -> PhysicalParams {
        PhysicalParams::new(2.0, 1.0).unwrap()
    }

    #[test]
    fn params_validation_and_kappa() {
        assert_eq!(paper_params().kappa(), 0.25);
        assert!(PhysicalParams::new(0.0, 1.0).is_err());
        assert!(PhysicalParams::new(2.0, -1.0).is_err());
    }

    #[test]
    fn paper_trace_peak_and_tail() {
        assert_eq!(paper_pressure_value(0.0), 1.5);
        assert!(paper_pressure_value(30.0) < 1e-150);
        assert!(paper_pressure_value(-30.0) < 1e-150);
        assert_eq!(paper_pressure_value(60.0), 0.0);
    }

    #[test]
    fn paper_trace_matches_inverted_gaussian() {
        let grid = make_grid(4096, 30.0).unwrap();
        let g = RealField::from_fn(grid, |q| (-q * q / 2.0).exp()).unwrap();
        let from_g = pressure_from_g(&g, 0.25).unwrap();
        assert!(from_g.max_abs_diff(&paper_pressure_trace(&grid)) < 1e-14);
        let gg = PressureTrace::GaussianG { kappa: 0.25 }.sample(&grid).unwrap();
        assert_eq!(gg, from_g);
    }

    #[test]
    fn pressure_from_g_cases() {
        let grid = make_grid(16, 4.0).unwrap();
        let zero = pressure_from_g(&RealField::zeros(grid), 0.25).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let one = RealField::from_fn(grid, |_| 1.0).unwrap();
        assert_eq!(pressure_from_g(&one, 0.25).unwrap().values()[0], 1.5);
        let bad = RealField::from_fn(grid, |_| -1.0).unwrap();
        assert!(pressure_from_g(&bad, 0.25).is_err());
        assert!(pressure_from_g(&one, 0.0).is_err());
    }

    #[test]
    fn delta_field_shape() {
        let grid = make_grid(4096, 30.0).unwrap();
        let zero = delta_field(&grid, &PerturbationSpec::zero()).unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
        let spec = PerturbationSpec::zero().with_delta_amplitude(0.1);
        let d = delta_field(&grid, &spec).unwrap();
        assert_eq!(d.values()[grid.n() / 2], 0.1);
        // ∫ a² e^{-q²/θ²} dq = a² θ √π
        let expected = 0.1 * (2.0 * std::f64::consts::PI.sqrt()).sqrt();
        assert!((l2_norm(&d) - expected).abs() < 1e-12);
        assert!((expected - 0.1883).abs() < 1e-4);
        assert_eq!(spec.delta_norm(), expected);
        for j in 1..grid.n() / 2 {
            let (a, b) = (d.values()[grid.n() / 2 - j], d.values()[grid.n() / 2 + j]);
            assert!((a - b).abs() <= 1e-15);
        }
        assert!(delta_field(&grid, &spec.with_delta_width(0.0)).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let grid = make_grid(4096, 30.0).unwrap();
        let trace = PressureTrace::PaperClosedForm;
        let ok = check_trace_admissibility(&trace, &grid, &paper_params(), &PerturbationSpec::zero())
            .unwrap();
        assert!(ok.passed());
        assert!((ok.min_radicand - 0.25).abs() < 1e-15);
        assert_eq!(ok.nodes_checked, 4 * 4096);

        let eps = PerturbationSpec::zero().with_epsilon(1.0 / 12.0);
        let rep = check_trace_admissibility(&trace, &grid, &paper_params(), &eps).unwrap();
        assert!(!rep.passed() && !rep.radicand_ok && rep.depth_ok);
        assert_eq!(rep.argmin_q, 0.0);
        assert!(rep.to_string().contains("radicand"));

        let gamma = PerturbationSpec::zero().with_gamma(-1.0);
        let rep = check_trace_admissibility(&trace, &grid, &paper_params(), &gamma).unwrap();
        assert!(!rep.passed() && rep.radicand_ok && !rep.depth_ok);
    }

    #[test]
    fn tabulated_trace_resamples_exactly_at_knots() {
        let grid = make_grid(64, 8.0).unwrap();
        let q: Vec<f64> = grid.nodes().collect();
        let p: Vec<f64> = q.iter().map(|&x| paper_pressure_value(x)).collect();
        let t = TabulatedTrace::new(q, p.clone()).unwrap();
        let r = t.resample(&grid).unwrap();
        assert_eq!(r.values(), &p[..]);
    }

    #[test]
    fn spline_reproduces_cubics_in_interior() {
        let q: Vec<f64> = (0..41).map(|i| -4.0 + 0.2 * i as f64).collect();
        let p: Vec<f64> = q.iter().map(|&x| (x * 1.3).sin()).collect();
        let t = TabulatedTrace::new(q, p).unwrap();
        let grid = make_grid(32, 3.0).unwrap();
        let r = t.resample(&grid).unwrap();
        for (x, v) in grid.nodes().zip(r.values()) {
            assert!((v - (x * 1.3).sin()).abs() < 2e-3, "x = {x}");
        }
        // Out-of-range nodes are zero.
        let wide = make_grid(32, 8.0).unwrap();
        let r = t.resample(&wide).unwrap();
        assert_eq!(r.values()[0], 0.0);
    }

    #[test]
    fn tabulated_trace_validation() {
        assert!(TabulatedTrace::new(vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4]).is_err());
        assert!(TabulatedTrace::new(vec![0.0, 1.0], vec![0.0; 2]).is_err());
        assert!(TabulatedTrace::new(vec![0.0, 1.0, 2.0], vec![0.0; 4]).is_err());
    }

    #[test]
    fn tabulated_csv_with_header_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.csv");
        std::fs::write(&path, "q,p\n# comment\n-1,0\n0,1\n1,0\n2,0\n").unwrap();
        let t = TabulatedTrace::from_csv(&path).unwrap();
        assert_eq!(t.q(), &[-1.0, 0.0, 1.0, 2.0]);
        assert_eq!(t.p(), &[0.0, 1.0, 0.0, 0.0]);

        std::fs::write(&path, "q,p\n0,1\n1,x\n").unwrap();
        assert!(matches!(TabulatedTrace::from_csv(&path), Err(Error::Parse { .. })));
        assert!(matches!(
            TabulatedTrace::from_csv(dir.path().join("missing.csv")),
            Err(Error::Io { .. })
        ));
    }
}
