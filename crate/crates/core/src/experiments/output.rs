//! Fixed-format CSV writers and the sweep CSV reader.
//!
//! Floats are written with 17 significant digits in scientific notation,
//! `,` delimited, LF line endings, so identical runs produce identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::error_analysis::ExponentFit;
use crate::experiments::sweep::{SweepChannel, SweepRecord};
use crate::reconstruction::ReconstructionResult;
use crate::spectral::{RealField, Spectrum};

pub const SWEEP_HEADER: &str = "param_name,param_value,error_l2,term_I,term_II,bound_value,admissible";

pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn profile_csv(result: &ReconstructionResult, baseline: &RealField) -> String {
    let grid = result.grid();
    let mut out = String::from("q,x_of_q,eta,eta_linear_baseline\n");
    for j in 0..grid.n() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_float(grid.node(j)),
            fmt_float(result.x_of_q.values()[j]),
            fmt_float(result.eta.values()[j]),
            fmt_float(baseline.values()[j])
        );
    }
    out
}

/// `k, |ĝ(k)|` rows in ascending `k`.
pub fn spectrum_csv(s: &Spectrum) -> String {
    let grid = s.grid();
    let n = grid.n();
    let mut out = String::from("k,abs_g_hat\n");
    for i in 0..n {
        let m = (i + n / 2) % n;
        let _ = writeln!(
            out,
            "{},{}",
            fmt_float(grid.wavenumber(m)),
            fmt_float(s.coeffs()[m].norm())
        );
    }
    out
}

pub fn sweep_csv(records: &[SweepRecord], fit: Option<&ExponentFit>) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.param_name,
            fmt_float(r.param_value),
            fmt_opt(r.error_l2),
            fmt_opt(r.term_i),
            fmt_opt(r.term_ii),
            fmt_opt(r.bound_value),
            r.admissible
        );
    }
    let (alpha, r2) = fit.map_or((f64::NAN, f64::NAN), |f| (f.alpha_hat, f.r_squared));
    let _ = writeln!(out, "# alpha_hat={} r2={}", fmt_float(alpha), fmt_float(r2));
    out
}

/// Reads a file written by [`sweep_csv`].
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, reason: String| Error::Parse {
        path: path.into(),
        reason: format!("line {line}: {reason}"),
    };
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() || line == SWEEP_HEADER {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(bad(i + 1, format!("expected 7 columns, found {}", cols.len())));
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse()
                    .map(Some)
                    .map_err(|_| bad(i + 1, format!("bad number `{s}`")))
            }
        };
        let channel: SweepChannel = cols[0].parse().map_err(|e| bad(i + 1, format!("{e}")))?;
        let param_value = cols[1]
            .parse()
            .map_err(|_| bad(i + 1, format!("bad number `{}`", cols[1])))?;
        let admissible = match cols[6] {
            "true" => true,
            "false" => false,
            other => return Err(bad(i + 1, format!("bad admissible flag `{other}`"))),
        };
        records.push(SweepRecord {
            param_name: channel,
            param_value,
            error_l2: opt(cols[2])?,
            term_i: opt(cols[3])?,
            term_ii: opt(cols[4])?,
            bound_value: opt(cols[5])?,
            admissible,
        });
    }
    Ok(records)
}
