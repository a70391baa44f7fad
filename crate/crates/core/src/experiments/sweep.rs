use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_analysis::ErrorEvaluator;
use crate::grid::Grid;
use crate::wave_model::{check_trace_admissibility, PerturbationSpec, PressureTrace};

/// Which input is perturbed along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepChannel {
    Epsilon,
    DeltaAmplitude,
    Gamma,
}

impl SweepChannel {
    pub const ALL: [SweepChannel; 3] = [
        SweepChannel::Epsilon,
        SweepChannel::DeltaAmplitude,
        SweepChannel::Gamma,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepChannel::Epsilon => "epsilon",
            SweepChannel::DeltaAmplitude => "delta_amplitude",
            SweepChannel::Gamma => "gamma",
        }
    }

    /// Perturbation with only this channel set to `value`.
    pub fn spec(&self, value: f64, delta_width: f64) -> PerturbationSpec {
        let zero = PerturbationSpec::zero().with_delta_width(delta_width);
        match self {
            SweepChannel::Epsilon => zero.with_epsilon(value),
            SweepChannel::DeltaAmplitude => zero.with_delta_amplitude(value),
            SweepChannel::Gamma => zero.with_gamma(value),
        }
    }

    /// Default `(min, max)` for a log-spaced sweep, inside the admissible
    /// region of the default configuration.
    pub fn default_range(&self) -> (f64, f64) {
        match self {
            SweepChannel::Epsilon => (1e-5, 5e-2),
            SweepChannel::DeltaAmplitude => (1e-5, 1e-1),
            SweepChannel::Gamma => (1e-5, 0.5),
        }
    }
}

impl fmt::Display for SweepChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epsilon" | "speed" => Ok(SweepChannel::Epsilon),
            "delta_amplitude" | "delta-amplitude" | "pressure" => Ok(SweepChannel::DeltaAmplitude),
            "gamma" | "depth" => Ok(SweepChannel::Gamma),
            other => Err(Error::param(
                "channel",
                format!("expected epsilon, delta_amplitude or gamma, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

impl FromStr for Spacing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" | "lin" => Ok(Spacing::Linear),
            "log" => Ok(Spacing::Log),
            other => Err(Error::param("spacing", format!("expected linear or log, got `{other}`"))),
        }
    }
}

/// Sweep abscissae, ascending, with both endpoints hit exactly.
pub fn sweep_values(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::param("count", "must be at least 1"));
    }
    if !min.is_finite() || !max.is_finite() {
        return Err(Error::param("min/max", "must be finite"));
    }
    let (lo, hi) = if min <= max { (min, max) } else { (max, min) };
    if count == 1 {
        return Ok(vec![lo]);
    }
    let last = (count - 1) as f64;
    let mut values: Vec<f64> = match spacing {
        Spacing::Linear => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / last)
            .collect(),
        Spacing::Log => {
            if !(lo * hi > 0.0) {
                return Err(Error::param(
                    "min/max",
                    "log spacing needs both endpoints non-zero with the same sign",
                ));
            }
            let sign = lo.signum();
            let (a, b) = (lo.abs().ln(), hi.abs().ln());
            (0..count)
                .map(|i| sign * (a + (b - a) * i as f64 / last).exp())
                .collect()
        }
    };
    values[0] = lo;
    values[count - 1] = hi;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// One sweep point. Inadmissible rows carry no error values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub param_name: SweepChannel,
    pub param_value: f64,
    pub error_l2: Option<f64>,
    pub term_i: Option<f64>,
    pub term_ii: Option<f64>,
    pub bound_value: Option<f64>,
    pub admissible: bool,
}

impl SweepRecord {
    pub fn inadmissible(channel: SweepChannel, value: f64) -> Self {
        Self {
            param_name: channel,
            param_value: value,
            error_l2: None,
            term_i: None,
            term_ii: None,
            bound_value: None,
            admissible: false,
        }
    }
}

/// Everything a sweep needs besides the trace itself.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub channel: SweepChannel,
    pub values: Vec<f64>,
    pub delta_width: f64,
    /// Worker threads; `0` lets the pool pick.
    pub jobs: usize,
}

/// Evaluates every sweep point; rows come back ordered by parameter value.
pub fn run_sweep(
    evaluator: &ErrorEvaluator,
    trace: &PressureTrace,
    grid: &Grid,
    plan: &SweepPlan,
) -> Result<Vec<SweepRecord>> {
    let mut values = plan.values.clone();
    values.sort_by(f64::total_cmp);
    let point = |value: f64| -> Result<SweepRecord> {
        let spec = plan.channel.spec(value, plan.delta_width);
        let report = check_trace_admissibility(trace, grid, evaluator.params(), &spec)?;
        if !report.passed() {
            return Ok(SweepRecord::inadmissible(plan.channel, value));
        }
        match evaluator.split(&spec) {
            Ok(s) => Ok(SweepRecord {
                param_name: plan.channel,
                param_value: value,
                error_l2: Some(s.error),
                term_i: Some(s.term_i),
                term_ii: Some(s.term_ii),
                bound_value: None,
                admissible: true,
            }),
            Err(Error::Inadmissible(_) | Error::RadicandNonPositive { .. }) => {
                Ok(SweepRecord::inadmissible(plan.channel, value))
            }
            Err(e) => Err(e),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs)
        .build()
        .map_err(|e| Error::param("jobs", e.to_string()))?;
    pool.install(|| values.par_iter().map(|&v| point(v)).collect())
}
