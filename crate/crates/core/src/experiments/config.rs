//! Run configuration: flat `key = value` files overridden by CLI flags.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::error_analysis::DEFAULT_DECAY_WINDOW;
use crate::experiments::sweep::{sweep_values, Spacing, SweepChannel};
use crate::grid::Grid;
use crate::reconstruction::DEFAULT_GRAVITY;
use crate::spectral::SpectralCutoff;
use crate::wave_model::{
    PerturbationSpec, PhysicalParams, PressureTrace, TabulatedTrace, DEFAULT_DELTA_WIDTH,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub half_width: f64,
    pub speed: f64,
    pub depth: f64,
    pub cutoff_rel: f64,
    pub k_max: Option<f64>,
    pub channel: SweepChannel,
    /// Sweep bounds; `None` falls back to the channel's default range.
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: usize,
    pub spacing: Spacing,
    pub delta_width: f64,
    pub epsilon: f64,
    pub delta_amplitude: f64,
    pub gamma: f64,
    pub gravity: f64,
    pub fit_k_lo: f64,
    pub fit_k_hi: f64,
    pub pressure_csv: Option<PathBuf>,
    pub sweep_csv: Option<PathBuf>,
    pub out: PathBuf,
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 4096,
            half_width: 30.0,
            speed: 2.0,
            depth: 1.0,
            cutoff_rel: SpectralCutoff::default().rel,
            k_max: None,
            channel: SweepChannel::Epsilon,
            min: None,
            max: None,
            count: 20,
            spacing: Spacing::Log,
            delta_width: DEFAULT_DELTA_WIDTH,
            epsilon: 0.0,
            delta_amplitude: 0.0,
            gamma: 0.0,
            gravity: DEFAULT_GRAVITY,
            fit_k_lo: DEFAULT_DECAY_WINDOW.0,
            fit_k_hi: DEFAULT_DECAY_WINDOW.1,
            pressure_csv: None,
            sweep_csv: None,
            out: PathBuf::from("."),
            jobs: 0,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::param(key, format!("cannot parse `{value}`")))
}

impl RunConfig {
    /// Applies one `key = value` setting. Keys match the long CLI flags with
    /// either `-` or `_` as separator.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "n" => self.n = parse_num("n", value)?,
            "half_width" => self.half_width = parse_num("half_width", value)?,
            "speed" => self.speed = parse_num("speed", value)?,
            "depth" => self.depth = parse_num("depth", value)?,
            "cutoff_rel" => self.cutoff_rel = parse_num("cutoff_rel", value)?,
            "k_max" => self.k_max = Some(parse_num("k_max", value)?),
            "channel" => self.channel = value.parse()?,
            "min" => self.min = Some(parse_num("min", value)?),
            "max" => self.max = Some(parse_num("max", value)?),
            "count" => self.count = parse_num("count", value)?,
            "spacing" => self.spacing = value.parse()?,
            "delta_width" => self.delta_width = parse_num("delta_width", value)?,
            "epsilon" => self.epsilon = parse_num("epsilon", value)?,
            "delta_amplitude" => self.delta_amplitude = parse_num("delta_amplitude", value)?,
            "gamma" => self.gamma = parse_num("gamma", value)?,
            "gravity" => self.gravity = parse_num("gravity", value)?,
            "fit_k_lo" => self.fit_k_lo = parse_num("fit_k_lo", value)?,
            "fit_k_hi" => self.fit_k_hi = parse_num("fit_k_hi", value)?,
            "pressure_csv" => self.pressure_csv = Some(PathBuf::from(value)),
            "sweep_csv" => self.sweep_csv = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "jobs" => self.jobs = parse_num("jobs", value)?,
            other => {
                return Err(Error::param("config", format!("unknown key `{other}`")));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: origin.into(),
                reason: format!("line {}: expected key = value", lineno + 1),
            })?;
            self.set(key, value).map_err(|e| Error::Parse {
                path: origin.into(),
                reason: format!("line {}: {e}", lineno + 1),
            })?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, path)?;
        Ok(cfg)
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n, self.half_width)
    }

    pub fn params(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.speed, self.depth)
    }

    pub fn cutoff(&self) -> Result<SpectralCutoff> {
        let c = SpectralCutoff {
            rel: self.cutoff_rel,
            k_max: self.k_max,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn perturbation(&self) -> Result<PerturbationSpec> {
        let spec = PerturbationSpec {
            epsilon: self.epsilon,
            delta_amplitude: self.delta_amplitude,
            delta_width: self.delta_width,
            gamma: self.gamma,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn fit_window(&self) -> (f64, f64) {
        (self.fit_k_lo, self.fit_k_hi)
    }

    pub fn trace(&self) -> Result<PressureTrace> {
        match &self.pressure_csv {
            Some(path) => Ok(PressureTrace::Tabulated(TabulatedTrace::from_csv(path)?)),
            None => Ok(PressureTrace::PaperClosedForm),
        }
    }

    pub fn sweep_values(&self) -> Result<Vec<f64>> {
        let (dmin, dmax) = self.channel.default_range();
        sweep_values(
            self.min.unwrap_or(dmin),
            self.max.unwrap_or(dmax),
            self.count,
            self.spacing,
        )
    }

    /// Output directory; it must already exist.
    pub fn out_dir(&self) -> Result<&Path> {
        let dir = self.out.as_path();
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
            ));
        }
        Ok(dir)
    }
}
