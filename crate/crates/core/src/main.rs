use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wave_recover::experiments::{cmd_diagnose, cmd_reconstruct, cmd_sweep, RunConfig};
use wave_recover::Result;

#[derive(Parser)]
#[command(name = "wave-recover", version, about = "Solitary-wave surface recovery from bed pressure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct one profile; writes profile.csv and spectrum.csv.
    Reconstruct(Flags),
    /// Sweep one perturbation channel; writes sweep_<channel>.csv and .svg.
    Sweep(Flags),
    /// Decay fit and bound diagnostics; writes diagnostics.json.
    Diagnose(Flags),
}

/// Every flag overrides the matching key of `--config`.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    speed: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    depth: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    half_width: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    cutoff_rel: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k_max: Option<String>,
    /// epsilon | delta_amplitude | gamma
    #[arg(long)]
    channel: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    max: Option<String>,
    #[arg(long)]
    count: Option<String>,
    /// linear | log
    #[arg(long)]
    spacing: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta_width: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta_amplitude: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gravity: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    fit_k_lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    fit_k_hi: Option<String>,
    /// Two-column (q, p) pressure trace; defaults to the closed-form trace.
    #[arg(long)]
    pressure_csv: Option<String>,
    /// Sweep CSV to compare against the error bound (diagnose only).
    #[arg(long)]
    sweep_csv: Option<String>,
    /// Output directory (must exist).
    #[arg(long)]
    out: Option<String>,
    /// Worker threads for sweeps; 0 picks automatically.
    #[arg(long)]
    jobs: Option<String>,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let overrides = [
            ("speed", self.speed),
            ("depth", self.depth),
            ("n", self.n),
            ("half_width", self.half_width),
            ("cutoff_rel", self.cutoff_rel),
            ("k_max", self.k_max),
            ("channel", self.channel),
            ("min", self.min),
            ("max", self.max),
            ("count", self.count),
            ("spacing", self.spacing),
            ("delta_width", self.delta_width),
            ("epsilon", self.epsilon),
            ("delta_amplitude", self.delta_amplitude),
            ("gamma", self.gamma),
            ("gravity", self.gravity),
            ("fit_k_lo", self.fit_k_lo),
            ("fit_k_hi", self.fit_k_hi),
            ("pressure_csv", self.pressure_csv),
            ("sweep_csv", self.sweep_csv),
            ("out", self.out),
            ("jobs", self.jobs),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        Ok(cfg)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Reconstruct(flags) => {
            let s = cmd_reconstruct(&flags.into_config()?)?;
            println!("eta peak      {:.10}", s.eta_peak);
            println!("cutoff k      {}", fmt_opt(s.cutoff_wavenumber));
            if s.edge_warning {
                eprintln!("warning: g has not decayed at the window edges");
            }
            if s.non_monotone_x {
                eprintln!("warning: x(q) is not strictly increasing");
            }
            for f in s.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Sweep(flags) => {
            let s = cmd_sweep(&flags.into_config()?)?;
            let admissible = s.records.iter().filter(|r| r.admissible).count();
            println!("points        {} ({} admissible)", s.records.len(), admissible);
            match s.fit {
                Some(f) => println!("alpha_hat     {:.6} (r2 {:.6})", f.alpha_hat, f.r_squared),
                None => eprintln!("warning: exponent fit unavailable for this sweep"),
            }
            if let Some(d) = s.decay {
                println!("sigma_hat     {:.6}", d.sigma_hat);
            }
            if let Some(m) = &s.majorization {
                println!("bound a2      {:.6e} ({} violations)", m.a2, m.violations.len());
            }
            for f in s.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Diagnose(flags) => {
            let (path, d) = cmd_diagnose(&flags.into_config()?)?;
            println!(
                "sigma_hat     {:.6} over ({}, {})",
                d.decay_fit.sigma_hat, d.decay_fit.window.0, d.decay_fit.window.1
            );
            println!("c_hat         {:.6}", d.decay_fit.c_hat);
            println!("cutoff k      {}", fmt_opt(d.cutoff_wavenumber));
            if let Some(m) = &d.majorization {
                println!("bound a2      {:.6e} ({} violations)", m.a2, m.violations.len());
            }
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
