//! `photon-am`: run verification suites and emit deterministic reports.
//!
//! Exit status: 0 when every check passes, 1 when any check fails, 2 on
//! usage or configuration errors.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use photon_am::config::parse_key_values;
use photon_am::{render_report, run_suite, Error, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "photon-am", version, about = "Finite-matrix checks of photon spin and orbital angular momentum")]
struct Args {
    /// canonical-commutators, observable-commutators, decomposition-compare,
    /// gauge-hiding, counter-rotating, field-consistency, dirac, or all.
    #[arg(long)]
    suite: Option<String>,
    /// Half list of wave vectors, `kx,ky,kz;kx,ky,kz`, or a mode-set file.
    #[arg(long)]
    grid: Option<String>,
    /// Shell radius and l_max, `|k|,lmax`.
    #[arg(long, allow_hyphen_values = true)]
    shell: Option<String>,
    /// Per-channel occupation cap for grid spaces.
    #[arg(long, allow_hyphen_values = true)]
    nmax: Option<String>,
    /// Replaces every equality tolerance.
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// text, json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Largest Fock dimension any check may build.
    #[arg(long = "dim-cap", allow_hyphen_values = true)]
    dim_cap: Option<String>,
    /// Flat `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Args {
    fn overrides(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("suite", &self.suite),
            ("grid", &self.grid),
            ("shell", &self.shell),
            ("nmax", &self.nmax),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("format", &self.format),
            ("out", &self.out),
            ("dim_cap", &self.dim_cap),
        ];
        pairs.into_iter().filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v))).collect()
    }
}

fn configure(args: &Args) -> Result<SuiteConfig, Error> {
    let mut cfg = SuiteConfig::default();
    if let Some(path) = &args.config {
        cfg.apply(&parse_key_values(&std::fs::read_to_string(path)?)?)?;
    }
    cfg.apply(&args.overrides())?;
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: &Args) -> Result<bool, Error> {
    let cfg = configure(args)?;
    let report = run_suite(&cfg)?;
    let bytes = render_report(&report, cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &bytes)?,
        None => std::io::stdout().write_all(&bytes)?,
    }
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("photon-am: {e}");
            ExitCode::from(2)
        }
    }
}
