use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use semistd::arith::Frequency;
use semistd::harness::{self, cache, AuditToggles, ExperimentConfig, PolynomialSpec};
use semistd::series::{default_window, radius_estimate};
use semistd::Error;

#[derive(Parser)]
#[command(name = "semistd", version, about = "Linearization laboratory for generalized semi-standard maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment configuration
    #[arg(long)]
    config: Option<PathBuf>,
    /// Frequency spec (`surd:P,s,D,Q`, `cf:[a0;a1,..,(b..)]`, `rule:doubling[+C]`)
    #[arg(long)]
    frequency: Option<String>,
    #[arg(long)]
    nmax: Option<u64>,
    /// Precision in bits
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Continued fraction expansion and convergents as CSV
    Cf {
        frequency: String,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Compute the coefficients and write coeffs.csv
    Linearize(Common),
    /// Radius of convergence estimate
    Radius(Common),
    /// Brjuno sum, constants and the two radius bounds; writes bounds.json
    Bounds(Common),
    /// All enabled audits; writes coeffs.csv, audit.json, bounds.json
    Verify(Common),
    /// Sweep over a frequency family; writes sweep.csv
    Sweep(Common),
}

fn load_config(c: &Common) -> semistd::Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::new(PolynomialSpec::Named("semi-standard".into()), "surd:-1,1,5,2"),
    };
    if let Some(f) = &c.frequency {
        cfg.frequency = Some(f.clone());
    }
    if let Some(n) = c.nmax {
        cfg.n_max = n;
    }
    if let Some(p) = c.precision {
        cfg.precision = p;
    }
    if let Some(o) = &c.out {
        cfg.out = o.clone();
    }
    if c.no_cache {
        cfg.cache.enabled = false;
    }
    Ok(cfg)
}

fn series_for(cfg: &ExperimentConfig) -> semistd::Result<semistd::Series> {
    let freq = cfg.single_frequency()?;
    let poly = cfg.validated_polynomial()?;
    let dir = cfg.cache_dir();
    Ok(cache::load_or_compute(dir.as_deref(), &poly, &freq, cfg.n_max, cfg.precision())?.0)
}

fn only_bounds() -> AuditToggles {
    AuditToggles { residual: false, sparsity: false, argument: false, lemmas: false, bounds: true, divisors: false }
}

fn execute(command: Command) -> semistd::Result<bool> {
    match command {
        Command::Cf { frequency, depth } => {
            let cf = Frequency::parse(&frequency)?.expand(depth)?;
            print!("{}", cf.to_csv());
            Ok(true)
        }
        Command::Linearize(c) => {
            let cfg = load_config(&c)?;
            let series = series_for(&cfg)?;
            std::fs::create_dir_all(&cfg.out)?;
            let path = cfg.out.join("coeffs.csv");
            std::fs::write(&path, series.to_csv())?;
            println!("wrote {} ({} coefficients)", path.display(), series.n_max());
            Ok(true)
        }
        Command::Radius(c) => {
            let cfg = load_config(&c)?;
            let series = series_for(&cfg)?;
            let window = cfg.window.unwrap_or_else(|| default_window(cfg.n_max, series.polynomial().kappa0() as u64));
            let est = radius_estimate(&series, window)?;
            println!("window [{}, {}]", est.window.0, est.window.1);
            println!("ln rho (tail max)  {:.12}", est.ln_rho);
            println!("ln rho (tail mean) {:.12}", est.ln_rho_mean);
            println!("rho                {:.12}", est.rho());
            Ok(true)
        }
        Command::Bounds(c) => {
            let mut cfg = load_config(&c)?;
            cfg.audits = only_bounds();
            let report = harness::run(&cfg)?;
            let b = report.bounds.as_ref().expect("bounds enabled");
            println!("{}", serde_json::to_string_pretty(&b.theorem)?);
            Ok(b.ordered)
        }
        Command::Verify(c) => {
            let cfg = load_config(&c)?;
            let report = harness::run(&cfg)?;
            let (p, t) = report.audit_counts();
            println!("{p}/{t} audit sections passed; artifacts in {}", cfg.out.display());
            Ok(report.passed())
        }
        Command::Sweep(c) => {
            let cfg = load_config(&c)?;
            let result = harness::sweep(&cfg)?;
            print!("{}", result.to_csv());
            if let Some(s) = result.spread {
                println!("spread of ln rho + (2/d) B: {s:.6}");
            }
            Ok(result.rows.iter().all(|r| r.status == "ok" && r.audits_passed == r.audits_total))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PrecisionExhausted { .. } | Error::InsufficientDepth { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
