use std::path::PathBuf;
use std::process::ExitCode;

use bfkit_core::families::Kappa;
use bfkit_core::harness::{
    emit, run_suite_with, ConfigError, Execution, FamilyKind, FamilySpec, Format, GridSpec, ResidualReport, Suite,
    SuiteConfig, DEFAULT_CLOSED_TOL, DEFAULT_ORDER, DEFAULT_TOL,
};
use clap::Parser;

/// Residual checks for exact solutions of the Boyer-Finley equation
/// u_{z zbar} = kappa (e^u)_{tt}.
#[derive(Debug, Parser)]
#[command(name = "bfkit", version)]
struct Cli {
    /// verify-solution, verify-foliation, verify-resolving, verify-hodograph,
    /// verify-hodograph-extra, verify-symmetry or scan
    suite: String,
    /// plus, minus, hodograph or random
    #[arg(long, default_value = "plus")]
    family: String,
    /// b(z) for the plus/minus families
    #[arg(long, default_value = "z")]
    b: String,
    /// c(z) for the plus/minus families
    #[arg(long, default_value = "z")]
    c: String,
    /// alpha(u) for the hodograph family
    #[arg(long, default_value = "0")]
    alpha: String,
    /// h(u) for the hodograph family
    #[arg(long, default_value = "0")]
    h: String,
    /// Polynomial degree of the random field (at most 4)
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// 1 or -1; defaults to the family's own sign
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<i8>,
    /// T0:T1:NT,X0:X1:NX,Y0:Y1:NY with z = x + i y
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Tolerance for derived identities
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Tolerance for closed-form solutions
    #[arg(long, default_value_t = DEFAULT_CLOSED_TOL)]
    closed_tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// T, G, X:<a(z)>, hod:<slot>=<f(u)>,... or direct:/hodograph:<coord>=<expr>,...
    #[arg(long)]
    generator: Option<String>,
    /// Report path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv
    #[arg(long, default_value = "json")]
    format: String,
    /// Evaluate sample points on one thread
    #[arg(long)]
    sequential: bool,
}

fn config(cli: &Cli) -> Result<(SuiteConfig, Format), String> {
    let suite: Suite = cli.suite.parse().map_err(|e: ConfigError| e.to_string())?;
    let kind: FamilyKind = cli.family.parse().map_err(|e: ConfigError| e.to_string())?;
    let kappa = cli.kappa.map(Kappa::try_from).transpose()?;
    let mut cfg = SuiteConfig::new(suite);
    cfg.family = FamilySpec {
        kind,
        b: cli.b.clone(),
        c: cli.c.clone(),
        alpha: cli.alpha.clone(),
        h: cli.h.clone(),
        degree: cli.degree,
    };
    cfg.kappa = kappa;
    if let Some(g) = &cli.grid {
        cfg.grid = g.parse::<GridSpec>().map_err(|e| e.to_string())?;
    }
    cfg.order = cli.order;
    cfg.tol = cli.tol;
    cfg.closed_tol = cli.closed_tol;
    cfg.seed = cli.seed;
    cfg.generator = cli.generator.clone();
    let format: Format = cli.format.parse()?;
    Ok((cfg, format))
}

fn summary(r: &ResidualReport) {
    for c in &r.checks {
        eprintln!(
            "{} {:<30} n={:<5} skipped={:<4} max={:.3e} tol={:.1e}",
            if c.pass { "ok  " } else { "FAIL" },
            c.name,
            c.n,
            c.skipped,
            c.max_abs,
            c.tol
        );
    }
    eprintln!("{}: {}", r.suite, if r.pass { "pass" } else { "fail" });
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, format) = match config(&cli) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("bfkit: {e}");
            return ExitCode::from(2);
        }
    };
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    let report = match run_suite_with(&cfg, exec) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("bfkit: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, format, cli.out.as_deref()) {
        eprintln!("bfkit: {e}");
        return ExitCode::from(2);
    }
    summary(&report);
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
