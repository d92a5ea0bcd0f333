use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use regulab::pipeline::{run, write_outputs, RunConfig, RunOptions, StageStatus, Target};

/// Regulators of cycles on Jacobians of curves, checked against
/// extension classes of mixed Hodge structures.
#[derive(Parser, Debug)]
#[command(name = "regulab", version)]
struct Cli {
    /// Stage to run (with its dependencies): all, verify, homology, periods,
    /// gamma, regulator, carlson, compare, mhs-selftest.
    stage: Target,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.json, tables/ and plots/.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed of the randomized suites; overrides the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Relative quadrature target; the cubatures use fixed multiples of it.
    #[arg(long)]
    tol: Option<f64>,
    /// Report the regulator of f as written instead of f / f(P).
    #[arg(long)]
    unnormalized: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t < 1.0) {
            eprintln!("error: --tol must lie in (0, 1), got {t}");
            return ExitCode::from(1);
        }
    }
    let config = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let (report, artifacts) = run(&config, cli.stage, &RunOptions { seed: cli.seed, tol: cli.tol, unnormalized: cli.unnormalized });
    for s in &report.stages {
        let status = match s.status {
            StageStatus::Pass => "pass",
            StageStatus::Fail => "FAIL",
            StageStatus::Error => "ERROR",
            StageStatus::Skipped => "skipped",
        };
        println!("{:<14} {status}", s.stage.name());
        if let Some(m) = &s.message {
            println!("    {m}");
        }
        for v in &s.verdicts {
            println!(
                "    [{}] {:<26} {:.3e} {} {:.1e}",
                if v.pass { "ok" } else { "!!" },
                v.id,
                v.value,
                v.relation,
                v.threshold
            );
        }
        for n in &s.notes {
            println!("    note: {n}");
        }
    }
    if let Err(e) = write_outputs(&cli.out, &report, &artifacts) {
        eprintln!("error: writing {}: {e}", cli.out.display());
        return ExitCode::from(1);
    }
    println!("report written to {}", cli.out.join("report.json").display());
    ExitCode::from(report.exit_code() as u8)
}
