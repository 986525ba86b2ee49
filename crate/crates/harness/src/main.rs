use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wigner_core::{builtin_law, eigvalsh, sample_wigner, SeedSpec};
use wigner_harness::dataset::write_plot_data;
use wigner_harness::{persist, report, run, ExperimentConfig, HarnessError, Result, TrialDataset};

/// The shipped identity and invariant suite configuration.
const SUITE_CONFIG: &str = include_str!("../../../configs/acceptance/identity.json");

#[derive(Parser)]
#[command(
    name = "rmtlab",
    version,
    about = "Seeded Monte Carlo experiments on Wigner matrices"
)]
struct Cli {
    /// Overrides the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the number of trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one matrix and print its spectrum, one eigenvalue per line.
    Sample {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value = "gauss_half")]
        offdiag: String,
        #[arg(long, default_value = "gauss_one")]
        diag: String,
    },
    /// Run the exact-identity and spectral-invariant suite.
    Suite,
    /// Run the experiment named in a config file.
    Run { config: PathBuf },
    /// Recompute the summary of a stored dataset.
    Report { dataset: PathBuf },
}

fn apply_overrides(cli: &Cli, mut config: ExperimentConfig) -> Result<ExperimentConfig> {
    if let Some(s) = cli.seed {
        config.master_seed = s;
    }
    if let Some(t) = cli.trials {
        config.trials = t;
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    config.validate()?;
    Ok(config)
}

fn print_verdicts(ds: &TrialDataset) {
    let s = &ds.summary;
    println!(
        "{}: {} records, {} failed units",
        s.experiment, s.record_count, s.failure_count
    );
    for v in &s.verdicts {
        let mark = if v.passed { "PASS" } else { "FAIL" };
        println!(
            "  {mark} {:<44} observed {:.6e} bound {:.6e}  {}",
            v.name, v.observed, v.bound, v.detail
        );
    }
}

fn execute(cli: &Cli, config: ExperimentConfig) -> Result<bool> {
    let config = apply_overrides(cli, config)?;
    let ds = run(&config)?;
    let csv = cli.out.join(format!("{}.csv", config.experiment));
    persist(&ds, &csv)?;
    write_plot_data(&ds.summary, &cli.out.join("plots").join(&config.experiment))?;
    print_verdicts(&ds);
    println!("wrote {}", csv.display());
    Ok(ds.summary.all_passed())
}

fn sample(cli: &Cli, n: usize, offdiag: &str, diag: &str) -> Result<bool> {
    let law = |name: &str| builtin_law(name).ok_or_else(|| HarnessError::Config(format!("unknown entry law `{name}`")));
    let h = sample_wigner(n, &law(offdiag)?, &law(diag)?, SeedSpec::new(cli.seed.unwrap_or(0), 0))?;
    for mu in eigvalsh(&h)?.values() {
        println!("{mu:.17e}");
    }
    Ok(true)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Sample { n, offdiag, diag } => sample(cli, *n, offdiag, diag),
        Command::Suite => execute(cli, ExperimentConfig::from_json(SUITE_CONFIG)?),
        Command::Run { config } => execute(cli, ExperimentConfig::from_path(config)?),
        Command::Report { dataset } => {
            let ds = report(Path::new(dataset))?;
            print_verdicts(&ds);
            Ok(ds.summary.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
