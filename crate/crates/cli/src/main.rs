//! Command-line front end: runs the experiments and writes CSV tables (and
//! contract ledgers for the offloading sweeps) into an output directory.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use irs_offload::harness::{
    emit_csv, run_coding_sweep, run_ergodic_sweep, run_gamma_validation, run_offload_experiments, run_phase_bench,
    unit_grid, ExperimentConfig, Sweep, Table,
};

#[derive(Debug, Parser)]
#[command(name = "irs-offload", version, about = "IRS-assisted secure offloading experiments")]
struct Cli {
    /// TOML file with ExperimentConfig fields; missing fields keep defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per offloading sweep point (overrides the config file).
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gamma fit of the wiretap gain and quadrature cross-checks.
    ValidateGamma,
    /// Ergodic secrecy rate over IRS size and eavesdropper antennas.
    ErgodicSweep,
    /// Effective secrecy rate over the coding rate.
    CodingSweep,
    /// Optimized against random phases.
    PhaseBench,
    /// Energy of every allocation scheme over one or all sweeps.
    OffloadSim {
        #[arg(long, value_enum, default_value_t = SweepArg::All)]
        sweep: SweepArg,
    },
    /// Every experiment above.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    RbCount,
    NIrs,
    CPerBit,
    Epsilon,
    All,
}

impl SweepArg {
    fn sweeps(self) -> Vec<Sweep> {
        match self {
            SweepArg::RbCount => vec![Sweep::RbCount],
            SweepArg::NIrs => vec![Sweep::NIrs],
            SweepArg::CPerBit => vec![Sweep::CPerBit],
            SweepArg::Epsilon => vec![Sweep::Epsilon],
            SweepArg::All => Sweep::ALL.to_vec(),
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_path(path).with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.master_seed = seed;
    }
    if let Some(runs) = cli.runs {
        cfg.runs = runs;
    }
    cfg.validate().context("invalid configuration")?;
    Ok(cfg)
}

fn write_table(out: &Path, name: &str, table: &Table) -> Result<()> {
    let path = out.join(name);
    emit_csv(table, &path).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {} ({} rows)", path.display(), table.rows.len());
    Ok(())
}

fn gamma(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    write_table(out, "gamma_validation.csv", &run_gamma_validation(cfg)?)
}

fn ergodic(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let table = run_ergodic_sweep(cfg, &cfg.ergodic_n_values, &cfg.ergodic_n_eve_values)?;
    write_table(out, "ergodic_sweep.csv", &table)
}

fn coding(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let sweep = run_coding_sweep(cfg, &unit_grid(cfg.coding_grid_points))?;
    write_table(out, "coding_sweep.csv", &sweep.table)
}

fn phase(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    write_table(out, "phase_bench.csv", &run_phase_bench(cfg, &cfg.phase_n_values)?.table)
}

fn offload(cfg: &ExperimentConfig, out: &Path, sweeps: &[Sweep]) -> Result<()> {
    for &sweep in sweeps {
        let report = run_offload_experiments(cfg, sweep)?;
        write_table(out, &format!("offload_{}.csv", sweep.name()), &report.table)?;
        let path = out.join(format!("ledger_{}.jsonl", sweep.name()));
        report
            .sample_ledger
            .export_jsonl(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        println!(
            "  {} ledgers verified ({} records), {} populations redrawn; sample ledger {}",
            report.ledgers_verified,
            report.ledger_records,
            report.redraws,
            path.display()
        );
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let cfg = load_config(&cli)?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::ValidateGamma => gamma(&cfg, out),
        Command::ErgodicSweep => ergodic(&cfg, out),
        Command::CodingSweep => coding(&cfg, out),
        Command::PhaseBench => phase(&cfg, out),
        Command::OffloadSim { sweep } => offload(&cfg, out, &sweep.sweeps()),
        Command::All => {
            gamma(&cfg, out)?;
            ergodic(&cfg, out)?;
            coding(&cfg, out)?;
            phase(&cfg, out)?;
            offload(&cfg, out, &Sweep::ALL)
        }
    }
}
