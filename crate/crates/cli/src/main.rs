use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use darwinsim_core::sweep::{classicality_at, fraction_sweep, time_sweep, Model, FRACTION_COLUMNS};
use darwinsim_core::verify::{run_verify, Fault, VerifyConfig};

mod config;
mod output;

use config::{default_single_time, default_time_grid, CommonArgs, RunConfig};
use output::{open_sink, write_json, write_table, Table};

#[derive(Parser)]
#[command(name = "darwinsim", version, about = "Redundancy, discord and classicality of a two-qubit system in a spin environment")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation, coherence and discord columns over a time grid
    TimeSweep(CommonArgs),
    /// Mutual information over environment fraction size at one time
    FractionSweep(CommonArgs),
    /// Nullity certificates and plateau report at one time (JSON)
    Classicality(CommonArgs),
    /// Run the self-check suites; exit status 1 when any fails
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Random parameter draws per suite
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CorruptAmplitude,
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("DARWINSIM_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("DARWINSIM_THREADS='{v}' is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn model(cfg: &RunConfig) -> Result<Model> {
    Ok(Model::new(cfg.params, cfg.jx, cfg.jy)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::TimeSweep(args) => {
            let cfg = RunConfig::resolve(&args, &default_time_grid())?;
            let rows = time_sweep(&model(&cfg)?, &cfg.time_grid, &cfg.outputs, cfg.nullity_tol)?;
            let mut columns = vec!["t".to_string()];
            columns.extend(cfg.outputs.iter().map(|q| q.name().to_string()));
            let rows = rows
                .into_iter()
                .map(|r| std::iter::once(r.t).chain(r.values).collect())
                .collect();
            let mut sink = open_sink(cfg.output_path.as_deref())?;
            write_table(&Table { columns, rows }, cfg.format, &mut sink)?;
        }
        Command::FractionSweep(args) => {
            let cfg = RunConfig::resolve(&args, &default_single_time())?;
            let rows = fraction_sweep(&model(&cfg)?, cfg.single_time()?, &cfg.fraction_grid)?;
            let table = Table {
                columns: FRACTION_COLUMNS.map(String::from).to_vec(),
                rows: rows
                    .iter()
                    .map(|r| vec![r.f, r.mi_composite_over_s, r.mi_single_over_s_single])
                    .collect(),
            };
            let mut sink = open_sink(cfg.output_path.as_deref())?;
            write_table(&table, cfg.format, &mut sink)?;
        }
        Command::Classicality(args) => {
            let cfg = RunConfig::resolve(&args, &default_single_time())?;
            let report = classicality_at(&model(&cfg)?, cfg.single_time()?, cfg.nullity_tol, cfg.plateau_tol)?;
            let mut sink = open_sink(cfg.output_path.as_deref())?;
            write_json(&report, &mut sink)?;
        }
        Command::Verify { common, draws, inject_fault } => {
            let cfg = RunConfig::resolve(&common, &default_single_time())?;
            let vc = VerifyConfig {
                jx: cfg.jx,
                jy: cfg.jy,
                seed: cfg.seed,
                draws,
                nullity_tol: cfg.nullity_tol,
                fault: inject_fault.map(|FaultArg::CorruptAmplitude| Fault::CorruptAmplitude),
                ..VerifyConfig::new(cfg.params.at_time(cfg.single_time()?))
            };
            let summary = run_verify(&vc)?;
            let mut sink = open_sink(cfg.output_path.as_deref())?;
            write_json(&summary, &mut sink)?;
            for s in &summary.suites {
                if let Some(n) = &s.notice {
                    eprintln!("{}: {n}", s.name);
                }
            }
            if !summary.passed {
                eprintln!("verification failed: {}", summary.failed_suites().join(", "));
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|_| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
