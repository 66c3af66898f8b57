//! `dispmap`: dephasing and Stark-shift data for a dispersively read transmon.

mod commands;
mod config;
mod validate;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use dispmap_core::exec::Execution;
use dispmap_core::io::Table;

#[derive(Parser, Debug)]
#[command(name = "dispmap", version, about = "Measurement-induced dephasing and Stark shifts of a dispersively read transmon")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Omit the `#` provenance comment (which carries a timestamp).
    #[arg(long, global = true)]
    no_header: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Dephasing and Stark shift against resonator-drive detuning.
    RatesSweep,
    /// Tracked exact |1><0| eigenvalue against drive amplitude.
    BenchmarkEig,
    /// Time-dependent correlations and generator for one level pair.
    Transient,
    /// E(n_al, n_ar) on the level grid.
    SpectrumGrid,
    /// Full master equation against the effective map.
    Propagate,
    /// Dephasing rate next to the two-level steady-state expression.
    CompareGambetta,
    /// Perturbative eigenstate infidelities and residuals.
    Eigenstates,
    /// Nonzero entries of the doubled-space generator.
    DumpHu,
    /// Run the invariant suite and print a JSON report.
    Validate,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::RatesSweep => "rates-sweep",
            Command::BenchmarkEig => "benchmark-eig",
            Command::Transient => "transient",
            Command::SpectrumGrid => "spectrum-grid",
            Command::Propagate => "propagate",
            Command::CompareGambetta => "compare-gambetta",
            Command::Eigenstates => "eigenstates",
            Command::DumpHu => "dump-hu",
            Command::Validate => "validate",
        }
    }
}

fn execution(threads: Option<usize>) -> Result<Execution> {
    match threads {
        Some(0) => anyhow::bail!("--threads must be at least 1"),
        Some(1) => Ok(Execution::Sequential),
        Some(_n) => {
            #[cfg(feature = "parallel")]
            rayon::ThreadPoolBuilder::new().num_threads(_n).build_global().context("building thread pool")?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

fn config_path(cli: &Cli) -> Result<&Path> {
    cli.config.as_deref().with_context(|| format!("`{}` needs --config <path>", cli.command.name()))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot write output {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn emit(cli: &Cli, table: &Table) -> Result<()> {
    let comment = (!cli.no_header).then(|| {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let cfg = cli.config.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        format!("dispmap {} {} config={cfg} unix_time={secs}", cli.command.name(), env!("CARGO_PKG_VERSION"))
    });
    let mut w = sink(cli.out.as_deref())?;
    table.write_csv(&mut w, comment.as_deref(), true)?;
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<bool> {
    let mode = execution(cli.threads)?;
    let table = match cli.command {
        Command::RatesSweep => commands::rates_sweep(&config::load(config_path(cli)?)?, mode)?,
        Command::BenchmarkEig => commands::benchmark_eig(&config::load(config_path(cli)?)?, mode)?,
        Command::Transient => commands::transient(&config::load(config_path(cli)?)?, mode)?,
        Command::SpectrumGrid => commands::spectrum_grid(&config::load(config_path(cli)?)?)?,
        Command::Propagate => commands::propagate_compare(&config::load(config_path(cli)?)?)?,
        Command::CompareGambetta => commands::compare_gambetta(&config::load(config_path(cli)?)?, mode)?,
        Command::Eigenstates => commands::eigenstates(&config::load(config_path(cli)?)?, mode)?,
        Command::DumpHu => commands::dump_hu(&config::load(config_path(cli)?)?)?,
        Command::Validate => {
            let (p, pulse) = match &cli.config {
                Some(path) => config::system(&config::load::<config::Single>(path)?.system)?,
                None => validate::default_system(),
            };
            let report = validate::run(&p, &pulse, mode);
            let mut w = sink(cli.out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
            return Ok(report.passed);
        }
    };
    emit(cli, &table)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("dispmap: validation failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("dispmap: {e:#}");
            ExitCode::from(2)
        }
    }
}
