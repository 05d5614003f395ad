//! Command-line front end.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{parse_config, parse_override, ScenarioConfig};
use crate::report::{write_series_csv, write_summary_csv, write_trace_csv};
use crate::simulation::{build_landscape, run_scenario, run_seed, run_traced, sensitivity_sweep};
use crate::strategies::StrategyKind;

#[derive(Debug, Parser)]
#[command(
    name = "orgsearch",
    version,
    about = "Satisficing vs. hill-climbing search in NK organizations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write summary.json, summary.csv and series.csv.
    Run(CommonArgs),
    /// Run every strategy at every kEx on shared landscapes.
    Sweep(SweepArgs),
    /// Write the per-period trace of one run to trace.csv.
    Trace(TraceArgs),
    /// Write one generated landscape to landscape.json.
    DumpLandscape(DumpArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON scenario file; missing keys take the defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override a scenario key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Master seed.
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses one per core.
    #[arg(long, value_name = "N", default_value_t = 0)]
    pub workers: usize,
    #[arg(long, value_name = "satisficing|hc2|hc6")]
    pub strategy: Option<StrategyKind>,
    /// Cross-block interaction count.
    #[arg(long = "kex", value_name = "0..5")]
    pub k_ex: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0usize, 1, 2, 3, 4, 5])]
    pub kex_values: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = StrategyKind::ALL.to_vec())]
    pub strategies: Vec<StrategyKind>,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Landscape index.
    #[arg(long, default_value_t = 0)]
    pub landscape: usize,
    /// Run index on that landscape.
    #[arg(long, default_value_t = 0)]
    pub run: usize,
}

#[derive(Debug, Clone, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 0)]
    pub landscape: usize,
}

impl CommonArgs {
    /// Resolves the scenario and echoes it to `out/config.json`.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let mut overrides = self
            .set
            .iter()
            .map(|raw| parse_override(raw))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if let Some(seed) = self.seed {
            overrides.push(("masterSeed".into(), seed.to_string()));
        }
        if let Some(strategy) = self.strategy {
            overrides.push(("strategy".into(), strategy.to_string()));
        }
        if let Some(k_ex) = self.k_ex {
            overrides.push(("kEx".into(), k_ex.to_string()));
        }
        let config = parse_config(self.config.as_deref(), &overrides)?;
        fs::create_dir_all(&self.out)
            .with_context(|| format!("cannot create output directory {}", self.out.display()))?;
        write_json(&self.out.join("config.json"), &config)?;
        Ok(config)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn run_command(command: &Command) -> Result<()> {
    match command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let summary = run_scenario(&config, args.workers)?;
            let summaries = [summary];
            write_json(&args.out.join("summary.json"), &summaries[0])?;
            write_summary_csv(create(&args.out.join("summary.csv"))?, &summaries)?;
            write_series_csv(create(&args.out.join("series.csv"))?, &summaries)?;
            let s = &summaries[0];
            println!(
                "{}: final {:.4} (±{}), global max {:.1}%, altered {:.1}%",
                s.label(),
                s.final_performance,
                s.final_performance_ci
                    .map_or("NA".into(), |c| format!("{c:.4}")),
                100.0 * s.global_max_frequency,
                100.0 * s.alteration_ratio
            );
        }
        Command::Sweep(args) => {
            if args.kex_values.is_empty() || args.strategies.is_empty() {
                bail!("sweep needs at least one kEx value and one strategy");
            }
            let config = args.common.resolve()?;
            let sweep = sensitivity_sweep(
                &config,
                &args.kex_values,
                &args.strategies,
                args.common.workers,
            )?;
            let out = &args.common.out;
            write_json(&out.join("sweep.json"), &sweep)?;
            write_summary_csv(create(&out.join("sweep.csv"))?, &sweep.cells)?;
            write_series_csv(create(&out.join("series.csv"))?, &sweep.cells)?;
            for &strategy in &args.strategies {
                if let Some(spread) = sweep.spread(strategy) {
                    println!(
                        "{strategy}: final-performance spread {:.1} p.p.",
                        100.0 * spread
                    );
                }
            }
        }
        Command::Trace(args) => {
            let config = args.common.resolve()?;
            if args.landscape >= config.landscapes || args.run >= config.runs_per_landscape {
                bail!(
                    "invalid trace selector: landscape {} run {} (scenario has {} landscapes × {} runs)",
                    args.landscape,
                    args.run,
                    config.landscapes,
                    config.runs_per_landscape
                );
            }
            let (landscape, _) = build_landscape(&config, args.landscape)?;
            let seed = run_seed(&config, args.landscape, args.run);
            let (_, periods) = run_traced(&config, &landscape, seed)?;
            let run_id = args.landscape * config.runs_per_landscape + args.run;
            write_trace_csv(
                create(&args.common.out.join("trace.csv"))?,
                run_id,
                landscape.global_optimum().value,
                &periods,
            )?;
        }
        Command::DumpLandscape(args) => {
            let config = args.common.resolve()?;
            if args.landscape >= config.landscapes {
                bail!(
                    "invalid landscape index {} (scenario has {})",
                    args.landscape,
                    config.landscapes
                );
            }
            let (landscape, seed) = build_landscape(&config, args.landscape)?;
            write_json(
                &args.common.out.join("landscape.json"),
                &landscape.to_file(Some(seed)),
            )?;
        }
    }
    Ok(())
}
