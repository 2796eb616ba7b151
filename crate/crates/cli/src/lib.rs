//! `ucsim` subcommands and report rendering.

pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use uc_core::forecast::{fit, forecast_horizon, read_history_csv};
use uc_core::io::read_hourly_csv;
use uc_core::market::{run_horizon, write_outputs, RunConfig, LEDGER_FILE, STATS_FILE, TIMINGS_FILE};
use uc_core::scenario::generate;
use uc_core::system::{compute_ptdf, load_system};
use uc_core::{Error, Result};

use report::{read_timings, render_tables, scenario_fan_csv, Bucket, ReportOptions};

#[derive(Debug, Parser)]
#[command(name = "ucsim", version, about = "Unit commitment under wind uncertainty")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the forecast model and write DA quantiles for one day.
    Forecast {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        day: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Sample and reduce DA scenarios for one day.
    Scenarios {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        day: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Coverage of the interval written to the fan file.
        #[arg(long, default_value_t = 0.8)]
        confidence: f64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Simulate every configured strategy over the day range.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        gap: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Render tables from the ledger in a run directory.
    Report {
        run_dir: PathBuf,
        /// Defaults to the run directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Column group as `name=first-last` (repeatable).
        #[arg(long = "bucket")]
        buckets: Vec<String>,
        #[arg(long)]
        exclude_flagged: bool,
    },
    /// Check a system description and its network.
    Validate { system: PathBuf },
}

fn create(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Loads the DA forecast distribution for `day` of a run config.
fn day_forecast(cfg: &RunConfig, day: usize) -> Result<(uc_core::system::PowerSystem, uc_core::forecast::ProbabilisticForecast)> {
    let history = cfg.history.as_ref().ok_or_else(|| Error::invalid("run config", "no history file"))?;
    let system = load_system(&cfg.system)?;
    let model = fit(&read_history_csv(history)?, &system.wind_farms, &cfg.kde)?;
    let da = read_hourly_csv(&cfg.da_forecast)?;
    let hours = 24;
    let start = (day.max(1) - 1) * hours;
    if day == 0 || da.hours() < start + hours {
        return Err(Error::invalid("day", format!("{day} outside the DA forecast series")));
    }
    let point = system
        .wind_farms
        .iter()
        .map(|f| {
            da.column(&f.id)
                .map(|c| c[start..start + hours].to_vec())
                .ok_or_else(|| Error::Format(format!("DA forecast: no column for wind farm {}", f.id)))
        })
        .collect::<Result<Vec<_>>>()?;
    let pf = forecast_horizon(&model, &point, 0)?;
    Ok((system, pf))
}

/// Executes one command; the returned text is printed on success.
pub fn execute(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Validate { system } => {
            let sys = load_system(&system)?;
            compute_ptdf(&sys, sys.slack)?;
            Ok(format!(
                "{}: {} buses, {} lines, {} generators, {} wind farms, {} hours of load",
                sys.name,
                sys.buses.len(),
                sys.lines.len(),
                sys.generators.len(),
                sys.wind_farms.len(),
                sys.horizon()
            ))
        }
        Command::Forecast { config, day, out } => {
            let cfg = RunConfig::load(&config)?;
            let (_, pf) = day_forecast(&cfg, day)?;
            create(&out)?;
            let path = out.join(format!("quantiles_day{day}.csv"));
            pf.write_csv(&path)?;
            Ok(format!("wrote {}", path.display()))
        }
        Command::Scenarios { config, day, seed, confidence, out } => {
            let cfg = RunConfig::load(&config)?;
            let (system, pf) = day_forecast(&cfg, day)?;
            let mut sc = cfg.scenarios;
            if let Some(s) = seed {
                sc.seed = s;
            }
            let set = generate(&pf, &system.wind_farms, &sc)?;
            create(&out)?;
            let path = out.join(format!("scenarios_day{day}.csv"));
            set.write_csv(&path)?;
            let fan = out.join(format!("fan_day{day}.csv"));
            write(&fan, &scenario_fan_csv(&set, &pf, confidence)?)?;
            Ok(format!("wrote {} and {}", path.display(), fan.display()))
        }
        Command::Run { config, seed, out, gap, max_iter } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
                cfg.scenarios.seed = s;
            }
            if let Some(g) = gap {
                cfg.gap = g;
            }
            if let Some(m) = max_iter {
                cfg.max_iter = m;
            }
            let strategies = cfg.parse_strategies()?;
            let prepared = cfg.prepare()?;
            let results = run_horizon(&prepared.system, Some(&prepared.ptdf), &prepared.days, &strategies, &cfg.market())?;
            let ledger = write_outputs(&out, &results, cfg.wall_times_in_ledger)?;
            let mut msg = format!("wrote {}", out.join(LEDGER_FILE).display());
            for r in ledger.averages() {
                msg.push_str(&format!(
                    "\n{}: avg RT cost {:.2}, avg load shed {:.3} MWh",
                    r.strategy, r.rt_cost, r.load_shed_mwh
                ));
            }
            Ok(msg)
        }
        Command::Report { run_dir, out, buckets, exclude_flagged } => {
            let stats = run_dir.join(STATS_FILE);
            let ledger = uc_core::market::SimulationLedger::read(
                &run_dir.join(LEDGER_FILE),
                stats.exists().then_some(stats.as_path()),
            )?;
            let timings_path = run_dir.join(TIMINGS_FILE);
            let timings = if timings_path.exists() { Some(read_timings(&timings_path)?) } else { None };
            let options = ReportOptions {
                buckets: buckets.iter().map(|b| Bucket::parse(b)).collect::<Result<_>>()?,
                exclude_flagged,
            };
            let bundle = render_tables(&ledger, timings.as_deref(), &options)?;
            let out = out.unwrap_or(run_dir);
            bundle.write(&out)?;
            Ok(format!("wrote {}", out.join("report.md").display()))
        }
    }
}
