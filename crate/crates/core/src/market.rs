//! Rolling day-ahead commitment, reliability assessment commitment and
//! real-time dispatch over a sequence of operating days.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::decomposition::{solve_benders, solve_extensive, solve_lsf, DecompConfig, DecompStats, Solved};
use crate::error::{Error, Result};
use crate::forecast::{fit, forecast_horizon, read_history_csv, ForecastModel, KdeConfig, ProbabilisticForecast};
use crate::io::{read_hourly_csv, HourlySeries};
use crate::scenario::{generate, ScenarioConfig};
use crate::system::{compute_ptdf, load_system, LoadSeries, PowerSystem, PtdfMatrix};
use crate::uc::{
    build_duc, build_ed, build_iuc, build_suc, dynamic_reserve, suc_spec, BuildContext, CommitmentMode,
    CommitmentSchedule, CostBreakdown, NetworkMode, Penalties, ReservePolicy, ReserveSplit, Strategy, SucMethod,
};

pub const HOURS_PER_DAY: usize = 24;

/// Everything known about one operating day before it is simulated.
#[derive(Debug, Clone)]
pub struct DayInputs {
    /// 1-based day index within the input series.
    pub day: usize,
    /// `[farm][hour]`, MW.
    pub da_point: Vec<Vec<f64>>,
    pub da_forecast: ProbabilisticForecast,
    pub rac_point: Vec<Vec<f64>>,
    pub rac_forecast: ProbabilisticForecast,
    pub realized: Vec<Vec<f64>>,
    pub load: LoadSeries,
}

impl DayInputs {
    pub fn validate(&self, system: &PowerSystem) -> Result<()> {
        let farms = system.wind_farms.len();
        for (name, s) in [("DA forecast", &self.da_point), ("RAC forecast", &self.rac_point), ("realized wind", &self.realized)] {
            if s.len() != farms {
                return Err(Error::HorizonMismatch { entity: format!("{name} farms"), expected: farms, found: s.len() });
            }
            for row in s {
                if row.len() != HOURS_PER_DAY {
                    return Err(Error::HorizonMismatch { entity: name.into(), expected: HOURS_PER_DAY, found: row.len() });
                }
            }
        }
        for (f, farm) in system.wind_farms.iter().enumerate() {
            if self.realized[f].iter().any(|v| !(*v >= 0.0 && *v <= farm.capacity + 1e-9)) {
                return Err(Error::invalid(format!("realized wind {} day {}", farm.id, self.day), "outside [0, capacity]"));
            }
        }
        if self.load.hours() != HOURS_PER_DAY {
            return Err(Error::HorizonMismatch { entity: "day load".into(), expected: HOURS_PER_DAY, found: self.load.hours() });
        }
        Ok(())
    }
}

/// Generator conditions carried from one day to the next.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    /// Hours on (positive) or off (negative).
    pub status: Vec<i32>,
    /// MW at the last executed hour.
    pub output: Vec<f64>,
}

impl SystemState {
    pub fn initial(system: &PowerSystem) -> Self {
        Self {
            status: system.generators.iter().map(|g| g.initial_status).collect(),
            output: system.generators.iter().map(|g| g.initial_output).collect(),
        }
    }

    /// Copy of `system` with this state as the initial condition and `load`
    /// as the horizon.
    pub fn apply(&self, system: &PowerSystem, load: LoadSeries) -> PowerSystem {
        let mut sys = system.with_load(load);
        for (g, gen) in sys.generators.iter_mut().enumerate() {
            gen.initial_status = self.status[g];
            gen.initial_output = self.output[g];
        }
        sys
    }

    /// State after executing `schedule` with outputs `output[g][t]`.
    pub fn advance(&self, system: &PowerSystem, schedule: &CommitmentSchedule, output: &[Vec<f64>]) -> Self {
        let mut status = Vec::new();
        let mut last = Vec::new();
        for (g, gen) in system.generators.iter().enumerate() {
            let row = &schedule.on[g];
            let end = *row.last().expect("non-empty schedule");
            let run = row.iter().rev().take_while(|u| **u == end).count() as i32;
            let prev = self.status[g];
            let s = if run as usize == row.len() && (prev > 0) == end {
                prev + if end { run } else { -run }
            } else if end {
                run
            } else {
                -run
            };
            status.push(s);
            let p = *output[g].last().expect("non-empty dispatch");
            last.push(if end { p.clamp(gen.p_min, gen.p_max) } else { 0.0 });
        }
        Self { status, output: last }
    }
}

/// Committed unit-hours `(fast, slow)` by the quick-start flag.
pub fn classify_commitments(schedule: &CommitmentSchedule, system: &PowerSystem) -> (usize, usize) {
    schedule.classify(system)
}

/// Simulation settings shared by every strategy and day.
#[derive(Debug, Clone)]
pub struct MarketConfig {
    pub contingency: f64,
    pub split: ReserveSplit,
    pub penalties: Penalties,
    pub scenarios: ScenarioConfig,
    pub decomp: DecompConfig,
    /// Base seed for per-day scenario sampling.
    pub seed: u64,
    /// Enforce line limits in every stage.
    pub network: bool,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            contingency: 30.0,
            split: ReserveSplit::default(),
            penalties: Penalties::default(),
            scenarios: ScenarioConfig { n_reduced: 10, ..Default::default() },
            decomp: DecompConfig::default(),
            seed: 1,
            network: true,
        }
    }
}

impl MarketConfig {
    fn policy(&self) -> ReservePolicy {
        ReservePolicy::contingency_only(self.contingency, self.split)
    }

    fn stage_seed(&self, day: usize, stage: u64) -> u64 {
        self.seed.wrapping_mul(1_000_003).wrapping_add(day as u64 * 16 + stage)
    }
}

/// One solved stage.
#[derive(Debug, Clone)]
pub struct StageOutcome {
    pub objective: f64,
    pub cost: CostBreakdown,
    pub commitment: CommitmentSchedule,
    pub wall_ms: f64,
    pub stats: DecompStats,
}

impl StageOutcome {
    fn from(solved: Solved, start: Instant) -> Self {
        Self {
            objective: solved.solution.objective,
            cost: solved.solution.cost,
            commitment: solved.solution.commitment,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            stats: solved.stats,
        }
    }

    /// A MILP stopped on a limit or a decomposition ran out of iterations.
    pub fn flagged(&self) -> bool {
        self.stats.solver_limit_hit || self.stats.max_iter_hit
    }
}

#[derive(Debug, Clone)]
pub struct DayResult {
    pub day: usize,
    pub strategy: Strategy,
    pub da: StageOutcome,
    pub rac: StageOutcome,
    pub rt: StageOutcome,
    pub load_shed_mwh: f64,
    pub spill_mwh: f64,
    /// Executed (RAC) commitment split by unit class.
    pub fast_uh: usize,
    pub slow_uh: usize,
    /// Executed outputs `[g][t]`.
    pub output: Vec<Vec<f64>>,
}

struct Stage<'a> {
    system: &'a PowerSystem,
    ptdf: Option<&'a PtdfMatrix>,
    config: &'a MarketConfig,
}

impl Stage<'_> {
    fn ctx(&self, lazy: bool) -> BuildContext<'_> {
        let network = match (self.config.network && self.ptdf.is_some(), lazy) {
            (false, _) => NetworkMode::Ignore,
            (true, false) => NetworkMode::Full,
            (true, true) => NetworkMode::Lazy,
        };
        BuildContext { system: self.system, ptdf: self.ptdf, network, penalties: self.config.penalties }
    }

    /// Solves the commitment model of `strategy` on one forecast.
    fn commit(
        &self,
        strategy: Strategy,
        pf: &ProbabilisticForecast,
        realized: &[Vec<f64>],
        commitment: CommitmentMode,
        seed: u64,
        warm: Option<&CommitmentSchedule>,
    ) -> Result<Solved> {
        let cfg = &self.config.decomp;
        let policy = self.config.policy();
        let h = HOURS_PER_DAY;
        match strategy {
            Strategy::DucPerfect => {
                solve_extensive(&build_duc(&self.ctx(false), realized, &policy, h, commitment)?, self.system, cfg)
            }
            Strategy::DucPoint => {
                solve_extensive(&build_duc(&self.ctx(false), &pf.central(), &policy, h, commitment)?, self.system, cfg)
            }
            Strategy::DucDr { tau } => {
                let policy = ReservePolicy { dynamic: dynamic_reserve(pf, tau)?, ..policy };
                solve_extensive(&build_duc(&self.ctx(false), &pf.central(), &policy, h, commitment)?, self.system, cfg)
            }
            Strategy::Iuc { tau } => {
                let p = build_iuc(&self.ctx(false), &pf.central(), &pf.series(tau), &policy, h, commitment)?;
                solve_extensive(&p, self.system, cfg)
            }
            Strategy::Suc { method, rho } => {
                let sc = ScenarioConfig { seed, ..self.config.scenarios };
                let set = generate(pf, &self.system.wind_farms, &sc)?;
                match method {
                    SucMethod::Extensive => {
                        let p = build_suc(&self.ctx(false), &set, &policy, rho, h, commitment)?;
                        solve_extensive(&p, self.system, cfg)
                    }
                    SucMethod::Lsf => {
                        let p = build_suc(&self.ctx(true), &set, &policy, rho, h, commitment)?;
                        solve_lsf(p, self.system, cfg)
                    }
                    SucMethod::Benders => {
                        let spec = suc_spec(&self.ctx(false), &set, &policy, rho, h, commitment)?;
                        let ptdf = if self.config.network { self.ptdf } else { None };
                        solve_benders(self.system, ptdf, &spec, cfg, warm)
                    }
                }
            }
        }
    }
}

/// Simulates one day: DA commitment, RAC with slow units held at their DA
/// status, then real-time dispatch of realized wind.
pub fn run_day(
    base: &PowerSystem,
    ptdf: Option<&PtdfMatrix>,
    state: &SystemState,
    inputs: &DayInputs,
    strategy: Strategy,
    config: &MarketConfig,
) -> Result<(DayResult, SystemState)> {
    let system = state.apply(base, inputs.load.clone());
    inputs.validate(&system)?;
    let stage = Stage { system: &system, ptdf, config };

    let start = Instant::now();
    let da = stage.commit(
        strategy,
        &inputs.da_forecast,
        &inputs.realized,
        CommitmentMode::Free,
        config.stage_seed(inputs.day, 0),
        None,
    )?;
    let da = StageOutcome::from(da, start);

    let fixed: Vec<Option<Vec<bool>>> = system
        .generators
        .iter()
        .zip(&da.commitment.on)
        .map(|(g, on)| (!g.quick_start).then(|| on.clone()))
        .collect();
    let start = Instant::now();
    let rac = stage.commit(
        strategy,
        &inputs.rac_forecast,
        &inputs.realized,
        CommitmentMode::FixSome(fixed),
        config.stage_seed(inputs.day, 1),
        Some(&da.commitment),
    )?;
    let rac = StageOutcome::from(rac, start);

    let start = Instant::now();
    let ed = build_ed(&stage.ctx(false), &rac.commitment, &inputs.realized, &config.policy(), HOURS_PER_DAY)?;
    let rt_solved = solve_extensive(&ed, &system, &config.decomp)?;
    let dispatch = rt_solved.solution.blocks[0].clone();
    let rt = StageOutcome::from(rt_solved, start);

    let (fast_uh, slow_uh) = classify_commitments(&rac.commitment, &system);
    let next = state.advance(&system, &rac.commitment, &dispatch.output);
    let result = DayResult {
        day: inputs.day,
        strategy,
        load_shed_mwh: dispatch.shed_mwh(),
        spill_mwh: dispatch.spill_mwh(),
        fast_uh,
        slow_uh,
        output: dispatch.output,
        da,
        rac,
        rt,
    };
    Ok((result, next))
}

/// One ledger line: a strategy on a day.
#[derive(Debug, Clone, PartialEq)]
pub struct LedgerRow {
    pub day: usize,
    pub strategy: String,
    pub da_cost: f64,
    pub rac_cost: f64,
    pub rt_cost: f64,
    pub load_shed_mwh: f64,
    pub spill_mwh: f64,
    pub fast_uh: f64,
    pub slow_uh: f64,
    pub da_ms: f64,
    pub rac_ms: f64,
    pub rt_ms: f64,
}

/// Per-stage solver statistics kept next to the ledger.
#[derive(Debug, Clone, PartialEq)]
pub struct StageStats {
    pub day: usize,
    pub strategy: String,
    pub stage: String,
    pub method: String,
    pub iterations: usize,
    pub cuts: usize,
    pub enforced: usize,
    pub universe: usize,
    pub max_iter_hit: bool,
    pub solver_limit_hit: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

impl StageStats {
    pub fn flagged(&self) -> bool {
        self.max_iter_hit || self.solver_limit_hit
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SimulationLedger {
    pub rows: Vec<LedgerRow>,
    pub stats: Vec<StageStats>,
}

pub const LEDGER_HEADER: &str =
    "day,strategy,da_cost,rac_cost,rt_cost,load_shed_mwh,spill_mwh,fast_uh,slow_uh,da_ms,rac_ms,rt_ms";
pub const STATS_HEADER: &str =
    "day,strategy,stage,method,iterations,cuts,enforced,universe,max_iter_hit,solver_limit_hit,lower_bound,upper_bound";

impl SimulationLedger {
    pub fn push(&mut self, r: &DayResult, wall_times: bool) {
        let ms = |s: &StageOutcome| if wall_times { s.wall_ms } else { 0.0 };
        let name = r.strategy.to_string();
        self.rows.push(LedgerRow {
            day: r.day,
            strategy: name.clone(),
            da_cost: r.da.objective,
            rac_cost: r.rac.objective,
            rt_cost: r.rt.objective,
            load_shed_mwh: r.load_shed_mwh,
            spill_mwh: r.spill_mwh,
            fast_uh: r.fast_uh as f64,
            slow_uh: r.slow_uh as f64,
            da_ms: ms(&r.da),
            rac_ms: ms(&r.rac),
            rt_ms: ms(&r.rt),
        });
        for (stage, s) in [("da", &r.da), ("rac", &r.rac), ("rt", &r.rt)] {
            let last = s.stats.trace.last();
            self.stats.push(StageStats {
                day: r.day,
                strategy: name.clone(),
                stage: stage.into(),
                method: s.stats.method.clone(),
                iterations: s.stats.iterations,
                cuts: s.stats.cuts,
                enforced: s.stats.enforced,
                universe: s.stats.universe,
                max_iter_hit: s.stats.max_iter_hit,
                solver_limit_hit: s.stats.solver_limit_hit,
                lower_bound: last.map_or(f64::NAN, |t| t.lower_bound),
                upper_bound: last.map_or(f64::NAN, |t| t.upper_bound),
            });
        }
    }

    /// Strategy names in order of first appearance.
    pub fn strategies(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.strategy) {
                out.push(r.strategy.clone());
            }
        }
        out
    }

    /// Whether any stage of `(day, strategy)` hit a limit.
    pub fn flagged(&self, day: usize, strategy: &str) -> bool {
        self.stats.iter().any(|s| s.day == day && s.strategy == strategy && s.flagged())
    }

    /// Mean of every numeric column per strategy, `day` set to 0.
    pub fn averages(&self) -> Vec<LedgerRow> {
        self.strategies()
            .into_iter()
            .map(|name| {
                let rows: Vec<&LedgerRow> = self.rows.iter().filter(|r| r.strategy == name).collect();
                let n = rows.len() as f64;
                let mean = |f: fn(&LedgerRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / n;
                LedgerRow {
                    day: 0,
                    strategy: name.clone(),
                    da_cost: mean(|r| r.da_cost),
                    rac_cost: mean(|r| r.rac_cost),
                    rt_cost: mean(|r| r.rt_cost),
                    load_shed_mwh: mean(|r| r.load_shed_mwh),
                    spill_mwh: mean(|r| r.spill_mwh),
                    fast_uh: mean(|r| r.fast_uh),
                    slow_uh: mean(|r| r.slow_uh),
                    da_ms: mean(|r| r.da_ms),
                    rac_ms: mean(|r| r.rac_ms),
                    rt_ms: mean(|r| r.rt_ms),
                }
            })
            .collect()
    }

    /// Per-day rows followed by one `avg` row per strategy.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        out.push_str(LEDGER_HEADER);
        out.push('\n');
        let line = |day: String, r: &LedgerRow| {
            format!(
                "{day},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.strategy,
                r.da_cost,
                r.rac_cost,
                r.rt_cost,
                r.load_shed_mwh,
                r.spill_mwh,
                r.fast_uh,
                r.slow_uh,
                r.da_ms,
                r.rac_ms,
                r.rt_ms
            )
        };
        for r in &self.rows {
            out.push_str(&line(r.day.to_string(), r));
        }
        for r in self.averages() {
            out.push_str(&line("avg".into(), &r));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    pub fn write_stats_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from(STATS_HEADER);
        out.push('\n');
        for s in &self.stats {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.day,
                s.strategy,
                s.stage,
                s.method,
                s.iterations,
                s.cuts,
                s.enforced,
                s.universe,
                s.max_iter_hit,
                s.solver_limit_hit,
                s.lower_bound,
                s.upper_bound
            ));
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Reads a ledger CSV, skipping `avg` rows, plus the optional stats file.
    pub fn read(path: &Path, stats: Option<&Path>) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
        if headers.iter().collect::<Vec<_>>().join(",") != LEDGER_HEADER {
            return Err(Error::Format(format!("{}: expected header `{LEDGER_HEADER}`", path.display())));
        }
        let mut ledger = SimulationLedger::default();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::csv(path, e))?;
            if &rec[0] == "avg" {
                continue;
            }
            let bad = |col: &str| Error::Format(format!("{}: bad {col} `{}`", path.display(), rec.get(0).unwrap_or("")));
            let num = |k: usize| rec[k].trim().parse::<f64>().map_err(|_| bad(&headers[k]));
            ledger.rows.push(LedgerRow {
                day: rec[0].trim().parse().map_err(|_| bad("day"))?,
                strategy: rec[1].to_string(),
                da_cost: num(2)?,
                rac_cost: num(3)?,
                rt_cost: num(4)?,
                load_shed_mwh: num(5)?,
                spill_mwh: num(6)?,
                fast_uh: num(7)?,
                slow_uh: num(8)?,
                da_ms: num(9)?,
                rac_ms: num(10)?,
                rt_ms: num(11)?,
            });
        }
        if let Some(sp) = stats {
            let mut rdr = csv::Reader::from_path(sp).map_err(|e| Error::csv(sp, e))?;
            for rec in rdr.records() {
                let rec = rec.map_err(|e| Error::csv(sp, e))?;
                let bad = || Error::Format(format!("{}: malformed row", sp.display()));
                let int = |k: usize| rec[k].parse::<usize>().map_err(|_| bad());
                let flag = |k: usize| rec[k].parse::<bool>().map_err(|_| bad());
                let num = |k: usize| rec[k].parse::<f64>().map_err(|_| bad());
                ledger.stats.push(StageStats {
                    day: int(0)?,
                    strategy: rec[1].to_string(),
                    stage: rec[2].to_string(),
                    method: rec[3].to_string(),
                    iterations: int(4)?,
                    cuts: int(5)?,
                    enforced: int(6)?,
                    universe: int(7)?,
                    max_iter_hit: flag(8)?,
                    solver_limit_hit: flag(9)?,
                    lower_bound: num(10)?,
                    upper_bound: num(11)?,
                });
            }
        }
        Ok(ledger)
    }
}

/// Runs every strategy over `days`, one thread per strategy. Rows are
/// ordered by strategy (input order), then day.
pub fn run_horizon(
    system: &PowerSystem,
    ptdf: Option<&PtdfMatrix>,
    days: &[DayInputs],
    strategies: &[Strategy],
    config: &MarketConfig,
) -> Result<Vec<Vec<DayResult>>> {
    if days.is_empty() {
        return Err(Error::invalid("day list", "need at least one day"));
    }
    if strategies.is_empty() {
        return Err(Error::invalid("strategy list", "need at least one strategy"));
    }
    let run = |s: Strategy| -> Result<Vec<DayResult>> {
        let mut state = SystemState::initial(system);
        let mut out = Vec::new();
        for d in days {
            let (r, next) = run_day(system, ptdf, &state, d, s, config)?;
            log::info!("{s} day {}: rt cost {:.2}, shed {:.3} MWh", d.day, r.rt.objective, r.load_shed_mwh);
            out.push(r);
            state = next;
        }
        Ok(out)
    };
    std::thread::scope(|scope| {
        let handles: Vec<_> = strategies.iter().map(|&s| scope.spawn(move || run(s))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}

pub fn ledger_of(results: &[Vec<DayResult>], wall_times: bool) -> SimulationLedger {
    let mut ledger = SimulationLedger::default();
    for strategy in results {
        for r in strategy {
            ledger.push(r, wall_times);
        }
    }
    ledger
}

/// Input file for `run`. Paths are relative to the file itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: PathBuf,
    /// Forecast history; without it every forecast is degenerate.
    #[serde(default)]
    pub history: Option<PathBuf>,
    pub da_forecast: PathBuf,
    pub realized: PathBuf,
    /// Intra-day forecast; blended from realized and DA when absent.
    #[serde(default)]
    pub rac_forecast: Option<PathBuf>,
    #[serde(default = "one")]
    pub first_day: usize,
    /// Number of days; all available days when absent.
    #[serde(default)]
    pub days: Option<usize>,
    pub strategies: Vec<String>,
    #[serde(default = "contingency")]
    pub contingency_mw: f64,
    #[serde(default)]
    pub reserve_split: ReserveSplit,
    #[serde(default)]
    pub penalties: Penalties,
    #[serde(default)]
    pub kde: KdeConfig,
    #[serde(default = "scenarios")]
    pub scenarios: ScenarioConfig,
    /// Weight on realized wind in the blended intra-day forecast.
    #[serde(default = "blend")]
    pub rac_realized_weight: f64,
    #[serde(default = "one_u64")]
    pub seed: u64,
    #[serde(default = "gap")]
    pub gap: f64,
    #[serde(default = "max_iter")]
    pub max_iter: usize,
    #[serde(default = "node_limit")]
    pub node_limit: usize,
    #[serde(default = "yes")]
    pub network: bool,
    /// One Benders cut per scenario instead of one aggregated cut.
    #[serde(default)]
    pub multi_cut: bool,
    /// Write measured stage times into the ledger instead of zeros.
    #[serde(default)]
    pub wall_times_in_ledger: bool,
}

fn one() -> usize {
    1
}
fn one_u64() -> u64 {
    1
}
fn contingency() -> f64 {
    30.0
}
fn scenarios() -> ScenarioConfig {
    MarketConfig::default().scenarios
}
fn blend() -> f64 {
    0.7
}
fn gap() -> f64 {
    1e-3
}
fn max_iter() -> usize {
    100
}
fn node_limit() -> usize {
    200_000
}
fn yes() -> bool {
    true
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.system);
        fix(&mut cfg.da_forecast);
        fix(&mut cfg.realized);
        if let Some(p) = cfg.history.as_mut() {
            fix(p);
        }
        if let Some(p) = cfg.rac_forecast.as_mut() {
            fix(p);
        }
        Ok(cfg)
    }

    pub fn parse_strategies(&self) -> Result<Vec<Strategy>> {
        self.strategies.iter().map(|s| s.parse()).collect()
    }

    pub fn market(&self) -> MarketConfig {
        let mut decomp = DecompConfig { max_iter: self.max_iter, multi_cut: self.multi_cut, ..DecompConfig::default() };
        decomp.milp.rel_gap = self.gap;
        decomp.milp.node_limit = self.node_limit;
        // a wall-clock stop would make results depend on machine speed
        decomp.milp.time_limit = std::time::Duration::from_secs(u64::MAX / 4);
        MarketConfig {
            contingency: self.contingency_mw,
            split: self.reserve_split,
            penalties: self.penalties,
            scenarios: self.scenarios,
            decomp,
            seed: self.seed,
            network: self.network,
        }
    }
}

/// Loaded system, network factors and per-day inputs for a run.
pub struct Prepared {
    pub system: PowerSystem,
    pub ptdf: PtdfMatrix,
    pub days: Vec<DayInputs>,
}

fn farm_matrix(series: &HourlySeries, system: &PowerSystem, what: &str) -> Result<Vec<Vec<f64>>> {
    system
        .wind_farms
        .iter()
        .map(|f| {
            series
                .column(&f.id)
                .map(<[f64]>::to_vec)
                .ok_or_else(|| Error::Format(format!("{what}: no column for wind farm {}", f.id)))
        })
        .collect()
}

fn day_slice(m: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    m.iter().map(|s| s[d * HOURS_PER_DAY..(d + 1) * HOURS_PER_DAY].to_vec()).collect()
}

/// Intra-day forecast emulated as `weight * realized + (1 - weight) * da`.
pub fn blend_forecast(realized: &[Vec<f64>], da: &[Vec<f64>], weight: f64) -> Vec<Vec<f64>> {
    realized
        .iter()
        .zip(da)
        .map(|(r, d)| r.iter().zip(d).map(|(r, d)| weight * r + (1.0 - weight) * d).collect())
        .collect()
}

/// Builds the day list from series covering whole days.
pub fn prepare_days(
    system: &PowerSystem,
    model: Option<&ForecastModel>,
    da: &[Vec<f64>],
    rac: Option<&[Vec<f64>]>,
    realized: &[Vec<f64>],
    rac_weight: f64,
    first_day: usize,
    days: Option<usize>,
) -> Result<Vec<DayInputs>> {
    if !(0.0..=1.0).contains(&rac_weight) {
        return Err(Error::invalid("RAC blend weight", format!("{rac_weight} outside [0, 1]")));
    }
    let hours = system.horizon();
    let available = hours / HOURS_PER_DAY;
    if first_day == 0 || first_day > available {
        return Err(Error::invalid("first day", format!("{first_day} outside 1..={available}")));
    }
    let count = days.unwrap_or(available + 1 - first_day);
    if count == 0 || first_day - 1 + count > available {
        return Err(Error::invalid("day range", format!("{count} days from day {first_day}, {available} available")));
    }
    let check = |m: &[Vec<f64>], what: &str| -> Result<()> {
        for s in m {
            if s.len() < hours {
                return Err(Error::HorizonMismatch { entity: what.into(), expected: hours, found: s.len() });
            }
        }
        Ok(())
    };
    check(da, "DA forecast")?;
    check(realized, "realized wind")?;
    if let Some(r) = rac {
        check(r, "RAC forecast")?;
    }
    let pf = |point: &[Vec<f64>]| -> Result<ProbabilisticForecast> {
        match model {
            Some(m) => forecast_horizon(m, point, 0),
            None => Ok(ProbabilisticForecast::degenerate(&system.wind_farms, point)),
        }
    };
    let mut out = Vec::new();
    for d in first_day - 1..first_day - 1 + count {
        let da_point = day_slice(da, d);
        let real = day_slice(realized, d);
        let rac_point = match rac {
            Some(r) => day_slice(r, d),
            None => blend_forecast(&real, &da_point, rac_weight),
        };
        out.push(DayInputs {
            day: d + 1,
            da_forecast: pf(&da_point)?,
            rac_forecast: pf(&rac_point)?,
            da_point,
            rac_point,
            realized: real,
            load: system.load.window(d * HOURS_PER_DAY, HOURS_PER_DAY),
        });
    }
    Ok(out)
}

impl RunConfig {
    pub fn prepare(&self) -> Result<Prepared> {
        let system = load_system(&self.system)?;
        let ptdf = compute_ptdf(&system, system.slack)?;
        let da = farm_matrix(&read_hourly_csv(&self.da_forecast)?, &system, "DA forecast")?;
        let realized = farm_matrix(&read_hourly_csv(&self.realized)?, &system, "realized wind")?;
        let rac = match &self.rac_forecast {
            Some(p) => Some(farm_matrix(&read_hourly_csv(p)?, &system, "RAC forecast")?),
            None => None,
        };
        let model = match &self.history {
            Some(p) => Some(fit(&read_history_csv(p)?, &system.wind_farms, &self.kde)?),
            None => None,
        };
        let days = prepare_days(
            &system,
            model.as_ref(),
            &da,
            rac.as_deref(),
            &realized,
            self.rac_realized_weight,
            self.first_day,
            self.days,
        )?;
        Ok(Prepared { system, ptdf, days })
    }
}

/// Files written by [`write_outputs`].
pub const LEDGER_FILE: &str = "ledger.csv";
pub const STATS_FILE: &str = "stage_stats.csv";
pub const TIMINGS_FILE: &str = "timings.csv";

/// Writes the ledger, stage statistics and measured wall times into `dir`.
pub fn write_outputs(dir: &Path, results: &[Vec<DayResult>], wall_times_in_ledger: bool) -> Result<SimulationLedger> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ledger = ledger_of(results, wall_times_in_ledger);
    ledger.write_csv(&dir.join(LEDGER_FILE))?;
    ledger.write_stats_csv(&dir.join(STATS_FILE))?;
    let path = dir.join(TIMINGS_FILE);
    let mut f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut text = String::from("day,strategy,da_ms,rac_ms,rt_ms\n");
    for r in results.iter().flatten() {
        text.push_str(&format!("{},{},{},{},{}\n", r.day, r.strategy, r.da.wall_ms, r.rac.wall_ms, r.rt.wall_ms));
    }
    f.write_all(text.as_bytes()).map_err(|e| Error::io(&path, e))?;
    Ok(ledger)
}
