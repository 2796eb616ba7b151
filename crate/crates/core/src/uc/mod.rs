//! Unit-commitment model builders: deterministic (DUC), interval (IUC),
//! two-stage stochastic (SUC) and real-time economic dispatch (ED).

mod build;
mod extract;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::ProbabilisticForecast;
use crate::system::PowerSystem;

pub use build::{
    build, build_duc, build_ed, build_iuc, build_suc, suc_requirements, suc_spec, BlockSpec, BlockVars, BuildContext,
    CommitmentMode, LineTuple, NetworkMode, UcProblem, UcSpec,
};
pub(crate) use build::{add_commitment, add_first_stage_cost};
pub use extract::{extract, CostBreakdown, DispatchResult, UcSolution};

/// Penalty prices, $/MWh.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Penalties {
    pub load_shed: f64,
    pub over_generation: f64,
    pub reserve_shortfall: f64,
    pub wind_spill: f64,
}

impl Default for Penalties {
    fn default() -> Self {
        Self { load_shed: 3500.0, over_generation: 3500.0, reserve_shortfall: 1100.0, wind_spill: 0.0 }
    }
}

/// Reserve products in requirement-row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Product {
    RegUp,
    RegDown,
    Spin,
    NonSpin,
}

impl Product {
    pub const ALL: [Product; 4] = [Product::RegUp, Product::RegDown, Product::Spin, Product::NonSpin];

    pub fn name(self) -> &'static str {
        match self {
            Product::RegUp => "reg_up",
            Product::RegDown => "reg_down",
            Product::Spin => "spin",
            Product::NonSpin => "non_spin",
        }
    }
}

/// Fractions of the total up-reserve requirement assigned to each product.
/// Regulation-down is sized as its own fraction of the same total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReserveSplit {
    pub reg_up: f64,
    pub reg_down: f64,
    pub spin: f64,
    pub non_spin: f64,
}

impl Default for ReserveSplit {
    fn default() -> Self {
        Self { reg_up: 0.15, reg_down: 0.15, spin: 0.425, non_spin: 0.425 }
    }
}

impl ReserveSplit {
    pub fn validate(&self) -> Result<()> {
        let all = [self.reg_up, self.reg_down, self.spin, self.non_spin];
        if all.iter().any(|f| !(*f >= 0.0)) {
            return Err(Error::invalid("reserve split", "fractions must be >= 0"));
        }
        let up = self.reg_up + self.spin + self.non_spin;
        if (up - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("reserve split", format!("up-product fractions sum to {up}, expected 1")));
        }
        Ok(())
    }

    /// Per-product MW for a total requirement, indexed like [`Product::ALL`].
    pub fn apply(&self, total: f64) -> [f64; 4] {
        [self.reg_up * total, self.reg_down * total, self.spin * total, self.non_spin * total]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReservePolicy {
    /// MW held every hour.
    pub contingency: f64,
    /// Extra MW per hour (empty means none).
    pub dynamic: Vec<f64>,
    pub split: ReserveSplit,
}

impl ReservePolicy {
    pub fn contingency_only(contingency: f64, split: ReserveSplit) -> Self {
        Self { contingency, dynamic: Vec::new(), split }
    }

    pub fn none() -> Self {
        Self::contingency_only(0.0, ReserveSplit::default())
    }

    pub fn total(&self, t: usize) -> f64 {
        self.contingency + self.dynamic.get(t).copied().unwrap_or(0.0)
    }

    /// Per-hour product requirements.
    pub fn requirements(&self, horizon: usize) -> Vec<[f64; 4]> {
        (0..horizon).map(|t| self.split.apply(self.total(t))).collect()
    }

    pub fn validate(&self, horizon: usize) -> Result<()> {
        self.split.validate()?;
        if !(self.contingency >= 0.0) {
            return Err(Error::invalid("reserve policy", "contingency must be >= 0"));
        }
        if !self.dynamic.is_empty() && self.dynamic.len() != horizon {
            return Err(Error::HorizonMismatch {
                entity: "dynamic reserve".into(),
                expected: horizon,
                found: self.dynamic.len(),
            });
        }
        if self.dynamic.iter().any(|d| !(*d >= 0.0)) {
            return Err(Error::invalid("reserve policy", "dynamic reserve must be >= 0"));
        }
        Ok(())
    }
}

/// Per hour, the farm-summed spread between the median and the `lower_tau`
/// quantile, floored at zero.
pub fn dynamic_reserve(pf: &ProbabilisticForecast, lower_tau: f64) -> Result<Vec<f64>> {
    if !(lower_tau > 0.0 && lower_tau <= 0.5) {
        return Err(Error::invalid("dynamic reserve quantile", format!("{lower_tau} outside (0, 0.5]")));
    }
    Ok((0..pf.hours())
        .map(|t| {
            (0..pf.num_farms())
                .map(|f| pf.value(f, t, 0.5) - pf.value(f, t, lower_tau))
                .sum::<f64>()
                .max(0.0)
        })
        .collect())
}

/// On/off plus startup/shutdown flags, `[generator][hour]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitmentSchedule {
    pub on: Vec<Vec<bool>>,
    pub startup: Vec<Vec<bool>>,
    pub shutdown: Vec<Vec<bool>>,
}

impl CommitmentSchedule {
    /// Derives startup/shutdown flags from on/off status and the initial state.
    pub fn from_status(system: &PowerSystem, on: Vec<Vec<bool>>) -> Self {
        let mut startup = Vec::new();
        let mut shutdown = Vec::new();
        for (g, row) in on.iter().enumerate() {
            let mut prev = system.generators[g].initially_on();
            let mut su = Vec::new();
            let mut sd = Vec::new();
            for &u in row {
                su.push(u && !prev);
                sd.push(!u && prev);
                prev = u;
            }
            startup.push(su);
            shutdown.push(sd);
        }
        Self { on, startup, shutdown }
    }

    pub fn all_off(system: &PowerSystem, horizon: usize) -> Self {
        Self::from_status(system, vec![vec![false; horizon]; system.generators.len()])
    }

    pub fn horizon(&self) -> usize {
        self.on.first().map_or(0, Vec::len)
    }

    /// Checks logic consistency and minimum up/down times, including the
    /// carry-in from each unit's initial status.
    pub fn check(&self, system: &PowerSystem) -> std::result::Result<(), String> {
        for (g, gen) in system.generators.iter().enumerate() {
            let mut prev = gen.initially_on();
            for t in 0..self.horizon() {
                let u = self.on[g][t];
                let lhs = u as i32 - prev as i32;
                let rhs = self.startup[g][t] as i32 - self.shutdown[g][t] as i32;
                if lhs != rhs || (self.startup[g][t] && self.shutdown[g][t]) {
                    return Err(format!("gen {} hour {}: logic violated", gen.id, t + 1));
                }
                prev = u;
            }
            // every completed run, including the carried-in initial one,
            // must meet the minimum time of its state
            let mut state = gen.initially_on();
            let mut run = gen.initial_status.unsigned_abs() as usize;
            for t in 0..self.horizon() {
                if self.on[g][t] == state {
                    run += 1;
                    continue;
                }
                let need = if state { gen.min_up } else { gen.min_down } as usize;
                if run < need {
                    let kind = if state { "on" } else { "off" };
                    return Err(format!("gen {} hour {}: {kind} run of {run} h shorter than {need} h", gen.id, t + 1));
                }
                state = !state;
                run = 1;
            }
        }
        Ok(())
    }

    /// Committed unit-hours split by the quick-start flag: `(fast, slow)`.
    pub fn classify(&self, system: &PowerSystem) -> (usize, usize) {
        let mut fast = 0;
        let mut slow = 0;
        for (g, row) in self.on.iter().enumerate() {
            let n = row.iter().filter(|u| **u).count();
            if system.generators[g].quick_start {
                fast += n;
            } else {
                slow += n;
            }
        }
        (fast, slow)
    }
}

/// Strategy catalog used by the CLI, the simulator and reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Strategy {
    /// DUC on the realized wind.
    DucPerfect,
    /// DUC on the median forecast, contingency reserve only.
    DucPoint,
    /// DUC on the median forecast plus dynamic reserve from the given quantile.
    DucDr { tau: f64 },
    /// IUC with the given lower quantile as the wind lower bound.
    Iuc { tau: f64 },
    /// SUC solved by the given method with the given wind reserve fraction.
    Suc { method: SucMethod, rho: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SucMethod {
    Extensive,
    Lsf,
    Benders,
}

impl SucMethod {
    pub fn tag(self) -> &'static str {
        match self {
            SucMethod::Extensive => "E",
            SucMethod::Lsf => "LSF",
            SucMethod::Benders => "BD",
        }
    }
}

pub const STRATEGY_CATALOG: &str = "DUC-perfect, DUC-point, DUC-DR-<tau%>, IUC-<tau%>, SUC-{E|LSF|BD}-<rho%>";

fn percent(s: &str) -> Option<f64> {
    let v: f64 = s.parse().ok()?;
    (v.is_finite() && v >= 0.0).then_some(v / 100.0)
}

fn fmt_percent(x: f64) -> String {
    let p = x * 100.0;
    if (p - p.round()).abs() < 1e-9 {
        format!("{}", p.round() as i64)
    } else {
        format!("{p}")
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        let unknown = || Error::UnknownStrategy { name: name.to_string(), catalog: STRATEGY_CATALOG.to_string() };
        let s = match name {
            "DUC-perfect" => Strategy::DucPerfect,
            "DUC-point" => Strategy::DucPoint,
            _ => {
                if let Some(p) = name.strip_prefix("DUC-DR-") {
                    let tau = percent(p).ok_or_else(unknown)?;
                    if !(tau > 0.0 && tau <= 0.5) {
                        return Err(unknown());
                    }
                    Strategy::DucDr { tau }
                } else if let Some(p) = name.strip_prefix("IUC-") {
                    let tau = percent(p).ok_or_else(unknown)?;
                    if !(tau > 0.0 && tau <= 0.5) {
                        return Err(unknown());
                    }
                    Strategy::Iuc { tau }
                } else if let Some(rest) = name.strip_prefix("SUC-") {
                    let (m, p) = rest.split_once('-').ok_or_else(unknown)?;
                    let method = match m {
                        "E" => SucMethod::Extensive,
                        "LSF" => SucMethod::Lsf,
                        "BD" => SucMethod::Benders,
                        _ => return Err(unknown()),
                    };
                    Strategy::Suc { method, rho: percent(p).ok_or_else(unknown)? }
                } else {
                    return Err(unknown());
                }
            }
        };
        Ok(s)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::DucPerfect => write!(f, "DUC-perfect"),
            Strategy::DucPoint => write!(f, "DUC-point"),
            Strategy::DucDr { tau } => write!(f, "DUC-DR-{}", fmt_percent(*tau)),
            Strategy::Iuc { tau } => write!(f, "IUC-{}", fmt_percent(*tau)),
            Strategy::Suc { method, rho } => write!(f, "SUC-{}-{}", method.tag(), fmt_percent(*rho)),
        }
    }
}

impl Strategy {
    /// Position in the catalog order used for report rows.
    pub fn sort_key(&self) -> (u8, u8, i64) {
        let milli = |x: f64| (x * 1e5).round() as i64;
        match self {
            Strategy::DucPerfect => (0, 0, 0),
            Strategy::DucPoint => (1, 0, 0),
            Strategy::DucDr { tau } => (2, 0, -milli(*tau)),
            Strategy::Iuc { tau } => (3, 0, -milli(*tau)),
            Strategy::Suc { method, rho } => (4, *method as u8, milli(*rho)),
        }
    }
}
