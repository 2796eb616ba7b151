//! Physical power-system model: buses, lines, thermal units, wind farms and
//! nodal load, plus DC shift factors (PTDF) for line-flow constraints.

use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_hourly_csv, write_hourly_csv, HourlySeries};

/// PTDF entries smaller than this are stored as exact zeros.
pub const PTDF_TRUNCATION: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bus {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zone: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub id: String,
    pub from_bus: String,
    pub to_bus: String,
    /// Per-unit series reactance.
    pub reactance: f64,
    /// MW.
    pub flow_limit: f64,
    #[serde(skip)]
    pub from: usize,
    #[serde(skip)]
    pub to: usize,
}

/// One segment of a convex piecewise-linear fuel curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuelBlock {
    /// MW.
    pub width: f64,
    /// $/MWh.
    pub marginal_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalGenerator {
    pub id: String,
    pub bus: String,
    pub p_min: f64,
    pub p_max: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub startup_ramp: f64,
    pub shutdown_ramp: f64,
    pub min_up: u32,
    pub min_down: u32,
    pub startup_cost: f64,
    pub no_load_cost: f64,
    /// Energy between `p_min` and `p_max`; output up to `p_min` is priced at
    /// the first block's marginal cost.
    pub fuel_curve: Vec<FuelBlock>,
    pub quick_start: bool,
    /// Hours already on (positive) or off (negative) before hour 1.
    pub initial_status: i32,
    pub initial_output: f64,
    #[serde(skip)]
    pub bus_idx: usize,
}

impl ThermalGenerator {
    pub fn initially_on(&self) -> bool {
        self.initial_status > 0
    }

    /// Marginal cost applied to the `p_min` portion.
    pub fn base_marginal_cost(&self) -> f64 {
        self.fuel_curve.first().map_or(0.0, |b| b.marginal_cost)
    }

    /// Total fuel cost at output `p` (MW) when committed.
    pub fn fuel_cost(&self, p: f64) -> f64 {
        let mut cost = self.base_marginal_cost() * self.p_min.min(p);
        let mut rest = (p - self.p_min).max(0.0);
        for b in &self.fuel_curve {
            let take = rest.min(b.width);
            cost += take * b.marginal_cost;
            rest -= take;
        }
        cost
    }

    /// Startup capability clamped to the feasible range.
    pub fn startup_limit(&self) -> f64 {
        self.startup_ramp.clamp(self.p_min, self.p_max)
    }

    pub fn shutdown_limit(&self) -> f64 {
        self.shutdown_ramp.clamp(self.p_min, self.p_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindFarm {
    pub id: String,
    pub bus: String,
    pub capacity: f64,
    /// Site coordinates (km) used for spatial correlation.
    #[serde(default)]
    pub x_km: f64,
    #[serde(default)]
    pub y_km: f64,
    #[serde(skip)]
    pub bus_idx: usize,
}

/// Nodal hourly demand.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadSeries {
    /// Bus index per column.
    pub buses: Vec<usize>,
    /// `mw[k][t]`, MW at `buses[k]` in hour `t`.
    pub mw: Vec<Vec<f64>>,
}

impl LoadSeries {
    pub fn hours(&self) -> usize {
        self.mw.first().map_or(0, Vec::len)
    }

    pub fn total(&self, t: usize) -> f64 {
        self.mw.iter().map(|s| s[t]).sum()
    }

    /// Demand per bus for hour `t`, dense over `n_buses`.
    pub fn at_hour(&self, t: usize, n_buses: usize) -> Vec<f64> {
        let mut v = vec![0.0; n_buses];
        for (k, &b) in self.buses.iter().enumerate() {
            v[b] += self.mw[k][t];
        }
        v
    }

    /// Copy restricted to hours `start..start + len`.
    pub fn window(&self, start: usize, len: usize) -> LoadSeries {
        LoadSeries {
            buses: self.buses.clone(),
            mw: self.mw.iter().map(|s| s[start..start + len].to_vec()).collect(),
        }
    }
}

/// On-disk system description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemFile {
    pub name: String,
    pub slack_bus: String,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<ThermalGenerator>,
    pub wind_farms: Vec<WindFarm>,
    /// Load CSV, relative to the system file.
    pub load_file: String,
}

#[derive(Debug, Clone)]
pub struct PowerSystem {
    pub name: String,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<ThermalGenerator>,
    pub wind_farms: Vec<WindFarm>,
    pub load: LoadSeries,
    pub slack: usize,
    pub load_file: String,
}

impl PowerSystem {
    pub fn horizon(&self) -> usize {
        self.load.hours()
    }

    pub fn bus_index(&self, id: &str) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn farm_index(&self, id: &str) -> Option<usize> {
        self.wind_farms.iter().position(|f| f.id == id)
    }

    /// Builds and validates a system from its parts.
    pub fn from_parts(file: SystemFile, load: &HourlySeries) -> Result<PowerSystem> {
        let SystemFile { name, slack_bus, buses, mut lines, mut generators, mut wind_farms, load_file } = file;
        let mut index = HashMap::new();
        for (i, b) in buses.iter().enumerate() {
            if index.insert(b.id.clone(), i).is_some() {
                return Err(Error::invalid(format!("bus {}", b.id), "duplicate id"));
            }
        }
        let lookup = |entity: &str, bus: &str| {
            index
                .get(bus)
                .copied()
                .ok_or_else(|| Error::DanglingBus { entity: entity.to_string(), bus: bus.to_string() })
        };
        let slack = lookup("slack_bus", &slack_bus)?;

        for l in &mut lines {
            l.from = lookup(&format!("line {}", l.id), &l.from_bus)?;
            l.to = lookup(&format!("line {}", l.id), &l.to_bus)?;
            if l.from == l.to {
                return Err(Error::invalid(format!("line {}", l.id), "from_bus equals to_bus"));
            }
            if !(l.reactance > 0.0) {
                return Err(Error::invalid(format!("line {}", l.id), "reactance must be > 0"));
            }
            if !(l.flow_limit > 0.0) {
                return Err(Error::invalid(format!("line {}", l.id), "flow_limit must be > 0"));
            }
        }
        for g in &mut generators {
            g.bus_idx = lookup(&format!("gen {}", g.id), &g.bus)?;
            validate_generator(g)?;
        }
        for f in &mut wind_farms {
            f.bus_idx = lookup(&format!("wind farm {}", f.id), &f.bus)?;
            if !(f.capacity > 0.0) {
                return Err(Error::invalid(format!("wind farm {}", f.id), "capacity must be > 0"));
            }
        }

        let hours = load.hours();
        let mut load_buses = Vec::new();
        for (k, id) in load.ids.iter().enumerate() {
            load_buses.push(lookup(&format!("load column {id}"), id)?);
            if load.values[k].len() != hours {
                return Err(Error::HorizonMismatch {
                    entity: format!("load {id}"),
                    expected: hours,
                    found: load.values[k].len(),
                });
            }
            if let Some(v) = load.values[k].iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::invalid(format!("load {id}"), format!("negative or NaN value {v}")));
            }
        }

        Ok(PowerSystem {
            name,
            buses,
            lines,
            generators,
            wind_farms,
            load: LoadSeries { buses: load_buses, mw: load.values.clone() },
            slack,
            load_file,
        })
    }

    pub fn to_file(&self) -> SystemFile {
        SystemFile {
            name: self.name.clone(),
            slack_bus: self.buses[self.slack].id.clone(),
            buses: self.buses.clone(),
            lines: self.lines.clone(),
            generators: self.generators.clone(),
            wind_farms: self.wind_farms.clone(),
            load_file: self.load_file.clone(),
        }
    }

    pub fn load_series(&self) -> HourlySeries {
        HourlySeries {
            ids: self.load.buses.iter().map(|&b| self.buses[b].id.clone()).collect(),
            values: self.load.mw.clone(),
        }
    }

    /// Writes `system.json` and its load CSV into `dir`.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("system.json");
        let text = serde_json::to_string_pretty(&self.to_file()).map_err(|e| Error::json(&path, e))?;
        fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
        write_hourly_csv(&dir.join(&self.load_file), &self.load_series())?;
        Ok(path)
    }

    /// Copy with the load restricted to a window of hours.
    pub fn with_load(&self, load: LoadSeries) -> PowerSystem {
        PowerSystem { load, ..self.clone() }
    }
}

fn validate_generator(g: &ThermalGenerator) -> Result<()> {
    let entity = format!("gen {}", g.id);
    let bad = |reason: &str| Err(Error::invalid(entity.clone(), reason));
    if !(g.p_min >= 0.0 && g.p_min <= g.p_max) {
        return bad("need 0 <= p_min <= p_max");
    }
    if !(g.ramp_up > 0.0 && g.ramp_down > 0.0) {
        return bad("ramp rates must be > 0");
    }
    if !(g.startup_ramp >= g.p_min && g.shutdown_ramp >= g.p_min) {
        return bad("startup/shutdown ramps must be >= p_min");
    }
    if g.min_up < 1 || g.min_down < 1 {
        return bad("min_up and min_down must be >= 1");
    }
    if !(g.startup_cost >= 0.0 && g.no_load_cost >= 0.0) {
        return bad("costs must be >= 0");
    }
    if g.initial_status == 0 {
        return bad("initial_status must be nonzero");
    }
    if g.fuel_curve.windows(2).any(|w| w[1].marginal_cost < w[0].marginal_cost) {
        return Err(Error::NonConvexFuel(g.id.clone()));
    }
    if g.fuel_curve.iter().any(|b| !(b.width >= 0.0)) {
        return bad("fuel block widths must be >= 0");
    }
    let width: f64 = g.fuel_curve.iter().map(|b| b.width).sum();
    if (width - (g.p_max - g.p_min)).abs() > 1e-6 {
        return bad(&format!("fuel block widths sum to {width}, expected p_max - p_min"));
    }
    if g.fuel_curve.is_empty() && g.p_max > 0.0 {
        return bad("empty fuel curve");
    }
    if g.initially_on() {
        if !(g.initial_output >= g.p_min - 1e-9 && g.initial_output <= g.p_max + 1e-9) {
            return bad("initial_output must lie in [p_min, p_max] when on");
        }
    } else if g.initial_output != 0.0 {
        return bad("initial_output must be 0 when off");
    }
    Ok(())
}

/// Loads `system.json`-style descriptions; the load file is resolved
/// relative to the description.
pub fn load_system(path: &Path) -> Result<PowerSystem> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: SystemFile = serde_json::from_str(&text).map_err(|e| Error::json(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let load_path = base.join(&file.load_file);
    if !load_path.exists() {
        return Err(Error::io(&load_path, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    let load = read_hourly_csv(&load_path)?;
    PowerSystem::from_parts(file, &load)
}

/// Line-by-bus shift factors: MW on each line per MW injected at a bus and
/// withdrawn at the slack.
#[derive(Debug, Clone, PartialEq)]
pub struct PtdfMatrix {
    pub slack: usize,
    /// `rows[l][b]`.
    pub rows: Vec<Vec<f64>>,
}

impl PtdfMatrix {
    pub fn num_lines(&self) -> usize {
        self.rows.len()
    }

    pub fn num_buses(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn get(&self, line: usize, bus: usize) -> f64 {
        self.rows[line][bus]
    }
}

/// DC susceptance inverse with the slack row/column removed.
pub fn compute_ptdf(system: &PowerSystem, slack: usize) -> Result<PtdfMatrix> {
    let n = system.buses.len();
    // connectivity
    let mut adj = vec![Vec::new(); n];
    for l in &system.lines {
        adj[l.from].push(l.to);
        adj[l.to].push(l.from);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([slack]);
    seen[slack] = true;
    while let Some(b) = queue.pop_front() {
        for &c in &adj[b] {
            if !seen[c] {
                seen[c] = true;
                queue.push_back(c);
            }
        }
    }
    if let Some(b) = seen.iter().position(|s| !s) {
        return Err(Error::Disconnected(system.buses[b].id.clone()));
    }

    // reduced susceptance matrix over non-slack buses
    let map: Vec<Option<usize>> = {
        let mut k = 0;
        (0..n)
            .map(|b| {
                if b == slack {
                    None
                } else {
                    k += 1;
                    Some(k - 1)
                }
            })
            .collect()
    };
    let k = n - 1;
    let mut bmat = vec![vec![0.0; k]; k];
    for l in &system.lines {
        let s = 1.0 / l.reactance;
        if let Some(i) = map[l.from] {
            bmat[i][i] += s;
        }
        if let Some(j) = map[l.to] {
            bmat[j][j] += s;
        }
        if let (Some(i), Some(j)) = (map[l.from], map[l.to]) {
            bmat[i][j] -= s;
            bmat[j][i] -= s;
        }
    }
    let x = invert(bmat).ok_or(Error::SingularNetwork)?;
    let reactance = |bus: usize, col: usize| map[bus].map_or(0.0, |i| x[i][col]);

    let rows = system
        .lines
        .iter()
        .map(|l| {
            (0..n)
                .map(|b| match map[b] {
                    None => 0.0,
                    Some(c) => {
                        let v = (reactance(l.from, c) - reactance(l.to, c)) / l.reactance;
                        if v.abs() < PTDF_TRUNCATION {
                            0.0
                        } else {
                            v
                        }
                    }
                })
                .collect()
        })
        .collect();
    Ok(PtdfMatrix { slack, rows })
}

fn invert(mut a: Vec<Vec<f64>>) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-12 {
            return None;
        }
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c];
        for j in 0..n {
            a[c][j] /= piv;
            inv[c][j] /= piv;
        }
        for r in 0..n {
            if r != c && a[r][c] != 0.0 {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] -= f * a[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    Some(inv)
}

/// Line flows for a nodal net-injection vector (MW, one entry per bus).
pub fn evaluate_flows(ptdf: &PtdfMatrix, injections: &[f64]) -> Vec<f64> {
    assert_eq!(injections.len(), ptdf.num_buses(), "injection vector must cover every bus");
    ptdf.rows
        .iter()
        .map(|row| row.iter().zip(injections).map(|(f, p)| f * p).sum())
        .collect()
}
