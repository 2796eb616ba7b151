//! Conditional kernel-density probabilistic wind forecasts.
//!
//! The conditional distribution of the actual output is estimated as a
//! Nadaraya–Watson weighted empirical CDF over historical actuals. Weights
//! combine a Gaussian kernel on the point forecast, a wrapped Gaussian kernel
//! on the hour of day and exponential forgetting by sample age.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::WindFarm;

/// Number of points in the quantile grid (τ = 0.01 … 0.99).
pub const GRID_POINTS: usize = 99;

pub fn tau_grid() -> Vec<f64> {
    (1..=GRID_POINTS).map(|k| k as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    /// Hours since an arbitrary origin.
    pub timestamp: i64,
    pub farm: String,
    /// Hour of day, 0–23.
    pub hour: u32,
    pub point_forecast: f64,
    pub actual: f64,
}

pub fn read_history_csv(path: &Path) -> Result<Vec<HistoryRecord>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    rdr.deserialize().map(|r| r.map_err(|e| Error::csv(path, e))).collect()
}

pub fn write_history_csv(path: &Path, records: &[HistoryRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KdeConfig {
    /// Point-forecast bandwidth as a fraction of farm capacity.
    pub point_bandwidth_frac: f64,
    /// Hour-of-day bandwidth, hours.
    pub hour_bandwidth: f64,
    /// Forgetting factor per day of sample age.
    pub lambda: f64,
}

impl Default for KdeConfig {
    fn default() -> Self {
        Self { point_bandwidth_frac: 0.05, hour_bandwidth: 2.0, lambda: 0.999 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FarmModel {
    pub farm: String,
    pub capacity: f64,
    pub point_bandwidth: f64,
    pub hour_bandwidth: f64,
    pub lambda: f64,
    /// Samples sorted by actual value.
    pub samples: Vec<Sample>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub point_forecast: f64,
    pub hour: u32,
    pub actual: f64,
    /// Natural log of the forgetting weight.
    pub log_weight: f64,
}

impl Sample {
    pub fn weight(&self) -> f64 {
        self.log_weight.exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastModel {
    pub farms: Vec<FarmModel>,
}

impl ForecastModel {
    pub fn farm(&self, id: &str) -> Result<&FarmModel> {
        self.farms.iter().find(|f| f.farm == id).ok_or_else(|| Error::UnknownFarm(id.to_string()))
    }
}

/// Fits one model per farm that appears in `farms`.
pub fn fit(history: &[HistoryRecord], farms: &[WindFarm], config: &KdeConfig) -> Result<ForecastModel> {
    if !(config.point_bandwidth_frac > 0.0 && config.hour_bandwidth > 0.0) {
        return Err(Error::invalid("forecast config", "bandwidths must be > 0"));
    }
    if !(config.lambda > 0.0 && config.lambda <= 1.0) {
        return Err(Error::invalid("forecast config", "lambda must lie in (0, 1]"));
    }
    let mut by_farm: BTreeMap<&str, Vec<&HistoryRecord>> = BTreeMap::new();
    for r in history {
        by_farm.entry(r.farm.as_str()).or_default().push(r);
    }
    if let Some(unknown) = by_farm.keys().find(|id| !farms.iter().any(|f| f.id == **id)) {
        return Err(Error::UnknownFarm(unknown.to_string()));
    }
    let mut out = Vec::new();
    for farm in farms {
        let records = by_farm
            .get(farm.id.as_str())
            .ok_or_else(|| Error::invalid(format!("history for farm {}", farm.id), "no records"))?;
        let entity = || format!("history for farm {}", farm.id);
        if records.windows(2).any(|w| w[1].timestamp <= w[0].timestamp) {
            return Err(Error::invalid(entity(), "timestamps must be strictly increasing"));
        }
        for r in records {
            if r.hour > 23 {
                return Err(Error::invalid(entity(), format!("hour {} out of range at {}", r.hour, r.timestamp)));
            }
            let ok = |v: f64| (0.0..=farm.capacity).contains(&v);
            if !ok(r.point_forecast) || !ok(r.actual) {
                return Err(Error::invalid(entity(), format!("value outside [0, capacity] at {}", r.timestamp)));
            }
        }
        let latest = records.last().map_or(0, |r| r.timestamp);
        let ln_lambda = config.lambda.ln();
        let mut samples: Vec<Sample> = records
            .iter()
            .map(|r| Sample {
                point_forecast: r.point_forecast,
                hour: r.hour,
                actual: r.actual,
                log_weight: ln_lambda * (latest - r.timestamp) as f64 / 24.0,
            })
            .collect();
        samples.sort_by(|a, b| a.actual.total_cmp(&b.actual));
        out.push(FarmModel {
            farm: farm.id.clone(),
            capacity: farm.capacity,
            point_bandwidth: config.point_bandwidth_frac * farm.capacity,
            hour_bandwidth: config.hour_bandwidth,
            lambda: config.lambda,
            samples,
        });
    }
    Ok(ForecastModel { farms: out })
}

fn hour_distance(a: u32, b: u32) -> f64 {
    let d = (a as i64 - b as i64).rem_euclid(24);
    d.min(24 - d) as f64
}

impl FarmModel {
    /// Cumulative kernel weights aligned with `samples`, normalized to end at 1.
    fn conditional_cdf(&self, point_forecast: f64, hour: u32) -> Vec<f64> {
        let hp = self.point_bandwidth;
        let hh = self.hour_bandwidth;
        let logs: Vec<f64> = self
            .samples
            .iter()
            .map(|s| {
                let dp = (point_forecast - s.point_forecast) / hp;
                let dh = hour_distance(hour, s.hour) / hh;
                s.log_weight - 0.5 * (dp * dp + dh * dh)
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = logs
            .iter()
            .map(|l| {
                acc += (l - top).exp();
                acc
            })
            .collect();
        for c in &mut cdf {
            *c /= acc;
        }
        cdf
    }

    fn invert(&self, cdf: &[f64], tau: f64) -> f64 {
        let k = cdf.partition_point(|c| *c < tau - 1e-12).min(cdf.len() - 1);
        self.samples[k].actual.clamp(0.0, self.capacity)
    }

    pub fn quantile(&self, point_forecast: f64, hour: u32, tau: f64) -> f64 {
        let cdf = self.conditional_cdf(point_forecast, hour);
        self.invert(&cdf, tau)
    }

    fn grid(&self, point_forecast: f64, hour: u32) -> Vec<f64> {
        let cdf = self.conditional_cdf(point_forecast, hour);
        tau_grid().iter().map(|&t| self.invert(&cdf, t)).collect()
    }
}

/// Conditional quantile of farm output given its point forecast and hour of day.
pub fn quantile(model: &ForecastModel, farm: &str, point_forecast: f64, hour: u32, tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::invalid("quantile level", format!("tau {tau} outside (0, 1)")));
    }
    Ok(model.farm(farm)?.quantile(point_forecast, hour % 24, tau))
}

/// Per-farm, per-hour quantile functions on the fixed τ-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilisticForecast {
    pub farms: Vec<String>,
    pub capacity: Vec<f64>,
    /// `grid[f][t][k]` is the quantile at τ = (k + 1) / 100.
    pub grid: Vec<Vec<Vec<f64>>>,
}

impl ProbabilisticForecast {
    /// Forecast with no uncertainty: every quantile equals `values[f][t]`.
    pub fn degenerate(farms: &[WindFarm], values: &[Vec<f64>]) -> Self {
        Self {
            farms: farms.iter().map(|f| f.id.clone()).collect(),
            capacity: farms.iter().map(|f| f.capacity).collect(),
            grid: farms
                .iter()
                .zip(values)
                .map(|(f, s)| s.iter().map(|v| vec![v.clamp(0.0, f.capacity); GRID_POINTS]).collect())
                .collect(),
        }
    }

    pub fn hours(&self) -> usize {
        self.grid.first().map_or(0, Vec::len)
    }

    pub fn num_farms(&self) -> usize {
        self.farms.len()
    }

    /// Linear interpolation on the grid; clamps outside [0.01, 0.99].
    pub fn value(&self, farm: usize, hour: usize, tau: f64) -> f64 {
        let g = &self.grid[farm][hour];
        let x = tau * 100.0 - 1.0;
        if x <= 0.0 {
            return g[0];
        }
        if x >= (GRID_POINTS - 1) as f64 {
            return g[GRID_POINTS - 1];
        }
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            return g[r as usize];
        }
        let k = x.floor() as usize;
        let w = x - k as f64;
        g[k] + w * (g[k + 1] - g[k])
    }

    /// `series[f][t]` at level τ.
    pub fn series(&self, tau: f64) -> Vec<Vec<f64>> {
        (0..self.num_farms()).map(|f| (0..self.hours()).map(|t| self.value(f, t, tau)).collect()).collect()
    }

    pub fn central(&self) -> Vec<Vec<f64>> {
        self.series(0.5)
    }

    pub fn window(&self, start: usize, len: usize) -> Self {
        Self {
            farms: self.farms.clone(),
            capacity: self.capacity.clone(),
            grid: self.grid.iter().map(|g| g[start..start + len].to_vec()).collect(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["farm", "hour", "tau", "value"]).map_err(|e| Error::csv(path, e))?;
        let taus = tau_grid();
        for (f, farm) in self.farms.iter().enumerate() {
            for (t, g) in self.grid[f].iter().enumerate() {
                for (tau, v) in taus.iter().zip(g) {
                    w.write_record([farm.clone(), (t + 1).to_string(), format!("{tau:.2}"), v.to_string()])
                        .map_err(|e| Error::csv(path, e))?;
                }
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path, farms: &[WindFarm]) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            farm: String,
            hour: usize,
            tau: f64,
            value: f64,
        }
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        let mut pf = Self { farms: Vec::new(), capacity: Vec::new(), grid: Vec::new() };
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(|e| Error::csv(path, e))?;
            let f = match pf.farms.iter().position(|id| *id == row.farm) {
                Some(f) => f,
                None => {
                    let farm = farms
                        .iter()
                        .find(|w| w.id == row.farm)
                        .ok_or_else(|| Error::UnknownFarm(row.farm.clone()))?;
                    pf.farms.push(farm.id.clone());
                    pf.capacity.push(farm.capacity);
                    pf.grid.push(Vec::new());
                    pf.farms.len() - 1
                }
            };
            let k = (row.tau * 100.0).round() as usize;
            if !(1..=GRID_POINTS).contains(&k) || row.hour == 0 {
                return Err(Error::Format(format!("{}: bad hour/tau {}/{}", path.display(), row.hour, row.tau)));
            }
            let hours = &mut pf.grid[f];
            while hours.len() < row.hour {
                hours.push(vec![f64::NAN; GRID_POINTS]);
            }
            hours[row.hour - 1][k - 1] = row.value;
        }
        let n = pf.hours();
        if pf.grid.iter().any(|g| g.len() != n || g.iter().flatten().any(|v| v.is_nan())) {
            return Err(Error::Format(format!("{}: incomplete quantile grid", path.display())));
        }
        Ok(pf)
    }
}

/// Quantile grids for a horizon. `point[f]` is the point-forecast series for
/// `model.farms[f]`; `start_hour` is the hour of day of the first step.
pub fn forecast_horizon(model: &ForecastModel, point: &[Vec<f64>], start_hour: u32) -> Result<ProbabilisticForecast> {
    if point.len() != model.farms.len() {
        return Err(Error::HorizonMismatch {
            entity: "point forecast farms".into(),
            expected: model.farms.len(),
            found: point.len(),
        });
    }
    let hours = point.first().map_or(0, Vec::len);
    let mut grid = Vec::new();
    for (fm, series) in model.farms.iter().zip(point) {
        if series.len() != hours {
            return Err(Error::HorizonMismatch { entity: format!("point forecast {}", fm.farm), expected: hours, found: series.len() });
        }
        grid.push(
            series
                .iter()
                .enumerate()
                .map(|(t, &p)| fm.grid(p, (start_hour + t as u32) % 24))
                .collect(),
        );
    }
    Ok(ProbabilisticForecast {
        farms: model.farms.iter().map(|f| f.farm.clone()).collect(),
        capacity: model.farms.iter().map(|f| f.capacity).collect(),
        grid,
    })
}

/// Central interval with the given coverage: `(lower, upper)` as `[farm][hour]`.
pub fn interval_bounds(pf: &ProbabilisticForecast, confidence: f64) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::invalid("confidence", format!("{confidence} outside (0, 1)")));
    }
    let a = (1.0 - confidence) / 2.0;
    Ok((pf.series(a), pf.series(1.0 - a)))
}
