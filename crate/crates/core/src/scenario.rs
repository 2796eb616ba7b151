//! Correlated wind scenario sampling (Gaussian copula) and fast-forward
//! scenario reduction.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::forecast::ProbabilisticForecast;
use crate::system::WindFarm;

/// Separable exponential correlation: `exp(-|h - h'| / eps_t) * exp(-d / eps_s)`.
/// Either decay may be infinite (perfect correlation along that axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    /// Hours.
    pub eps_t: f64,
    /// Kilometres.
    pub eps_s: f64,
}

impl Default for CovarianceSpec {
    fn default() -> Self {
        Self { eps_t: 4.0, eps_s: 40.0 }
    }
}

fn decay(distance: f64, eps: f64) -> f64 {
    if distance == 0.0 {
        1.0
    } else {
        (-distance / eps).exp()
    }
}

impl CovarianceSpec {
    /// Dense correlation over coordinates ordered farm-major (`f * hours + t`).
    pub fn correlation(&self, farms: &[WindFarm], hours: usize) -> Result<Vec<Vec<f64>>> {
        if !(self.eps_t > 0.0 && self.eps_s > 0.0) {
            return Err(Error::invalid("covariance spec", "eps_t and eps_s must be > 0"));
        }
        let n = farms.len() * hours;
        let mut c = vec![vec![0.0; n]; n];
        for (f, a) in farms.iter().enumerate() {
            for (g, b) in farms.iter().enumerate() {
                let d = ((a.x_km - b.x_km).powi(2) + (a.y_km - b.y_km).powi(2)).sqrt();
                let cs = decay(d, self.eps_s);
                for t in 0..hours {
                    for s in 0..hours {
                        c[f * hours + t][g * hours + s] = cs * decay(t.abs_diff(s) as f64, self.eps_t);
                    }
                }
            }
        }
        Ok(c)
    }
}

/// Largest diagonal jitter tried before giving up.
pub const JITTER_CAP: f64 = 1e-4;

/// Lower-triangular factor of a symmetric positive semi-definite matrix.
/// Pivots that vanish relative to the diagonal scale are set to zero; if a
/// pivot is clearly negative, growing diagonal jitter is added and the
/// factorization retried.
pub fn psd_cholesky(a: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0, f64::max).max(1e-300);
    let mut jitter = 0.0;
    loop {
        if let Some(l) = try_cholesky(a, jitter, scale) {
            return Ok(l);
        }
        jitter = if jitter == 0.0 { 1e-12 * scale } else { jitter * 100.0 };
        if jitter > JITTER_CAP * scale {
            return Err(Error::NotPsd(JITTER_CAP));
        }
    }
}

fn try_cholesky(a: &[Vec<f64>], jitter: f64, scale: f64) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let tol = 1e-10 * scale;
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = a[j][j] + jitter - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if d < -tol {
            return None;
        }
        if d <= tol {
            // dependent direction: the column must then be zero as well
            for i in j + 1..n {
                let r = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
                if r.abs() > 1e-6 * scale.sqrt() {
                    return None;
                }
            }
            continue;
        }
        let p = d.sqrt();
        l[j][j] = p;
        for i in j + 1..n {
            let r = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = r / p;
        }
    }
    Some(l)
}

/// Weighted wind paths: `paths[s][f][t]` MW.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSet {
    pub farms: Vec<String>,
    pub probabilities: Vec<f64>,
    pub paths: Vec<Vec<Vec<f64>>>,
}

impl ScenarioSet {
    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn hours(&self) -> usize {
        self.paths.first().and_then(|p| p.first()).map_or(0, Vec::len)
    }

    /// Single scenario with probability 1.
    pub fn single(farms: &[String], path: Vec<Vec<f64>>) -> Self {
        Self { farms: farms.to_vec(), probabilities: vec![1.0], paths: vec![path] }
    }

    pub fn window(&self, start: usize, len: usize) -> Self {
        Self {
            farms: self.farms.clone(),
            probabilities: self.probabilities.clone(),
            paths: self
                .paths
                .iter()
                .map(|p| p.iter().map(|s| s[start..start + len].to_vec()).collect())
                .collect(),
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
        w.write_record(["scenario", "probability", "farm", "hour", "value"]).map_err(|e| Error::csv(path, e))?;
        for (s, p) in self.paths.iter().enumerate() {
            for (f, series) in p.iter().enumerate() {
                for (t, v) in series.iter().enumerate() {
                    w.write_record([
                        (s + 1).to_string(),
                        self.probabilities[s].to_string(),
                        self.farms[f].clone(),
                        (t + 1).to_string(),
                        v.to_string(),
                    ])
                    .map_err(|e| Error::csv(path, e))?;
                }
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            scenario: usize,
            probability: f64,
            farm: String,
            hour: usize,
            value: f64,
        }
        let bad = |what: &str| Error::Format(format!("{}: {what}", path.display()));
        let mut set = Self { farms: Vec::new(), probabilities: Vec::new(), paths: Vec::new() };
        let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
        for row in rdr.deserialize::<Row>() {
            let r = row.map_err(|e| Error::csv(path, e))?;
            if r.scenario == 0 || r.hour == 0 {
                return Err(bad("scenario and hour are 1-based"));
            }
            let f = match set.farms.iter().position(|id| *id == r.farm) {
                Some(f) => f,
                None => {
                    set.farms.push(r.farm.clone());
                    set.farms.len() - 1
                }
            };
            while set.paths.len() < r.scenario {
                set.paths.push(Vec::new());
                set.probabilities.push(f64::NAN);
            }
            let s = r.scenario - 1;
            set.probabilities[s] = r.probability;
            let p = &mut set.paths[s];
            while p.len() <= f {
                p.push(Vec::new());
            }
            while p[f].len() < r.hour {
                p[f].push(f64::NAN);
            }
            p[f][r.hour - 1] = r.value;
        }
        let h = set.hours();
        let nf = set.farms.len();
        if set.probabilities.iter().any(|p| p.is_nan())
            || set.paths.iter().any(|p| p.len() != nf || p.iter().any(|s| s.len() != h || s.iter().any(|v| v.is_nan())))
        {
            return Err(bad("incomplete scenario table"));
        }
        Ok(set)
    }
}

/// Draws `n` equiprobable scenarios. Scenario `i` uses its own ChaCha stream
/// derived from `seed`, so results do not depend on evaluation order.
pub fn sample(
    pf: &ProbabilisticForecast,
    farms: &[WindFarm],
    cov: &CovarianceSpec,
    n: usize,
    seed: u64,
) -> Result<ScenarioSet> {
    if n == 0 {
        return Err(Error::invalid("scenario count", "n must be >= 1"));
    }
    let ordered: Vec<WindFarm> = pf
        .farms
        .iter()
        .map(|id| farms.iter().find(|f| f.id == *id).cloned().ok_or_else(|| Error::UnknownFarm(id.clone())))
        .collect::<Result<_>>()?;
    let hours = pf.hours();
    let l = psd_cholesky(&cov.correlation(&ordered, hours)?)?;
    let dim = ordered.len() * hours;
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut paths = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let z: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut path = vec![vec![0.0; hours]; ordered.len()];
        for (r, row) in l.iter().enumerate() {
            let x: f64 = row[..=r].iter().zip(&z).map(|(a, b)| a * b).sum();
            let u = normal.cdf(x);
            let (f, t) = (r / hours, r % hours);
            path[f][t] = pf.value(f, t, u);
        }
        paths.push(path);
    }
    Ok(ScenarioSet { farms: pf.farms.clone(), probabilities: vec![1.0 / n as f64; n], paths })
}

pub fn path_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().zip(b).flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs())).sum()
}

/// Selected indices (in selection order) of fast-forward selection over a
/// distance matrix.
pub fn fast_forward(dist: &[Vec<f64>], prob: &[f64], k: usize) -> Vec<usize> {
    let n = prob.len();
    let mut nearest = vec![f64::INFINITY; n];
    let mut selected = vec![false; n];
    let mut order = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for u in (0..n).filter(|&u| !selected[u]) {
            let z: f64 = (0..n)
                .filter(|&j| !selected[j] && j != u)
                .map(|j| prob[j] * nearest[j].min(dist[u][j]))
                .sum();
            if best.is_none_or(|(b, _)| z < b) {
                best = Some((z, u));
            }
        }
        let (_, u) = best.expect("k <= n");
        selected[u] = true;
        order.push(u);
        for j in 0..n {
            nearest[j] = nearest[j].min(dist[u][j]);
        }
    }
    order
}

/// Probability-weighted distance of the unselected scenarios to `selected`.
pub fn kantorovich(dist: &[Vec<f64>], prob: &[f64], selected: &[usize]) -> f64 {
    (0..prob.len())
        .filter(|j| !selected.contains(j))
        .map(|j| prob[j] * selected.iter().map(|&s| dist[j][s]).fold(f64::INFINITY, f64::min))
        .sum()
}

pub fn distance_matrix(set: &ScenarioSet) -> Vec<Vec<f64>> {
    let n = set.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = path_distance(&set.paths[i], &set.paths[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Keeps `k` scenarios by fast-forward selection under the L1 path distance
/// and moves each dropped scenario's probability to its nearest kept one.
/// Kept scenarios appear in their original order.
pub fn reduce(set: &ScenarioSet, k: usize) -> Result<ScenarioSet> {
    let n = set.len();
    if k == 0 || k > n {
        return Err(Error::invalid("reduction size", format!("k = {k} outside 1..={n}")));
    }
    let dist = distance_matrix(set);
    let mut keep = fast_forward(&dist, &set.probabilities, k);
    keep.sort_unstable();
    let mut prob = vec![0.0; k];
    for j in 0..n {
        let mut best = 0;
        for (slot, &s) in keep.iter().enumerate() {
            if dist[j][s] < dist[j][keep[best]] {
                best = slot;
            }
        }
        prob[best] += set.probabilities[j];
    }
    let total: f64 = prob.iter().sum();
    for p in &mut prob {
        *p /= total;
    }
    Ok(ScenarioSet {
        farms: set.farms.clone(),
        probabilities: prob,
        paths: keep.iter().map(|&s| set.paths[s].clone()).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub n_sample: usize,
    pub n_reduced: usize,
    pub eps_t: f64,
    pub eps_s: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self { n_sample: 1000, n_reduced: 10, eps_t: 4.0, eps_s: 40.0, seed: 1 }
    }
}

impl ScenarioConfig {
    pub fn covariance(&self) -> CovarianceSpec {
        CovarianceSpec { eps_t: self.eps_t, eps_s: self.eps_s }
    }
}

/// Sample then reduce.
pub fn generate(pf: &ProbabilisticForecast, farms: &[WindFarm], config: &ScenarioConfig) -> Result<ScenarioSet> {
    let big = sample(pf, farms, &config.covariance(), config.n_sample, config.seed)?;
    reduce(&big, config.n_reduced.min(big.len()))
}
