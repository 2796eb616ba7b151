//! Summary tables rendered from a simulation ledger, plus scenario-fan data.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use uc_core::forecast::{interval_bounds, ProbabilisticForecast};
use uc_core::market::{SimulationLedger, StageStats};
use uc_core::scenario::ScenarioSet;
use uc_core::uc::Strategy;
use uc_core::{Error, Result};

/// Inclusive day range reported as one group of columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Bucket {
    pub name: String,
    pub first_day: usize,
    pub last_day: usize,
}

impl Bucket {
    pub fn contains(&self, day: usize) -> bool {
        day >= self.first_day && day <= self.last_day
    }

    /// Parses `name=first-last` or `name=day`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::invalid("bucket", format!("`{s}` is not name=first-last"));
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let (a, b) = range.split_once('-').unwrap_or((range, range));
        let first_day: usize = a.trim().parse().map_err(|_| bad())?;
        let last_day: usize = b.trim().parse().map_err(|_| bad())?;
        if name.is_empty() || first_day > last_day {
            return Err(bad());
        }
        Ok(Self { name: name.to_string(), first_day, last_day })
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReportOptions {
    /// Column groups; one group spanning every day when empty.
    pub buckets: Vec<Bucket>,
    /// Leave days with a solver-limit flag out of the averages.
    pub exclude_flagged: bool,
}

/// Wall time of one simulated day, ms.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub day: usize,
    pub strategy: String,
    pub da_ms: f64,
    pub rac_ms: f64,
    pub rt_ms: f64,
}

pub fn read_timings(path: &Path) -> Result<Vec<TimingRow>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let bad = || Error::Format(format!("{}: malformed timing row", path.display()));
        let num = |k: usize| rec.get(k).and_then(|v| v.parse::<f64>().ok()).ok_or_else(bad);
        out.push(TimingRow {
            day: rec.get(0).and_then(|v| v.parse().ok()).ok_or_else(bad)?,
            strategy: rec.get(1).ok_or_else(bad)?.to_string(),
            da_ms: num(2)?,
            rac_ms: num(3)?,
            rt_ms: num(4)?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub label: String,
    /// Some averaged day hit a solver limit.
    pub flagged: bool,
    /// `None` where the bucket holds no days for the row.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
    pub footnotes: Vec<String>,
}

impl Table {
    pub fn csv(&self) -> String {
        let mut out = String::from("strategy,flagged");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.label);
            out.push(',');
            out.push_str(if r.flagged { "true" } else { "false" });
            for v in &r.values {
                out.push(',');
                if let Some(v) = v {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn markdown(&self) -> String {
        let mut out = format!("### {}\n\n| Strategy |", self.title);
        for c in &self.columns {
            let _ = write!(out, " {c} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---:|".repeat(self.columns.len()));
        out.push('\n');
        for r in &self.rows {
            let mark = if r.flagged { "*" } else { "" };
            let _ = write!(out, "| {}{mark} |", r.label);
            for v in &r.values {
                match v {
                    Some(v) => {
                        let _ = write!(out, " {} |", display(*v));
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        for f in &self.footnotes {
            let _ = write!(out, "\n{f}\n");
        }
        out
    }
}

fn display(v: f64) -> String {
    if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub cost: Table,
    pub commitments: Table,
    pub timing: Table,
    pub convergence: Table,
}

impl ReportBundle {
    pub fn tables(&self) -> [&Table; 4] {
        [&self.cost, &self.commitments, &self.timing, &self.convergence]
    }

    pub fn markdown(&self) -> String {
        let mut out = String::from("# Simulation report\n");
        for t in self.tables() {
            out.push('\n');
            out.push_str(&t.markdown());
        }
        out
    }

    /// Writes `report.md` and one CSV per table.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let md = dir.join("report.md");
        fs::write(&md, self.markdown()).map_err(|e| Error::io(&md, e))?;
        for t in self.tables() {
            let p = dir.join(format!("{}.csv", t.name));
            fs::write(&p, t.csv()).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

/// Strategy names in catalog order; names outside the catalog keep their
/// ledger order after the known ones.
pub fn ordered_strategies(ledger: &SimulationLedger) -> Vec<String> {
    let mut names = ledger.strategies();
    names.sort_by_key(|n| match n.parse::<Strategy>() {
        Ok(s) => (0, s.sort_key()),
        Err(_) => (1, (0, 0, 0)),
    });
    names
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

struct Selection<'a> {
    ledger: &'a SimulationLedger,
    options: &'a ReportOptions,
    buckets: Vec<Bucket>,
}

impl Selection<'_> {
    /// Days of `strategy` in `bucket` that enter the averages, and whether
    /// any day in the bucket is flagged.
    fn days(&self, strategy: &str, bucket: &Bucket) -> (Vec<usize>, bool) {
        let mut days = Vec::new();
        let mut flagged = false;
        for r in &self.ledger.rows {
            if r.strategy != strategy || !bucket.contains(r.day) {
                continue;
            }
            let f = self.ledger.flagged(r.day, strategy);
            flagged |= f;
            if !(f && self.options.exclude_flagged) {
                days.push(r.day);
            }
        }
        (days, flagged)
    }

    fn footnote(&self, any_flagged: bool) -> Vec<String> {
        if !any_flagged {
            return Vec::new();
        }
        let how = if self.options.exclude_flagged { "excluded from" } else { "included in" };
        vec![format!("* A solver limit was reached on some days; those days are {how} the averages.")]
    }
}

/// Per-strategy averages by bucket, in catalog order.
pub fn render_tables(ledger: &SimulationLedger, timings: Option<&[TimingRow]>, options: &ReportOptions) -> Result<ReportBundle> {
    if ledger.rows.is_empty() {
        return Err(Error::invalid("ledger", "no rows"));
    }
    let buckets = if options.buckets.is_empty() {
        let first = ledger.rows.iter().map(|r| r.day).min().unwrap_or(0);
        let last = ledger.rows.iter().map(|r| r.day).max().unwrap_or(0);
        vec![Bucket { name: "all".into(), first_day: first, last_day: last }]
    } else {
        options.buckets.clone()
    };
    let sel = Selection { ledger, options, buckets };
    let strategies = ordered_strategies(ledger);

    type Field = (&'static str, fn(&uc_core::market::LedgerRow) -> f64);
    let averaged = |name: &str, title: &str, fields: &[Field]| -> Table {
        let mut columns = Vec::new();
        for b in &sel.buckets {
            for (f, _) in fields {
                columns.push(format!("{} {f}", b.name));
            }
        }
        let mut any = false;
        let rows = strategies
            .iter()
            .map(|s| {
                let mut values = Vec::new();
                let mut flagged = false;
                for b in &sel.buckets {
                    let (days, f) = sel.days(s, b);
                    flagged |= f;
                    let rows: Vec<_> =
                        ledger.rows.iter().filter(|r| &r.strategy == s && days.contains(&r.day)).collect();
                    for (_, get) in fields {
                        values.push(mean(&rows.iter().map(|r| get(r)).collect::<Vec<_>>()));
                    }
                }
                any |= flagged;
                TableRow { label: s.clone(), flagged, values }
            })
            .collect();
        Table { name: name.into(), title: title.into(), columns, rows, footnotes: sel.footnote(any) }
    };

    let cost = averaged(
        "cost",
        "Average daily cost and reliability",
        &[
            ("DA cost", |r| r.da_cost),
            ("RAC cost", |r| r.rac_cost),
            ("RT cost", |r| r.rt_cost),
            ("RT load shed MWh", |r| r.load_shed_mwh),
            ("wind spill MWh", |r| r.spill_mwh),
        ],
    );
    let commitments =
        averaged("commitments", "Average daily commitments (unit-hours)", &[("fast units", |r| r.fast_uh), ("slow units", |r| r.slow_uh)]);

    let timing = match timings {
        None => averaged("timing", "Average stage time (s)", &[
            ("DA s", |r| r.da_ms / 1e3),
            ("RAC s", |r| r.rac_ms / 1e3),
            ("RT s", |r| r.rt_ms / 1e3),
        ]),
        Some(t) => {
            let mut columns = Vec::new();
            for b in &sel.buckets {
                for c in ["DA s", "RAC s", "RT s"] {
                    columns.push(format!("{} {c}", b.name));
                }
            }
            let mut any = false;
            let rows = strategies
                .iter()
                .map(|s| {
                    let mut values = Vec::new();
                    let mut flagged = false;
                    for b in &sel.buckets {
                        let (days, f) = sel.days(s, b);
                        flagged |= f;
                        let rows: Vec<&TimingRow> = t.iter().filter(|r| &r.strategy == s && days.contains(&r.day)).collect();
                        values.push(mean(&rows.iter().map(|r| r.da_ms / 1e3).collect::<Vec<_>>()));
                        values.push(mean(&rows.iter().map(|r| r.rac_ms / 1e3).collect::<Vec<_>>()));
                        values.push(mean(&rows.iter().map(|r| r.rt_ms / 1e3).collect::<Vec<_>>()));
                    }
                    any |= flagged;
                    TableRow { label: s.clone(), flagged, values }
                })
                .collect();
            Table {
                name: "timing".into(),
                title: "Average stage time (s)".into(),
                columns,
                rows,
                footnotes: sel.footnote(any),
            }
        }
    };

    let convergence = convergence_table(&sel, &strategies);
    Ok(ReportBundle { cost, commitments, timing, convergence })
}

/// Iteration counts of decomposed stages: average and maximum per stage,
/// plus the average enforced line fraction for LSF.
fn convergence_table(sel: &Selection, strategies: &[String]) -> Table {
    let columns: Vec<String> = [
        "DA iterations avg",
        "DA iterations max",
        "RAC iterations avg",
        "RAC iterations max",
        "enforced lines % avg",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let all = Bucket { name: "all".into(), first_day: 0, last_day: usize::MAX };
    let mut any = false;
    let mut rows = Vec::new();
    for s in strategies {
        let stats: Vec<&StageStats> = sel
            .ledger
            .stats
            .iter()
            .filter(|x| &x.strategy == s && (x.method == "LSF" || x.method == "BD"))
            .collect();
        if stats.is_empty() {
            continue;
        }
        let (days, flagged) = sel.days(s, &all);
        any |= flagged;
        let stage = |name: &str| -> Vec<f64> {
            stats
                .iter()
                .filter(|x| x.stage == name && days.contains(&x.day))
                .map(|x| x.iterations as f64)
                .collect()
        };
        let max = |v: &[f64]| v.iter().copied().reduce(f64::max);
        let (da, rac) = (stage("da"), stage("rac"));
        let enforced: Vec<f64> = stats
            .iter()
            .filter(|x| x.method == "LSF" && x.universe > 0 && days.contains(&x.day) && x.stage != "rt")
            .map(|x| 100.0 * x.enforced as f64 / x.universe as f64)
            .collect();
        rows.push(TableRow {
            label: s.clone(),
            flagged,
            values: vec![mean(&da), max(&da), mean(&rac), max(&rac), mean(&enforced)],
        });
    }
    Table {
        name: "convergence".into(),
        title: "Decomposition convergence".into(),
        columns,
        rows,
        footnotes: sel.footnote(any),
    }
}

/// Reduced scenario paths with the central interval of the forecast:
/// `hour,farm,lower,median,upper,scenario_1..scenario_k` plus a final
/// `probability` row.
pub fn scenario_fan_csv(set: &ScenarioSet, pf: &ProbabilisticForecast, confidence: f64) -> Result<String> {
    let (lower, upper) = interval_bounds(pf, confidence)?;
    if set.farms != pf.farms || set.hours() != pf.hours() {
        return Err(Error::invalid("scenario fan", "scenario set and forecast disagree on farms or hours"));
    }
    let mut out = String::from("hour,farm,lower,median,upper");
    for k in 0..set.len() {
        let _ = write!(out, ",scenario_{}", k + 1);
    }
    out.push('\n');
    for (f, farm) in set.farms.iter().enumerate() {
        for t in 0..set.hours() {
            let _ = write!(out, "{},{farm},{},{},{}", t + 1, lower[f][t], pf.value(f, t, 0.5), upper[f][t]);
            for p in &set.paths {
                let _ = write!(out, ",{}", p[f][t]);
            }
            out.push('\n');
        }
    }
    out.push_str("probability,,,,");
    for p in &set.probabilities {
        let _ = write!(out, ",{p}");
    }
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use uc_core::market::LedgerRow;

    fn row(day: usize, strategy: &str, rt: f64) -> LedgerRow {
        LedgerRow {
            day,
            strategy: strategy.into(),
            da_cost: rt - 1.0,
            rac_cost: rt,
            rt_cost: rt,
            load_shed_mwh: 0.0,
            spill_mwh: 1.0,
            fast_uh: 2.0,
            slow_uh: 24.0,
            da_ms: 0.0,
            rac_ms: 0.0,
            rt_ms: 0.0,
        }
    }

    #[test]
    fn single_day_averages_equal_the_day() {
        let ledger = SimulationLedger { rows: vec![row(1, "DUC-point", 10.0)], stats: vec![] };
        let b = render_tables(&ledger, None, &ReportOptions::default()).unwrap();
        assert_eq!(b.cost.rows[0].values, vec![Some(9.0), Some(10.0), Some(10.0), Some(0.0), Some(1.0)]);
        assert_eq!(b.commitments.rows[0].values, vec![Some(2.0), Some(24.0)]);
        assert!(b.convergence.rows.is_empty());
    }

    #[test]
    fn catalog_order() {
        let ledger = SimulationLedger {
            rows: vec![row(1, "SUC-E-0", 1.0), row(1, "IUC-10", 1.0), row(1, "DUC-perfect", 1.0)],
            stats: vec![],
        };
        assert_eq!(ordered_strategies(&ledger), vec!["DUC-perfect", "IUC-10", "SUC-E-0"]);
    }

    #[test]
    fn bucket_parsing() {
        assert_eq!(Bucket::parse("summer=1-3").unwrap(), Bucket { name: "summer".into(), first_day: 1, last_day: 3 });
        assert_eq!(Bucket::parse("d=4").unwrap().last_day, 4);
        assert!(Bucket::parse("x=5-2").is_err());
        assert!(Bucket::parse("nope").is_err());
    }

    #[test]
    fn empty_ledger_rejected() {
        assert!(render_tables(&SimulationLedger::default(), None, &ReportOptions::default()).is_err());
    }
}
