//! CSV helpers for hourly series (`hour,<id>,...`, hour 1-based).

use std::path::Path;

use crate::error::{Error, Result};

/// Column-major hourly series keyed by the header ids.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlySeries {
    pub ids: Vec<String>,
    /// `values[k][t]` is column `ids[k]` at hour `t + 1`.
    pub values: Vec<Vec<f64>>,
}

impl HourlySeries {
    pub fn hours(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn column(&self, id: &str) -> Option<&[f64]> {
        self.ids.iter().position(|i| i == id).map(|k| self.values[k].as_slice())
    }
}

pub fn read_hourly_csv(path: &Path) -> Result<HourlySeries> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    let headers = rdr.headers().map_err(|e| Error::csv(path, e))?.clone();
    if headers.get(0).map(str::trim) != Some("hour") {
        return Err(Error::Format(format!("{}: first column must be `hour`", path.display())));
    }
    let ids: Vec<String> = headers.iter().skip(1).map(|h| h.trim().to_string()).collect();
    let mut values = vec![Vec::new(); ids.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::csv(path, e))?;
        let hour: usize = rec
            .get(0)
            .and_then(|h| h.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("{}: bad hour on row {}", path.display(), row + 1)))?;
        if hour != row + 1 {
            return Err(Error::Format(format!(
                "{}: hour {hour} out of sequence (expected {})",
                path.display(),
                row + 1
            )));
        }
        if rec.len() != ids.len() + 1 {
            return Err(Error::Format(format!("{}: row {} has {} fields", path.display(), hour, rec.len())));
        }
        for (k, field) in rec.iter().skip(1).enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::Format(format!("{}: `{field}` is not a number (hour {hour})", path.display()))
            })?;
            values[k].push(v);
        }
    }
    Ok(HourlySeries { ids, values })
}

pub fn write_hourly_csv(path: &Path, series: &HourlySeries) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::csv(path, e))?;
    let mut header = vec!["hour".to_string()];
    header.extend(series.ids.iter().cloned());
    w.write_record(&header).map_err(|e| Error::csv(path, e))?;
    for t in 0..series.hours() {
        let mut rec = vec![(t + 1).to_string()];
        rec.extend(series.values.iter().map(|col| col[t].to_string()));
        w.write_record(&rec).map_err(|e| Error::csv(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
