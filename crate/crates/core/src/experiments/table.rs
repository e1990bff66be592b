use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::statistics::{Data, Distribution, Max, Median, Min, OrderStatistics};

use super::spec::Kind;

/// Order statistics of one group of rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    /// Key columns and their values, e.g. `{"n": 4}`.
    pub key: BTreeMap<String, f64>,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
    /// 95% Wilson interval of a 0/1 outcome.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wilson: Option<[f64; 2]>,
}

impl GroupStats {
    pub fn from_values(key: BTreeMap<String, f64>, values: &[f64]) -> Self {
        let mut d = Data::new(values.to_vec());
        let (q1, q3) = (d.lower_quartile(), d.upper_quartile());
        Self {
            key,
            count: values.len(),
            mean: d.mean().unwrap_or(f64::NAN),
            median: d.median(),
            q1,
            q3,
            min: d.min(),
            max: d.max(),
            wilson: None,
        }
    }
}

/// Wilson score interval for `successes` out of `trials` at 95%.
pub fn wilson_interval(successes: usize, trials: usize) -> [f64; 2] {
    if trials == 0 {
        return [0.0, 1.0];
    }
    let z = Normal::standard().inverse_cdf(0.975);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    [(centre - half).max(0.0), (centre + half).min(1.0)]
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub groups: Vec<GroupStats>,
    /// Derived scalars: slopes, orders, reduction factors, maxima.
    pub values: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
}

/// Rows keyed by sweep point and sample, with a fixed column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub kind: Kind,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: Summary,
}

fn cell(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:e}")
    }
}

impl ResultTable {
    pub fn new(kind: Kind, columns: &[&str]) -> Self {
        Self {
            kind,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: Summary::default(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of column `name`.
    pub fn values(&self, name: &str) -> Vec<f64> {
        let i = self.column(name).expect("known column");
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// Groups rows by the key columns (in first-seen order) and returns the
    /// key values with the collected `value` column.
    pub fn grouped(&self, keys: &[&str], value: &str) -> Vec<(Vec<f64>, Vec<f64>)> {
        let ki: Vec<usize> = keys.iter().map(|k| self.column(k).expect("known column")).collect();
        let vi = self.column(value).expect("known column");
        let mut out: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        for row in &self.rows {
            let key: Vec<f64> = ki.iter().map(|&i| row[i]).collect();
            match out.iter_mut().find(|(k, _)| *k == key) {
                Some((_, vals)) => vals.push(row[vi]),
                None => out.push((key, vec![row[vi]])),
            }
        }
        out
    }

    /// Order statistics of `value` for each key group.
    pub fn group_stats(&self, keys: &[&str], value: &str) -> Vec<GroupStats> {
        self.grouped(keys, value)
            .into_iter()
            .map(|(key, vals)| {
                let key = keys.iter().map(|k| k.to_string()).zip(key).collect();
                GroupStats::from_values(key, &vals)
            })
            .collect()
    }

    /// Sorts rows lexicographically by the given key columns.
    pub fn sort_by(&mut self, keys: &[&str]) {
        let ki: Vec<usize> = keys.iter().map(|k| self.column(k).expect("known column")).collect();
        self.rows.sort_by(|a, b| {
            ki.iter()
                .map(|&i| a[i].total_cmp(&b[i]))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| cell(v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    /// True when no summary statistic is NaN.
    pub fn summary_is_finite(&self) -> bool {
        let g = self.summary.groups.iter().all(|g| {
            [g.mean, g.median, g.q1, g.q3, g.min, g.max]
                .iter()
                .all(|v| !v.is_nan())
        });
        g && self.summary.values.values().all(|v| !v.is_nan())
    }
}
