use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Snapshot, SpectralField};

/// Column order of the trajectory CSV.
pub const TRAJECTORY_COLUMNS: [&str; 7] = [
    "t",
    "L2",
    "Hr",
    "Hgamma",
    "Besov",
    "energy_defect",
    "cutoff_factor",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub t: f64,
    pub l2: f64,
    pub hr: f64,
    pub hgamma: f64,
    pub besov: f64,
    pub energy_defect: f64,
    pub cutoff_factor: f64,
}

impl RecordRow {
    pub fn values(&self) -> [f64; 7] {
        [
            self.t,
            self.l2,
            self.hr,
            self.hgamma,
            self.besov,
            self.energy_defect,
            self.cutoff_factor,
        ]
    }
}

/// Diagnostics of one trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub rows: Vec<RecordRow>,
    /// Field snapshots `(t, snapshot)` at the configured cadence.
    pub snapshots: Vec<(f64, Snapshot)>,
    /// The `H^r` guard was crossed; `rows` ends at the crossing.
    pub blowup: bool,
    pub steps_taken: u64,
    pub final_field: SpectralField,
    pub gamma: f64,
    pub p: f64,
    pub r: f64,
}

impl TrajectoryRecord {
    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    pub fn last(&self) -> &RecordRow {
        self.rows.last().expect("record has at least one row")
    }

    pub fn to_csv(&self) -> String {
        let mut s = TRAJECTORY_COLUMNS.join(",");
        s.push('\n');
        for row in &self.rows {
            let vals: Vec<String> = row.values().iter().map(|v| format!("{v:e}")).collect();
            let _ = writeln!(s, "{}", vals.join(","));
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses a CSV written by [`TrajectoryRecord::to_csv`].
    pub fn rows_from_csv(s: &str) -> Result<Vec<RecordRow>> {
        let mut lines = s.lines();
        let header = lines.next().unwrap_or_default();
        if header != TRAJECTORY_COLUMNS.join(",") {
            return Err(Error::InvalidParameter {
                name: "csv",
                reason: format!("unexpected header `{header}`"),
            });
        }
        lines
            .filter(|l| !l.is_empty())
            .map(|l| {
                let v: Vec<f64> = l
                    .split(',')
                    .map(|x| x.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidParameter {
                        name: "csv",
                        reason: e.to_string(),
                    })?;
                if v.len() != 7 {
                    return Err(Error::InvalidParameter {
                        name: "csv",
                        reason: format!("expected 7 columns, got {}", v.len()),
                    });
                }
                Ok(RecordRow {
                    t: v[0],
                    l2: v[1],
                    hr: v[2],
                    hgamma: v[3],
                    besov: v[4],
                    energy_defect: v[5],
                    cutoff_factor: v[6],
                })
            })
            .collect()
    }
}

/// Time-integrated functionals of a record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularitySummary {
    /// Trapezoid value of `∫ ‖v‖^p_{H^γ} dt`.
    pub hgamma_lp_integral: f64,
    /// `max_t ‖v(t)‖_{B^{γ(1-2/p)}_{2,p}}` over recorded times.
    pub besov_sup: f64,
}

/// `∫‖v‖^p_{H^γ} dt` by the trapezoid rule on the recorded times, and the
/// largest recorded Besov norm. The Besov column is the one recorded by the
/// run, i.e. for the run's own `(γ, p)`; `gamma` must match the record.
pub fn regularity_functionals(rec: &TrajectoryRecord, p: f64, gamma: f64) -> Result<RegularitySummary> {
    if rec.rows.is_empty() {
        return Err(Error::InvalidParameter {
            name: "record",
            reason: "empty record".into(),
        });
    }
    if gamma != rec.gamma {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("record was taken with gamma = {}, asked for {gamma}", rec.gamma),
        });
    }
    let mut integral = 0.0;
    for w in rec.rows.windows(2) {
        let dt = w[1].t - w[0].t;
        integral += 0.5 * dt * (w[0].hgamma.powf(p) + w[1].hgamma.powf(p));
    }
    let besov_sup = rec.rows.iter().map(|r| r.besov).fold(0.0, f64::max);
    Ok(RegularitySummary {
        hgamma_lp_integral: integral,
        besov_sup,
    })
}
