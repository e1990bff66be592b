use std::path::{Path, PathBuf};

use serde::Serialize;

use super::spec::ExperimentSpec;
use super::table::{ResultTable, Summary};
use crate::error::Result;

/// Run metadata stored next to every CSV.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta<'a> {
    pub kind: &'a str,
    pub version: &'static str,
    pub created: String,
    /// `git rev-parse HEAD` of the working directory, when available.
    pub commit: Option<String>,
    pub columns: Vec<String>,
    pub rows: usize,
    pub spec: &'a ExperimentSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<&'a Summary>,
}

fn git_commit() -> Option<String> {
    let out = std::process::Command::new("git")
        .args(["rev-parse", "HEAD"])
        .output()
        .ok()?;
    out.status
        .success()
        .then(|| String::from_utf8_lossy(&out.stdout).trim().to_string())
        .filter(|s| !s.is_empty())
}

/// Free `<outdir>/<kind>-<timestamp>` stem; a counter is appended on collision.
fn output_stem(outdir: &Path, kind: &str) -> PathBuf {
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%3fZ");
    let base = format!("{kind}-{stamp}");
    let mut stem = outdir.join(&base);
    let mut i = 1;
    while stem.with_extension("csv").exists() {
        stem = outdir.join(format!("{base}-{i}"));
        i += 1;
    }
    stem
}

/// Writes `csv` and its `.meta.json` sidecar; returns both paths.
pub fn write_outputs(
    outdir: &Path,
    kind: &str,
    csv: &str,
    columns: Vec<String>,
    rows: usize,
    spec: &ExperimentSpec,
    summary: Option<&Summary>,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(outdir)?;
    let stem = output_stem(outdir, kind);
    let csv_path = stem.with_extension("csv");
    let meta_path = stem.with_extension("meta.json");
    let meta = RunMeta {
        kind,
        version: env!("CARGO_PKG_VERSION"),
        created: chrono::Utc::now().to_rfc3339(),
        commit: git_commit(),
        columns,
        rows,
        spec,
        summary,
    };
    std::fs::write(&csv_path, csv)?;
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    Ok((csv_path, meta_path))
}

pub fn write_table(table: &ResultTable, spec: &ExperimentSpec, outdir: &Path) -> Result<(PathBuf, PathBuf)> {
    write_outputs(
        outdir,
        table.kind.name(),
        &table.to_csv(),
        table.columns.clone(),
        table.rows.len(),
        spec,
        Some(&table.summary),
    )
}
