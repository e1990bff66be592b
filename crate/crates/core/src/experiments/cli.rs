use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::output::{write_outputs, write_table};
use super::runners::{run_experiment, run_simulation, workers_from_env};
use super::spec::{ExperimentSpec, Kind};
use super::table::ResultTable;
use crate::dynamics::{critical_exponents, rational_approximation, TRAJECTORY_COLUMNS};
use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hnslab", version, about = "Hyperviscous Navier-Stokes with transport noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single trajectory; writes the trajectory CSV.
    Simulate(RunArgs),
    /// Corrector error against the effective Laplacian over a shell sweep.
    Corrector(RunArgs),
    /// Terminal energy defect over a dt sweep.
    Energy(RunArgs),
    /// Exponential decay ratio along sample paths.
    Decay(RunArgs),
    /// Distance between cut-off runs and the deterministic effective run.
    ScalingLimit(RunArgs),
    /// Guard-survival frequencies over (n, mu).
    Survival(RunArgs),
    /// Critical exponents for a hyperviscosity exponent.
    Exponents {
        #[arg(long)]
        gamma: f64,
        /// Integrability exponent for the trace index and beta0.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Checks a config document without running it.
    Validate {
        config: PathBuf,
        /// Experiment rules to check; defaults to the document's kind.
        #[arg(long, value_parser = parse_kind)]
        kind: Option<Kind>,
    },
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    /// Experiment document, TOML or JSON.
    config: Option<PathBuf>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    outdir: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    n_values: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    mu_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    dt_values: Option<Vec<f64>>,
    /// Worker count; defaults to HNSLAB_WORKERS or the core count.
    #[arg(long)]
    workers: Option<usize>,
}

fn parse_kind(s: &str) -> std::result::Result<Kind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown experiment kind `{s}`"))
}

impl RunArgs {
    fn spec(&self) -> Result<ExperimentSpec> {
        let mut spec = match &self.config {
            Some(p) => ExperimentSpec::from_path(p)?,
            None => ExperimentSpec::default(),
        };
        let sim = &mut spec.sim;
        if let Some(v) = self.dt {
            sim.dt = v;
        }
        if let Some(v) = self.mu {
            sim.mu = v;
        }
        if let Some(v) = self.t_end {
            sim.t_end = v;
        }
        if let Some(v) = self.grid {
            sim.grid = v;
        }
        if let Some(v) = self.seed {
            sim.seed = v;
        }
        if let Some(v) = self.samples {
            spec.samples = v;
        }
        if let Some(v) = &self.outdir {
            spec.outdir = v.clone();
        }
        if self.n_values.is_some() {
            spec.n_values = self.n_values.clone();
        }
        if self.mu_values.is_some() {
            spec.mu_values = self.mu_values.clone();
        }
        if self.dt_values.is_some() {
            spec.dt_values = self.dt_values.clone();
        }
        Ok(spec)
    }

    fn workers(&self) -> usize {
        self.workers.filter(|&w| w > 0).unwrap_or_else(workers_from_env)
    }
}

fn fraction(x: f64) -> String {
    let (n, d) = rational_approximation(x, 1000);
    if (n as f64 / d as f64 - x).abs() <= 1e-12 * x.abs().max(1.0) {
        if d == 1 {
            format!("{n}")
        } else {
            format!("{n}/{d}")
        }
    } else {
        format!("{x}")
    }
}

/// One-line description of an experiment summary.
fn describe(table: &ResultTable) -> String {
    let mut parts: Vec<String> = vec![format!("{} rows", table.rows.len())];
    for g in &table.summary.groups {
        let key: Vec<String> = g.key.iter().map(|(k, v)| format!("{k}={v}")).collect();
        parts.push(format!("median[{}]={:.4e}", key.join(","), g.median));
    }
    for (k, v) in &table.summary.values {
        parts.push(format!("{k}={v:.4e}"));
    }
    for (k, v) in &table.summary.flags {
        parts.push(format!("{k}={v}"));
    }
    parts.join(" ")
}

fn execute(cli: Cli) -> Result<String> {
    let (kind, args) = match cli.command {
        Command::Exponents { gamma, p } => {
            let ex = critical_exponents(gamma)?;
            let mut line = format!(
                "gamma={} delta={} p_c={} ({}) beta={} ({})",
                fraction(gamma),
                fraction(ex.delta),
                fraction(ex.p_critical),
                ex.p_critical,
                fraction(ex.beta),
                ex.beta
            );
            if let Some(p) = p {
                line += &format!(
                    " beta0={} trace_index={} subcritical={}",
                    ex.beta0(p),
                    ex.trace_index(p),
                    ex.beta0(p) > ex.beta
                );
            }
            return Ok(line);
        }
        Command::Validate { config, kind } => {
            let spec = ExperimentSpec::from_path(&config)?;
            spec.sim.validate()?;
            match kind.or(spec.kind) {
                Some(k) => {
                    spec.validate(k)?;
                    return Ok(format!("ok: {} config is valid", k.name()));
                }
                None => return Ok("ok: simulation config is valid".into()),
            }
        }
        Command::Simulate(args) => {
            let spec = args.spec()?;
            let rec = run_simulation(&spec)?;
            let (csv, _) = write_outputs(
                &spec.outdir,
                "simulate",
                &rec.to_csv(),
                TRAJECTORY_COLUMNS.iter().map(|c| c.to_string()).collect(),
                rec.rows.len(),
                &spec,
                None,
            )?;
            let last = rec.last();
            return Ok(format!(
                "simulate: {} rows, t={} L2={:.6e} Hr={:.6e} energy_defect={:.3e} blowup={} -> {}",
                rec.rows.len(),
                last.t,
                last.l2,
                last.hr,
                last.energy_defect,
                rec.blowup,
                csv.display()
            ));
        }
        Command::Corrector(a) => (Kind::CorrectorConvergence, a),
        Command::Energy(a) => (Kind::EnergyAudit, a),
        Command::Decay(a) => (Kind::Decay, a),
        Command::ScalingLimit(a) => (Kind::ScalingLimit, a),
        Command::Survival(a) => (Kind::Survival, a),
    };
    let spec = args.spec()?;
    let table = run_experiment(kind, &spec, args.workers())?;
    let (csv, _) = write_table(&table, &spec, &spec.outdir)?;
    Ok(format!("{}: {} -> {}", kind.name(), describe(&table), csv.display()))
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_RUNTIME
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code: 0 on success, 1 on invalid input, 2 on a runtime abort.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(line) => {
            println!("{line}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
