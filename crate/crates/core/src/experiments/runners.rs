use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::spec::{ExperimentSpec, Kind};
use super::table::{loglog_slope, wilson_interval, GroupStats, ResultTable};
use crate::dynamics::{Mode, SimConfig, ThetaChoice, TrajectoryRecord, Viscosity};
use crate::error::{Error, Result};
use crate::noise::corrector_limit_error;
use crate::spectral::{mean, sobolev_norm, CVec3, SpectralField, Wavevector};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "HNSLAB_WORKERS";

/// Worker count from `HNSLAB_WORKERS`, else the available parallelism.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter {
            name: "workers",
            reason: e.to_string(),
        })
}

/// Mode used for noisy runs of `cfg`.
pub fn stochastic_mode(cfg: &SimConfig) -> Mode {
    if cfg.cutoff_radius.is_some() {
        Mode::StochasticCutoff
    } else {
        Mode::Stochastic
    }
}

/// Runs `f` on samples `0..samples` of one configuration. Each worker owns
/// its simulation; results come back in sample order.
fn par_samples<T, F>(
    pool: &rayon::ThreadPool,
    cfg: &SimConfig,
    mode: Mode,
    samples: u64,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut crate::dynamics::Simulation, u64) -> Result<T> + Sync,
{
    crate::dynamics::Simulation::new(cfg, mode)?;
    pool.install(|| {
        (0..samples)
            .into_par_iter()
            .map_init(
                || crate::dynamics::Simulation::new(cfg, mode).expect("validated above"),
                |sim, s| f(sim, s),
            )
            .collect()
    })
}

fn initial_field(spec: &ExperimentSpec, cfg: &SimConfig) -> Result<SpectralField> {
    spec.init.build(cfg.grid()?)
}

fn require_mean_zero(v: &SpectralField) -> Result<()> {
    let m = mean(v);
    if m.iter().any(|x| *x != 0.0) {
        return Err(Error::Validation {
            rule: "mean-zero data",
            detail: format!("initial mean {m:?}"),
        });
    }
    Ok(())
}

fn key(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Real unit amplitude orthogonal to `j`.
pub fn orthogonal_amplitude(j: Wavevector) -> CVec3 {
    let jr = j.map(|x| x as f64);
    let axis = (0..3)
        .min_by(|&a, &b| jr[a].abs().total_cmp(&jr[b].abs()))
        .expect("three axes");
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let c = [
        jr[1] * e[2] - jr[2] * e[1],
        jr[2] * e[0] - jr[0] * e[2],
        jr[0] * e[1] - jr[1] * e[0],
    ];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    c.map(|x| Complex64::new(x / n, 0.0))
}

fn fmt_j(j: Wavevector) -> String {
    format!("({},{},{})", j[0], j[1], j[2])
}

/// Corrector error against `(3μ/5)Δ` for every `(n, j)`.
///
/// Columns `n, j0, j1, j2, error`.
pub fn run_corrector_convergence(spec: &ExperimentSpec, workers: usize) -> Result<ResultTable> {
    spec.validate(Kind::CorrectorConvergence)?;
    let mut ns = spec.n_list()?;
    ns.sort_unstable();
    ns.dedup();
    let mu = spec.sim.mu;
    let points: Vec<(u32, Wavevector)> = ns
        .iter()
        .flat_map(|&n| spec.modes.iter().map(move |&j| (n, j)))
        .collect();
    let errors: Vec<f64> = pool(workers)?.install(|| {
        points
            .par_iter()
            .map(|&(n, j)| corrector_limit_error(j, orthogonal_amplitude(j), n, spec.alpha_decay, mu))
            .collect::<Result<_>>()
    })?;
    let mut table = ResultTable::new(Kind::CorrectorConvergence, &["n", "j0", "j1", "j2", "error"]);
    for (&(n, j), &e) in points.iter().zip(&errors) {
        table
            .rows
            .push(vec![n as f64, j[0] as f64, j[1] as f64, j[2] as f64, e]);
    }
    for &j in &spec.modes {
        let errs: Vec<f64> = points
            .iter()
            .zip(&errors)
            .filter(|((_, jj), _)| *jj == j)
            .map(|(_, &e)| e)
            .collect();
        let nsf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let tag = fmt_j(j);
        if nsf.len() >= 2 {
            table
                .summary
                .values
                .insert(format!("slope{tag}"), loglog_slope(&nsf, &errs));
        }
        table.summary.flags.insert(
            format!("strictly_decreasing{tag}"),
            errs.windows(2).all(|w| w[1] < w[0]),
        );
        table.summary.groups.push(GroupStats::from_values(
            key(&[("j0", j[0] as f64), ("j1", j[1] as f64), ("j2", j[2] as f64)]),
            &errs,
        ));
    }
    Ok(table)
}

/// Terminal energy defect for every `(dt, sample)`. Brownian paths are
/// sampled on the finest `dt` so all step sizes share them.
///
/// Columns `dt, sample, defect`.
pub fn run_energy_audit(spec: &ExperimentSpec, workers: usize) -> Result<ResultTable> {
    spec.validate(Kind::EnergyAudit)?;
    let mut dts = spec.dt_list()?;
    dts.sort_by(|a, b| b.total_cmp(a));
    dts.dedup();
    let finest = *dts.last().expect("nonempty");
    let v0 = initial_field(spec, &spec.sim)?;
    require_mean_zero(&v0)?;
    let pool = pool(workers)?;
    let mut table = ResultTable::new(Kind::EnergyAudit, &["dt", "sample", "defect"]);
    let mut medians = Vec::new();
    for &dt in &dts {
        let mut cfg = spec.sim.clone();
        cfg.dt = dt;
        cfg.brownian_dt = Some(finest);
        let defects = par_samples(&pool, &cfg, stochastic_mode(&cfg), spec.samples, |sim, s| {
            Ok(sim.run(&v0, s)?.last().energy_defect)
        })?;
        for (s, d) in defects.iter().enumerate() {
            table.rows.push(vec![dt, s as f64, *d]);
        }
        let g = GroupStats::from_values(key(&[("dt", dt)]), &defects);
        medians.push(g.median);
        table.summary.groups.push(g);
    }
    for i in 1..dts.len() {
        let tag = format!("{:e}->{:e}", dts[i - 1], dts[i]);
        let (a, b) = (medians[i - 1], medians[i]);
        if a > 0.0 && b > 0.0 {
            table.summary.values.insert(format!("reduction:{tag}"), a / b);
            table
                .summary
                .values
                .insert(format!("order:{tag}"), (a / b).ln() / (dts[i - 1] / dts[i]).ln());
        }
    }
    Ok(table)
}

/// `‖v(t)‖² e^t / ‖v₀‖²` along each sample path; zero data gives 0.
///
/// Columns `t, sample, ratio`.
pub fn run_decay(spec: &ExperimentSpec, workers: usize) -> Result<ResultTable> {
    spec.validate(Kind::Decay)?;
    let cfg = &spec.sim;
    let v0 = initial_field(spec, cfg)?;
    require_mean_zero(&v0)?;
    let mode = if cfg.theta == ThetaChoice::None {
        Mode::Deterministic
    } else {
        stochastic_mode(cfg)
    };
    let records = par_samples(&pool(workers)?, cfg, mode, spec.samples, |sim, s| sim.run(&v0, s))?;
    let mut table = ResultTable::new(Kind::Decay, &["t", "sample", "ratio"]);
    let mut max_ratio: f64 = 0.0;
    for (s, rec) in records.iter().enumerate() {
        let e0 = rec.rows[0].l2.powi(2);
        let ratios: Vec<f64> = rec
            .rows
            .iter()
            .map(|r| {
                if e0 == 0.0 {
                    0.0
                } else {
                    r.l2.powi(2) * r.t.exp() / e0
                }
            })
            .collect();
        for (row, &q) in rec.rows.iter().zip(&ratios) {
            table.rows.push(vec![row.t, s as f64, q]);
            max_ratio = max_ratio.max(q);
        }
        table
            .summary
            .groups
            .push(GroupStats::from_values(key(&[("sample", s as f64)]), &ratios));
    }
    table.summary.values.insert("max_ratio".into(), max_ratio);
    Ok(table)
}

/// Deterministic effective run used by the scaling-limit experiment: plain
/// hyperviscous equation plus `(3μ/5)Δ`, no noise and no cut-off.
pub fn effective_config(cfg: &SimConfig) -> SimConfig {
    SimConfig {
        theta: ThetaChoice::None,
        viscosity: Viscosity::NoiseLimit,
        cutoff_radius: None,
        guard: None,
        brownian_dt: None,
        ..cfg.clone()
    }
}

/// Deterministic effective trajectory with its recorded fields.
pub fn effective_trajectory(
    cfg: &SimConfig,
    v0: &SpectralField,
) -> Result<(TrajectoryRecord, Vec<(u64, SpectralField)>)> {
    let mut sim = crate::dynamics::Simulation::new(&effective_config(cfg), Mode::Deterministic)?;
    let mut fields = Vec::new();
    let rec = sim.run_observed(v0, 0, |o| fields.push((o.step, o.field.clone())))?;
    Ok((rec, fields))
}

/// Sup over shared record times of `‖vⁿ − v_det‖_{H^{r₀}}` for cut-off runs
/// with `θⁿ` against the deterministic effective run, for each `(μ, n)`.
/// `R` defaults to 1.01 times the largest `H^r` norm of the deterministic
/// run, so the cut-off is inactive along it.
///
/// Columns `mu, n, sample, sup_distance, completed`.
pub fn run_scaling_limit(spec: &ExperimentSpec, workers: usize) -> Result<ResultTable> {
    spec.validate(Kind::ScalingLimit)?;
    let mut ns = spec.n_list()?;
    ns.sort_unstable();
    ns.dedup();
    let mus = spec.mu_list()?;
    let v0 = initial_field(spec, &spec.sim)?;
    let pool = pool(workers)?;
    let mut table = ResultTable::new(
        Kind::ScalingLimit,
        &["mu", "n", "sample", "sup_distance", "completed"],
    );
    for &mu in &mus {
        let base = spec.sim_for(None, mu);
        let (det, fields) = effective_trajectory(&base, &v0)?;
        let radius = match spec.sim.cutoff_radius {
            Some(r) => r,
            None => 1.01 * det.rows.iter().map(|r| r.hr).fold(0.0, f64::max),
        };
        table
            .summary
            .values
            .insert(format!("R[mu={mu}]"), radius);
        let mut medians = Vec::new();
        for &n in &ns {
            let mut cfg = spec.sim_for(Some(n), mu);
            cfg.cutoff_radius = Some(radius);
            cfg.viscosity = Viscosity::None;
            let out = par_samples(&pool, &cfg, Mode::StochasticCutoff, spec.samples, |sim, s| {
                let mut sup: f64 = 0.0;
                let rec = sim.run_observed(&v0, s, |o| {
                    if let Ok(i) = fields.binary_search_by_key(&o.step, |(st, _)| *st) {
                        let d = sobolev_norm(&(o.field - &fields[i].1), spec.r0);
                        sup = sup.max(d);
                    }
                })?;
                Ok((sup, !rec.blowup))
            })?;
            let dists: Vec<f64> = out.iter().map(|o| o.0).collect();
            for (s, (d, done)) in out.iter().enumerate() {
                table
                    .rows
                    .push(vec![mu, n as f64, s as f64, *d, f64::from(u8::from(*done))]);
            }
            let g = GroupStats::from_values(key(&[("mu", mu), ("n", n as f64)]), &dists);
            medians.push(g.median);
            table.summary.groups.push(g);
        }
        table.summary.flags.insert(
            format!("median_decreasing[mu={mu}]"),
            medians.windows(2).all(|w| w[1] < w[0]),
        );
    }
    Ok(table)
}

/// Whether `‖v‖_{H^r}` stays below the guard up to `T`, for each `(n, μ)`.
///
/// Columns `n, mu, sample, survived, stop_time`.
pub fn run_survival(spec: &ExperimentSpec, workers: usize) -> Result<ResultTable> {
    spec.validate(Kind::Survival)?;
    let ns = spec.n_list()?;
    let mus = spec.mu_list()?;
    let v0 = initial_field(spec, &spec.sim)?;
    let pool = pool(workers)?;
    let mut table = ResultTable::new(Kind::Survival, &["n", "mu", "sample", "survived", "stop_time"]);
    for &n in &ns {
        for &mu in &mus {
            let cfg = spec.sim_for(Some(n), mu);
            let out = par_samples(&pool, &cfg, Mode::Stochastic, spec.samples, |sim, s| {
                let rec = sim.run(&v0, s)?;
                Ok((!rec.blowup, rec.last().t))
            })?;
            let flags: Vec<f64> = out.iter().map(|o| f64::from(u8::from(o.0))).collect();
            for (s, (ok, t)) in out.iter().enumerate() {
                table
                    .rows
                    .push(vec![n as f64, mu, s as f64, f64::from(u8::from(*ok)), *t]);
            }
            let mut g = GroupStats::from_values(key(&[("n", n as f64), ("mu", mu)]), &flags);
            let hits = out.iter().filter(|o| o.0).count();
            g.wilson = Some(wilson_interval(hits, out.len()));
            table.summary.groups.push(g);
        }
    }
    Ok(table)
}

/// Runs the experiment named by `kind`.
pub fn run_experiment(kind: Kind, spec: &ExperimentSpec, workers: usize) -> Result<ResultTable> {
    match kind {
        Kind::CorrectorConvergence => run_corrector_convergence(spec, workers),
        Kind::EnergyAudit => run_energy_audit(spec, workers),
        Kind::Decay => run_decay(spec, workers),
        Kind::ScalingLimit => run_scaling_limit(spec, workers),
        Kind::Survival => run_survival(spec, workers),
    }
}

/// Single trajectory of `spec.sim` from `spec.init`: deterministic without
/// noise, otherwise sample 0 of the (cut-off) stochastic system.
pub fn run_simulation(spec: &ExperimentSpec) -> Result<TrajectoryRecord> {
    let cfg = &spec.sim;
    cfg.validate()?;
    let mode = if cfg.theta == ThetaChoice::None {
        Mode::Deterministic
    } else {
        stochastic_mode(cfg)
    };
    let v0 = initial_field(spec, cfg)?;
    crate::dynamics::Simulation::new(cfg, mode)?.run(&v0, 0)
}
