use serde::{Deserialize, Serialize};

use super::config::{NoiseAssembly, Scheme, SimConfig};
use super::cutoff::cutoff_factor;
use super::propagator::LinearPropagator;
use super::record::{RecordRow, TrajectoryRecord};
use crate::error::{Error, Result};
use crate::noise::{
    noise_increment_field, noise_velocity, BrownianDriver, CorrectorTable, Increments, NoiseBasis,
    NoisePath, ThetaSpectrum,
};
use crate::spectral::{
    besov_norm, dealias, helmholtz_project, mean, sobolev_norm, Grid, SpectralField, Transformer,
    TWO_PI,
};

/// Which system is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Hyperviscous equation with the configured extra viscosity.
    Deterministic,
    /// Transport noise in Itô form with the corrector.
    Stochastic,
    /// As `Stochastic`, with the nonlinearity scaled by `φ(‖v‖_{H^r}/R)`.
    StochasticCutoff,
}

/// What an observer sees at each recorded time.
pub struct Observation<'a> {
    pub index: usize,
    pub step: u64,
    pub row: &'a RecordRow,
    pub field: &'a SpectralField,
}

/// Integrator for one configuration. Holds the precomputed noise data and
/// per-worker FFT scratch; run it once per sample.
pub struct Simulation {
    cfg: SimConfig,
    mode: Mode,
    grid: Grid,
    theta: ThetaSpectrum,
    basis: Option<NoiseBasis>,
    corrector: Option<CorrectorTable>,
    driver: BrownianDriver,
    transformer: Transformer,
    substeps: u64,
}

struct Step {
    field: SpectralField,
    hyper: f64,
    visc: f64,
    cutoff: f64,
}

impl Simulation {
    pub fn new(cfg: &SimConfig, mode: Mode) -> Result<Self> {
        cfg.validate()?;
        let grid = cfg.grid()?;
        let theta = match mode {
            Mode::Deterministic => ThetaSpectrum::empty(),
            _ => cfg.theta_spectrum()?,
        };
        if mode == Mode::StochasticCutoff && cfg.cutoff_radius.is_none() {
            return Err(Error::Validation {
                rule: "cutoff radius",
                detail: "stochastic-cutoff mode needs cutoff_radius".into(),
            });
        }
        let (basis, corrector) = if theta.is_empty() {
            (None, None)
        } else {
            let basis = NoiseBasis::build(theta.max_norm_inf())?;
            let table = CorrectorTable::build(grid, &theta, &basis, cfg.mu)?;
            (Some(basis), Some(table))
        };
        Ok(Self {
            cfg: cfg.clone(),
            mode,
            grid,
            theta,
            basis,
            corrector,
            driver: BrownianDriver::new(cfg.seed),
            transformer: Transformer::new(grid),
            substeps: cfg.brownian_substeps()?,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn theta(&self) -> &ThetaSpectrum {
        &self.theta
    }

    fn noisy(&self) -> bool {
        self.basis.is_some()
    }

    fn viscosity(&self) -> f64 {
        match self.mode {
            Mode::Deterministic => self.cfg.viscosity.coefficient(self.cfg.mu),
            _ => 0.0,
        }
    }

    /// Linear flow for data with the given spatial mean.
    pub fn propagator(&self, mean: [f64; 3]) -> LinearPropagator {
        let w = [
            mean[0] + self.cfg.drift[0],
            mean[1] + self.cfg.drift[1],
            mean[2] + self.cfg.drift[2],
        ];
        LinearPropagator::new(
            self.grid,
            self.cfg.dt,
            self.cfg.gamma,
            self.viscosity(),
            self.corrector.as_ref(),
            w,
        )
    }

    /// Increments driving step `step` of sample `sample`.
    pub fn increments(&self, sample: u64, step: u64) -> Option<Increments> {
        self.noisy().then(|| {
            let m = self.substeps;
            self.driver.summed_increments(
                sample,
                step * m,
                m,
                self.cfg.dt / m as f64,
                &self.theta,
            )
        })
    }

    fn nonlinear_weight(&self, full: &SpectralField) -> f64 {
        if !self.cfg.nonlinearity {
            return 0.0;
        }
        match (self.mode, self.cfg.cutoff_radius) {
            (Mode::StochasticCutoff, Some(radius)) => cutoff_factor(full, radius, self.cfg.r),
            _ => 1.0,
        }
    }

    fn check_cfl(&self, v: &SpectralField, step: u64) -> Result<()> {
        let bound: f64 = v
            .coeffs()
            .iter()
            .map(|c| (c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr()).sqrt())
            .sum();
        let cfl = self.cfg.dt * TWO_PI * self.grid.dealias_cutoff() as f64 * bound;
        if !(cfl <= self.cfg.cfl_bound) {
            return Err(Error::StepRejected {
                step: step as usize,
                reason: format!("CFL number {cfl:.3e} exceeds {}", self.cfg.cfl_bound),
            });
        }
        Ok(())
    }

    /// `ℙ∇·(v ⊗ (ΔX - s v))`: noise plus `s`-scaled convection in one
    /// pseudo-spectral product. `None` when both parts vanish.
    fn forcing(
        &mut self,
        v: &SpectralField,
        inc: Option<&Increments>,
        s: f64,
    ) -> Result<Option<SpectralField>> {
        let noise = match (inc, &self.basis) {
            (Some(inc), Some(basis)) => match self.cfg.noise_assembly {
                NoiseAssembly::PseudoSpectral => {
                    Some(noise_velocity(self.grid, &self.theta, basis, inc, self.cfg.mu)?)
                }
                NoiseAssembly::PerMode => {
                    let mut f = noise_increment_field(
                        v,
                        &self.theta,
                        basis,
                        inc,
                        self.cfg.mu,
                        NoisePath::PerMode,
                        &mut self.transformer,
                    )?;
                    if s != 0.0 {
                        f = &f + &self.transformer.advect(v, &v.scale(-s));
                    }
                    return Ok(Some(f));
                }
            },
            _ => None,
        };
        let w = match (noise, s != 0.0) {
            (None, false) => return Ok(None),
            (None, true) => v.scale(-s),
            (Some(x), false) => x,
            (Some(x), true) => &x - &v.scale(s),
        };
        Ok(Some(self.transformer.advect(v, &w)))
    }

    /// One step from the mean-free state `v`; `mean` is the conserved
    /// spatial mean used for the cut-off norm.
    fn advance(
        &mut self,
        prop: &LinearPropagator,
        v: &SpectralField,
        mean_coeff: &SpectralField,
        inc: Option<&Increments>,
        step: u64,
    ) -> Result<Step> {
        let dt = self.cfg.dt;
        let full = v + mean_coeff;
        let phi = self.nonlinear_weight(&full);
        if phi > 0.0 {
            self.check_cfl(&full, step)?;
        }
        let forcing = self.forcing(v, inc, phi * dt)?;
        let y = match &forcing {
            Some(f) => v + f,
            None => v.clone(),
        };
        let (mut next, mut hyper, mut visc) = prop.apply(&y);
        if self.cfg.scheme == Scheme::Rk2 && phi > 0.0 {
            // Heun in integrating-factor form; the noise enters both stages
            // identically.
            let half = self.forcing(v, inc, 0.5 * phi * dt)?;
            let y2 = match &half {
                Some(f) => v + f,
                None => v.clone(),
            };
            let (base, h2, v2) = prop.apply(&y2);
            let phi2 = self.nonlinear_weight(&(&next + mean_coeff));
            let corr = self.transformer.advect(&next, &next.scale(-0.5 * phi2 * dt));
            next = &base + &corr;
            hyper = h2;
            visc = v2;
        }
        if !next.is_finite() {
            return Err(Error::NonFinite {
                step: step as usize,
            });
        }
        Ok(Step {
            field: next,
            hyper,
            visc,
            cutoff: phi,
        })
    }

    /// Integrates from `v0` for Monte Carlo sample `sample`.
    pub fn run(&mut self, v0: &SpectralField, sample: u64) -> Result<TrajectoryRecord> {
        self.run_observed(v0, sample, |_| {})
    }

    /// As [`Simulation::run`], calling `observer` at every recorded time.
    pub fn run_observed(
        &mut self,
        v0: &SpectralField,
        sample: u64,
        mut observer: impl FnMut(&Observation),
    ) -> Result<TrajectoryRecord> {
        if v0.grid() != self.grid {
            return Err(Error::GridMismatch(format!(
                "initial field on {} points, config on {}",
                v0.grid().points(),
                self.grid.points()
            )));
        }
        let u0 = dealias(&helmholtz_project(v0));
        let m = mean(&u0);
        let mut mean_coeff = SpectralField::zeros(self.grid);
        mean_coeff.set([0, 0, 0], u0.get([0, 0, 0]));
        let mut v = &u0 - &mean_coeff;
        let prop = self.propagator(m);
        let e0 = v.energy();
        let steps = self.cfg.steps();
        let guard = self.cfg.guard_threshold();
        let (mut dh, mut dv) = (0.0, 0.0);
        let mut rows = Vec::new();
        let mut snapshots = Vec::new();
        let mut blowup = false;
        let mut taken = 0;
        let mut cutoff = if self.mode == Mode::StochasticCutoff {
            self.nonlinear_weight(&u0)
        } else {
            1.0
        };

        let mut emit = |this: &Self,
                        v: &SpectralField,
                        step: u64,
                        defect: f64,
                        cutoff: f64,
                        rows: &mut Vec<RecordRow>,
                        snapshots: &mut Vec<_>|
         -> Result<()> {
            let full = v + &mean_coeff;
            let t = step as f64 * this.cfg.dt;
            let g = this.cfg.gamma;
            let p = this.cfg.p;
            let row = RecordRow {
                t,
                l2: full.energy().sqrt(),
                hr: sobolev_norm(&full, this.cfg.r),
                hgamma: sobolev_norm(&full, g),
                besov: besov_norm(&full, g * (1.0 - 2.0 / p), p)?,
                energy_defect: defect,
                cutoff_factor: cutoff,
            };
            if let Some(every) = this.cfg.snapshot_every {
                if rows.len().is_multiple_of(every) {
                    snapshots.push((t, full.to_snapshot()));
                }
            }
            observer(&Observation {
                index: rows.len(),
                step,
                row: &row,
                field: &full,
            });
            rows.push(row);
            Ok(())
        };

        let defect = |v: &SpectralField, dh: f64, dv: f64| {
            if e0 == 0.0 {
                0.0
            } else {
                (v.energy() + dh + dv - e0).abs() / e0
            }
        };

        emit(self, &v, 0, 0.0, cutoff, &mut rows, &mut snapshots)?;
        for step in 0..steps {
            let inc = self.increments(sample, step);
            let out = self.advance(&prop, &v, &mean_coeff, inc.as_ref(), step)?;
            v = out.field;
            dh += out.hyper;
            dv += out.visc;
            if self.mode == Mode::StochasticCutoff {
                cutoff = out.cutoff;
            }
            taken = step + 1;
            let crossed = guard.is_some_and(|g| sobolev_norm(&(&v + &mean_coeff), self.cfg.r) > g);
            if crossed || taken % self.cfg.record_every as u64 == 0 || taken == steps {
                emit(self, &v, taken, defect(&v, dh, dv), cutoff, &mut rows, &mut snapshots)?;
            }
            if crossed {
                blowup = true;
                break;
            }
        }
        Ok(TrajectoryRecord {
            rows,
            snapshots,
            blowup,
            steps_taken: taken,
            final_field: &v + &mean_coeff,
            gamma: self.cfg.gamma,
            p: self.cfg.p,
            r: self.cfg.r,
        })
    }

    /// One step from `v` with explicit increments (or none).
    pub fn step_once(&mut self, v: &SpectralField, inc: Option<&Increments>) -> Result<SpectralField> {
        v.require_divergence_free()?;
        let m = mean(v);
        let mut mean_coeff = SpectralField::zeros(self.grid);
        mean_coeff.set([0, 0, 0], v.get([0, 0, 0]));
        let prop = self.propagator(m);
        let vf = &dealias(v) - &mean_coeff;
        let out = self.advance(&prop, &vf, &mean_coeff, inc, 0)?;
        Ok(&out.field + &mean_coeff)
    }
}

/// One deterministic step of the configured system.
pub fn step_deterministic(v: &SpectralField, cfg: &SimConfig) -> Result<SpectralField> {
    Simulation::new(cfg, Mode::Deterministic)?.step_once(v, None)
}

/// One Itô step of the stochastic system driven by `increments`.
pub fn step_stochastic(
    v: &SpectralField,
    cfg: &SimConfig,
    increments: &Increments,
) -> Result<SpectralField> {
    let mode = if cfg.cutoff_radius.is_some() {
        Mode::StochasticCutoff
    } else {
        Mode::Stochastic
    };
    let mut sim = Simulation::new(cfg, mode)?;
    let inc = sim.noisy().then_some(increments);
    sim.step_once(v, inc)
}

/// Runs sample 0 of `cfg` from `v0`.
pub fn integrate(cfg: &SimConfig, v0: &SpectralField, mode: Mode) -> Result<TrajectoryRecord> {
    Simulation::new(cfg, mode)?.run(v0, 0)
}
