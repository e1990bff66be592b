use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::{ThetaEntry, ThetaSpectrum};
use crate::spectral::Grid;

/// Noise spectrum selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ThetaChoice {
    #[default]
    None,
    Shell {
        n: u32,
        #[serde(default = "one")]
        alpha_decay: f64,
    },
    Explicit {
        entries: Vec<ThetaEntry>,
    },
}

fn one() -> f64 {
    1.0
}

/// Extra Newtonian damping in deterministic runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Viscosity {
    /// Plain hyperviscous equation.
    #[default]
    None,
    /// `-μΔ`.
    Plain,
    /// `-(3μ/5)Δ`, the large-shell limit of the corrector.
    NoiseLimit,
}

impl Viscosity {
    pub fn coefficient(self, mu: f64) -> f64 {
        match self {
            Viscosity::None => 0.0,
            Viscosity::Plain => mu,
            Viscosity::NoiseLimit => 0.6 * mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Integrating-factor Euler (Euler–Maruyama for the noise).
    #[default]
    Euler,
    /// Two-stage integrating-factor Heun.
    Rk2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseAssembly {
    PerMode,
    #[default]
    PseudoSpectral,
}

/// All parameters of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub gamma: f64,
    pub mu: f64,
    /// Grid points per axis.
    pub grid: usize,
    pub dt: f64,
    /// Horizon `T`.
    pub t_end: f64,
    pub theta: ThetaChoice,
    /// Sobolev index of the cut-off and the recorded `H^r` norm.
    pub r: f64,
    /// Cut-off radius `R`; `None` disables the cut-off.
    pub cutoff_radius: Option<f64>,
    /// Stop when `‖v‖_{H^r}` exceeds this value. Defaults to `10 R` with a
    /// cut-off radius and to no guard otherwise.
    pub guard: Option<f64>,
    /// Extra constant drift added to the mean of the initial data.
    pub drift: [f64; 3],
    /// Integrability exponent of the recorded Besov norm and functionals.
    pub p: f64,
    pub seed: u64,
    pub scheme: Scheme,
    pub viscosity: Viscosity,
    pub nonlinearity: bool,
    pub noise_assembly: NoiseAssembly,
    /// Brownian paths are sampled on this finer step and summed, so runs at
    /// different `dt` share paths. Must divide `dt`.
    pub brownian_dt: Option<f64>,
    /// Steps between recorded rows.
    pub record_every: usize,
    /// Records between stored field snapshots; `None` stores none.
    pub snapshot_every: Option<usize>,
    /// Bound on `dt·2πK·Σ|û|`.
    pub cfl_bound: f64,
    /// Bound on `dt·(3μ/2)Σθ_k²(2π|k|)²`.
    pub noise_bound: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            gamma: 1.125,
            mu: 1.0,
            grid: 32,
            dt: 1e-3,
            t_end: 1.0,
            theta: ThetaChoice::None,
            r: 0.3,
            cutoff_radius: None,
            guard: None,
            drift: [0.0; 3],
            p: 4.0,
            seed: 0,
            scheme: Scheme::Euler,
            viscosity: Viscosity::None,
            nonlinearity: true,
            noise_assembly: NoiseAssembly::PseudoSpectral,
            brownian_dt: None,
            record_every: 10,
            snapshot_every: None,
            cfl_bound: 2.0,
            noise_bound: 10.0,
        }
    }
}

fn rule(rule: &'static str, detail: String) -> Error {
    Error::Validation { rule, detail }
}

impl SimConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid).map_err(|e| rule("grid", e.to_string()))
    }

    pub fn theta_spectrum(&self) -> Result<ThetaSpectrum> {
        match &self.theta {
            ThetaChoice::None => Ok(ThetaSpectrum::empty()),
            ThetaChoice::Shell { n, alpha_decay } => ThetaSpectrum::shell(*n, *alpha_decay),
            ThetaChoice::Explicit { entries } => {
                ThetaSpectrum::from_entries(entries.iter().map(|e| (e.k, e.theta)).collect())
            }
        }
    }

    /// Number of steps to reach `t_end`; `t_end` is rounded to a whole
    /// number of steps.
    pub fn steps(&self) -> u64 {
        ((self.t_end / self.dt) + 1e-9).floor().max(1.0) as u64
    }

    pub fn guard_threshold(&self) -> Option<f64> {
        self.guard.or(self.cutoff_radius.map(|r| 10.0 * r))
    }

    /// Brownian substeps per time step.
    pub fn brownian_substeps(&self) -> Result<u64> {
        let Some(b) = self.brownian_dt else {
            return Ok(1);
        };
        let m = (self.dt / b).round();
        if !(b > 0.0) || m < 1.0 || ((m * b - self.dt).abs() > 1e-9 * self.dt) {
            return Err(rule(
                "brownian_dt",
                format!("brownian_dt = {b} must be positive and divide dt = {}", self.dt),
            ));
        }
        Ok(m as u64)
    }

    /// Checks every rule a run depends on. Does not check experiment-level
    /// exponent windows.
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(rule("gamma > 1", format!("gamma = {}", self.gamma)));
        }
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(rule("mu >= 0", format!("mu = {}", self.mu)));
        }
        let grid = self.grid()?;
        let k = grid.dealias_cutoff();
        if k < 2 {
            return Err(rule("K >= 2", format!("dealias cutoff {k}")));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(rule("dt > 0", format!("dt = {}", self.dt)));
        }
        if !(self.t_end >= self.dt) {
            return Err(rule("T >= dt", format!("T = {}, dt = {}", self.t_end, self.dt)));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(rule("p > 1", format!("p = {}", self.p)));
        }
        if !self.r.is_finite() {
            return Err(rule("r finite", format!("r = {}", self.r)));
        }
        if let Some(radius) = self.cutoff_radius {
            if !(radius > 0.0) {
                return Err(rule("R > 0", format!("R = {radius}")));
            }
        }
        if let Some(g) = self.guard {
            if !(g > 0.0) {
                return Err(rule("guard > 0", format!("guard = {g}")));
            }
        }
        if self.drift.iter().any(|w| !w.is_finite()) {
            return Err(rule("drift finite", format!("{:?}", self.drift)));
        }
        if self.record_every < 1 {
            return Err(rule("record_every >= 1", "record_every = 0".into()));
        }
        if self.snapshot_every == Some(0) {
            return Err(rule("snapshot_every >= 1", "snapshot_every = 0".into()));
        }
        if !(self.cfl_bound > 0.0) || !(self.noise_bound > 0.0) {
            return Err(rule("stability bounds > 0", "cfl_bound and noise_bound must be positive".into()));
        }
        self.brownian_substeps()?;
        match &self.theta {
            ThetaChoice::None => {}
            ThetaChoice::Shell { n, .. } => {
                let need = 2 * *n as i64 + 2;
                if (k as i64) < need {
                    return Err(rule(
                        "N/3 >= 2n + 2",
                        format!("grid {} gives K = {k}, shell n = {n} needs K >= {need}", self.grid),
                    ));
                }
            }
            ThetaChoice::Explicit { .. } => {}
        }
        let theta = self
            .theta_spectrum()
            .map_err(|e| rule("theta", e.to_string()))?;
        if !theta.is_empty() {
            if let ThetaChoice::Explicit { .. } = self.theta {
                let need = theta.max_norm_inf() + 2;
                if k < need {
                    return Err(rule(
                        "N/3 >= max|k| + 2",
                        format!("grid {} gives K = {k}, spectrum needs K >= {need}", self.grid),
                    ));
                }
            }
            if !theta.is_radially_symmetric() {
                return Err(rule("theta radially symmetric", "explicit spectrum is not radial".into()));
            }
            let intensity = self.dt * theta.transport_intensity(self.mu);
            if intensity > self.noise_bound {
                return Err(rule(
                    "noise stability",
                    format!(
                        "dt * transport intensity = {intensity:.3e} exceeds {}",
                        self.noise_bound
                    ),
                ));
            }
            if self.viscosity != Viscosity::None {
                return Err(rule(
                    "viscosity with noise",
                    "extra viscosity applies to deterministic runs only".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }
}
