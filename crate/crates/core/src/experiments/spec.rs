use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dynamics::{critical_exponents, InitialCondition, SimConfig, ThetaChoice};
use crate::error::{Error, Result};
use crate::spectral::{norm2, Wavevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    CorrectorConvergence,
    EnergyAudit,
    Decay,
    ScalingLimit,
    Survival,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::CorrectorConvergence => "corrector-convergence",
            Kind::EnergyAudit => "energy-audit",
            Kind::Decay => "decay",
            Kind::ScalingLimit => "scaling-limit",
            Kind::Survival => "survival",
        }
    }
}

/// One experiment document. Sweep lists left out default to the single
/// value found in `sim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub kind: Option<Kind>,
    #[serde(default = "one")]
    pub samples: u64,
    #[serde(default = "default_outdir")]
    pub outdir: PathBuf,
    #[serde(default)]
    pub n_values: Option<Vec<u32>>,
    #[serde(default)]
    pub mu_values: Option<Vec<f64>>,
    #[serde(default)]
    pub dt_values: Option<Vec<f64>>,
    /// Test modes of the corrector experiment.
    #[serde(default = "default_modes")]
    pub modes: Vec<Wavevector>,
    /// Sobolev index of the scaling-limit distance.
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_alpha")]
    pub alpha_decay: f64,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default = "default_init")]
    pub init: InitialCondition,
}

fn one() -> u64 {
    1
}
fn default_outdir() -> PathBuf {
    PathBuf::from("out")
}
fn default_modes() -> Vec<Wavevector> {
    vec![[1, 0, 0]]
}
fn default_r0() -> f64 {
    0.4
}
fn default_alpha() -> f64 {
    1.0
}
fn default_init() -> InitialCondition {
    InitialCondition::RandomBand {
        band: 3.0,
        slope: 1.0,
        l2: 1.0,
        seed: 1,
        mean: [0.0; 3],
    }
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            kind: None,
            samples: 1,
            outdir: default_outdir(),
            n_values: None,
            mu_values: None,
            dt_values: None,
            modes: default_modes(),
            r0: default_r0(),
            alpha_decay: default_alpha(),
            sim: SimConfig::default(),
            init: default_init(),
        }
    }
}

fn rule(rule: &'static str, detail: String) -> Error {
    Error::Validation { rule, detail }
}

fn nonempty<T: Clone>(name: &'static str, list: &Option<Vec<T>>, fallback: T) -> Result<Vec<T>> {
    match list {
        None => Ok(vec![fallback]),
        Some(v) if v.is_empty() => Err(rule("sweep lists nonempty", format!("{name} is empty"))),
        Some(v) => Ok(v.clone()),
    }
}

impl ExperimentSpec {
    pub fn from_toml(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// Reads TOML, or JSON when the path ends in `.json`.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    pub fn n_list(&self) -> Result<Vec<u32>> {
        let fallback = match self.sim.theta {
            ThetaChoice::Shell { n, .. } => n,
            _ => 2,
        };
        nonempty("n_values", &self.n_values, fallback)
    }

    pub fn mu_list(&self) -> Result<Vec<f64>> {
        nonempty("mu_values", &self.mu_values, self.sim.mu)
    }

    pub fn dt_list(&self) -> Result<Vec<f64>> {
        nonempty("dt_values", &self.dt_values, self.sim.dt)
    }

    /// Simulation config for shell `n` (when given) and viscosity parameter `mu`.
    pub fn sim_for(&self, n: Option<u32>, mu: f64) -> SimConfig {
        let mut cfg = self.sim.clone();
        cfg.mu = mu;
        if let Some(n) = n {
            cfg.theta = ThetaChoice::Shell {
                n,
                alpha_decay: self.alpha_decay,
            };
        }
        cfg
    }

    /// Checks the rules of `kind`, including every config the sweep will build.
    pub fn validate(&self, kind: Kind) -> Result<()> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(rule(
                    "kind",
                    format!("document is a {} experiment, asked for {}", k.name(), kind.name()),
                ));
            }
        }
        if self.samples < 1 {
            return Err(rule("M >= 1", "samples = 0".into()));
        }
        let ns = self.n_list()?;
        let mus = self.mu_list()?;
        let dts = self.dt_list()?;
        if !(self.alpha_decay > 0.0) {
            return Err(rule("alpha_decay > 0", format!("alpha_decay = {}", self.alpha_decay)));
        }
        match kind {
            Kind::CorrectorConvergence => {
                if self.modes.is_empty() {
                    return Err(rule("sweep lists nonempty", "modes is empty".into()));
                }
                let min_n = *ns.iter().min().expect("nonempty");
                for &j in &self.modes {
                    if j == [0, 0, 0] {
                        return Err(rule("test mode nonzero", "j = 0".into()));
                    }
                    if norm2(j) as f64 > (min_n as f64).powi(2) {
                        return Err(rule(
                            "|j| <= min n",
                            format!("test mode {j:?} is not small against shell {min_n}"),
                        ));
                    }
                }
                for &mu in &mus {
                    if !(mu > 0.0) {
                        return Err(rule("mu > 0", format!("mu = {mu}")));
                    }
                }
                for &n in &ns {
                    if n < 1 {
                        return Err(rule("n >= 1", "shell index 0".into()));
                    }
                }
            }
            Kind::EnergyAudit => {
                let finest = dts.iter().cloned().fold(f64::INFINITY, f64::min);
                for &dt in &dts {
                    let mut cfg = self.sim.clone();
                    cfg.dt = dt;
                    cfg.brownian_dt = Some(finest);
                    cfg.validate()?;
                }
            }
            Kind::Decay => {
                self.sim.validate()?;
            }
            Kind::ScalingLimit => {
                let ex = critical_exponents(self.sim.gamma)?;
                let p = self.sim.p;
                let top = ex.trace_index(p);
                if !(p > ex.p_critical) {
                    return Err(rule("p > p_c", format!("p = {p}, p_c = {}", ex.p_critical)));
                }
                if !(ex.delta < self.sim.r && self.sim.r < top) {
                    return Err(rule(
                        "5/2 - 2γ < r < γ(1 - 2/p)",
                        format!("r = {} outside ({}, {top})", self.sim.r, ex.delta),
                    ));
                }
                if !(self.r0 < top) {
                    return Err(rule("r0 < γ(1 - 2/p)", format!("r0 = {} >= {top}", self.r0)));
                }
                for &n in &ns {
                    for &mu in &mus {
                        self.sim_for(Some(n), mu).validate()?;
                    }
                }
            }
            Kind::Survival => {
                if self.sim.cutoff_radius.is_some() {
                    return Err(rule("survival without cut-off", "cutoff_radius is set".into()));
                }
                if self.sim.guard.is_none() {
                    return Err(rule("guard configured", "survival needs sim.guard".into()));
                }
                for &n in &ns {
                    for &mu in &mus {
                        self.sim_for(Some(n), mu).validate()?;
                    }
                }
            }
        }
        Ok(())
    }
}
