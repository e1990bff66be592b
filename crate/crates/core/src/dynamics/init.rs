use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    helmholtz_project, is_positive_half, norm2, CVec3, Grid, SpectralField, Wavevector, ZERO3,
};

/// Initial data of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    /// Gaussian coefficients on `0 < |k| <= band` with amplitude `|k|^{-slope}`,
    /// projected and scaled to `‖v‖_{L²} = l2`.
    RandomBand {
        band: f64,
        #[serde(default)]
        slope: f64,
        l2: f64,
        seed: u64,
        #[serde(default)]
        mean: [f64; 3],
    },
    /// Explicit modes; conjugate partners are filled in and the result is
    /// projected.
    Modes { modes: Vec<ModeSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub k: Wavevector,
    pub re: [f64; 3],
    #[serde(default)]
    pub im: [f64; 3],
}

impl InitialCondition {
    pub fn build(&self, grid: Grid) -> Result<SpectralField> {
        match self {
            InitialCondition::RandomBand {
                band,
                slope,
                l2,
                seed,
                mean,
            } => {
                if !(*band >= 1.0) || !(*l2 >= 0.0) {
                    return Err(Error::InvalidParameter {
                        name: "init",
                        reason: format!("need band >= 1 and l2 >= 0, got band {band}, l2 {l2}"),
                    });
                }
                let mut v = random_field(grid, *band, *slope, *seed)?.scale(*l2);
                let c = mean.map(|m| Complex64::new(m, 0.0));
                v.set([0, 0, 0], c);
                Ok(v)
            }
            InitialCondition::Modes { modes } => {
                let list: Vec<(Wavevector, CVec3)> = modes
                    .iter()
                    .map(|m| {
                        (
                            m.k,
                            [0, 1, 2].map(|d| Complex64::new(m.re[d], m.im[d])),
                        )
                    })
                    .collect();
                Ok(helmholtz_project(&SpectralField::from_modes(grid, &list)?))
            }
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
    let u2 = ((rng.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Random real divergence-free mean-zero field on `0 < |k| <= band` with
/// `‖v‖_{L²} = 1`. Deterministic in `seed`.
pub fn random_field(grid: Grid, band: f64, slope: f64, seed: u64) -> Result<SpectralField> {
    let cut = grid.dealias_cutoff();
    if band > cut as f64 {
        return Err(Error::InvalidParameter {
            name: "band",
            reason: format!("band {band} exceeds the dealias cutoff {cut}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut modes = Vec::new();
    let bb = band * band;
    for k in grid.dealiased_modes() {
        let kk = norm2(k) as f64;
        if k == [0, 0, 0] || kk > bb || !is_positive_half(k) {
            continue;
        }
        let amp = kk.powf(-slope / 2.0);
        let mut c = ZERO3;
        for z in &mut c {
            *z = Complex64::new(normal(&mut rng), normal(&mut rng)) * amp;
        }
        modes.push((k, c));
    }
    let v = helmholtz_project(&SpectralField::from_modes(grid, &modes)?);
    let e = v.energy();
    if e == 0.0 {
        return Ok(v);
    }
    Ok(v.scale(1.0 / e.sqrt()))
}
