use num_complex::Complex64;

use super::grid::{norm2, norm_inf, Wavevector};
use super::{cnorm2, dot_real, CVec3, SpectralField, TWO_PI, ZERO3};
use crate::error::{Error, Result};

/// Value of a Fourier multiplier at one wavevector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symbol {
    Scalar(Complex64),
    Matrix([[Complex64; 3]; 3]),
}

impl Symbol {
    #[inline]
    pub fn apply(&self, c: CVec3) -> CVec3 {
        match self {
            Symbol::Scalar(s) => [c[0] * s, c[1] * s, c[2] * s],
            Symbol::Matrix(m) => {
                let mut out = ZERO3;
                for (i, row) in m.iter().enumerate() {
                    out[i] = row[0] * c[0] + row[1] * c[1] + row[2] * c[2];
                }
                out
            }
        }
    }
}

/// Modewise linear operator `û(k) ↦ symbol(k) û(k)`.
///
/// Conjugate symmetry of the input is preserved whenever
/// `symbol(-k) = conj symbol(k)`.
pub struct MultiplierOp {
    symbol: Box<dyn Fn(Wavevector) -> Symbol + Send + Sync>,
}

impl MultiplierOp {
    pub fn new(symbol: impl Fn(Wavevector) -> Symbol + Send + Sync + 'static) -> Self {
        Self {
            symbol: Box::new(symbol),
        }
    }

    pub fn symbol(&self, k: Wavevector) -> Symbol {
        (self.symbol)(k)
    }

    pub fn apply(&self, f: &SpectralField) -> SpectralField {
        f.map_modes(|k, c| (self.symbol)(k).apply(c))
    }

    /// Leray projection `I - k kᵀ/|k|²`, identity at `k = 0`.
    pub fn helmholtz() -> Self {
        Self::new(|k| {
            let kk = norm2(k) as f64;
            let mut m = [[Complex64::new(0.0, 0.0); 3]; 3];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = Complex64::new(1.0, 0.0);
                if kk > 0.0 {
                    for (j, entry) in row.iter_mut().enumerate() {
                        *entry -= (k[i] as f64) * (k[j] as f64) / kk;
                    }
                }
            }
            Symbol::Matrix(m)
        })
    }

    pub fn fractional_laplacian(gamma: f64) -> Self {
        Self::new(move |k| {
            let kk = norm2(k) as f64;
            Symbol::Scalar(Complex64::new(if kk == 0.0 { 0.0 } else { kk.powf(gamma) }, 0.0))
        })
    }

    pub fn constant_drift(w: [f64; 3]) -> Self {
        Self::new(move |k| {
            let wk = w[0] * k[0] as f64 + w[1] * k[1] as f64 + w[2] * k[2] as f64;
            Symbol::Scalar(Complex64::new(0.0, TWO_PI * wk))
        })
    }
}

/// Leray projection of a single coefficient.
#[inline]
pub fn project_mode(k: Wavevector, c: CVec3) -> CVec3 {
    let kk = norm2(k);
    if kk == 0 {
        return c;
    }
    let kr = [k[0] as f64, k[1] as f64, k[2] as f64];
    let s = dot_real(&c, kr) / kk as f64;
    [c[0] - s * kr[0], c[1] - s * kr[1], c[2] - s * kr[2]]
}

pub fn helmholtz_project(f: &SpectralField) -> SpectralField {
    f.map_modes(project_mode)
}

/// Gradient part `(I - ℙ) f`.
pub fn gradient_part(f: &SpectralField) -> SpectralField {
    f.map_modes(|k, c| {
        let p = project_mode(k, c);
        [c[0] - p[0], c[1] - p[1], c[2] - p[2]]
    })
}

/// `û(k) ↦ |k|^{2γ} û(k)`.
pub fn fractional_laplacian(f: &SpectralField, gamma: f64) -> Result<SpectralField> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: format!("must be positive, got {gamma}"),
        });
    }
    Ok(MultiplierOp::fractional_laplacian(gamma).apply(f))
}

/// `(w·∇) f`, i.e. `û(k) ↦ 2πi (w·k) û(k)`.
pub fn constant_drift(f: &SpectralField, w: [f64; 3]) -> SpectralField {
    MultiplierOp::constant_drift(w).apply(f)
}

/// Bessel-potential norm `(Σ_k (1+|k|²)^s |û(k)|²)^{1/2}`.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let g = f.grid();
    f.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let e = cnorm2(c);
            if e == 0.0 {
                return 0.0;
            }
            let kk = norm2(g.wavevector(i)) as f64;
            (1.0 + kk).powf(s) * e
        })
        .sum::<f64>()
        .sqrt()
}

/// Dyadic block index: `0` for `|k| <= 1`, otherwise the `j` with
/// `2^{j-1} <= |k| < 2^j`. Computed in integer arithmetic on `|k|²`.
pub fn dyadic_block(k: Wavevector) -> usize {
    let kk = norm2(k);
    if kk <= 1 {
        return 0;
    }
    let mut j = 1usize;
    while kk >= 1i64 << (2 * j) {
        j += 1;
    }
    j
}

/// Littlewood–Paley Besov norm `(Σ_j 2^{jsp} ‖Δ_j f‖₂^p)^{1/p}` with sharp
/// dyadic blocks (see [`dyadic_block`]). Equivalent, up to constants, to the
/// `B^s_{2,p}` norm.
pub fn besov_norm(f: &SpectralField, s: f64, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            reason: format!("must lie in (1, inf), got {p}"),
        });
    }
    let g = f.grid();
    let mut blocks: Vec<f64> = Vec::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        let e = cnorm2(c);
        if e == 0.0 {
            continue;
        }
        let j = dyadic_block(g.wavevector(i));
        if blocks.len() <= j {
            blocks.resize(j + 1, 0.0);
        }
        blocks[j] += e;
    }
    let sum: f64 = blocks
        .iter()
        .enumerate()
        .map(|(j, &e)| (2f64.powf(j as f64 * s) * e.sqrt()).powf(p))
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// 2/3-rule truncation: zeroes every coefficient with `max_i |k_i| > floor(N/3)`.
pub fn dealias(f: &SpectralField) -> SpectralField {
    let cut = f.grid().dealias_cutoff();
    f.map_modes(|k, c| if norm_inf(k) > cut { ZERO3 } else { c })
}

/// Spatial mean, i.e. the real part of `û(0)`.
pub fn mean(f: &SpectralField) -> [f64; 3] {
    let c = f.get([0, 0, 0]);
    [c[0].re, c[1].re, c[2].re]
}

pub fn subtract_mean(f: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    out.set([0, 0, 0], ZERO3);
    out
}
