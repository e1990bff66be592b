use rayon::prelude::*;

use super::basis::NoiseBasis;
use super::theta::ThetaSpectrum;
use super::transport::{dot, require_basis_covers};
use crate::error::{Error, Result};
use crate::spectral::{
    add, as_real, is_positive_half, neg, norm2, norm_inf, CVec3, Grid, SpectralField, Wavevector,
    TWO_PI, ZERO3,
};

pub type Mat3 = [[f64; 3]; 3];

/// Which intermediate modes `j + k` take part in the corrector sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Every lattice mode.
    Lattice,
    /// Only modes with `|j + k|_∞ <= cutoff`, matching the transport
    /// operator on a grid with that dealias cutoff.
    Galerkin(i32),
}

/// Itô–Stratonovich corrector acting on mode `j`:
/// `(𝒫_θ v)^(j) = M(j) û(j)` with
/// `M(j) = -(3μ/2)(2π)² ℙ_j [Σ_{k,α} θ_k² (a_{k,α}·j)² ℙ_{j+k}] ℙ_j`.
pub fn corrector_matrix(
    j: Wavevector,
    theta: &ThetaSpectrum,
    basis: &NoiseBasis,
    mu: f64,
    truncation: Truncation,
) -> Mat3 {
    if j == [0, 0, 0] {
        return [[0.0; 3]; 3];
    }
    let jr = as_real(j);
    let mut diag = 0.0;
    let mut outer = [[0.0; 3]; 3];
    for &(k, t) in theta.entries() {
        let m = add(j, k);
        if let Truncation::Galerkin(cut) = truncation {
            if norm_inf(m) > cut {
                continue;
            }
        }
        let frame = basis.frame(k).expect("basis covers spectrum");
        let s = frame.iter().map(|a| dot(*a, jr).powi(2)).sum::<f64>();
        let w = t * t * s;
        diag += w;
        let mm = norm2(m);
        if mm == 0 {
            continue;
        }
        let mr = as_real(m);
        let f = w / mm as f64;
        for (r, row) in outer.iter_mut().enumerate() {
            for (c, entry) in row.iter_mut().enumerate() {
                *entry += f * mr[r] * mr[c];
            }
        }
    }
    let mut sum = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            sum[r][c] = if r == c { diag } else { 0.0 } - outer[r][c];
        }
    }
    let p = projector(j);
    let scale = -1.5 * mu * TWO_PI * TWO_PI;
    let mut out = matmul(&matmul(&p, &sum), &p);
    for row in &mut out {
        for e in row.iter_mut() {
            *e *= scale;
        }
    }
    out
}

fn projector(j: Wavevector) -> Mat3 {
    let jr = as_real(j);
    let jj = norm2(j) as f64;
    let mut p = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            p[r][c] = if r == c { 1.0 } else { 0.0 } - jr[r] * jr[c] / jj;
        }
    }
    p
}

fn matmul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = (0..3).map(|i| a[r][i] * b[i][c]).sum();
        }
    }
    out
}

#[inline]
pub(crate) fn apply_real(m: &Mat3, c: &CVec3) -> CVec3 {
    let mut out = ZERO3;
    for (r, row) in m.iter().enumerate() {
        out[r] = c[0] * row[0] + c[1] * row[1] + c[2] * row[2];
    }
    out
}

fn require_radial(theta: &ThetaSpectrum) -> Result<()> {
    if !theta.is_radially_symmetric() {
        return Err(Error::NonRadialTheta);
    }
    Ok(())
}

/// Corrector matrices for every mode of a grid's dealias cube, truncated in
/// the Galerkin sense. Matrices at `j` and `-j` are shared.
#[derive(Debug, Clone)]
pub struct CorrectorTable {
    grid: Grid,
    matrices: Vec<Mat3>,
}

impl CorrectorTable {
    pub fn build(grid: Grid, theta: &ThetaSpectrum, basis: &NoiseBasis, mu: f64) -> Result<Self> {
        require_radial(theta)?;
        require_basis_covers(theta, basis)?;
        let cut = grid.dealias_cutoff();
        let modes: Vec<Wavevector> = grid
            .dealiased_modes()
            .filter(|&k| is_positive_half(k))
            .collect();
        let computed: Vec<(Wavevector, Mat3)> = modes
            .par_iter()
            .map(|&j| (j, corrector_matrix(j, theta, basis, mu, Truncation::Galerkin(cut))))
            .collect();
        let mut matrices = vec![[[0.0; 3]; 3]; grid.lattice_len()];
        for (j, m) in computed {
            matrices[grid.index_unchecked(j)] = m;
            matrices[grid.index_unchecked(neg(j))] = m;
        }
        Ok(Self { grid, matrices })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn matrix(&self, j: Wavevector) -> Mat3 {
        self.grid
            .index(j)
            .map_or([[0.0; 3]; 3], |i| self.matrices[i])
    }

    pub fn apply(&self, v: &SpectralField) -> SpectralField {
        assert_eq!(v.grid(), self.grid, "corrector table built for another grid");
        let coeffs = v
            .coeffs()
            .iter()
            .zip(&self.matrices)
            .map(|(c, m)| apply_real(m, c))
            .collect();
        SpectralField::from_coeffs(self.grid, coeffs)
    }
}

/// `𝒫_θ v` on the Galerkin space of `v`'s grid.
pub fn corrector_apply(
    v: &SpectralField,
    theta: &ThetaSpectrum,
    basis: &NoiseBasis,
    mu: f64,
) -> Result<SpectralField> {
    v.require_divergence_free()?;
    Ok(CorrectorTable::build(v.grid(), theta, basis, mu)?.apply(v))
}

/// Relative `L²` distance between `𝒫_{θⁿ}φ` and `(3μ/5)Δφ` for the real
/// single-mode field `φ` built from `(j, a)`, using exact lattice sums.
/// `Δ` carries the symbol `-(2π)²|j|²`.
pub fn corrector_limit_error(
    j: Wavevector,
    amplitude: CVec3,
    n: u32,
    alpha_decay: f64,
    mu: f64,
) -> Result<f64> {
    if j == [0, 0, 0] {
        return Err(Error::InvalidParameter {
            name: "j",
            reason: "test mode must be nonzero".into(),
        });
    }
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter {
            name: "mu",
            reason: format!("must be positive for a relative error, got {mu}"),
        });
    }
    let jr = as_real(j);
    let anorm = amplitude.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let div = amplitude[0] * jr[0] + amplitude[1] * jr[1] + amplitude[2] * jr[2];
    if anorm == 0.0 || div.norm() > 1e-12 * anorm * (norm2(j) as f64).sqrt() {
        return Err(Error::InvalidParameter {
            name: "amplitude",
            reason: "must be nonzero and orthogonal to j".into(),
        });
    }
    let theta = ThetaSpectrum::shell(n, alpha_decay)?;
    let basis = NoiseBasis::build(2 * n as i32)?;
    let m = corrector_matrix(j, &theta, &basis, mu, Truncation::Lattice);
    let got = apply_real(&m, &amplitude);
    let lap = -0.6 * mu * TWO_PI * TWO_PI * norm2(j) as f64;
    let err: f64 = (0..3)
        .map(|d| (got[d] - amplitude[d] * lap).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(err / (lap.abs() * anorm))
}
