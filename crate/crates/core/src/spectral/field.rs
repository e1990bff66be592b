use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{is_positive_half, neg, norm2, Grid, Wavevector};
use super::{cnorm2, CVec3, ZERO3};
use crate::error::{Error, Result};

/// Vector field on the 3-torus stored through its Fourier coefficients
/// `û(k)`, `|k_i| <= N/2`.
///
/// Fields produced by [`SpectralField::from_modes`] and by the real-valued
/// operators are conjugate symmetric (`û(-k) = conj û(k)`). Single-mode
/// transport terms are complex intermediates and are not.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<CVec3>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO3; grid.lattice_len()],
        }
    }

    /// Builds a real field from a list of modes, completing each entry with
    /// its conjugate partner.
    pub fn from_modes(grid: Grid, modes: &[(Wavevector, CVec3)]) -> Result<Self> {
        let mut field = Self::zeros(grid);
        let mut assigned = vec![false; grid.lattice_len()];
        for &(k, a) in modes {
            let idx = grid.index(k).ok_or(Error::OutOfRange {
                k,
                half: grid.half(),
            })?;
            let nidx = grid.index_unchecked(neg(k));
            let conj = [a[0].conj(), a[1].conj(), a[2].conj()];
            if idx == nidx && a.iter().any(|c| c.im != 0.0) {
                return Err(Error::ConjugateConflict { k });
            }
            let targets: &[(usize, CVec3)] = if idx == nidx {
                &[(idx, a)]
            } else {
                &[(idx, a), (nidx, conj)]
            };
            for &(slot, value) in targets {
                if assigned[slot] && field.coeffs[slot] != value {
                    return Err(Error::ConjugateConflict { k });
                }
                field.coeffs[slot] = value;
                assigned[slot] = true;
            }
        }
        Ok(field)
    }

    pub(crate) fn from_coeffs(grid: Grid, coeffs: Vec<CVec3>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.lattice_len());
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[CVec3] {
        &self.coeffs
    }

    /// Coefficient at `k`; zero outside the stored lattice.
    pub fn get(&self, k: Wavevector) -> CVec3 {
        self.grid.index(k).map_or(ZERO3, |i| self.coeffs[i])
    }

    pub(crate) fn set(&mut self, k: Wavevector, value: CVec3) {
        let idx = self.grid.index_unchecked(k);
        self.coeffs[idx] = value;
    }

    /// Iterates over `(k, û(k))` for every nonzero coefficient.
    pub fn modes(&self) -> impl Iterator<Item = (Wavevector, CVec3)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.iter().any(|z| z.re != 0.0 || z.im != 0.0))
            .map(|(i, c)| (self.grid.wavevector(i), *c))
    }

    /// Applies `f(k, û(k))` to every coefficient.
    pub fn map_modes(&self, mut f: impl FnMut(Wavevector, CVec3) -> CVec3) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(self.grid.wavevector(i), c))
            .collect();
        Self::from_coeffs(self.grid, coeffs)
    }

    /// Complex `L²` inner product `Σ_k û(k)·conj(v̂(k))`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.grid, other.grid, "inner product across grids");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a[0] * b[0].conj() + a[1] * b[1].conj() + a[2] * b[2].conj())
            .sum()
    }

    /// `‖u‖²_{L²}` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(cnorm2).sum()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| cnorm2(c).sqrt())
            .fold(0.0, f64::max)
    }

    /// `max_k |k·û(k)| / (|k| max_j |û(j)|)`, zero for the zero field.
    pub fn relative_divergence(&self) -> f64 {
        let scale = self.max_amplitude();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavevector(i);
            let kk = norm2(k);
            if kk == 0 {
                continue;
            }
            let div = c[0] * k[0] as f64 + c[1] * k[1] as f64 + c[2] * k[2] as f64;
            worst = worst.max(div.norm() / (kk as f64).sqrt());
        }
        worst / scale
    }

    pub(crate) fn require_divergence_free(&self) -> Result<()> {
        let div = self.relative_divergence();
        if div > DIVERGENCE_TOL {
            return Err(Error::NotDivergenceFree(div));
        }
        Ok(())
    }

    /// `max_k |û(-k) - conj û(k)| / max|û|`.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let scale = self.max_amplitude();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.grid.wavevector(i);
            let m = self.coeffs[self.grid.index_unchecked(neg(k))];
            for d in 0..3 {
                worst = worst.max((m[d] - c[d].conj()).norm());
            }
        }
        worst / scale
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_modes(|_, c| [c[0] * s, c[1] * s, c[2] * s])
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        self.map_modes(|_, c| [c[0] * s, c[1] * s, c[2] * s])
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: Complex64, other: &Self) {
        assert_eq!(self.grid, other.grid, "axpy across grids");
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for d in 0..3 {
                a[d] += s * b[d];
            }
        }
    }

    pub fn to_snapshot(&self) -> Snapshot {
        let modes = self
            .modes()
            .filter(|(k, _)| *k == [0, 0, 0] || is_positive_half(*k))
            .map(|(k, c)| SnapshotMode {
                k,
                re: [c[0].re, c[1].re, c[2].re],
                im: [c[0].im, c[1].im, c[2].im],
            })
            .collect();
        Snapshot {
            points: self.grid.points(),
            modes,
        }
    }

    pub fn from_snapshot(snapshot: &Snapshot) -> Result<Self> {
        let grid = Grid::new(snapshot.points)?;
        let modes: Vec<(Wavevector, CVec3)> = snapshot
            .modes
            .iter()
            .map(|m| {
                let c = [0, 1, 2].map(|d| Complex64::new(m.re[d], m.im[d]));
                (m.k, c)
            })
            .collect();
        Self::from_modes(grid, &modes)
    }
}

/// Relative divergence above which operators reject their input.
pub const DIVERGENCE_TOL: f64 = 1e-9;

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scale(rhs)
    }
}

/// Serialized form of a real field: the nonredundant half-lattice plus the
/// grid size. JSON round-trips are bit-exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub points: usize,
    pub modes: Vec<SnapshotMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMode {
    pub k: Wavevector,
    pub re: [f64; 3],
    pub im: [f64; 3],
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_mode_completes_conjugate() {
        let g = Grid::new(16).unwrap();
        let a = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        let f = SpectralField::from_modes(g, &[([1, 0, 0], a)]).unwrap();
        assert_eq!(f.modes().count(), 2);
        assert_eq!(f.get([-1, 0, 0]), [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);

        let b = [c(0.0, 2.0), c(1.0, -1.0), c(0.5, 0.0)];
        let f = SpectralField::from_modes(g, &[([1, 2, 3], b)]).unwrap();
        assert_eq!(f.get([-1, -2, -3]), b.map(|z| z.conj()));
        assert_eq!(f.conjugate_asymmetry(), 0.0);
    }

    #[test]
    fn empty_mode_list_is_zero() {
        let g = Grid::new(16).unwrap();
        let f = SpectralField::from_modes(g, &[]).unwrap();
        assert_eq!(f, SpectralField::zeros(g));
        assert_eq!(f.energy(), 0.0);
    }

    #[test]
    fn out_of_range_mode_is_rejected() {
        let g = Grid::new(16).unwrap();
        let a = [c(1.0, 0.0); 3];
        match SpectralField::from_modes(g, &[([9, 0, 0], a)]) {
            Err(Error::OutOfRange { k, .. }) => assert_eq!(k, [9, 0, 0]),
            other => panic!("expected OutOfRange, got {other:?}"),
        }
        assert!(SpectralField::from_modes(g, &[([8, 0, 0], a)]).is_ok());
    }

    #[test]
    fn conflicting_conjugates_are_rejected() {
        let g = Grid::new(16).unwrap();
        let a = [c(1.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)];
        let res = SpectralField::from_modes(g, &[([1, 0, 0], a), ([-1, 0, 0], a)]);
        assert!(matches!(res, Err(Error::ConjugateConflict { .. })));
        let conj = a.map(|z| z.conj());
        assert!(SpectralField::from_modes(g, &[([1, 0, 0], a), ([-1, 0, 0], conj)]).is_ok());
        // Self-conjugate sites must carry real amplitudes.
        let res = SpectralField::from_modes(g, &[([0, 0, 0], a)]);
        assert!(matches!(res, Err(Error::ConjugateConflict { .. })));
    }

    #[test]
    fn snapshot_roundtrip_is_bit_exact() {
        let g = Grid::new(8).unwrap();
        let modes = vec![
            ([0, 0, 0], [c(0.1, 0.0), c(-0.2, 0.0), c(1.0 / 3.0, 0.0)]),
            ([1, -2, 3], [c(std::f64::consts::PI, 1e-300), c(-0.0, 2.5), c(7e10, -1.0 / 7.0)]),
            ([0, 4, -1], [c(1.0, 1.0), c(0.3, 0.7), c(0.0, -0.9)]),
        ];
        let f = SpectralField::from_modes(g, &modes).unwrap();
        let json = serde_json::to_string(&f.to_snapshot()).unwrap();
        let back: Snapshot = serde_json::from_str(&json).unwrap();
        let g2 = SpectralField::from_snapshot(&back).unwrap();
        for (a, b) in f.coeffs().iter().zip(g2.coeffs()) {
            for d in 0..3 {
                assert_eq!(a[d].re.to_bits(), b[d].re.to_bits());
                assert_eq!(a[d].im.to_bits(), b[d].im.to_bits());
            }
        }
    }
}
