use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{Grid, Wavevector};
use super::{project_mode, CVec3, SpectralField, TWO_PI, ZERO3};

/// Per-worker FFT plans and scratch for moving between coefficients and
/// grid values. Real fields are transformed two at a time by packing them
/// into the real and imaginary parts of one complex transform.
pub struct Transformer {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    buf: Vec<Complex64>,
    tmp: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Transformer {
    pub fn new(grid: Grid) -> Self {
        let n = grid.points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            grid,
            forward,
            inverse,
            buf: vec![Complex64::default(); n * n * n],
            tmp: vec![Complex64::default(); n * n * n],
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    fn slot(&self, k: Wavevector) -> usize {
        let n = self.grid.points() as i32;
        let w = |c: i32| c.rem_euclid(n) as usize;
        let n = n as usize;
        (w(k[0]) * n + w(k[1])) * n + w(k[2])
    }

    fn fft3(&mut self, inverse: bool) {
        let n = self.grid.points();
        let plan = if inverse { &self.inverse } else { &self.forward };
        // axis 2 is contiguous
        plan.process_with_scratch(&mut self.buf, &mut self.scratch);
        // axis 1
        for x in 0..n {
            let base = x * n * n;
            for y in 0..n {
                for z in 0..n {
                    self.tmp[base + z * n + y] = self.buf[base + y * n + z];
                }
            }
        }
        plan.process_with_scratch(&mut self.tmp, &mut self.scratch);
        for x in 0..n {
            let base = x * n * n;
            for y in 0..n {
                for z in 0..n {
                    self.buf[base + y * n + z] = self.tmp[base + z * n + y];
                }
            }
        }
        // axis 0
        for x in 0..n {
            for yz in 0..n * n {
                self.tmp[yz * n + x] = self.buf[x * n * n + yz];
            }
        }
        plan.process_with_scratch(&mut self.tmp, &mut self.scratch);
        for x in 0..n {
            for yz in 0..n * n {
                self.buf[x * n * n + yz] = self.tmp[yz * n + x];
            }
        }
    }

    /// Grid values of the real scalar fields with spectra `a` and `b`,
    /// evaluated on `|k|_∞ <= cutoff`.
    fn inverse_pair(
        &mut self,
        cutoff: i32,
        a: impl Fn(usize) -> Complex64,
        b: impl Fn(usize) -> Complex64,
    ) -> (Vec<f64>, Vec<f64>) {
        self.buf.fill(Complex64::default());
        let i = Complex64::new(0.0, 1.0);
        for k in cube(cutoff) {
            let idx = self.grid.index_unchecked(k);
            let slot = self.slot(k);
            self.buf[slot] += a(idx) + i * b(idx);
        }
        self.fft3(true);
        let re = self.buf.iter().map(|z| z.re).collect();
        let im = self.buf.iter().map(|z| z.im).collect();
        (re, im)
    }

    /// Fourier coefficients (lattice layout, zero outside `|k|_∞ <= cutoff`)
    /// of two real grid fields.
    fn forward_pair(
        &mut self,
        cutoff: i32,
        f: &[f64],
        g: Option<&[f64]>,
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.points();
        let norm = 1.0 / (n * n * n) as f64;
        for (m, z) in self.buf.iter_mut().enumerate() {
            *z = Complex64::new(f[m], g.map_or(0.0, |g| g[m]));
        }
        self.fft3(false);
        let len = self.grid.lattice_len();
        let mut fa = vec![Complex64::default(); len];
        let mut ga = vec![Complex64::default(); len];
        for k in cube(cutoff) {
            let z = self.buf[self.slot(k)] * norm;
            let zm = self.buf[self.slot([-k[0], -k[1], -k[2]])].conj() * norm;
            let idx = self.grid.index_unchecked(k);
            fa[idx] = (z + zm) * 0.5;
            ga[idx] = (z - zm) * Complex64::new(0.0, -0.5);
        }
        (fa, ga)
    }

    /// Grid values of the three components of a real field, using the modes
    /// with `|k|_∞ <= N/2 - 1`.
    pub fn to_physical(&mut self, f: &SpectralField) -> [Vec<f64>; 3] {
        self.check_grid(f);
        let cut = self.grid.half() - 1;
        let c = f.coeffs();
        let (u0, u1) = self.inverse_pair(cut, |i| c[i][0], |i| c[i][1]);
        let (u2, _) = self.inverse_pair(cut, |i| c[i][2], |_| Complex64::default());
        [u0, u1, u2]
    }

    /// Complex grid values of each component, without assuming realness.
    pub fn to_physical_complex(&mut self, f: &SpectralField) -> [Vec<Complex64>; 3] {
        self.check_grid(f);
        let cut = self.grid.half() - 1;
        let mut out: [Vec<Complex64>; 3] = Default::default();
        for (d, o) in out.iter_mut().enumerate() {
            self.buf.fill(Complex64::default());
            for k in cube(cut) {
                let slot = self.slot(k);
                self.buf[slot] += f.get(k)[d];
            }
            self.fft3(true);
            *o = self.buf.clone();
        }
        out
    }

    /// Coefficients of a real grid field, truncated to the dealias cube.
    pub fn from_physical(&mut self, u: &[Vec<f64>; 3]) -> SpectralField {
        let cut = self.grid.dealias_cutoff();
        let (a, b) = self.forward_pair(cut, &u[0], Some(&u[1]));
        let (c, _) = self.forward_pair(cut, &u[2], None);
        let coeffs = (0..self.grid.lattice_len())
            .map(|i| [a[i], b[i], c[i]])
            .collect();
        SpectralField::from_coeffs(self.grid, coeffs)
    }

    /// Projected convection `ℙ[∇·(v⊗v)]`, dealiased. The six distinct
    /// products are formed on the grid.
    pub fn convection(&mut self, v: &SpectralField) -> SpectralField {
        self.check_grid(v);
        let cut = self.grid.dealias_cutoff();
        let c = v.coeffs();
        let (v0, v1) = self.inverse_pair(cut, |i| c[i][0], |i| c[i][1]);
        let (v2, _) = self.inverse_pair(cut, |i| c[i][2], |_| Complex64::default());
        let v = [v0, v1, v2];
        let prod = |a: usize, b: usize| -> Vec<f64> {
            v[a].iter().zip(&v[b]).map(|(x, y)| x * y).collect()
        };
        let (p00, p01) = self.forward_pair(cut, &prod(0, 0), Some(&prod(0, 1)));
        let (p02, p11) = self.forward_pair(cut, &prod(0, 2), Some(&prod(1, 1)));
        let (p12, p22) = self.forward_pair(cut, &prod(1, 2), Some(&prod(2, 2)));
        let tensor = |idx: usize| -> [[Complex64; 3]; 3] {
            [
                [p00[idx], p01[idx], p02[idx]],
                [p01[idx], p11[idx], p12[idx]],
                [p02[idx], p12[idx], p22[idx]],
            ]
        };
        self.assemble_divergence(cut, tensor)
    }

    /// `ℙ[∇·(v⊗w)]`, dealiased. Equals `ℙ[(w·∇)v]` when `w` is
    /// divergence-free.
    pub fn advect(&mut self, v: &SpectralField, w: &SpectralField) -> SpectralField {
        self.check_grid(v);
        self.check_grid(w);
        let cut = self.grid.dealias_cutoff();
        let (cv, cw) = (v.coeffs(), w.coeffs());
        let (v0, v1) = self.inverse_pair(cut, |i| cv[i][0], |i| cv[i][1]);
        let (v2, w0) = self.inverse_pair(cut, |i| cv[i][2], |i| cw[i][0]);
        let (w1, w2) = self.inverse_pair(cut, |i| cw[i][1], |i| cw[i][2]);
        self.advect_grid(&[v0, v1, v2], &[w0, w1, w2])
    }

    /// `ℙ[∇·(v⊗w)]` with `w` given by its grid values.
    pub fn advect_by_grid_field(&mut self, v: &SpectralField, w: &[Vec<f64>; 3]) -> SpectralField {
        self.check_grid(v);
        let cut = self.grid.dealias_cutoff();
        let cv = v.coeffs();
        let (v0, v1) = self.inverse_pair(cut, |i| cv[i][0], |i| cv[i][1]);
        let (v2, _) = self.inverse_pair(cut, |i| cv[i][2], |_| Complex64::default());
        self.advect_grid(&[v0, v1, v2], w)
    }

    fn advect_grid(&mut self, v: &[Vec<f64>; 3], w: &[Vec<f64>; 3]) -> SpectralField {
        let cut = self.grid.dealias_cutoff();
        let prod = |a: usize, b: usize| -> Vec<f64> {
            v[a].iter().zip(&w[b]).map(|(x, y)| x * y).collect()
        };
        let (p00, p01) = self.forward_pair(cut, &prod(0, 0), Some(&prod(0, 1)));
        let (p02, p10) = self.forward_pair(cut, &prod(0, 2), Some(&prod(1, 0)));
        let (p11, p12) = self.forward_pair(cut, &prod(1, 1), Some(&prod(1, 2)));
        let (p20, p21) = self.forward_pair(cut, &prod(2, 0), Some(&prod(2, 1)));
        let (p22, _) = self.forward_pair(cut, &prod(2, 2), None);
        let tensor = |idx: usize| -> [[Complex64; 3]; 3] {
            [
                [p00[idx], p01[idx], p02[idx]],
                [p10[idx], p11[idx], p12[idx]],
                [p20[idx], p21[idx], p22[idx]],
            ]
        };
        self.assemble_divergence(cut, tensor)
    }

    /// Coefficients `ℙ_k Σ_l 2πi k_l T_{il}(k)` on the dealias cube.
    fn assemble_divergence(
        &self,
        cut: i32,
        tensor: impl Fn(usize) -> [[Complex64; 3]; 3],
    ) -> SpectralField {
        let mut coeffs = vec![ZERO3; self.grid.lattice_len()];
        for k in cube(cut) {
            if k == [0, 0, 0] {
                continue;
            }
            let idx = self.grid.index_unchecked(k);
            let t = tensor(idx);
            let mut out: CVec3 = ZERO3;
            for (i, row) in t.iter().enumerate() {
                let s = row[0] * k[0] as f64 + row[1] * k[1] as f64 + row[2] * k[2] as f64;
                out[i] = Complex64::new(0.0, TWO_PI) * s;
            }
            coeffs[idx] = project_mode(k, out);
        }
        SpectralField::from_coeffs(self.grid, coeffs)
    }

    /// Grid coordinates `x_m = m / N` of linear grid index `m`.
    pub fn grid_point(&self, m: usize) -> [f64; 3] {
        let n = self.grid.points();
        let h = 1.0 / n as f64;
        [(m / (n * n)) as f64 * h, ((m / n) % n) as f64 * h, (m % n) as f64 * h]
    }

    fn check_grid(&self, f: &SpectralField) {
        assert_eq!(f.grid(), self.grid, "field grid differs from transformer grid");
    }
}

fn cube(c: i32) -> impl Iterator<Item = Wavevector> {
    (-c..=c).flat_map(move |a| (-c..=c).flat_map(move |b| (-c..=c).map(move |d| [a, b, d])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_mode_grid_values() {
        let g = Grid::new(8).unwrap();
        let f = SpectralField::from_modes(
            g,
            &[([1, 0, 2], [c(0.5, 0.25), c(0.0, 0.0), c(-1.0, 0.0)])],
        )
        .unwrap();
        let mut t = Transformer::new(g);
        let u = t.to_physical(&f);
        for m in 0..512 {
            let x = t.grid_point(m);
            let phase = TWO_PI * (x[0] + 2.0 * x[2]);
            let expect0 = 2.0 * (0.5 * phase.cos() - 0.25 * phase.sin());
            let expect2 = -2.0 * phase.cos();
            assert_relative_eq!(u[0][m], expect0, epsilon = 1e-13);
            assert_relative_eq!(u[1][m], 0.0, epsilon = 1e-13);
            assert_relative_eq!(u[2][m], expect2, epsilon = 1e-13);
        }
    }

    #[test]
    fn roundtrip_on_dealiased_field() {
        let g = Grid::new(16).unwrap();
        let f = SpectralField::from_modes(
            g,
            &[
                ([1, 2, -3], [c(0.1, 0.2), c(0.3, -0.4), c(0.0, 1.0)]),
                ([5, 0, 0], [c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0)]),
                ([0, 0, 0], [c(0.7, 0.0), c(0.0, 0.0), c(-0.1, 0.0)]),
            ],
        )
        .unwrap();
        let mut t = Transformer::new(g);
        let u = t.to_physical(&f);
        let back = t.from_physical(&u);
        for (a, b) in f.coeffs().iter().zip(back.coeffs()) {
            for d in 0..3 {
                assert!((a[d] - b[d]).norm() < 1e-14);
            }
        }
    }
}
