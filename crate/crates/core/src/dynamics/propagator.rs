use num_complex::Complex64;

use crate::noise::{CorrectorTable, Mat3};
use crate::spectral::{as_real, norm2, CVec3, Grid, SpectralField, Wavevector, TWO_PI, ZERO3};

#[derive(Debug, Clone)]
enum ModeFlow {
    Scalar {
        decay: f64,
        hyper: f64,
        visc: f64,
    },
    Eigen {
        q: Mat3,
        decay: [f64; 3],
        hyper: [f64; 3],
        visc: [f64; 3],
    },
}

/// Exact flow over one step of
/// `∂_t v = -(-Δ)^γ v + μ_eff Δ v + 𝒫_θ v - (w·∇) v` on the dealias cube.
///
/// On mode `j` the generator is `-(λ(j) I - M(j)) - 2πi (w·j)` with
/// `λ(j) = |j|^{2γ} + μ_eff (2π)²|j|²` and `M(j)` the symmetric corrector
/// matrix, so the flow is diagonalised once per mode. Energy removed by the
/// hyperviscous and viscous parts over the step is returned separately.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: Grid,
    dt: f64,
    flows: Vec<ModeFlow>,
    phases: Vec<Complex64>,
}

/// Share of the energy `|c|²` dissipated over `dt` by the part `rate` of a
/// total decay rate `lambda`: `∫₀^dt 2 rate |c|² e^{-2λt} dt`.
fn dissipated(rate: f64, lambda: f64, dt: f64) -> f64 {
    if rate == 0.0 {
        return 0.0;
    }
    if lambda * dt < 1e-8 {
        return 2.0 * rate * dt;
    }
    rate / lambda * -(-2.0 * lambda * dt).exp_m1()
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|x| x / n)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn quad(m: &Mat3, a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for r in 0..3 {
        for c in 0..3 {
            s += a[r] * 0.5 * (m[r][c] + m[c][r]) * b[c];
        }
    }
    s
}

/// Eigen-decomposition of a symmetric matrix with `m j = 0` and range in
/// `j⊥`. Returns eigenvectors as columns and the eigenvalues; the first
/// pair is `(j/|j|, 0)`, the other two diagonalize the block on `j⊥` by a
/// single Jacobi rotation.
fn solenoidal_eigen(m: &Mat3, j: [f64; 3]) -> (Mat3, [f64; 3]) {
    let e0 = unit(j);
    let axis = (0..3)
        .min_by(|&a, &b| j[a].abs().total_cmp(&j[b].abs()))
        .expect("three axes");
    let mut ea = [0.0; 3];
    ea[axis] = 1.0;
    let e1 = unit(cross(e0, ea));
    let e2 = cross(e0, e1);
    let (b11, b22, b12) = (quad(m, e1, e1), quad(m, e2, e2), quad(m, e1, e2));
    let phi = 0.5 * (2.0 * b12).atan2(b11 - b22);
    let (s, c) = phi.sin_cos();
    let u1: [f64; 3] = std::array::from_fn(|i| c * e1[i] + s * e2[i]);
    let u2: [f64; 3] = std::array::from_fn(|i| -s * e1[i] + c * e2[i]);
    let l1 = b11 * c * c + 2.0 * b12 * c * s + b22 * s * s;
    let l2 = b11 * s * s - 2.0 * b12 * c * s + b22 * c * c;
    let q = std::array::from_fn(|r| [e0[r], u1[r], u2[r]]);
    (q, [0.0, l1, l2])
}

impl LinearPropagator {
    pub fn new(
        grid: Grid,
        dt: f64,
        gamma: f64,
        viscosity: f64,
        corrector: Option<&CorrectorTable>,
        drift: [f64; 3],
    ) -> Self {
        let cut = grid.dealias_cutoff();
        let side = (2 * cut + 1) as usize;
        let mut flows = Vec::with_capacity(side * side * side);
        let mut phases = Vec::with_capacity(side * side * side);
        for j in grid.dealiased_modes() {
            let jj = norm2(j) as f64;
            let jr = as_real(j);
            let hyper = jj.powf(gamma);
            let visc = viscosity * TWO_PI * TWO_PI * jj;
            let lambda = hyper + visc;
            let w_dot_j = drift[0] * jr[0] + drift[1] * jr[1] + drift[2] * jr[2];
            phases.push(Complex64::from_polar(1.0, -TWO_PI * dt * w_dot_j));
            let m = corrector.map(|c| c.matrix(j)).filter(|m| m.iter().flatten().any(|&x| x != 0.0));
            let flow = match m {
                None => ModeFlow::Scalar {
                    decay: (-dt * lambda).exp(),
                    hyper: dissipated(hyper, lambda, dt),
                    visc: dissipated(visc, lambda, dt),
                },
                Some(m) => {
                    let (q, eigenvalues) = solenoidal_eigen(&m, jr);
                    let mut decay = [0.0; 3];
                    let mut h = [0.0; 3];
                    let mut v = [0.0; 3];
                    for e in 0..3 {
                        // corrector eigenvalues are nonpositive
                        let rate = lambda - eigenvalues[e].min(0.0);
                        decay[e] = (-dt * rate).exp();
                        h[e] = dissipated(hyper, rate, dt);
                        v[e] = dissipated(visc, rate, dt);
                    }
                    ModeFlow::Eigen {
                        q,
                        decay,
                        hyper: h,
                        visc: v,
                    }
                }
            };
            flows.push(flow);
        }
        Self {
            grid,
            dt,
            flows,
            phases,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn cube_index(&self, k: Wavevector) -> usize {
        let c = self.grid.dealias_cutoff();
        let s = (2 * c + 1) as usize;
        (((k[0] + c) as usize) * s + (k[1] + c) as usize) * s + (k[2] + c) as usize
    }

    /// Flows `y` over one step. Returns the new field together with the
    /// hyperviscous and viscous dissipation `2∫‖·‖²` over the step. The
    /// `k = 0` coefficient is copied unchanged; modes outside the dealias
    /// cube are dropped.
    pub fn apply(&self, y: &SpectralField) -> (SpectralField, f64, f64) {
        assert_eq!(y.grid(), self.grid, "propagator built for another grid");
        let mut out = SpectralField::zeros(self.grid);
        let (mut dh, mut dv) = (0.0, 0.0);
        for j in self.grid.dealiased_modes() {
            let c = y.get(j);
            if j == [0, 0, 0] {
                out.set(j, c);
                continue;
            }
            if c == ZERO3 {
                continue;
            }
            let ci = self.cube_index(j);
            let phase = self.phases[ci];
            let new = match &self.flows[ci] {
                ModeFlow::Scalar { decay, hyper, visc } => {
                    let e = c[0].norm_sqr() + c[1].norm_sqr() + c[2].norm_sqr();
                    dh += hyper * e;
                    dv += visc * e;
                    let s = phase * *decay;
                    [c[0] * s, c[1] * s, c[2] * s]
                }
                ModeFlow::Eigen {
                    q,
                    decay,
                    hyper,
                    visc,
                } => {
                    let mut res: CVec3 = ZERO3;
                    for e in 0..3 {
                        let comp = c[0] * q[0][e] + c[1] * q[1][e] + c[2] * q[2][e];
                        let en = comp.norm_sqr();
                        dh += hyper[e] * en;
                        dv += visc[e] * en;
                        let comp = comp * (phase * decay[e]);
                        for r in 0..3 {
                            res[r] += comp * q[r][e];
                        }
                    }
                    res
                }
            };
            out.set(j, new);
        }
        (out, dh, dv)
    }
}
