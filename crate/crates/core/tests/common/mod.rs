//! Independent oracles shared by the integration tests. Nothing here calls
//! the library's noise or corrector code.
#![allow(dead_code)]

use std::f64::consts::PI;

use hnslab::spectral::{CVec3, Grid, SpectralField, Wavevector};
use num_complex::Complex64;

pub const TWO_PI: f64 = 2.0 * PI;

pub type M3 = [[f64; 3]; 3];

pub fn kk(k: Wavevector) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

pub fn dotr(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn realv(k: Wavevector) -> [f64; 3] {
    k.map(|x| x as f64)
}

/// `I - kkᵀ/|k|²`, identity at `k = 0`.
pub fn leray(k: Wavevector) -> M3 {
    let mut m = [[0.0; 3]; 3];
    let n = kk(k);
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = if r == c { 1.0 } else { 0.0 };
            if n > 0.0 {
                m[r][c] -= k[r] as f64 * k[c] as f64 / n;
            }
        }
    }
    m
}

pub fn matmul(a: &M3, b: &M3) -> M3 {
    let mut m = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            m[r][c] = (0..3).map(|i| a[r][i] * b[i][c]).sum();
        }
    }
    m
}

pub fn matvec(m: &M3, v: &CVec3) -> CVec3 {
    [0, 1, 2].map(|r| (0..3).map(|c| v[c] * m[r][c]).sum())
}

/// Shell weights enumerated from scratch: `|k|^{-α}` on `n <= |k| <= 2n`,
/// normalised in `ℓ²`.
pub fn shell_weights(n: i32, alpha: f64) -> Vec<(Wavevector, f64)> {
    let mut out = Vec::new();
    for a in -2 * n..=2 * n {
        for b in -2 * n..=2 * n {
            for c in -2 * n..=2 * n {
                let k = [a, b, c];
                let q = kk(k);
                if q >= (n * n) as f64 && q <= (4 * n * n) as f64 {
                    out.push((k, q.powf(-alpha / 2.0)));
                }
            }
        }
    }
    let s: f64 = out.iter().map(|(_, t)| t * t).sum::<f64>().sqrt();
    out.into_iter().map(|(k, t)| (k, t / s)).collect()
}

/// Corrector matrix at `j` without frames: `Σ_α (a_α·j)² = |j|² - (k·j)²/|k|²`.
/// Shifts with `|j+k|_∞ > cut` are skipped when `cut` is given.
pub fn corrector_oracle(j: Wavevector, theta: &[(Wavevector, f64)], mu: f64, cut: Option<i32>) -> M3 {
    if j == [0, 0, 0] {
        return [[0.0; 3]; 3];
    }
    let mut s = [[0.0; 3]; 3];
    for &(k, t) in theta {
        let m = [j[0] + k[0], j[1] + k[1], j[2] + k[2]];
        if let Some(c) = cut {
            if m.iter().any(|x| x.abs() > c) {
                continue;
            }
        }
        let kj = dotr(realv(k), realv(j));
        let w = t * t * (kk(j) - kj * kj / kk(k));
        let p = leray(m);
        for r in 0..3 {
            for c in 0..3 {
                s[r][c] += w * p[r][c];
            }
        }
    }
    let pj = leray(j);
    let mut out = matmul(&pj, &matmul(&s, &pj));
    let f = -1.5 * mu * TWO_PI * TWO_PI;
    for row in &mut out {
        for x in row {
            *x *= f;
        }
    }
    out
}

/// `ℙ_m Σ_{p+q=m} (û(p)·2πi q) û(q)` over the nonzero modes of `v`, kept for
/// `|m|_∞ <= cut`.
pub fn convolution_oracle(v: &SpectralField, cut: i32) -> Vec<(Wavevector, CVec3)> {
    let modes: Vec<(Wavevector, CVec3)> = v.modes().collect();
    let mut acc: Vec<(Wavevector, CVec3)> = Vec::new();
    for &(p, up) in &modes {
        for &(q, uq) in &modes {
            let m = [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
            if m.iter().any(|x| x.abs() > cut) {
                continue;
            }
            let s: Complex64 = (0..3)
                .map(|d| up[d] * Complex64::new(0.0, TWO_PI * q[d] as f64))
                .sum();
            let term = uq.map(|z| z * s);
            match acc.iter_mut().find(|e| e.0 == m) {
                Some(e) => {
                    for d in 0..3 {
                        e.1[d] += term[d];
                    }
                }
                None => acc.push((m, term)),
            }
        }
    }
    acc.into_iter()
        .map(|(m, c)| (m, matvec(&leray(m), &c)))
        .collect()
}

/// Max coefficient distance relative to the largest coefficient of `b`.
pub fn rel_diff(a: &SpectralField, b: &SpectralField) -> f64 {
    let scale = b.max_amplitude().max(a.max_amplitude());
    if scale == 0.0 {
        return 0.0;
    }
    (a - b).max_amplitude() / scale
}

/// Single real divergence-free mode at `j` with a real amplitude.
pub fn single_mode(grid: Grid, j: Wavevector) -> SpectralField {
    let amp = hnslab::experiments::orthogonal_amplitude(j);
    SpectralField::from_modes(grid, &[(j, amp)]).unwrap()
}
