use crate::error::{Error, Result};
use crate::spectral::{is_positive_half, neg, norm_inf, Wavevector};

/// Which half of `ℤ³ \ {0}` a wavevector belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Positive,
    Negative,
}

/// Orthonormal frames `{a_{k,1}, a_{k,2}}` of `k⊥` for every
/// `0 < |k|_∞ <= kmax`, with `a_{-k,α} = a_{k,α}`.
///
/// Frames are built on the positive half as `a₁ = k×e / |k×e|`,
/// `a₂ = k×a₁ / |k×a₁|`, where `e` is the lowest-index standard basis vector
/// not parallel to `k`, then copied to `-k`.
#[derive(Debug, Clone)]
pub struct NoiseBasis {
    kmax: i32,
    frames: Vec<[[f64; 3]; 2]>,
}

impl NoiseBasis {
    pub fn build(kmax: i32) -> Result<Self> {
        if kmax < 1 {
            return Err(Error::InvalidParameter {
                name: "kmax",
                reason: format!("must be at least 1, got {kmax}"),
            });
        }
        let side = (2 * kmax + 1) as usize;
        let mut basis = Self {
            kmax,
            frames: vec![[[0.0; 3]; 2]; side * side * side],
        };
        for a in -kmax..=kmax {
            for b in -kmax..=kmax {
                for c in -kmax..=kmax {
                    let k = [a, b, c];
                    if k == [0, 0, 0] {
                        continue;
                    }
                    let pos = if is_positive_half(k) { k } else { neg(k) };
                    let idx = basis.slot(k);
                    basis.frames[idx] = positive_frame(pos);
                }
            }
        }
        Ok(basis)
    }

    pub fn kmax(&self) -> i32 {
        self.kmax
    }

    pub fn contains(&self, k: Wavevector) -> bool {
        k != [0, 0, 0] && norm_inf(k) <= self.kmax
    }

    pub fn half(&self, k: Wavevector) -> Option<Half> {
        self.contains(k).then(|| {
            if is_positive_half(k) {
                Half::Positive
            } else {
                Half::Negative
            }
        })
    }

    /// `[a_{k,1}, a_{k,2}]`, or `None` outside the basis range.
    pub fn frame(&self, k: Wavevector) -> Option<[[f64; 3]; 2]> {
        self.contains(k).then(|| self.frames[self.slot(k)])
    }

    fn slot(&self, k: Wavevector) -> usize {
        let s = (2 * self.kmax + 1) as usize;
        let o = |c: i32| (c + self.kmax) as usize;
        (o(k[0]) * s + o(k[1])) * s + o(k[2])
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn positive_frame(k: Wavevector) -> [[f64; 3]; 2] {
    let kr = [k[0] as f64, k[1] as f64, k[2] as f64];
    let axis = (0..3)
        .find(|&i| (0..3).any(|j| j != i && k[j] != 0))
        .expect("nonzero wavevector");
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let a1 = normalize(cross(kr, e));
    let a2 = normalize(cross(kr, a1));
    [a1, a2]
}
