use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer wavevector on the dual lattice of the unit torus.
pub type Wavevector = [i32; 3];

pub fn norm2(k: Wavevector) -> i64 {
    k.iter().map(|&c| (c as i64) * (c as i64)).sum()
}

pub fn norm_inf(k: Wavevector) -> i32 {
    k.iter().map(|c| c.abs()).max().unwrap_or(0)
}

pub fn neg(k: Wavevector) -> Wavevector {
    [-k[0], -k[1], -k[2]]
}

pub fn add(a: Wavevector, b: Wavevector) -> Wavevector {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn as_real(k: Wavevector) -> [f64; 3] {
    [k[0] as f64, k[1] as f64, k[2] as f64]
}

/// Lexicographically positive half of the lattice: the first nonzero
/// coordinate is positive.
pub fn is_positive_half(k: Wavevector) -> bool {
    match k {
        [a, _, _] if a != 0 => a > 0,
        [_, b, _] if b != 0 => b > 0,
        [_, _, c] => c > 0,
    }
}

/// Discretization of the periodic box `[0,1]^3` with `n` points per axis.
///
/// Coefficients are stored for every wavevector with `|k_i| <= n/2`; the
/// dealias cutoff is `floor(n/3)` in the max-norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn points(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> i32 {
        (self.n / 2) as i32
    }

    pub fn dealias_cutoff(&self) -> i32 {
        (self.n / 3) as i32
    }

    /// Number of stored lattice sites per axis (`n + 1`).
    pub fn side(&self) -> usize {
        self.n + 1
    }

    pub fn lattice_len(&self) -> usize {
        self.side().pow(3)
    }

    pub fn contains(&self, k: Wavevector) -> bool {
        norm_inf(k) <= self.half()
    }

    pub fn index(&self, k: Wavevector) -> Option<usize> {
        if !self.contains(k) {
            return None;
        }
        Some(self.index_unchecked(k))
    }

    #[inline]
    pub(crate) fn index_unchecked(&self, k: Wavevector) -> usize {
        let h = self.half();
        let s = self.side();
        (((k[0] + h) as usize) * s + (k[1] + h) as usize) * s + (k[2] + h) as usize
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> Wavevector {
        let s = self.side();
        let h = self.half();
        let k2 = (idx % s) as i32 - h;
        let k1 = ((idx / s) % s) as i32 - h;
        let k0 = (idx / (s * s)) as i32 - h;
        [k0, k1, k2]
    }

    /// Wavevectors inside the dealias cube, in storage order.
    pub fn dealiased_modes(&self) -> impl Iterator<Item = Wavevector> {
        let c = self.dealias_cutoff();
        (-c..=c).flat_map(move |a| {
            (-c..=c).flat_map(move |b| (-c..=c).map(move |d| [a, b, d]))
        })
    }
}
