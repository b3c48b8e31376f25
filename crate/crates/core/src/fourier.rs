//! Batched Fourier coefficients over frequency boxes.
//!
//! Only one frequency of each `{k, -k}` pair is stored (first nonzero
//! component positive); for real measures the other coefficient is the
//! complex conjugate.

use num::complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{wrap, ParticleCloud};

const TAU: f64 = std::f64::consts::TAU;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
struct Row {
    prefix: Vec<i64>,
    lo: i64,
    hi: i64,
}

/// A set of half-space frequencies `0 < |k|_inf <= K`, grouped into rows that
/// share all but the last component.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    dim: usize,
    cutoff: i64,
    rows: Vec<Row>,
    len: usize,
}

fn in_half_space(k: &[i64]) -> bool {
    k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

impl FrequencySet {
    /// All of `0 < |k|_inf <= cutoff` in dimension `dim` (half of them stored).
    pub fn cube(dim: usize, cutoff: i64) -> Result<Self> {
        FrequencySet::filtered(dim, cutoff, |_| true)
    }

    /// Frequencies of the cube that vanish outside the coordinates `coords`.
    pub fn supported_on(dim: usize, cutoff: i64, coords: &[usize]) -> Result<Self> {
        if coords.iter().any(|&c| c >= dim) {
            return Err(Error::invalid("support coordinate out of range"));
        }
        FrequencySet::filtered(dim, cutoff, |k| {
            k.iter().enumerate().all(|(i, &c)| c == 0 || coords.contains(&i))
        })
    }

    /// Frequencies of the cube accepted by `keep`.
    pub fn filtered(dim: usize, cutoff: i64, keep: impl Fn(&[i64]) -> bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("frequency dimension must be at least 1"));
        }
        if cutoff < 1 {
            return Err(Error::invalid("frequency cutoff K must be at least 1"));
        }
        let side = (2 * cutoff + 1) as usize;
        let count = side
            .checked_pow(dim as u32)
            .filter(|&c| c <= 50_000_000)
            .ok_or_else(|| Error::invalid("frequency box too large"))?;
        let mut rows: Vec<Row> = Vec::new();
        let mut len = 0;
        let mut k = vec![0i64; dim];
        for idx in 0..count {
            let mut rem = idx;
            for c in (0..dim).rev() {
                k[c] = (rem % side) as i64 - cutoff;
                rem /= side;
            }
            if !in_half_space(&k) || !keep(&k) {
                continue;
            }
            len += 1;
            let (prefix, last) = k.split_at(dim - 1);
            match rows.last_mut() {
                Some(r) if r.prefix == prefix && r.hi + 1 == last[0] => r.hi = last[0],
                _ => rows.push(Row { prefix: prefix.to_vec(), lo: last[0], hi: last[0] }),
            }
        }
        Ok(FrequencySet { dim, cutoff, rows, len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Number of stored (half-space) frequencies.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Stored frequencies in evaluation order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        self.rows.iter().flat_map(|r| {
            (r.lo..=r.hi).map(move |m| {
                let mut k = r.prefix.clone();
                k.push(m);
                k
            })
        })
    }

    /// Weights `(1 + |k|_2^2)^(-s)` in evaluation order.
    pub fn sobolev_weights(&self, s: f64) -> Vec<f64> {
        self.iter()
            .map(|k| {
                let n2: f64 = k.iter().map(|&c| (c * c) as f64).sum();
                (1.0 + n2).powf(-s)
            })
            .collect()
    }

    /// Coefficients `mu^(k)` of the cloud at every stored frequency.
    ///
    /// Particles are processed in fixed chunks whose partial sums are combined
    /// by a pairwise tree in chunk order, so the result does not depend on
    /// the number of worker threads.
    pub fn coefficients(&self, cloud: &ParticleCloud) -> Result<Vec<Complex64>> {
        if cloud.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: cloud.dim() });
        }
        let d = self.dim;
        let partials: Vec<Vec<Complex64>> = cloud
            .points()
            .par_chunks(CHUNK * d)
            .zip(cloud.weights().par_chunks(CHUNK))
            .map(|(pts, ws)| self.chunk_sum(pts, ws))
            .collect();
        Ok(tree_reduce(partials).unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); self.len]))
    }

    fn chunk_sum(&self, pts: &[f64], ws: &[f64]) -> Vec<Complex64> {
        let d = self.dim;
        let kmax = self.cutoff as usize;
        let mut acc = vec![Complex64::new(0.0, 0.0); self.len];
        // table[c][m] = exp(-2 pi i m x_c), m = 0..=K
        let mut table = vec![Complex64::new(1.0, 0.0); d * (kmax + 1)];
        for (p, &w) in pts.chunks_exact(d).zip(ws) {
            for (c, &x) in p.iter().enumerate() {
                let row = &mut table[c * (kmax + 1)..(c + 1) * (kmax + 1)];
                for (m, slot) in row.iter_mut().enumerate().skip(1) {
                    let (s, co) = (TAU * wrap(m as f64 * x)).sin_cos();
                    *slot = Complex64::new(co, -s);
                }
            }
            let power = |c: usize, m: i64| {
                let v = table[c * (kmax + 1) + m.unsigned_abs() as usize];
                if m < 0 {
                    v.conj()
                } else {
                    v
                }
            };
            let mut slot = 0;
            for r in &self.rows {
                let mut base = Complex64::new(w, 0.0);
                for (c, &m) in r.prefix.iter().enumerate() {
                    if m != 0 {
                        base *= power(c, m);
                    }
                }
                for m in r.lo..=r.hi {
                    acc[slot] += base * power(d - 1, m);
                    slot += 1;
                }
            }
        }
        acc
    }
}

fn tree_reduce(mut parts: Vec<Vec<Complex64>>) -> Option<Vec<Complex64>> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            }
            next.push(a);
        }
        parts = next;
    }
    parts.pop()
}
