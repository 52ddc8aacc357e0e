//! Exact rotations generated by `S_x` on the Dicke basis.
//!
//! `S_x` is real symmetric tridiagonal with zero diagonal and off-diagonal
//! entries `sqrt(k (N - k + 1)) / 2`. Its spectrum is known exactly
//! (`m = N/2, N/2 - 1, ..., -N/2`), so each eigenvector is obtained by a few
//! steps of inverse iteration at the exact eigenvalue. That costs `O(N)` per
//! vector and `O(N^2)` overall; the resulting orthogonal basis is cached per
//! `N` and reused for every subsequent rotation.
//!
//! Rotations about `y` and about arbitrary axes are built from this one basis
//! by conjugating with diagonal `z` rotations.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64 as C64;

/// Orthonormal eigenbasis of `S_x` for a fixed `N`.
pub(crate) struct XEigenbasis {
    dim: usize,
    /// Eigenvalue of column `j` (equal to `N/2 - j`).
    values: Vec<f64>,
    /// Row-major `dim x dim`; column `j` is the eigenvector for `values[j]`.
    vectors: Vec<f64>,
}

impl XEigenbasis {
    pub(crate) fn compute(n: usize) -> Self {
        let dim = n + 1;
        let half = n as f64 / 2.0;
        let off: Vec<f64> = (1..=n).map(|k| ladder(n, k) / 2.0).collect();
        let scale = half.max(1.0);
        let values: Vec<f64> = (0..dim).map(|j| half - j as f64).collect();
        let mut vectors = vec![0.0; dim * dim];

        // Deterministic start vector with no reflection symmetry, so it overlaps
        // both even and odd eigenvectors.
        let start: Vec<f64> = (0..dim)
            .map(|k| 1.0 + 0.5 * (1.7 * k as f64 + 0.3).sin())
            .collect();

        for (j, &lambda) in values.iter().enumerate() {
            let lu = TridiagLu::factor(&off, lambda, scale);
            let mut x = start.clone();
            for _ in 0..3 {
                lu.solve_in_place(&mut x);
                normalize(&mut x);
            }
            // Sign convention: largest component positive.
            let (imax, _) = x
                .iter()
                .enumerate()
                .fold((0, 0.0), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
            if x[imax] < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            for (k, v) in x.into_iter().enumerate() {
                vectors[k * dim + j] = v;
            }
        }
        Self { dim, values, vectors }
    }

    #[cfg(test)]
    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    #[cfg(test)]
    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    /// Entry `(row k, column j)` of the eigenvector matrix.
    #[cfg(test)]
    pub(crate) fn entry(&self, k: usize, j: usize) -> f64 {
        self.vectors[k * self.dim + j]
    }

    /// Applies `exp(-i angle S_x)` to `amps`.
    pub(crate) fn apply(&self, amps: &[C64], angle: f64) -> Vec<C64> {
        let dim = self.dim;
        debug_assert_eq!(amps.len(), dim);
        // y = V^T psi
        let mut y = vec![C64::new(0.0, 0.0); dim];
        for (k, &a) in amps.iter().enumerate() {
            if a.re == 0.0 && a.im == 0.0 {
                continue;
            }
            let row = &self.vectors[k * dim..(k + 1) * dim];
            for (yj, &v) in y.iter_mut().zip(row) {
                yj.re += a.re * v;
                yj.im += a.im * v;
            }
        }
        for (yj, &lambda) in y.iter_mut().zip(&self.values) {
            *yj *= C64::from_polar(1.0, -angle * lambda);
        }
        // psi' = V y
        (0..dim)
            .map(|k| {
                let row = &self.vectors[k * dim..(k + 1) * dim];
                row.iter()
                    .zip(&y)
                    .fold(C64::new(0.0, 0.0), |acc, (&v, yj)| acc + yj * v)
            })
            .collect()
    }
}

/// `<k-1| S_+ |k> = sqrt(k (N - k + 1))` for `k` in `1..=N`.
#[inline]
pub(crate) fn ladder(n: usize, k: usize) -> f64 {
    ((k * (n - k + 1)) as f64).sqrt()
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

/// LU factorization with partial pivoting of `T - shift I` for a symmetric
/// tridiagonal `T` with zero diagonal. `U` carries two superdiagonals.
struct TridiagLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(off: &[f64], shift: f64, scale: f64) -> Self {
        let n = off.len() + 1;
        let tiny = f64::EPSILON * scale;
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        // `cur` holds the working row at position i, columns (i, i+1, i+2).
        let mut cur = (-shift, off.first().copied().unwrap_or(0.0), 0.0);
        for i in 0..n - 1 {
            let mut next = (off[i], -shift, off.get(i + 1).copied().unwrap_or(0.0));
            if next.0.abs() > cur.0.abs() {
                std::mem::swap(&mut cur, &mut next);
                swapped[i] = true;
            }
            if cur.0 == 0.0 {
                cur.0 = tiny;
            }
            let m = next.0 / cur.0;
            u0[i] = cur.0;
            u1[i] = cur.1;
            u2[i] = cur.2;
            mult[i] = m;
            cur = (next.1 - m * cur.1, next.2 - m * cur.2, 0.0);
        }
        u0[n - 1] = if cur.0 == 0.0 { tiny } else { cur.0 };
        Self { u0, u1, u2, mult, swapped }
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.mult[i] * b[i];
        }
        b[n - 1] /= self.u0[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.u1[n - 2] * b[n - 1]) / self.u0[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.u1[i] * b[i + 1] - self.u2[i] * b[i + 2]) / self.u0[i];
        }
    }
}

type CacheCell = Arc<OnceLock<Arc<XEigenbasis>>>;

fn cache() -> &'static Mutex<HashMap<usize, CacheCell>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, CacheCell>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared eigenbasis for `N`, computed once and then read concurrently.
pub(crate) fn x_eigenbasis(n: usize) -> Arc<XEigenbasis> {
    let cell = {
        let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(n).or_default().clone()
    };
    cell.get_or_init(|| Arc::new(XEigenbasis::compute(n))).clone()
}
