//! Collective spin-`N/2` states on the symmetric Dicke basis.
//!
//! States are immutable values: every operation returns a new [`DickeState`].

mod moments;
pub(crate) mod rotation;
mod wigner;

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqueezeError};

pub use moments::{moments, SpinMoments};
pub(crate) use moments::moments_window;
pub use wigner::{wigner_function, SphereGrid, WignerField, WIGNER_MAX_N};

/// Pure state of an `N`-electron batch on the `N + 1` Dicke states.
///
/// `amplitudes[k]` is the amplitude of `|N - k, k>`, i.e. `k` electrons in the
/// right arm, with `S_z` eigenvalue `N/2 - k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    n: usize,
    amplitudes: Vec<C64>,
}

impl DickeState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(SqueezeError::domain("a Dicke state needs at least N = 1"));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SqueezeError::domain("amplitudes must have a finite, non-zero norm"));
        }
        let n = amplitudes.len() - 1;
        Ok(Self { n, amplitudes: amplitudes.into_iter().map(|a| a / norm).collect() })
    }

    pub(crate) fn from_normalized(n: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), n + 1);
        Self { n, amplitudes }
    }

    /// Number of electrons `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `S_z` eigenvalue of basis index `k`.
    #[inline]
    pub fn m(&self, k: usize) -> f64 {
        m_of(self.n, k)
    }

    pub(crate) fn check_normalized(&self, tol: f64) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > tol {
            return Err(SqueezeError::ContractViolation(format!(
                "state is not normalized (norm = {norm})"
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn m_of(n: usize, k: usize) -> f64 {
    n as f64 / 2.0 - k as f64
}

/// Rotation axis on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpinAxis {
    X,
    Y,
    Z,
    /// Arbitrary direction; normalized on construction via [`SpinAxis::unit`].
    Unit([f64; 3]),
}

impl SpinAxis {
    /// Normalized arbitrary axis.
    pub fn unit(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(SqueezeError::domain("rotation axis must be a finite non-zero vector"));
        }
        Ok(Self::Unit([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    pub fn direction(&self) -> Vector3<f64> {
        match *self {
            Self::X => Vector3::x(),
            Self::Y => Vector3::y(),
            Self::Z => Vector3::z(),
            Self::Unit(v) => Vector3::new(v[0], v[1], v[2]),
        }
    }
}

/// Dicke basis state with `n_r` electrons in the right arm.
pub fn basis_state(n: usize, n_r: usize) -> Result<DickeState> {
    if n == 0 {
        return Err(SqueezeError::domain("N must be at least 1"));
    }
    if n_r > n {
        return Err(SqueezeError::domain(format!("n_R = {n_r} is outside [0, {n}]")));
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); n + 1];
    amplitudes[n_r] = C64::new(1.0, 0.0);
    Ok(DickeState::from_normalized(n, amplitudes))
}

/// `ln k!` for `k` in `0..=n`.
#[cfg(test)]
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `ln |a_k|` of the coherent state along `+x`: `ln(2^(-N/2) sqrt(C(N, k)))`.
///
/// Built from `ln C(N, k+1) = ln C(N, k) + ln((N - k)/(k + 1))` and then shifted
/// so that the amplitudes are normalized to rounding.
pub(crate) fn coherent_log_amplitudes(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut ln_binom = 0.0;
    out.push(0.0);
    for k in 0..n {
        ln_binom += ((n - k) as f64 / (k + 1) as f64).ln();
        out.push(0.5 * ln_binom);
    }
    let max = out.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_norm = max + 0.5 * out.iter().map(|l| (2.0 * (l - max)).exp()).sum::<f64>().ln();
    out.iter_mut().for_each(|l| *l -= ln_norm);
    out
}

/// Coherent spin state along `+x`, the output of the first beamsplitter acting
/// on `|N, 0>`. Amplitudes are `2^(-N/2) sqrt(C(N, k))`, evaluated in log space.
pub fn coherent_state(n: usize) -> Result<DickeState> {
    if n == 0 {
        return Err(SqueezeError::domain("N must be at least 1"));
    }
    let amplitudes = coherent_log_amplitudes(n)
        .into_iter()
        .map(|l| C64::new(l.exp(), 0.0))
        .collect();
    Ok(DickeState::from_normalized(n, amplitudes))
}

fn z_phases(amps: &mut [C64], n: usize, angle: f64) {
    for (k, a) in amps.iter_mut().enumerate() {
        *a *= C64::from_polar(1.0, -angle * m_of(n, k));
    }
}

/// Sample phase `exp(-i φ S_z)`: multiplies `amplitudes[k]` by `exp(-i φ m_k)`.
///
/// Identical to `rotate(state, SpinAxis::Z, phi)`; the mean spin turns by `+φ`
/// about `z`.
pub fn phase_shift(state: &DickeState, phi: f64) -> Result<DickeState> {
    if !phi.is_finite() {
        return Err(SqueezeError::domain("phase must be finite"));
    }
    let mut amps = state.amplitudes.clone();
    z_phases(&mut amps, state.n, phi);
    Ok(DickeState::from_normalized(state.n, amps))
}

/// Rotation `exp(-i angle S_axis)`.
pub fn rotate(state: &DickeState, axis: SpinAxis, angle: f64) -> Result<DickeState> {
    if !angle.is_finite() {
        return Err(SqueezeError::domain("rotation angle must be finite"));
    }
    let n = state.n;
    let amps = match axis {
        SpinAxis::Z => {
            let mut amps = state.amplitudes.clone();
            z_phases(&mut amps, n, angle);
            amps
        }
        SpinAxis::X => rotation::x_eigenbasis(n).apply(&state.amplitudes, angle),
        SpinAxis::Y => rotate_y(&state.amplitudes, n, angle),
        SpinAxis::Unit(v) => {
            // R_n(θ) = R_z(β) R_y(α) R_z(θ) R_y(-α) R_z(-β) with n = (α, β) in polar form.
            let polar = v[2].clamp(-1.0, 1.0).acos();
            let azimuth = v[1].atan2(v[0]);
            let mut amps = state.amplitudes.clone();
            z_phases(&mut amps, n, -azimuth);
            let mut amps = rotate_y(&amps, n, -polar);
            z_phases(&mut amps, n, angle);
            let mut amps = rotate_y(&amps, n, polar);
            z_phases(&mut amps, n, azimuth);
            amps
        }
    };
    Ok(DickeState::from_normalized(n, amps))
}

/// `R_y(θ) = R_z(π/2) R_x(θ) R_z(-π/2)`.
fn rotate_y(amps: &[C64], n: usize, angle: f64) -> Vec<C64> {
    let mut work = amps.to_vec();
    z_phases(&mut work, n, -FRAC_PI_2);
    let mut out = rotation::x_eigenbasis(n).apply(&work, angle);
    z_phases(&mut out, n, FRAC_PI_2);
    out
}

/// Probability of finding `k` electrons in the right arm.
pub fn number_distribution(state: &DickeState) -> Vec<f64> {
    state.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// Inner product `<a|b>`.
pub fn overlap(a: &DickeState, b: &DickeState) -> Result<C64> {
    if a.n != b.n {
        return Err(SqueezeError::domain(format!(
            "cannot overlap states with N = {} and N = {}",
            a.n, b.n
        )));
    }
    Ok(a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum())
}

/// Dense `S_x`, `S_y`, `S_z` on the Dicke basis. Intended for small `N`
/// (cross-checks and brute-force oracles).
pub fn spin_matrices(n: usize) -> [DMatrix<C64>; 3] {
    let dim = n + 1;
    let mut sx = DMatrix::zeros(dim, dim);
    let mut sy = DMatrix::zeros(dim, dim);
    let mut sz = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        sz[(k, k)] = C64::new(m_of(n, k), 0.0);
    }
    for k in 1..dim {
        let c = rotation::ladder(n, k) / 2.0;
        sx[(k - 1, k)] = C64::new(c, 0.0);
        sx[(k, k - 1)] = C64::new(c, 0.0);
        sy[(k - 1, k)] = C64::new(0.0, -c);
        sy[(k, k - 1)] = C64::new(0.0, c);
    }
    [sx, sy, sz]
}
