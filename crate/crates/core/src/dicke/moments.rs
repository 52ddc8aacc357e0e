//! First and second moments of the collective spin in `O(N)`.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::rotation::ladder;
use super::{m_of, DickeState};
use crate::error::{Result, SqueezeError};

/// Mean spin and symmetrized covariance `½<{S_i, S_j}> - <S_i><S_j>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinMoments {
    pub mean: [f64; 3],
    pub covariance: [[f64; 3]; 3],
}

impl SpinMoments {
    pub fn mean_vector(&self) -> Vector3<f64> {
        Vector3::from(self.mean)
    }

    pub fn covariance_matrix(&self) -> Matrix3<f64> {
        let c = &self.covariance;
        Matrix3::new(
            c[0][0], c[0][1], c[0][2], c[1][0], c[1][1], c[1][2], c[2][0], c[2][1], c[2][2],
        )
    }

    pub fn mean_norm(&self) -> f64 {
        self.mean_vector().norm()
    }

    /// `trace(cov) + |mean|^2`, equal to `S(S + 1)` on the symmetric subspace.
    pub fn casimir(&self) -> f64 {
        let c = &self.covariance;
        c[0][0] + c[1][1] + c[2][2] + self.mean.iter().map(|m| m * m).sum::<f64>()
    }

    /// Variance along a unit direction.
    pub fn variance_along(&self, dir: &Vector3<f64>) -> f64 {
        dir.dot(&(self.covariance_matrix() * dir))
    }
}

/// Moments of a normalized state.
pub fn moments(state: &DickeState) -> Result<SpinMoments> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(SqueezeError::ContractViolation(format!(
            "moments need a normalized state (norm = {norm})"
        )));
    }
    Ok(moments_window(state.n(), 0, state.amplitudes()))
}

/// Moments of a normalized state whose amplitudes vanish outside
/// `offset..offset + amps.len()`.
pub(crate) fn moments_window(n: usize, offset: usize, amps: &[C64]) -> SpinMoments {
    let mut sz = 0.0;
    let mut sz2 = 0.0;
    // P = <S+ S->, M = <S- S+>
    let mut p = 0.0;
    let mut m = 0.0;
    let mut s_plus = C64::new(0.0, 0.0);
    let mut s_plus2 = C64::new(0.0, 0.0);
    // <S+ S_z + S_z S+> / 2 without the final conjugation.
    let mut x = C64::new(0.0, 0.0);

    for (i, a) in amps.iter().enumerate() {
        let k = offset + i;
        let w = a.norm_sqr();
        let mk = m_of(n, k);
        sz += w * mk;
        sz2 += w * mk * mk;
        if k < n {
            let c = ladder(n, k + 1);
            p += w * c * c;
        }
        if k > 0 {
            let c = ladder(n, k);
            m += w * c * c;
            if i > 0 {
                let t = amps[i - 1].conj() * a * c;
                s_plus += t;
                x += t * (0.5 * (mk + m_of(n, k - 1)));
                if i > 1 {
                    s_plus2 += amps[i - 2].conj() * a * (c * ladder(n, k - 1));
                }
            }
        }
    }

    let mean = [s_plus.re, s_plus.im, sz];
    let sxx = 0.25 * (2.0 * s_plus2.re + p + m);
    let syy = 0.25 * (-2.0 * s_plus2.re + p + m);
    let sxy = 0.5 * s_plus2.im;
    let sxz = x.re;
    let syz = x.im;

    let cxx = sxx - mean[0] * mean[0];
    let cyy = syy - mean[1] * mean[1];
    let czz = sz2 - mean[2] * mean[2];
    let cxy = sxy - mean[0] * mean[1];
    let cxz = sxz - mean[0] * mean[2];
    let cyz = syz - mean[1] * mean[2];
    SpinMoments {
        mean,
        covariance: [[cxx, cxy, cxz], [cxy, cyy, cyz], [cxz, cyz, czz]],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::{basis_state, coherent_state, rotate, spin_matrices, SpinAxis};
    use nalgebra::{DMatrix, DVector};

    /// Dense-matrix expectation values.
    fn brute_force(state: &DickeState) -> SpinMoments {
        let ops = spin_matrices(state.n());
        let psi = DVector::from_column_slice(state.amplitudes());
        let expect = |op: &DMatrix<C64>| (psi.adjoint() * op * &psi)[(0, 0)].re;
        let mean = [expect(&ops[0]), expect(&ops[1]), expect(&ops[2])];
        let mut covariance = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let anti = &ops[i] * &ops[j] + &ops[j] * &ops[i];
                covariance[i][j] = 0.5 * expect(&anti) - mean[i] * mean[j];
            }
        }
        SpinMoments { mean, covariance }
    }

    fn assert_close(a: &SpinMoments, b: &SpinMoments, tol: f64) {
        for i in 0..3 {
            assert!((a.mean[i] - b.mean[i]).abs() < tol, "{a:?} vs {b:?}");
            for j in 0..3 {
                assert!((a.covariance[i][j] - b.covariance[i][j]).abs() < tol, "{a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn matches_dense_operators() {
        for n in 1..=6 {
            let s = rotate(&coherent_state(n).unwrap(), SpinAxis::Unit([0.3, -0.5, 0.81]), 0.7).unwrap();
            let s = crate::squeezers::oat_apply(&s, &crate::squeezers::OATConfig::new(0.4).unwrap());
            assert_close(&moments(&s).unwrap(), &brute_force(&s), 1e-12);
        }
    }

    #[test]
    fn basis_state_moments() {
        let s = basis_state(9, 2).unwrap();
        let mom = moments(&s).unwrap();
        assert_eq!(mom.mean, [0.0, 0.0, 2.5]);
        assert_eq!(mom.covariance[2][2], 0.0);
    }

    #[test]
    fn coherent_state_moments() {
        for n in [1, 6, 40, 2000] {
            let mom = moments(&coherent_state(n).unwrap()).unwrap();
            let nf = n as f64;
            assert!((mom.mean[0] - nf / 2.0).abs() < 1e-9 * nf);
            assert!(mom.mean[1].abs() < 1e-12 && mom.mean[2].abs() < 1e-9);
            assert!((mom.covariance[1][1] - nf / 4.0).abs() < 1e-9 * nf);
            assert!((mom.covariance[2][2] - nf / 4.0).abs() < 1e-9 * nf);
            assert!(mom.covariance[0][0].abs() < 1e-8 * nf);
        }
    }

    #[test]
    fn ghz_variance() {
        let n = 12;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        amps[0] = C64::new(h, 0.0);
        amps[n] = C64::new(h, 0.0);
        let s = DickeState::new(amps).unwrap();
        let mom = moments(&s).unwrap();
        assert!((mom.covariance[2][2] - 36.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized() {
        let s = DickeState::from_normalized(2, vec![C64::new(1.0, 0.0); 3]);
        assert!(matches!(moments(&s), Err(SqueezeError::ContractViolation(_))));
    }

    #[test]
    fn window_matches_full() {
        let mut amps = vec![C64::new(0.0, 0.0); 31];
        for (i, k) in (10..15).enumerate() {
            amps[k] = C64::new(1.0 + i as f64, 0.5 - i as f64);
        }
        let s = DickeState::new(amps).unwrap();
        let full = moments(&s).unwrap();
        let win = moments_window(30, 10, &s.amplitudes()[10..15]);
        assert_close(&full, &win, 1e-12);
    }
}
