//! Brute-force checks on the full `2^N` single-electron space for small `N`.

mod support;

use nalgebra::{DMatrix, DVector};
use squeeze_core::dicke::{coherent_state, rotate, spin_matrices, SpinAxis};
use support::invariants::{collective_ops, dicke_embedding, max_abs};
use squeeze_core::squeezers::{kraus_apply, oat_apply, MeasConfig, OATConfig};
use squeeze_core::{DickeState, C64};

#[test]
fn restricted_pauli_sums_match_ladder_construction() {
    for n in 1..=8 {
        let ops = collective_ops(n);
        let v = dicke_embedding(n);
        let dense = spin_matrices(n);
        for (full, ladder) in ops.iter().zip(dense.iter()) {
            let restricted = v.adjoint() * full * &v;
            assert!(max_abs(&(restricted - ladder)) < 1e-12, "N={n}");
        }
        let [sx, sy, sz] = &dense;
        let comm = sx * sy - sy * sx;
        assert!(max_abs(&(comm - sz * C64::new(0.0, 1.0))) < 1e-12);
    }
}

fn random_like_state(n: usize, salt: f64) -> DickeState {
    let amps = (0..=n)
        .map(|k| C64::new((1.3 * k as f64 + salt).sin() + 0.2, (0.7 * k as f64 - salt).cos()))
        .collect();
    DickeState::new(amps).unwrap()
}

#[test]
fn rotations_match_dense_exponentials_on_full_space() {
    for n in 1..=6 {
        let ops = collective_ops(n);
        let v = dicke_embedding(n);
        let state = random_like_state(n, 0.3 * n as f64);
        let psi_full = &v * DVector::from_column_slice(state.amplitudes());
        let axes = [
            (SpinAxis::X, [1.0, 0.0, 0.0]),
            (SpinAxis::Y, [0.0, 1.0, 0.0]),
            (SpinAxis::Z, [0.0, 0.0, 1.0]),
            (SpinAxis::unit([0.3, -0.4, 0.5]).unwrap(), [0.3, -0.4, 0.5]),
        ];
        for (axis, raw) in axes {
            let norm = (raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]) as f64;
            let norm = norm.sqrt();
            let gen = (&ops[0] * C64::new(raw[0] / norm, 0.0)
                + &ops[1] * C64::new(raw[1] / norm, 0.0)
                + &ops[2] * C64::new(raw[2] / norm, 0.0))
                * C64::new(0.0, -1.1);
            let expect = v.adjoint() * (gen.exp() * &psi_full);
            let got = rotate(&state, axis, 1.1).unwrap();
            for (a, b) in got.amplitudes().iter().zip(expect.iter()) {
                assert!((a - b).norm() < 1e-12, "N={n} {axis:?}");
            }
        }
    }
}

#[test]
fn squeezers_match_dense_operators_on_full_space() {
    for n in 1..=6 {
        let ops = collective_ops(n);
        let v = dicke_embedding(n);
        let state = random_like_state(n, 1.0);
        let psi_full = &v * DVector::from_column_slice(state.amplitudes());

        let chi = 0.9;
        let twist = (&ops[2] * &ops[2] * C64::new(0.0, -chi / 2.0)).exp();
        let expect = v.adjoint() * (&twist * &psi_full);
        let got = oat_apply(&state, &OATConfig::new(chi).unwrap());
        for (a, b) in got.amplitudes().iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-12);
        }

        // Gaussian weight on the right-arm count n_R = N/2 - S_z
        let h = 0.4 * n as f64 + 0.1;
        let cfg = MeasConfig::from_chi(chi).unwrap();
        let dim = 1 << n;
        let mut weight = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        for s in 0..dim {
            let n_r = n as f64 / 2.0 - ops[2][(s, s)].re;
            let g = (chi / std::f64::consts::PI).powf(0.25) * (-chi * (n_r - h).powi(2) / 2.0).exp();
            weight[(s, s)] = C64::new(g, 0.0);
        }
        let b = v.adjoint() * (&weight * &psi_full);
        let p = b.norm_squared();
        let out = kraus_apply(&state, &cfg, h).unwrap();
        assert!((out.density - p).abs() < 1e-12);
        for (a, e) in out.post_state.amplitudes().iter().zip(b.iter()) {
            assert!((a - e / p.sqrt()).norm() < 1e-12);
        }
    }
}

#[test]
fn coherent_state_is_product_of_single_electron_superpositions() {
    for n in 1..=6 {
        let dim = 1 << n;
        let product = DVector::from_element(dim, C64::new(2f64.powf(-(n as f64) / 2.0), 0.0));
        let v = dicke_embedding(n);
        let expect = v.adjoint() * product;
        let got = coherent_state(n).unwrap();
        for (a, b) in got.amplitudes().iter().zip(expect.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }
}
