//! Spin Wigner function on the Bloch sphere from the multipole expansion.
//!
//! With multipole operators
//! `T_KQ = Σ (-1)^(S-m) sqrt(2K+1) (S K S; -m Q m') |S m><S m'|`
//! the state multipoles are `ρ_KQ = Tr(ρ T_KQ†)` and
//! `W(θ, φ) = Σ_{K=0..2S} Σ_{Q=-K..K} ρ_KQ Y_KQ(θ, φ)`.
//!
//! Normalization: `∫ W dΩ = sqrt(4π / (N + 1))` for every state, since only
//! `K = 0` survives the integral and `ρ_00 = 1 / sqrt(2S + 1)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::DickeState;
use crate::error::{Result, SqueezeError};

/// Largest batch size accepted by [`wigner_function`].
pub const WIGNER_MAX_N: usize = 100;

/// Sampling grid on the sphere: polar angles in `[0, π]`, azimuths in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    thetas: Vec<f64>,
    phis: Vec<f64>,
}

impl SphereGrid {
    /// `n_theta` polar samples including both poles and `n_phi` equally spaced
    /// azimuths starting at zero.
    pub fn uniform(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 4 {
            return Err(SqueezeError::domain("sphere grid needs n_theta >= 2 and n_phi >= 4"));
        }
        let thetas = (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect();
        let phis = (0..n_phi).map(|j| 2.0 * PI * j as f64 / n_phi as f64).collect();
        Ok(Self { thetas, phis })
    }

    /// Grid from explicit samples.
    pub fn from_samples(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() < 2 || phis.len() < 4 {
            return Err(SqueezeError::domain("sphere grid needs n_theta >= 2 and n_phi >= 4"));
        }
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&thetas) || !increasing(&phis) {
            return Err(SqueezeError::domain("grid samples must be strictly increasing"));
        }
        if thetas[0] < 0.0 || thetas[thetas.len() - 1] > PI {
            return Err(SqueezeError::domain("polar samples must lie in [0, pi]"));
        }
        if phis[0] < 0.0 || phis[phis.len() - 1] >= 2.0 * PI {
            return Err(SqueezeError::domain("azimuthal samples must lie in [0, 2 pi)"));
        }
        Ok(Self { thetas, phis })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.thetas.len(), self.phis.len())
    }

    fn is_uniform(&self) -> bool {
        let (nt, np) = self.shape();
        let tol = 1e-12;
        self.thetas
            .iter()
            .enumerate()
            .all(|(i, &t)| (t - PI * i as f64 / (nt - 1) as f64).abs() < tol)
            && self
                .phis
                .iter()
                .enumerate()
                .all(|(j, &p)| (p - 2.0 * PI * j as f64 / np as f64).abs() < tol)
    }
}

/// Wigner function sampled on a [`SphereGrid`], stored row-major by polar index.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    grid: SphereGrid,
    values: Vec<f64>,
    imag_residue: f64,
}

impl WignerField {
    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.values[i_theta * self.grid.phis.len() + i_phi]
    }

    /// Largest imaginary part discarded when forming the real field.
    pub fn imag_residue(&self) -> f64 {
        self.imag_residue
    }

    /// Grid indices `(i_theta, i_phi)` of the largest value.
    pub fn argmax(&self) -> (usize, usize) {
        let np = self.grid.phis.len();
        let (idx, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        (idx / np, idx % np)
    }

    /// `(θ, φ, W)` triples in storage order.
    pub fn triples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let np = self.grid.phis.len();
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.grid.thetas[i / np], self.grid.phis[i % np], w))
    }

    /// `∫ W dΩ` by Clenshaw-Curtis in `θ` and the periodic rule in `φ`.
    ///
    /// Exact up to rounding on a uniform grid with `n_theta - 1 >= N` and
    /// `n_phi > N`. Returns `None` for non-uniform grids.
    pub fn integral(&self) -> Option<f64> {
        if !self.grid.is_uniform() {
            return None;
        }
        let (nt, np) = self.grid.shape();
        let g: Vec<f64> = (0..nt)
            .map(|i| self.values[i * np..(i + 1) * np].iter().sum::<f64>() / np as f64)
            .collect();
        // Cosine coefficients of g on [0, π] by a DCT-I, then ∫ cos(nθ) sin θ dθ.
        let m = nt - 1;
        let mut total = 0.0;
        for n in (0..=m).step_by(2) {
            let mut c = 0.0;
            for (j, &gj) in g.iter().enumerate() {
                let w = if j == 0 || j == m { 0.5 } else { 1.0 };
                c += w * gj * (PI * (n * j) as f64 / m as f64).cos();
            }
            c *= 2.0 / m as f64;
            if n == 0 || n == m {
                c *= 0.5;
            }
            total += c * 2.0 / (1.0 - (n * n) as f64);
        }
        Some(2.0 * PI * total)
    }
}

/// `(K S S; Q m' -m)` for all `K` in `|Q|..=2S`, with `S = N/2`, `m = S - k`,
/// `m' = S - kp` and `Q = m - m'`.
///
/// Two-sided three-term recursion in `K`: forward from the lower end while the
/// magnitude grows, backward from the upper end, matched by least squares on
/// three overlapping points. Normalized by `Σ (2K+1) f² = 1` and signed by
/// `sign f(2S) = (-1)^Q`.
pub(crate) fn three_j_over_k(n: usize, k: usize, kp: usize) -> (usize, Vec<f64>) {
    let q = k.abs_diff(kp);
    let jmin = q;
    let jmax = n;
    let len = jmax - jmin + 1;
    let two_s1 = (n + 1) as f64;
    let qf = q as f64;
    let dm = (k + kp) as f64 - n as f64;
    let a = |j: usize| {
        let j = j as f64;
        (j * j * (two_s1 * two_s1 - j * j) * (j * j - qf * qf)).sqrt()
    };
    let b = |j: usize| {
        let jf = j as f64;
        (2.0 * jf + 1.0) * jf * (jf + 1.0) * dm
    };

    let mut f = vec![0.0; len];
    if len == 1 {
        f[0] = 1.0;
    } else {
        // Backward: A(jmax + 1) = 0.
        let mut back = vec![0.0; len];
        back[len - 1] = 1.0;
        let mut lowest_back = 0;
        let mut j = jmax;
        while j > jmin {
            let i = j - jmin;
            let next = if j + 1 <= jmax { j as f64 * a(j + 1) * back[i + 1] } else { 0.0 };
            back[i - 1] = -(next + b(j) * back[i]) / ((j + 1) as f64 * a(j));
            if back[i - 1].abs() > 1e100 {
                back[i - 1..].iter_mut().for_each(|v| *v *= 1e-100);
            }
            lowest_back = i - 1;
            j -= 1;
        }
        debug_assert_eq!(lowest_back, 0);

        // Forward is only possible with a non-trivial lower start: A(jmin) = 0
        // removes f(jmin - 1), but j A(j+1) vanishes at j = 0.
        if jmin == 0 {
            f = back;
        } else {
            let mut fwd = vec![0.0; len];
            fwd[0] = 1.0;
            let mut stop = len - 1;
            for i in 0..len - 1 {
                let j = jmin + i;
                let prev = if i > 0 { (j + 1) as f64 * a(j) * fwd[i - 1] } else { 0.0 };
                fwd[i + 1] = -(b(j) * fwd[i] + prev) / (j as f64 * a(j + 1));
                if fwd[i + 1].abs() > 1e100 {
                    fwd[..=i + 1].iter_mut().for_each(|v| *v *= 1e-100);
                }
                if i + 1 >= 2 && fwd[i + 1].abs() < fwd[i].abs() {
                    stop = i + 1;
                    break;
                }
            }
            let lo = stop.saturating_sub(2);
            let (num, den) = (lo..=stop).fold((0.0, 0.0), |(nu, de), i| {
                (nu + fwd[i] * back[i], de + back[i] * back[i])
            });
            let lambda = num / den;
            for i in 0..len {
                f[i] = if i <= stop { fwd[i] } else { lambda * back[i] };
            }
        }
    }

    let norm: f64 = f
        .iter()
        .enumerate()
        .map(|(i, v)| (2 * (jmin + i) + 1) as f64 * v * v)
        .sum::<f64>()
        .sqrt();
    let want_negative = q % 2 == 1;
    let sign = if (f[len - 1] < 0.0) == want_negative { 1.0 } else { -1.0 };
    f.iter_mut().for_each(|v| *v *= sign / norm);
    (jmin, f)
}

/// Orthonormal associated Legendre values `P̄_K^Q(cos θ)` for `0 <= Q <= K <= kmax`,
/// Condon-Shortley phase included, so that `Y_KQ = P̄_K^Q e^{iQφ}`.
/// Index `[Q][K - Q]`.
fn normalized_legendre(kmax: usize, theta: f64) -> Vec<Vec<f64>> {
    let (x, s) = (theta.cos(), theta.sin());
    let mut out = Vec::with_capacity(kmax + 1);
    let mut pqq = 1.0 / (4.0 * PI).sqrt();
    for q in 0..=kmax {
        if q > 0 {
            let qf = q as f64;
            pqq *= -((2.0 * qf + 1.0) / (2.0 * qf)).sqrt() * s;
        }
        let mut col = Vec::with_capacity(kmax - q + 1);
        col.push(pqq);
        if q < kmax {
            col.push((2.0 * q as f64 + 3.0).sqrt() * x * pqq);
        }
        for l in q + 2..=kmax {
            let (lf, qf) = (l as f64, q as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - qf * qf)).sqrt();
            let a_prev = ((4.0 * (lf - 1.0) * (lf - 1.0) - 1.0) / ((lf - 1.0) * (lf - 1.0) - qf * qf)).sqrt();
            let v = a * (x * col[l - q - 1] - col[l - q - 2] / a_prev);
            col.push(v);
        }
        out.push(col);
    }
    out
}

/// Multipoles `ρ_KQ`, indexed `[K][Q + K]`.
fn multipoles(state: &DickeState) -> Vec<Vec<C64>> {
    let n = state.n();
    let amps = state.amplitudes();
    let mut rho: Vec<Vec<C64>> = (0..=n).map(|k| vec![C64::new(0.0, 0.0); 2 * k + 1]).collect();
    for (k, &ak) in amps.iter().enumerate() {
        if ak.norm_sqr() == 0.0 {
            continue;
        }
        let parity = if k % 2 == 0 { 1.0 } else { -1.0 };
        for (kp, &akp) in amps.iter().enumerate() {
            if akp.norm_sqr() == 0.0 {
                continue;
            }
            let w = ak * akp.conj() * parity;
            // Q = m - m' = kp - k
            let q = kp as isize - k as isize;
            let (jmin, f) = three_j_over_k(n, k, kp);
            for (i, fv) in f.iter().enumerate() {
                let big_k = jmin + i;
                let idx = (q + big_k as isize) as usize;
                rho[big_k][idx] += w * (((2 * big_k + 1) as f64).sqrt() * fv);
            }
        }
    }
    rho
}

/// Spin Wigner function of `state` sampled on `grid`. Limited to
/// `N <= WIGNER_MAX_N`.
pub fn wigner_function(state: &DickeState, grid: &SphereGrid) -> Result<WignerField> {
    let n = state.n();
    if n > WIGNER_MAX_N {
        return Err(SqueezeError::UnsupportedSize { n, max: WIGNER_MAX_N });
    }
    state.check_normalized(1e-6)?;
    let rho = multipoles(state);
    let np = grid.phis.len();
    let mut values = Vec::with_capacity(grid.thetas.len() * np);
    let mut imag_residue: f64 = 0.0;

    for &theta in &grid.thetas {
        let leg = normalized_legendre(n, theta);
        // c_Q(θ) = Σ_K ρ_KQ P̄_K^|Q| with Y_{K,-Q} = (-1)^Q conj(Y_KQ).
        let mut c_pos = vec![C64::new(0.0, 0.0); n + 1];
        let mut c_neg = vec![C64::new(0.0, 0.0); n + 1];
        for (q, col) in leg.iter().enumerate() {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            for (i, &p) in col.iter().enumerate() {
                let big_k = q + i;
                c_pos[q] += rho[big_k][big_k + q] * p;
                if q > 0 {
                    c_neg[q] += rho[big_k][big_k - q] * (sign * p);
                }
            }
        }
        for &phi in &grid.phis {
            let mut w = c_pos[0];
            for q in 1..=n {
                let e = C64::from_polar(1.0, q as f64 * phi);
                w += c_pos[q] * e + c_neg[q] * e.conj();
            }
            imag_residue = imag_residue.max(w.im.abs());
            values.push(w.re);
        }
    }
    Ok(WignerField { grid: grid.clone(), values, imag_residue })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::{basis_state, coherent_state, ln_factorials};

    /// Racah's closed form with doubled angular momenta; reliable for small j.
    fn racah_3j(tj: [i64; 3], tm: [i64; 3]) -> f64 {
        if tm.iter().sum::<i64>() != 0 {
            return 0.0;
        }
        let lf = ln_factorials(64);
        let fact = |x: i64| -> Option<f64> {
            if x < 0 || x % 2 != 0 {
                None
            } else {
                Some(lf[(x / 2) as usize])
            }
        };
        let [j1, j2, j3] = tj;
        let [m1, m2, m3] = tm;
        let tri = [j1 + j2 - j3, j1 - j2 + j3, -j1 + j2 + j3];
        if tri.iter().any(|&t| t < 0) || (0..3).any(|i| tm[i].abs() > tj[i]) {
            return 0.0;
        }
        let delta = fact(tri[0]).unwrap() + fact(tri[1]).unwrap() + fact(tri[2]).unwrap()
            - fact(j1 + j2 + j3 + 2).unwrap();
        let pref = 0.5 * delta
            + 0.5
                * [j1 + m1, j1 - m1, j2 + m2, j2 - m2, j3 + m3, j3 - m3]
                    .iter()
                    .map(|&x| fact(x).unwrap())
                    .sum::<f64>();
        let mut sum = 0.0;
        for t in 0..=64 {
            let tt = 2 * t;
            let args = [tt, j3 - j2 + tt + m1, j3 - j1 + tt - m2, j1 + j2 - j3 - tt, j1 - tt - m1, j2 - tt + m2];
            if args.iter().any(|&x| x < 0) {
                continue;
            }
            let ln: f64 = args.iter().map(|&x| fact(x).unwrap()).sum();
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * (pref - ln).exp();
        }
        let phase_exp = (j1 - j2 - m3) / 2;
        let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        phase * sum
    }

    #[test]
    fn recursion_matches_racah() {
        for n in 1..=10usize {
            for k in 0..=n {
                for kp in 0..=n {
                    let (jmin, f) = three_j_over_k(n, k, kp);
                    let two_s = n as i64;
                    // (K S S; Q m' -m) in doubled units
                    let tm_p = two_s - 2 * kp as i64;
                    let tm = two_s - 2 * k as i64;
                    for (i, &v) in f.iter().enumerate() {
                        let big_k = (jmin + i) as i64;
                        let q2 = tm - tm_p;
                        let expect = racah_3j([2 * big_k, two_s, two_s], [q2, tm_p, -tm]);
                        assert!((v - expect).abs() < 1e-12, "N={n} k={k} kp={kp} K={big_k}: {v} vs {expect}");
                    }
                }
            }
        }
    }

    #[test]
    fn recursion_is_normalized_at_large_spin() {
        for (k, kp) in [(0, 0), (50, 50), (3, 97), (20, 21), (0, 100), (99, 1)] {
            let (jmin, f) = three_j_over_k(100, k, kp);
            let s: f64 = f.iter().enumerate().map(|(i, v)| (2 * (jmin + i) + 1) as f64 * v * v).sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(f.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn orthogonality_in_upper_index_at_large_spin() {
        // Σ_K (2K+1) (K S S; Q m' -m)(K S S; Q m'' -m''') = δ for matching Q
        let n = 80;
        let (j1, f1) = three_j_over_k(n, 10, 30);
        let (j2, f2) = three_j_over_k(n, 11, 31);
        assert_eq!(j1, j2);
        let dot: f64 = f1.iter().zip(&f2).enumerate().map(|(i, (a, b))| (2 * (j1 + i) + 1) as f64 * a * b).sum();
        assert!(dot.abs() < 1e-11, "{dot}");
    }

    #[test]
    fn legendre_matches_low_order_harmonics() {
        let theta = 0.7f64;
        let leg = normalized_legendre(2, theta);
        let c = 1.0 / (4.0 * PI).sqrt();
        assert!((leg[0][0] - c).abs() < 1e-15);
        assert!((leg[0][1] - (3.0 / (4.0 * PI)).sqrt() * theta.cos()).abs() < 1e-15);
        assert!((leg[1][0] + (3.0 / (8.0 * PI)).sqrt() * theta.sin()).abs() < 1e-15);
        let y20 = (5.0 / (16.0 * PI)).sqrt() * (3.0 * theta.cos().powi(2) - 1.0);
        assert!((leg[0][2] - y20).abs() < 1e-15);
        let y22 = 0.25 * (15.0 / (2.0 * PI)).sqrt() * theta.sin().powi(2);
        assert!((leg[2][0] - y22).abs() < 1e-15);
    }

    #[test]
    fn north_pole_state_peaks_at_pole() {
        let grid = SphereGrid::uniform(61, 24).unwrap();
        for n in [1, 4, 20] {
            let field = wigner_function(&basis_state(n, 0).unwrap(), &grid).unwrap();
            assert_eq!(field.argmax().0, 0);
            for i in 0..61 {
                let row = &field.values()[i * 24..(i + 1) * 24];
                let spread = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                    - row.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(spread < 1e-10, "N={n} row {i}");
            }
        }
    }

    #[test]
    fn coherent_state_peaks_on_plus_x() {
        let grid = SphereGrid::uniform(91, 72).unwrap();
        let field = wigner_function(&coherent_state(20).unwrap(), &grid).unwrap();
        let (it, ip) = field.argmax();
        assert!((grid.thetas()[it] - PI / 2.0).abs() < 1e-12);
        assert_eq!(grid.phis()[ip], 0.0);
        assert!(field.imag_residue() < 1e-9);
    }

    #[test]
    fn integral_is_state_independent() {
        let n = 12;
        let grid = SphereGrid::uniform(n + 9, n + 5).unwrap();
        let expect = (4.0 * PI / (n as f64 + 1.0)).sqrt();
        let states = [
            basis_state(n, 0).unwrap(),
            basis_state(n, 5).unwrap(),
            coherent_state(n).unwrap(),
            crate::dicke::rotate(&coherent_state(n).unwrap(), crate::dicke::SpinAxis::Unit([0.2, 0.5, 0.84]), 1.1).unwrap(),
        ];
        for s in &states {
            let got = wigner_function(s, &grid).unwrap().integral().unwrap();
            assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
        }
    }

    #[test]
    fn size_guard() {
        let grid = SphereGrid::uniform(3, 4).unwrap();
        assert!(matches!(
            wigner_function(&coherent_state(101).unwrap(), &grid),
            Err(SqueezeError::UnsupportedSize { n: 101, max: 100 })
        ));
    }

    #[test]
    fn grid_validation() {
        assert!(SphereGrid::uniform(1, 8).is_err());
        assert!(SphereGrid::uniform(5, 3).is_err());
        assert!(SphereGrid::from_samples(vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 2.0, 3.0]).is_err());
        assert!(SphereGrid::from_samples(vec![0.0, 1.0], vec![0.0, 1.0, 2.0, 7.0]).is_err());
    }
}
