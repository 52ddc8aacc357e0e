//! Phase-uncertainty figures of merit.
//!
//! * Wineland parameter `ξ² = N Δφ_W²` with `Δφ_W = sqrt(Var_min) / |<S>|`.
//! * Quantum Fisher information `F = 4 λ_max(cov)` and `Δφ_F = F^(-1/2)`.
//! * Averages over the outcome `h` of the measurement-based squeezer.

mod optimize;
mod scaling;

use nalgebra::{SymmetricEigen, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dicke::{coherent_log_amplitudes, coherent_state, moments, moments_window, DickeState, SpinMoments};
use crate::error::{Result, SqueezeError};
use crate::squeezers::{kraus_real_window, oat_apply, HQuadrature, MeasConfig, OATConfig, SqueezerKind};

pub use optimize::{default_bracket, golden_section_log, optimize_chi, optimize_chi_in, OptimumReport};
pub use scaling::{fit_power_law, scaling_fit, ScalingFit, ScalingMetric};

/// Tolerance on `∫ p(h) dh = 1` before an average is rejected.
const NORMALIZATION_TOL: f64 = 1e-6;

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub n_electrons: usize,
    pub chi: f64,
    pub delta_phi_w: f64,
    pub delta_phi_f: f64,
    pub xi2: f64,
    pub fisher: f64,
    pub sql: f64,
    pub heisenberg: f64,
    pub squeezer_kind: SqueezerKind,
}

/// Standard quantum limit `N^(-1/2)`.
pub fn sql(n: usize) -> f64 {
    (n as f64).sqrt().recip()
}

/// Heisenberg limit `1 / N`.
pub fn heisenberg(n: usize) -> f64 {
    (n as f64).recip()
}

/// Output of [`wineland_metrics`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wineland {
    pub xi2: f64,
    pub delta_phi_w: f64,
    /// Angle of the minimal-variance direction from `e1 = ẑ × n̄ / |ẑ × n̄|`
    /// towards `e2 = n̄ × e1`, in `(-π/2, π/2]`.
    pub angle: f64,
    pub var_min: f64,
    pub mean_norm: f64,
}

/// Transverse frame `(e1, e2)` around the unit mean direction `n̄`.
pub fn transverse_frame(nbar: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut e1 = Vector3::z().cross(nbar);
    if e1.norm() < 1e-12 {
        e1 = Vector3::x().cross(nbar);
    }
    let e1 = e1.normalize();
    let e2 = nbar.cross(&e1);
    (e1, e2)
}

/// Wineland metrics from precomputed moments of an `N`-electron state.
pub fn wineland_from_moments(n: usize, mom: &SpinMoments) -> Result<Wineland> {
    let mean = mom.mean_vector();
    let mean_norm = mean.norm();
    if !(mean_norm > 1e-9 * n as f64) {
        return Err(SqueezeError::MeanSpinDegenerate { norm: mean_norm });
    }
    let (e1, e2) = transverse_frame(&(mean / mean_norm));
    let cov = mom.covariance_matrix();
    let a = e1.dot(&(cov * e1));
    let c = e2.dot(&(cov * e2));
    let b = e1.dot(&(cov * e2));
    let half_diff = 0.5 * (a - c);
    let var_min = (0.5 * (a + c) - half_diff.hypot(b)).max(0.0);
    // principal direction of the larger eigenvalue, then rotate by π/2
    let major = 0.5 * (2.0 * b).atan2(a - c);
    let mut angle = major + std::f64::consts::FRAC_PI_2;
    if angle > std::f64::consts::FRAC_PI_2 {
        angle -= std::f64::consts::PI;
    }
    let delta_phi_w = var_min.sqrt() / mean_norm;
    Ok(Wineland { xi2: n as f64 * delta_phi_w * delta_phi_w, delta_phi_w, angle, var_min, mean_norm })
}

/// Wineland squeezing of a state in its own mean-spin frame.
pub fn wineland_metrics(state: &DickeState) -> Result<Wineland> {
    wineland_from_moments(state.n(), &moments(state)?)
}

/// `4 λ_max(cov)`.
pub fn fisher_from_moments(mom: &SpinMoments) -> f64 {
    let eig = SymmetricEigen::new(mom.covariance_matrix());
    4.0 * eig.eigenvalues.max()
}

/// Pure-state quantum Fisher information maximized over rotation generators.
pub fn qfi(state: &DickeState) -> Result<f64> {
    Ok(fisher_from_moments(&moments(state)?))
}

/// Readout-frame squeezing of a post-measurement state:
/// `N Var(S_z) / (<S_x>² + <S_y>²)`.
///
/// The measured `S_z` is the quadrature that the phase readout sees after the
/// alignment rotation, and the fringe slope is set by the equatorial
/// projection of the mean spin, which the outcome `h` pulls towards a pole.
pub fn readout_xi2(n: usize, mom: &SpinMoments) -> f64 {
    let eq2 = mom.mean[0] * mom.mean[0] + mom.mean[1] * mom.mean[1];
    n as f64 * mom.covariance[2][2] / eq2
}

/// Row without squeezing.
pub fn none_metrics(n: usize) -> Result<MetricsRow> {
    if n == 0 {
        return Err(SqueezeError::domain("N must be at least 1"));
    }
    let s = sql(n);
    Ok(MetricsRow {
        n_electrons: n,
        chi: 0.0,
        delta_phi_w: s,
        delta_phi_f: s,
        xi2: 1.0,
        fisher: n as f64,
        sql: s,
        heisenberg: heisenberg(n),
        squeezer_kind: SqueezerKind::None,
    })
}

/// Twisted coherent state `oat_apply(coherent_state(N), χ)`.
pub fn oat_state(n: usize, chi: f64) -> Result<DickeState> {
    Ok(oat_apply(&coherent_state(n)?, &OATConfig::new(chi)?))
}

/// Metrics of the interaction-based squeezer.
pub fn oat_metrics(n: usize, chi: f64) -> Result<MetricsRow> {
    if n < 2 {
        return Err(SqueezeError::domain("N must be at least 2"));
    }
    let mom = moments(&oat_state(n, chi)?)?;
    let w = wineland_from_moments(n, &mom)?;
    let fisher = fisher_from_moments(&mom);
    Ok(MetricsRow {
        n_electrons: n,
        chi,
        delta_phi_w: w.delta_phi_w,
        delta_phi_f: fisher.sqrt().recip(),
        xi2: w.xi2,
        fisher,
        sql: sql(n),
        heisenberg: heisenberg(n),
        squeezer_kind: SqueezerKind::Interaction,
    })
}

/// Outcome-averaged quantities of the measurement-based squeezer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasAverages {
    /// `sqrt(∫ p ξ² dh / N)`.
    pub delta_phi_w: f64,
    /// `∫ p F^(-1/2) dh`.
    pub delta_phi_f: f64,
    /// `∫ p F dh`.
    pub fisher_avg: f64,
    /// `∫ p dh` on the quadrature grid.
    pub normalization: f64,
    /// Number of quadrature nodes carrying weight.
    pub nodes: usize,
}

impl MeasAverages {
    /// `(∫ p F dh)^(-1/2)`, the mean-Fisher form of `Δφ_F`.
    pub fn delta_phi_f_mean_fisher(&self) -> f64 {
        self.fisher_avg.sqrt().recip()
    }
}

/// Averages over `h` for a coherent input with the given quadrature refinement.
pub fn meas_averages_refined(n: usize, chi: f64, refine: usize) -> Result<MeasAverages> {
    if n < 2 {
        return Err(SqueezeError::domain("N must be at least 2"));
    }
    let cfg = MeasConfig::from_chi(chi)?;
    if cfg.is_noop() {
        let s = sql(n);
        return Ok(MeasAverages { delta_phi_w: s, delta_phi_f: s, fisher_avg: n as f64, normalization: 1.0, nodes: 0 });
    }
    let quad = HQuadrature::with_refinement(n, &cfg, refine)?;
    let log_amps = coherent_log_amplitudes(n);
    let nf = n as f64;

    let per_node: Vec<Option<[f64; 4]>> = quad
        .nodes
        .par_iter()
        .zip(quad.weights.par_iter())
        .map(|(&h, &w)| {
            let (ln_p, offset, amps) = kraus_real_window(&log_amps, chi, h)?;
            let wp = w * ln_p.exp();
            let mom = moments_window(n, offset, &amps);
            let f = fisher_from_moments(&mom);
            Some([wp, wp * readout_xi2(n, &mom), wp * f.sqrt().recip(), wp * f])
        })
        .collect();

    let mut acc = [0.0; 4];
    let mut nodes = 0;
    for v in per_node.into_iter().flatten() {
        nodes += 1;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    if !((acc[0] - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(SqueezeError::Integration(format!(
            "outcome density integrates to {} on the h grid (N = {n}, chi = {chi})",
            acc[0]
        )));
    }
    Ok(MeasAverages {
        delta_phi_w: (acc[1] / nf).sqrt(),
        delta_phi_f: acc[2],
        fisher_avg: acc[3],
        normalization: acc[0],
        nodes,
    })
}

/// Averages over `h` on the default quadrature.
pub fn meas_averages(n: usize, chi: f64) -> Result<MeasAverages> {
    meas_averages_refined(n, chi, 1)
}

/// Metrics of the measurement-based squeezer. `fisher` holds `∫ p F dh`.
pub fn meas_metrics(n: usize, chi: f64) -> Result<MetricsRow> {
    let avg = meas_averages(n, chi)?;
    Ok(MetricsRow {
        n_electrons: n,
        chi,
        delta_phi_w: avg.delta_phi_w,
        delta_phi_f: avg.delta_phi_f,
        xi2: n as f64 * avg.delta_phi_w * avg.delta_phi_w,
        fisher: avg.fisher_avg,
        sql: sql(n),
        heisenberg: heisenberg(n),
        squeezer_kind: SqueezerKind::Measurement,
    })
}

/// Closed form `F = N + (N² - N)/2 (1 - e^-χ)` and `F^(-1/2)`.
pub fn analytic_meas_fisher(n: usize, chi: f64) -> Result<(f64, f64)> {
    if n == 0 || !(chi.is_finite() && chi >= 0.0) {
        return Err(SqueezeError::domain("need N >= 1 and finite chi >= 0"));
    }
    let nf = n as f64;
    let f = nf + 0.5 * (nf * nf - nf) * (-(-chi).exp_m1());
    Ok((f, f.sqrt().recip()))
}

/// Metrics for any squeezer kind. `kind = None` ignores `chi`.
pub fn metrics(kind: SqueezerKind, n: usize, chi: f64) -> Result<MetricsRow> {
    match kind {
        SqueezerKind::None => none_metrics(n),
        SqueezerKind::Interaction => oat_metrics(n, chi),
        SqueezerKind::Measurement => meas_metrics(n, chi),
    }
}

/// Like [`metrics`], but a vanishing mean spin yields `Δφ_W = ξ² = ∞` with the
/// Fisher columns still filled in.
pub fn metrics_or_degenerate(kind: SqueezerKind, n: usize, chi: f64) -> Result<MetricsRow> {
    match metrics(kind, n, chi) {
        Err(SqueezeError::MeanSpinDegenerate { .. }) if kind == SqueezerKind::Interaction => {
            let fisher = qfi(&oat_state(n, chi)?)?;
            Ok(MetricsRow {
                n_electrons: n,
                chi,
                delta_phi_w: f64::INFINITY,
                delta_phi_f: fisher.sqrt().recip(),
                xi2: f64::INFINITY,
                fisher,
                sql: sql(n),
                heisenberg: heisenberg(n),
                squeezer_kind: kind,
            })
        }
        other => other,
    }
}
