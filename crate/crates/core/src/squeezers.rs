//! State preparation: one-axis twisting and Gaussian non-demolition measurement.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dicke::{m_of, moments, number_distribution, rotate, DickeState, SpinAxis};
use crate::error::{Result, SqueezeError};

/// Outcomes with `p(h)` below this are treated as impossible.
pub const MIN_OUTCOME_DENSITY: f64 = 1e-300;

/// Amplitudes whose log-magnitude falls more than this below the largest are
/// dropped from windowed post-measurement states (relative probability
/// below `e^-80`).
const LOG_WINDOW: f64 = 40.0;

/// One-axis twisting strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OATConfig {
    chi_int: f64,
}

impl OATConfig {
    pub fn new(chi_int: f64) -> Result<Self> {
        if !(chi_int.is_finite() && chi_int >= 0.0) {
            return Err(SqueezeError::domain(format!("chi_int must be finite and >= 0, got {chi_int}")));
        }
        Ok(Self { chi_int })
    }

    pub fn chi(&self) -> f64 {
        self.chi_int
    }
}

/// Measurement strength `χ_meas = 1 / (2 σ²)`; `χ_meas = 0` is no measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasConfig {
    chi_meas: f64,
    sigma: f64,
}

impl MeasConfig {
    pub fn from_chi(chi_meas: f64) -> Result<Self> {
        if !(chi_meas.is_finite() && chi_meas >= 0.0) {
            return Err(SqueezeError::domain(format!("chi_meas must be finite and >= 0, got {chi_meas}")));
        }
        let sigma = if chi_meas == 0.0 { f64::INFINITY } else { (2.0 * chi_meas).sqrt().recip() };
        Ok(Self { chi_meas, sigma })
    }

    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || sigma.is_nan() {
            return Err(SqueezeError::domain(format!("sigma must be > 0, got {sigma}")));
        }
        if sigma.is_infinite() {
            return Ok(Self { chi_meas: 0.0, sigma });
        }
        Ok(Self { chi_meas: 0.5 / (sigma * sigma), sigma })
    }

    pub fn chi(&self) -> f64 {
        self.chi_meas
    }

    /// Detector resolution in electrons.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn is_noop(&self) -> bool {
        self.chi_meas == 0.0
    }

    fn require_active(&self) -> Result<()> {
        if self.is_noop() {
            return Err(SqueezeError::domain("measurement with chi_meas = 0 has no Kraus operator"));
        }
        Ok(())
    }
}

/// Result of a measurement: outcome, its density and the conditional state.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasOutcome {
    pub h: f64,
    pub density: f64,
    pub post_state: DickeState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqueezerKind {
    None,
    Interaction,
    Measurement,
}

impl SqueezerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Interaction => "interaction",
            Self::Measurement => "measurement",
        }
    }
}

impl std::fmt::Display for SqueezerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SqueezerKind {
    type Err = SqueezeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "interaction" => Ok(Self::Interaction),
            "measurement" => Ok(Self::Measurement),
            other => Err(SqueezeError::domain(format!("unknown squeezer kind '{other}'"))),
        }
    }
}

/// Squeezer selection with its strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SqueezerConfig {
    None,
    Interaction { chi: f64 },
    Measurement { chi: f64 },
}

impl SqueezerConfig {
    pub fn new(kind: SqueezerKind, chi: f64) -> Result<Self> {
        let cfg = match kind {
            SqueezerKind::None => Self::None,
            SqueezerKind::Interaction => Self::Interaction { chi: OATConfig::new(chi)?.chi() },
            SqueezerKind::Measurement => Self::Measurement { chi: MeasConfig::from_chi(chi)?.chi() },
        };
        Ok(cfg)
    }

    pub fn kind(&self) -> SqueezerKind {
        match self {
            Self::None => SqueezerKind::None,
            Self::Interaction { .. } => SqueezerKind::Interaction,
            Self::Measurement { .. } => SqueezerKind::Measurement,
        }
    }

    pub fn chi(&self) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::Interaction { chi } | Self::Measurement { chi } => chi,
        }
    }
}

/// One-axis twisting `exp(-i χ S_z² / 2)`.
pub fn oat_apply(state: &DickeState, cfg: &OATConfig) -> DickeState {
    let n = state.n();
    let chi = cfg.chi();
    let amps = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let m = m_of(n, k);
            // reduce the phase mod 2π before exponentiating; m² can reach 10^6
            let phase = (-0.5 * chi * m * m).rem_euclid(2.0 * PI);
            a * C64::from_polar(1.0, phase)
        })
        .collect();
    DickeState::from_normalized(n, amps)
}

/// Closed-form alignment angle of a twisted coherent state,
/// `δ = ½ arctan(4 sin(χ/2) cos^(N-2)(χ/2) / (1 - cos^(N-2) χ))`, branch in `[0, π/2]`.
/// `χ = 0` returns the limit `π/4`.
pub fn oat_tilt_delta(n: usize, chi: f64) -> Result<f64> {
    if n < 2 {
        return Err(SqueezeError::domain("tilt angle needs N >= 2"));
    }
    if !(chi.is_finite() && chi >= 0.0) {
        return Err(SqueezeError::domain(format!("chi must be finite and >= 0, got {chi}")));
    }
    if chi == 0.0 {
        return Ok(FRAC_PI_4);
    }
    let p = (n - 2) as i32;
    let num = 4.0 * (chi / 2.0).sin() * (chi / 2.0).cos().powi(p);
    let den = 1.0 - chi.cos().powi(p);
    if num == 0.0 && den == 0.0 {
        return Ok(FRAC_PI_4);
    }
    let mut t = num.atan2(den);
    if t < 0.0 {
        t += PI;
    }
    Ok(0.5 * t)
}

/// Rotates a twisted state about its mean-spin axis so that the
/// minimal-variance quadrature lies along `y`, the direction a phase shift
/// displaces the mean spin. Uses `π/2 - δ` with `δ` from [`oat_tilt_delta`],
/// falling back to `-δ` if that branch leaves the larger variance on `y`.
pub fn oat_align(state: &DickeState, chi: f64) -> Result<DickeState> {
    let delta = oat_tilt_delta(state.n(), chi)?;
    let mom = moments(state)?;
    let mean = mom.mean_vector();
    let norm = mean.norm();
    if !(norm > 1e-9 * state.n() as f64) {
        return Err(SqueezeError::MeanSpinDegenerate { norm });
    }
    let axis = if mean[1].abs() <= 1e-12 * norm && mean[2].abs() <= 1e-12 * norm && mean[0] > 0.0 {
        SpinAxis::X
    } else {
        SpinAxis::unit([mean[0], mean[1], mean[2]])?
    };
    let out = rotate(state, axis, FRAC_PI_2 - delta)?;
    let m = moments(&out)?;
    if m.covariance[1][1] <= m.covariance[2][2] {
        Ok(out)
    } else {
        rotate(state, axis, -delta)
    }
}

/// `ln|b_k|` of the Kraus-weighted amplitudes for the given `ln|a_k|`.
fn kraus_log_weights(log_mag: &[f64], chi: f64, h: f64) -> Vec<f64> {
    let pref = 0.25 * (chi / PI).ln();
    log_mag
        .iter()
        .enumerate()
        .map(|(k, &l)| {
            let d = k as f64 - h;
            pref - 0.5 * chi * d * d + l
        })
        .collect()
}

/// Log-sum of `exp(2 lw)` and the maximum of `lw`.
fn log_norm_sqr(lw: &[f64]) -> (f64, f64) {
    let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, max);
    }
    let s: f64 = lw.iter().map(|&l| (2.0 * (l - max)).exp()).sum();
    (2.0 * max + s.ln(), max)
}

/// Kraus update `b_k = (χ/π)^(1/4) exp(-χ (k - h)² / 2) a_k`.
pub fn kraus_apply(state: &DickeState, cfg: &MeasConfig, h: f64) -> Result<MeasOutcome> {
    cfg.require_active()?;
    if !h.is_finite() {
        return Err(SqueezeError::domain("measurement outcome must be finite"));
    }
    let amps = state.amplitudes();
    let log_mag: Vec<f64> = amps.iter().map(|a| a.norm().ln()).collect();
    let lw = kraus_log_weights(&log_mag, cfg.chi(), h);
    let (ln_p, max) = log_norm_sqr(&lw);
    let density = ln_p.exp();
    if !(density >= MIN_OUTCOME_DENSITY) {
        return Err(SqueezeError::DegenerateOutcome { h, density });
    }
    let ln_norm = 0.5 * (ln_p - 2.0 * max);
    let post = amps
        .iter()
        .zip(&lw)
        .map(|(a, &l)| {
            let mag = a.norm();
            if mag == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                (a / mag) * (l - max - ln_norm).exp()
            }
        })
        .collect();
    Ok(MeasOutcome { h, density, post_state: DickeState::from_normalized(state.n(), post) })
}

/// Post-measurement amplitudes of a state with real non-negative amplitudes
/// `exp(log_mag[k])`, restricted to the contiguous window holding all
/// non-negligible weight. Returns `(ln p(h), offset, amplitudes)`, or `None`
/// when `p(h)` underflows [`MIN_OUTCOME_DENSITY`].
pub(crate) fn kraus_real_window(log_mag: &[f64], chi: f64, h: f64) -> Option<(f64, usize, Vec<C64>)> {
    let lw = kraus_log_weights(log_mag, chi, h);
    let (ln_p, max) = log_norm_sqr(&lw);
    if !(ln_p.exp() >= MIN_OUTCOME_DENSITY) {
        return None;
    }
    let lo = lw.iter().position(|&l| l - max > -LOG_WINDOW)?;
    let hi = lw.iter().rposition(|&l| l - max > -LOG_WINDOW)?;
    let ln_norm = 0.5 * (ln_p - 2.0 * max);
    let amps = lw[lo..=hi]
        .iter()
        .map(|&l| C64::new((l - max - ln_norm).exp(), 0.0))
        .collect();
    Some((ln_p, lo, amps))
}

/// Outcome density `p(h) = sqrt(χ/π) Σ_k |a_k|² exp(-χ (k - h)²)`.
pub fn outcome_density(state: &DickeState, cfg: &MeasConfig, h: f64) -> Result<f64> {
    cfg.require_active()?;
    let chi = cfg.chi();
    let s: f64 = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let d = k as f64 - h;
            a.norm_sqr() * (-chi * d * d).exp()
        })
        .sum();
    Ok((chi / PI).sqrt() * s)
}

/// Draws `h` from `p(h)`: a count `k` from the number distribution, then
/// Gaussian detector noise of width `σ`.
pub(crate) fn sample_h<R: Rng + ?Sized>(dist: &WeightedIndex<f64>, sigma: f64, rng: &mut R) -> f64 {
    let k = dist.sample(rng);
    let z: f64 = rng.sample(StandardNormal);
    k as f64 + sigma * z
}

pub(crate) fn count_sampler(state: &DickeState) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(number_distribution(state))
        .map_err(|e| SqueezeError::ContractViolation(format!("invalid number distribution: {e}")))
}

/// Samples an outcome from `p(h)` and applies the corresponding Kraus update.
pub fn sample_outcome<R: Rng + ?Sized>(state: &DickeState, cfg: &MeasConfig, rng: &mut R) -> Result<MeasOutcome> {
    cfg.require_active()?;
    let dist = count_sampler(state)?;
    let h = sample_h(&dist, cfg.sigma(), rng);
    kraus_apply(state, cfg, h)
}

/// Trapezoid rule over the outcome axis.
#[derive(Debug, Clone, PartialEq)]
pub struct HQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HQuadrature {
    /// Uniform grid on `[-6σ, N + 6σ]` with spacing at most `min(σ, 1) / 8`.
    pub fn new(n: usize, cfg: &MeasConfig) -> Result<Self> {
        Self::with_refinement(n, cfg, 1)
    }

    /// As [`HQuadrature::new`] with the spacing divided by `refine`.
    pub fn with_refinement(n: usize, cfg: &MeasConfig, refine: usize) -> Result<Self> {
        cfg.require_active()?;
        if refine == 0 {
            return Err(SqueezeError::domain("refinement factor must be >= 1"));
        }
        let sigma = cfg.sigma();
        let (lo, hi) = (-6.0 * sigma, n as f64 + 6.0 * sigma);
        let max_step = sigma.min(1.0) / 8.0 / refine as f64;
        let intervals = ((hi - lo) / max_step).ceil() as usize;
        let step = (hi - lo) / intervals as f64;
        let nodes: Vec<f64> = (0..=intervals).map(|i| lo + step * i as f64).collect();
        let mut weights = vec![step; intervals + 1];
        weights[0] *= 0.5;
        weights[intervals] *= 0.5;
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }
}

/// Quadrature grid over `h` for `state`'s batch size.
pub fn h_quadrature(state: &DickeState, cfg: &MeasConfig) -> Result<HQuadrature> {
    HQuadrature::new(state.n(), cfg)
}
