//! Hardware calculators: beam kinematics, capacitive channels, Coulomb phases,
//! cavity constants, dose budgets and inelastic losses.
//!
//! Public signatures carry explicit units (keV, nA, m, nm, Å); internal
//! arithmetic is SI.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SqueezeError};

/// Fixed physical constants (CODATA 2018).
pub mod constants {
    /// Fine-structure constant.
    pub const ALPHA: f64 = 7.2973525693e-3;
    /// Electron rest energy in keV.
    pub const ELECTRON_REST_KEV: f64 = 510.99895;
    /// `e² / (4π ε₀)` in eV nm.
    pub const COULOMB_EV_NM: f64 = 1.43996;
    /// Reduced Planck constant in eV s.
    pub const HBAR_EV_S: f64 = 6.582119569e-16;
    /// Speed of light in m/s.
    pub const C: f64 = 2.99792458e8;
    /// Vacuum permittivity in F/m.
    pub const EPSILON_0: f64 = 8.8541878128e-12;
    /// Elementary charge in C.
    pub const E_CHARGE: f64 = 1.602176634e-19;
    /// Planck constant in J s.
    pub const PLANCK_J_S: f64 = 6.62607015e-34;
    /// Reduced Planck constant in J s.
    pub const HBAR_J_S: f64 = PLANCK_J_S / (2.0 * std::f64::consts::PI);
}

use constants::*;

pub fn kev_to_joule(e_kev: f64) -> f64 {
    e_kev * 1e3 * E_CHARGE
}

pub fn joule_to_kev(e_j: f64) -> f64 {
    e_j / E_CHARGE * 1e-3
}

pub fn nm_to_m(x: f64) -> f64 {
    x * 1e-9
}

pub fn m_to_nm(x: f64) -> f64 {
    x * 1e9
}

pub fn na_to_ampere(i: f64) -> f64 {
    i * 1e-9
}

/// Beam energy and current.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamParams {
    pub kinetic_energy_kev: f64,
    pub current_na: f64,
}

impl BeamParams {
    pub fn new(kinetic_energy_kev: f64, current_na: f64) -> Result<Self> {
        if !(kinetic_energy_kev > 0.0 && kinetic_energy_kev.is_finite()) {
            return Err(SqueezeError::domain("beam energy must be positive"));
        }
        if !(current_na > 0.0 && current_na.is_finite()) {
            return Err(SqueezeError::domain("beam current must be positive"));
        }
        Ok(Self { kinetic_energy_kev, current_na })
    }
}

/// Two parallel conducting channels: length, center separation and radius in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGeometry {
    pub length_m: f64,
    pub separation_m: f64,
    pub radius_m: f64,
}

impl ChannelGeometry {
    pub fn new(length_m: f64, separation_m: f64, radius_m: f64) -> Result<Self> {
        if !(radius_m > 0.0 && separation_m > 2.0 * radius_m && separation_m.is_finite()) {
            return Err(SqueezeError::Geometry(format!(
                "need d > 2r > 0, got d = {separation_m}, r = {radius_m}"
            )));
        }
        if !(length_m > 0.0 && length_m.is_finite()) {
            return Err(SqueezeError::Geometry(format!("channel length must be positive, got {length_m}")));
        }
        Ok(Self { length_m, separation_m, radius_m })
    }
}

/// Electron-photon coupling of the readout cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub g_q: C64,
}

/// `β = v/c` for kinetic energy `E` from `E = m c² (γ - 1)`.
pub fn beta_from_energy(e_kev: f64) -> Result<f64> {
    if !(e_kev >= 0.0 && e_kev.is_finite()) {
        return Err(SqueezeError::domain(format!("kinetic energy must be >= 0, got {e_kev}")));
    }
    let gamma = 1.0 + e_kev / ELECTRON_REST_KEV;
    Ok((1.0 - 1.0 / (gamma * gamma)).sqrt())
}

fn velocity(e_kev: f64) -> Result<f64> {
    let beta = beta_from_energy(e_kev)?;
    if beta == 0.0 {
        return Err(SqueezeError::domain("electron at rest has no transit time"));
    }
    Ok(beta * C)
}

/// Mutual capacitance `C = l ε₀ π / arccosh(d / 2r)` in farads.
pub fn mutual_capacitance(geom: &ChannelGeometry) -> Result<f64> {
    let x = geom.separation_m / (2.0 * geom.radius_m);
    if !(x > 1.0) {
        return Err(SqueezeError::Geometry("channels touch or overlap (d <= 2r)".into()));
    }
    Ok(geom.length_m * EPSILON_0 * std::f64::consts::PI / x.acosh())
}

/// `χ_int = 4 (α/β) arccosh(d / 2r)`, independent of the channel length.
pub fn chi_int_cylindrical(d_over_r: f64, e_kev: f64) -> Result<f64> {
    if !(d_over_r > 2.0 && d_over_r.is_finite()) {
        return Err(SqueezeError::Geometry(format!("need d/r > 2, got {d_over_r}")));
    }
    let beta = beta_from_energy(e_kev)?;
    if beta == 0.0 {
        return Err(SqueezeError::domain("beam energy must be positive"));
    }
    Ok(4.0 * ALPHA / beta * (d_over_r / 2.0).acosh())
}

/// `χ_int = e² l / (v ħ C)` for channel length `l` (m), energy (keV) and
/// capacitance `C` (F).
pub fn chi_int_general(length_m: f64, e_kev: f64, capacitance_f: f64) -> Result<f64> {
    if !(length_m > 0.0 && capacitance_f > 0.0) {
        return Err(SqueezeError::domain("length and capacitance must be positive"));
    }
    let v = velocity(e_kev)?;
    Ok(E_CHARGE * E_CHARGE * length_m / (v * HBAR_J_S * capacitance_f))
}

/// Electrostatic energy `U = e² (n_R - n_L)² / (8C)` in eV.
pub fn capacitor_energy(n_r: u64, n_l: u64, capacitance_f: f64) -> Result<f64> {
    if !(capacitance_f > 0.0) {
        return Err(SqueezeError::domain("capacitance must be positive"));
    }
    let d = n_r as f64 - n_l as f64;
    Ok(E_CHARGE * d * d / (8.0 * capacitance_f))
}

/// Potential difference `V = e (n_R - n_L) / (2C)` in volts.
pub fn capacitor_voltage(n_r: u64, n_l: u64, capacitance_f: f64) -> Result<f64> {
    if !(capacitance_f > 0.0) {
        return Err(SqueezeError::domain("capacitance must be positive"));
    }
    Ok(E_CHARGE * (n_r as f64 - n_l as f64) / (2.0 * capacitance_f))
}

/// Coulomb phase accumulated by two co-propagating electrons at separation `s`
/// over a path `L`: `e² / (4π ε₀ s) · (L / v) / ħ`.
pub fn pair_coulomb_phase(separation_m: f64, path_m: f64, e_kev: f64) -> Result<f64> {
    if !(separation_m > 0.0 && path_m >= 0.0) {
        return Err(SqueezeError::domain("separation must be positive and path non-negative"));
    }
    let energy_ev = COULOMB_EV_NM / m_to_nm(separation_m);
    Ok(energy_ev * (path_m / velocity(e_kev)?) / HBAR_EV_S)
}

/// Mean longitudinal spacing `v e / I` of beam electrons, in metres.
pub fn mean_electron_spacing(current_na: f64, e_kev: f64) -> Result<f64> {
    if !(current_na > 0.0) {
        return Err(SqueezeError::domain("current must be positive"));
    }
    Ok(velocity(e_kev)? * E_CHARGE / na_to_ampere(current_na))
}

/// Coherent-state amplitude `n_R sqrt(χ_meas / 2)` left in the cavity.
pub fn cavity_amplitude(n_r: u64, chi_meas: f64) -> Result<f64> {
    if !(chi_meas >= 0.0) {
        return Err(SqueezeError::domain("chi_meas must be >= 0"));
    }
    Ok(n_r as f64 * (chi_meas / 2.0).sqrt())
}

/// `χ_meas = 2 |g_Q|²`.
pub fn chi_from_coupling(g_q: C64) -> f64 {
    2.0 * g_q.norm_sqr()
}

/// Fraction lost to inelastic scattering, `1 - exp(-t/λ)`, for thickness and
/// mean free path in nm.
pub fn inelastic_loss_share(thickness_nm: f64, mean_free_path_nm: f64) -> Result<f64> {
    if !(thickness_nm >= 0.0 && mean_free_path_nm > 0.0) {
        return Err(SqueezeError::domain("need t >= 0 and lambda > 0"));
    }
    Ok(-(-thickness_nm / mean_free_path_nm).exp_m1())
}

/// Electrons per pixel, `round(dose · pixel²)`, for a dose in e/Å² and a pixel
/// edge in Å.
pub fn batch_size(dose_per_a2: f64, pixel_a: f64) -> Result<u64> {
    if !(dose_per_a2 > 0.0 && pixel_a > 0.0) {
        return Err(SqueezeError::domain("dose and pixel size must be positive"));
    }
    Ok((dose_per_a2 * pixel_a * pixel_a).round() as u64)
}
