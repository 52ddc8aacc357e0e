//! Mach-Zehnder pipeline, phase estimators and Monte Carlo shot simulation.
//!
//! Circuit: `|N, 0>` → BS1 = `rotate(Y, π/2)` → squeezer (plus optional
//! alignment) → sample phase `exp(-i φ S_z)` → BS2 = `rotate(X, π/2)` →
//! count electrons per output port. Without squeezing this gives
//! `<S_z> = (N/2) sin φ` at the output.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{SymmetricEigen, Vector3};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dicke::{coherent_state, m_of, moments, number_distribution, phase_shift, rotate, DickeState, SpinAxis};
use crate::error::{Result, SqueezeError};
use crate::squeezers::{
    count_sampler, kraus_apply, oat_align, oat_apply, sample_h, HQuadrature, MeasConfig, OATConfig,
    SqueezerConfig,
};

/// Shots per independently seeded block.
pub const SHOTS_PER_BLOCK: u64 = 1024;

/// Half-width of the finite difference used for calibration slopes.
const CAL_STEP: f64 = 1e-4;

/// Smallest usable calibration slope.
const MIN_SLOPE: f64 = 1e-9;

/// Interferometer configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MZISpec {
    pub n_electrons: usize,
    pub squeezer: SqueezerConfig,
    pub true_phase: f64,
    pub apply_alignment: bool,
}

impl MZISpec {
    pub fn new(n_electrons: usize, squeezer: SqueezerConfig, true_phase: f64, apply_alignment: bool) -> Result<Self> {
        if n_electrons == 0 {
            return Err(SqueezeError::domain("N must be at least 1"));
        }
        if !(true_phase.abs() < FRAC_PI_2) {
            return Err(SqueezeError::domain(format!("true phase {true_phase} outside (-pi/2, pi/2)")));
        }
        Ok(Self { n_electrons, squeezer, true_phase, apply_alignment })
    }

    /// Same circuit at a different sample phase.
    pub fn with_phase(&self, phi: f64) -> Self {
        Self { true_phase: phi, ..*self }
    }

    fn meas_config(&self) -> Result<Option<MeasConfig>> {
        match self.squeezer {
            SqueezerConfig::Measurement { chi } => {
                let cfg = MeasConfig::from_chi(chi)?;
                Ok((!cfg.is_noop()).then_some(cfg))
            }
            _ => Ok(None),
        }
    }
}

/// One detection event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub h: Option<f64>,
    pub n_l: usize,
    pub n_r: usize,
    pub phi_hat: f64,
}

/// Linearized readout `φ̂ = (S_z - offset) / slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub offset: f64,
    pub slope: f64,
}

impl Calibration {
    pub fn estimate(&self, sz: f64) -> f64 {
        (sz - self.offset) / self.slope
    }
}

/// Output of [`monte_carlo`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub shots: u64,
    pub rms_error: f64,
    pub bias: f64,
    /// Standard error of `rms_error`.
    pub stderr: f64,
    #[serde(skip)]
    pub records: Option<Vec<ShotRecord>>,
}

/// Rotation taking the principal covariance axis of a cat-like state onto `z`.
pub fn align_cat_to_z(state: &DickeState) -> Result<DickeState> {
    let mom = moments(state)?;
    let eig = SymmetricEigen::new(mom.covariance_matrix());
    let imax = eig.eigenvalues.imax();
    let v: Vector3<f64> = eig.eigenvectors.column(imax).into_owned();
    let z = Vector3::z();
    let axis = v.cross(&z);
    if axis.norm() < 1e-12 {
        return Ok(state.clone());
    }
    let angle = v.dot(&z).clamp(-1.0, 1.0).acos();
    rotate(state, SpinAxis::unit([axis[0], axis[1], axis[2]])?, angle)
}

fn is_ghz_strength(chi: f64) -> bool {
    (chi - PI).abs() < 1e-12
}

/// State after BS1, the squeezer and its alignment, before the sample.
pub fn prepare(spec: &MZISpec, h: Option<f64>) -> Result<DickeState> {
    let n = spec.n_electrons;
    // BS1 on |N, 0>; equal to rotate(basis_state(N, 0), Y, π/2).
    let state = coherent_state(n)?;
    let state = match spec.squeezer {
        SqueezerConfig::None => state,
        SqueezerConfig::Interaction { chi } => {
            let twisted = oat_apply(&state, &OATConfig::new(chi)?);
            match (spec.apply_alignment, n >= 2 && chi > 0.0) {
                (true, true) if is_ghz_strength(chi) => align_cat_to_z(&twisted)?,
                (true, true) => oat_align(&twisted, chi)?,
                _ => twisted,
            }
        }
        SqueezerConfig::Measurement { .. } => match spec.meas_config()? {
            None => state,
            Some(cfg) => {
                let h = h.ok_or_else(|| SqueezeError::domain("measurement squeezer needs an outcome h"))?;
                let post = kraus_apply(&state, &cfg, h)?.post_state;
                if spec.apply_alignment {
                    // squeezed S_z onto the phase-sensitive y axis
                    rotate(&post, SpinAxis::X, -FRAC_PI_2)?
                } else {
                    post
                }
            }
        },
    };
    Ok(state)
}

/// Sample phase then BS2 on a prepared state.
pub fn finish(prepared: &DickeState, phi: f64) -> Result<DickeState> {
    rotate(&phase_shift(prepared, phi)?, SpinAxis::X, FRAC_PI_2)
}

/// Full circuit up to detection.
pub fn run_pipeline(spec: &MZISpec, h: Option<f64>) -> Result<DickeState> {
    finish(&prepare(spec, h)?, spec.true_phase)
}

/// Phase from port counts via `S_z = (N/2) sin φ`, i.e. `arcsin((n_L - n_R)/N)`.
/// The flag reports whether the argument had to be clamped to `[-1, 1]`.
pub fn estimator_arcsin(n_l: usize, n_r: usize, n: usize) -> Result<(f64, bool)> {
    if n == 0 {
        return Err(SqueezeError::domain("N must be at least 1"));
    }
    let x = (n_l as f64 - n_r as f64) / n as f64;
    let clamped = x.abs() > 1.0;
    Ok((x.clamp(-1.0, 1.0).asin(), clamped))
}

/// `<S_z>` of a state.
pub fn mean_sz(state: &DickeState) -> f64 {
    let n = state.n();
    number_distribution(state).iter().enumerate().map(|(k, p)| p * m_of(n, k)).sum()
}

/// Offset and slope of the final `<S_z>` around zero phase.
pub fn calibrate(spec: &MZISpec, h: Option<f64>) -> Result<Calibration> {
    let prepared = prepare(spec, h)?;
    calibrate_prepared(&prepared)
}

fn calibrate_prepared(prepared: &DickeState) -> Result<Calibration> {
    let offset = mean_sz(&finish(prepared, 0.0)?);
    let up = mean_sz(&finish(prepared, CAL_STEP)?);
    let down = mean_sz(&finish(prepared, -CAL_STEP)?);
    let slope = (up - down) / (2.0 * CAL_STEP);
    if !(slope.abs() > MIN_SLOPE) {
        return Err(SqueezeError::UninformativeReadout { slope });
    }
    Ok(Calibration { offset, slope })
}

/// Calibration of the measurement-based pipeline tabulated over the outcome grid.
#[derive(Debug, Clone)]
pub struct CalibrationTable {
    nodes: Vec<f64>,
    cals: Vec<Calibration>,
}

impl CalibrationTable {
    pub fn new(spec: &MZISpec) -> Result<Self> {
        let cfg = spec
            .meas_config()?
            .ok_or_else(|| SqueezeError::domain("calibration table needs an active measurement squeezer"))?;
        let quad = HQuadrature::new(spec.n_electrons, &cfg)?;
        let entries: Vec<Option<(f64, Calibration)>> = quad
            .nodes
            .par_iter()
            .map(|&h| calibrate(spec, Some(h)).ok().map(|c| (h, c)))
            .collect();
        let (nodes, cals): (Vec<f64>, Vec<Calibration>) = entries.into_iter().flatten().unzip();
        if nodes.len() < 2 {
            return Err(SqueezeError::domain("no usable calibration nodes"));
        }
        Ok(Self { nodes, cals })
    }

    /// Linear interpolation inside the table; direct calibration outside it.
    pub fn at(&self, spec: &MZISpec, h: f64) -> Result<Calibration> {
        let last = self.nodes.len() - 1;
        if !(h >= self.nodes[0] && h <= self.nodes[last]) {
            return calibrate(spec, Some(h));
        }
        let i = self.nodes.partition_point(|&x| x <= h).clamp(1, last);
        let (x0, x1) = (self.nodes[i - 1], self.nodes[i]);
        let t = (h - x0) / (x1 - x0);
        let (c0, c1) = (self.cals[i - 1], self.cals[i]);
        Ok(Calibration {
            offset: c0.offset + t * (c1.offset - c0.offset),
            slope: c0.slope + t * (c1.slope - c0.slope),
        })
    }
}

struct BlockStats {
    sum_e: f64,
    sum_e2: f64,
    sum_e4: f64,
    records: Vec<ShotRecord>,
}

/// Simulates `shots` detection events at `spec.true_phase`.
///
/// Shots run in blocks of [`SHOTS_PER_BLOCK`]; block `b` draws from
/// `ChaCha8Rng::seed_from_u64(seed)` on stream `b`, so results do not depend on
/// the number of worker threads.
pub fn monte_carlo(spec: &MZISpec, shots: u64, seed: u64, keep_records: bool) -> Result<MonteCarloSummary> {
    if shots == 0 {
        return Err(SqueezeError::domain("need at least one shot"));
    }
    let n = spec.n_electrons;
    let phi = spec.true_phase;
    let meas = spec.meas_config()?;

    enum Plan {
        Fixed { dist: WeightedIndex<f64>, cal: Calibration },
        Measured { cfg: MeasConfig, counts: WeightedIndex<f64>, table: CalibrationTable },
    }
    let plan = match meas {
        None => {
            let prepared = prepare(spec, None)?;
            let cal = calibrate_prepared(&prepared)?;
            let dist = count_sampler(&finish(&prepared, phi)?)?;
            Plan::Fixed { dist, cal }
        }
        Some(cfg) => Plan::Measured { cfg, counts: count_sampler(&coherent_state(n)?)?, table: CalibrationTable::new(spec)? },
    };

    let blocks = shots.div_ceil(SHOTS_PER_BLOCK);
    let stats: Vec<BlockStats> = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<BlockStats> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = SHOTS_PER_BLOCK.min(shots - b * SHOTS_PER_BLOCK);
            let mut st = BlockStats { sum_e: 0.0, sum_e2: 0.0, sum_e4: 0.0, records: Vec::new() };
            for _ in 0..count {
                let (h, n_r, cal) = match &plan {
                    Plan::Fixed { dist, cal } => (None, dist.sample(&mut rng), *cal),
                    Plan::Measured { cfg, counts, table } => {
                        let h = sample_h(counts, cfg.sigma(), &mut rng);
                        let state = run_pipeline(spec, Some(h))?;
                        let n_r = count_sampler(&state)?.sample(&mut rng);
                        (Some(h), n_r, table.at(spec, h)?)
                    }
                };
                let n_l = n - n_r;
                let phi_hat = cal.estimate(m_of(n, n_r));
                let e = phi_hat - phi;
                st.sum_e += e;
                st.sum_e2 += e * e;
                st.sum_e4 += e * e * e * e;
                if keep_records {
                    st.records.push(ShotRecord { h, n_l, n_r, phi_hat });
                }
            }
            Ok(st)
        })
        .collect::<Result<_>>()?;

    let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
    let mut records = keep_records.then(|| Vec::with_capacity(shots as usize));
    for st in stats {
        s1 += st.sum_e;
        s2 += st.sum_e2;
        s4 += st.sum_e4;
        if let Some(r) = records.as_mut() {
            r.extend(st.records);
        }
    }
    let m = shots as f64;
    let mean_e2 = s2 / m;
    let rms_error = mean_e2.sqrt();
    let var_e2 = (s4 / m - mean_e2 * mean_e2).max(0.0);
    let stderr = if rms_error > 0.0 { var_e2.sqrt() / (m.sqrt() * 2.0 * rms_error) } else { 0.0 };
    Ok(MonteCarloSummary { shots, rms_error, bias: s1 / m, stderr, records })
}

/// `<(-1)^(n_R)>` at the output of the GHZ (`χ_int = π`) interferometer.
pub fn parity_expectation(spec: &MZISpec) -> Result<f64> {
    match spec.squeezer {
        SqueezerConfig::Interaction { chi } if is_ghz_strength(chi) => {}
        _ => return Err(SqueezeError::domain("parity readout is defined for interaction squeezing at chi = pi")),
    }
    let state = run_pipeline(spec, None)?;
    Ok(number_distribution(&state)
        .iter()
        .enumerate()
        .map(|(k, p)| if k % 2 == 0 { *p } else { -*p })
        .sum())
}

/// Parity readout sensitivity at its steepest point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityReadout {
    pub phi: f64,
    /// `|d<P>/dφ|² / (1 - <P>²)`.
    pub fisher: f64,
    pub delta_phi: f64,
}

/// Locates the steepest point of the parity fringe within one period and
/// returns the classical Fisher information of the parity signal there.
pub fn parity_readout(n: usize) -> Result<ParityReadout> {
    if n < 1 {
        return Err(SqueezeError::domain("N must be at least 1"));
    }
    let base = MZISpec::new(n, SqueezerConfig::Interaction { chi: PI }, 0.0, true)?;
    let prepared = prepare(&base, None)?;
    let parity = |phi: f64| -> Result<f64> {
        let p = number_distribution(&finish(&prepared, phi)?);
        Ok(p.iter().enumerate().map(|(k, v)| if k % 2 == 0 { *v } else { -*v }).sum())
    };
    let step = 1e-6;
    let deriv = |phi: f64| -> Result<f64> { Ok((parity(phi + step)? - parity(phi - step)?) / (2.0 * step)) };
    let period = 2.0 * PI / n as f64;
    let samples = 64;
    let mut best = (0.0, 0.0);
    for i in 0..samples {
        let phi = -0.5 * period + period * (i as f64 + 0.5) / samples as f64;
        let d = deriv(phi)?.abs();
        if d > best.1 {
            best = (phi, d);
        }
    }
    let phi = best.0;
    let p = parity(phi)?;
    let d = deriv(phi)?;
    let fisher = d * d / (1.0 - p * p);
    Ok(ParityReadout { phi, fisher, delta_phi: fisher.sqrt().recip() })
}
