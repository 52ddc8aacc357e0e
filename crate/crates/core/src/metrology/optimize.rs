//! Minimization of `Δφ_W` over the squeezing strength.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics;
use crate::error::{Result, SqueezeError};
use crate::squeezers::SqueezerKind;

/// Log-spaced probes before the golden-section refinement.
const SCAN_POINTS: usize = 28;
/// Relative tolerance on the optimal strength.
const REL_TOL: f64 = 1e-4;

/// Result of [`optimize_chi`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimumReport {
    pub n_electrons: usize,
    pub squeezer_kind: SqueezerKind,
    pub chi_opt: f64,
    pub delta_phi_w_min: f64,
    pub evaluations: usize,
    pub bracket: (f64, f64),
}

/// Default search interval per squeezer kind.
pub fn default_bracket(kind: SqueezerKind) -> Option<(f64, f64)> {
    match kind {
        SqueezerKind::Interaction => Some((1e-4, std::f64::consts::PI)),
        SqueezerKind::Measurement => Some((1e-3, 20.0)),
        SqueezerKind::None => None,
    }
}

/// Minimizes `f` over `[lo, hi]` on a logarithmic axis.
///
/// A coarse log-spaced scan locates the basin, then golden-section search
/// refines it to `rel_tol` in `x`. Non-finite values count as `+∞`. Returns
/// `(x_best, f_best, evaluations)`, where `f_best` is the smallest value seen.
pub fn golden_section_log<F>(f: F, lo: f64, hi: f64, scan: usize, rel_tol: f64) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> f64 + Sync,
{
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite()) {
        return Err(SqueezeError::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if scan < 3 {
        return Err(SqueezeError::domain("scan needs at least 3 points"));
    }
    let eval = |u: f64| {
        let v = f(u.exp());
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (ulo, uhi) = (lo.ln(), hi.ln());
    let us: Vec<f64> = (0..scan).map(|i| ulo + (uhi - ulo) * i as f64 / (scan - 1) as f64).collect();
    let vals: Vec<f64> = us.par_iter().map(|&u| eval(u)).collect();
    let mut evaluations = scan;

    let (imin, &vmin) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("scan is non-empty");
    if !vmin.is_finite() {
        return Err(SqueezeError::OptimizerBracket { lo, hi });
    }
    let interior_min = vals[1..scan - 1].iter().cloned().fold(f64::INFINITY, f64::min);
    if vals[0] < interior_min && vals[scan - 1] < interior_min {
        return Err(SqueezeError::OptimizerBracket { lo, hi });
    }

    let mut best = (us[imin], vmin);
    let mut a = us[imin.saturating_sub(1)];
    let mut b = us[(imin + 1).min(scan - 1)];
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let mut fc = eval(c);
    let mut fd = eval(d);
    evaluations += 2;
    let tol = (1.0 + rel_tol).ln();
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = eval(d);
        }
        evaluations += 1;
        for (u, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (u, v);
            }
        }
    }
    Ok((best.0.exp().clamp(lo, hi), best.1, evaluations))
}

/// Optimal strength for `kind` within an explicit bracket.
pub fn optimize_chi_in(n: usize, kind: SqueezerKind, bracket: (f64, f64)) -> Result<OptimumReport> {
    if n < 2 {
        return Err(SqueezeError::domain("N must be at least 2"));
    }
    if kind == SqueezerKind::None {
        return Err(SqueezeError::domain("nothing to optimize without a squeezer"));
    }
    let objective = |chi: f64| match metrics(kind, n, chi) {
        Ok(row) => row.delta_phi_w,
        Err(_) => f64::INFINITY,
    };
    let (chi_opt, delta_phi_w_min, evaluations) =
        golden_section_log(objective, bracket.0, bracket.1, SCAN_POINTS, REL_TOL)?;
    Ok(OptimumReport { n_electrons: n, squeezer_kind: kind, chi_opt, delta_phi_w_min, evaluations, bracket })
}

/// Strength minimizing `Δφ_W` on the default bracket of `kind`.
pub fn optimize_chi(n: usize, kind: SqueezerKind) -> Result<OptimumReport> {
    let bracket = default_bracket(kind).ok_or_else(|| SqueezeError::domain("nothing to optimize without a squeezer"))?;
    optimize_chi_in(n, kind, bracket)
}
