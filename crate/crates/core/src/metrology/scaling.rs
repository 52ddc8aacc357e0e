//! Power-law fits of optimal figures of merit against the batch size.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{metrics, none_metrics, optimize_chi, MetricsRow};
use crate::error::{Result, SqueezeError};
use crate::squeezers::SqueezerKind;

/// Column of [`MetricsRow`] to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMetric {
    Xi2,
    DeltaPhiW,
    DeltaPhiF,
    Fisher,
}

impl ScalingMetric {
    pub fn pick(&self, row: &MetricsRow) -> f64 {
        match self {
            Self::Xi2 => row.xi2,
            Self::DeltaPhiW => row.delta_phi_w,
            Self::DeltaPhiF => row.delta_phi_f,
            Self::Fisher => row.fisher,
        }
    }
}

/// Least-squares line through `(ln N, ln metric)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `ln metric`.
    pub residual: f64,
    pub rows: Vec<MetricsRow>,
}

/// Fits `ln y = intercept + slope ln n`. Returns `(slope, intercept, rms residual)`.
pub fn fit_power_law(ns: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if ns.len() != ys.len() || ns.len() < 2 {
        return Err(SqueezeError::domain("need matching samples, at least two"));
    }
    if ns.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(SqueezeError::domain("power-law fit needs finite positive data"));
    }
    let x: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let len = x.len() as f64;
    let mx = x.iter().sum::<f64>() / len;
    let my = y.iter().sum::<f64>() / len;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(&y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok((slope, intercept, (ss / len).sqrt()))
}

/// Slope of `metric` at the optimal strength versus `N`.
///
/// Requires at least four distinct batch sizes spanning a decade. For
/// `kind = None` the unsqueezed row is used.
pub fn scaling_fit(kind: SqueezerKind, metric: ScalingMetric, n_list: &[usize]) -> Result<ScalingFit> {
    let mut ns: Vec<usize> = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 4 {
        return Err(SqueezeError::domain("scaling fit needs at least 4 distinct N"));
    }
    if (ns[ns.len() - 1] as f64) < 10.0 * ns[0] as f64 {
        return Err(SqueezeError::domain("N values must span at least one decade"));
    }
    let rows: Vec<MetricsRow> = ns
        .par_iter()
        .map(|&n| match kind {
            SqueezerKind::None => none_metrics(n),
            _ => {
                let opt = optimize_chi(n, kind)?;
                metrics(kind, n, opt.chi_opt)
            }
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| metric.pick(r)).collect();
    let (slope, intercept, residual) = fit_power_law(&xs, &ys)?;
    Ok(ScalingFit { slope, intercept, residual, rows })
}
