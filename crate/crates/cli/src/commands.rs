use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use squeeze_core::dicke::{wigner_function, SphereGrid};
use squeeze_core::interferometer::{monte_carlo, prepare};
use squeeze_core::metrology::{default_bracket, metrics, metrics_or_degenerate, optimize_chi_in};
use squeeze_core::physical::{
    batch_size, beta_from_energy, chi_int_cylindrical, chi_int_general, inelastic_loss_share, mean_electron_spacing,
    mutual_capacitance, pair_coulomb_phase, ChannelGeometry,
};
use squeeze_core::{MZISpec, MetricsRow, SqueezerConfig, SqueezerKind};

use crate::args::{Common, DesignArgs, Format, MonteCarloArgs, OptimalArgs, SweepArgs, SweepNArgs, WignerArgs};
use crate::output::{self, WignerPoint};
use crate::UsageError;

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let ns = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("bad electron number '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    if ns.is_empty() || ns.contains(&0) {
        return Err(usage("electron numbers must be positive"));
    }
    Ok(ns)
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    let xs = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("bad number '{t}'"))))
        .collect::<Result<Vec<_>>>()?;
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(usage("values must be finite"));
    }
    Ok(xs)
}

/// `lo:hi:count`, log-spaced and inclusive of both ends.
pub fn parse_log_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(usage(format!("range '{s}' is not lo:hi:count")));
    };
    let lo: f64 = lo.trim().parse().map_err(|_| usage(format!("bad range start '{lo}'")))?;
    let hi: f64 = hi.trim().parse().map_err(|_| usage(format!("bad range end '{hi}'")))?;
    let count: usize = count.trim().parse().map_err(|_| usage(format!("bad range count '{count}'")))?;
    if !(lo > 0.0 && hi >= lo && hi.is_finite()) || count == 0 {
        return Err(usage(format!("range '{s}' needs 0 < lo <= hi and count >= 1")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|i| match i {
            0 => lo,
            i if i == count - 1 => hi,
            i => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect())
}

fn parse_bracket(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| usage(format!("bracket '{s}' is not lo:hi")))?;
    let lo: f64 = lo.trim().parse().map_err(|_| usage(format!("bad bracket '{s}'")))?;
    let hi: f64 = hi.trim().parse().map_err(|_| usage(format!("bad bracket '{s}'")))?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(usage(format!("bracket '{s}' needs 0 < lo < hi")));
    }
    Ok((lo, hi))
}

/// Metrics for every (N, χ) pair, sorted by N then χ.
fn sweep(kind: SqueezerKind, ns: &[usize], chis: &[f64]) -> Result<Vec<MetricsRow>> {
    if chis.iter().any(|&c| c < 0.0) {
        return Err(usage("strengths must be non-negative"));
    }
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    let mut chis = chis.to_vec();
    chis.sort_by(f64::total_cmp);
    let points: Vec<(usize, f64)> = ns.iter().flat_map(|&n| chis.iter().map(move |&c| (n, c))).collect();
    let rows = points
        .par_iter()
        .map(|&(n, chi)| {
            let mut row = metrics_or_degenerate(kind, n, chi)?;
            row.chi = chi;
            Ok(row)
        })
        .collect::<squeeze_core::Result<Vec<_>>>()?;
    Ok(rows)
}

fn write_rows(rows: &[MetricsRow], common: &Common) -> Result<()> {
    let text = match common.format {
        Format::Csv => output::metrics_csv(rows),
        Format::Json => output::json(rows)?,
    };
    output::emit(&text, common.out.as_deref())
}

pub fn sweep_chi(a: &SweepArgs) -> Result<()> {
    let ns = parse_n_list(&a.n)?;
    let chis = match &a.chi {
        Some(list) => parse_f64_list(list)?,
        None => parse_log_range(&a.chi_range)?,
    };
    write_rows(&sweep(a.kind.into(), &ns, &chis)?, &a.common)
}

pub fn sweep_n(a: &SweepNArgs) -> Result<()> {
    let ns = parse_n_list(&a.n)?;
    let chis = parse_f64_list(&a.chi)?;
    write_rows(&sweep(a.kind.into(), &ns, &chis)?, &a.common)
}

pub fn optimal_chi(a: &OptimalArgs) -> Result<()> {
    let kind: SqueezerKind = a.kind.into();
    let bracket = match &a.bracket {
        Some(s) => parse_bracket(s)?,
        None => default_bracket(kind).ok_or_else(|| usage("optimal-chi needs kind interaction or measurement"))?,
    };
    let mut ns = parse_n_list(&a.n)?;
    ns.sort_unstable();
    let reports = ns
        .par_iter()
        .map(|&n| optimize_chi_in(n, kind, bracket))
        .collect::<squeeze_core::Result<Vec<_>>>()?;
    let text = match a.common.format {
        Format::Csv => output::optimum_csv(&reports),
        Format::Json => output::json(&reports)?,
    };
    output::emit(&text, a.common.out.as_deref())
}

pub fn wigner(a: &WignerArgs) -> Result<()> {
    let kind: SqueezerKind = a.kind.into();
    let mut chis = parse_f64_list(&a.chi)?;
    chis.sort_by(f64::total_cmp);
    let grid = SphereGrid::uniform(a.n_theta, a.n_phi)?;
    let fields = chis
        .par_iter()
        .map(|&chi| {
            let spec = MZISpec::new(a.n, SqueezerConfig::new(kind, chi)?, 0.0, a.align)?;
            let h = (kind == SqueezerKind::Measurement).then_some(a.h);
            let state = prepare(&spec, h)?;
            let field = wigner_function(&state, &grid)?;
            Ok(field
                .triples()
                .map(|(theta, phi, w)| WignerPoint { chi, theta, phi, w })
                .collect::<Vec<_>>())
        })
        .collect::<squeeze_core::Result<Vec<_>>>()?;
    let points: Vec<WignerPoint> = fields.into_iter().flatten().collect();
    let text = match a.common.format {
        Format::Csv => output::wigner_csv(&points),
        Format::Json => output::json(&points)?,
    };
    output::emit(&text, a.common.out.as_deref())
}

#[derive(Debug, Serialize)]
struct MonteCarloReport {
    kind: SqueezerKind,
    n_electrons: usize,
    chi: f64,
    true_phase: f64,
    aligned: bool,
    shots: u64,
    seed: u64,
    rms_error: f64,
    bias: f64,
    stderr: f64,
    /// Δφ_W predicted by the metrology module, when defined.
    theory_delta_phi_w: Option<f64>,
}

pub fn montecarlo(a: &MonteCarloArgs) -> Result<()> {
    let kind: SqueezerKind = a.kind.into();
    let spec = MZISpec::new(a.n, SqueezerConfig::new(kind, a.chi)?, a.phi, !a.no_align)?;
    let summary = monte_carlo(&spec, a.shots, a.seed, a.shots_out.is_some())?;
    if let (Some(path), Some(records)) = (&a.shots_out, &summary.records) {
        output::emit(&output::shots_csv(records), Some(path))?;
    }
    let report = MonteCarloReport {
        kind,
        n_electrons: a.n,
        chi: spec.squeezer.chi(),
        true_phase: a.phi,
        aligned: !a.no_align,
        shots: summary.shots,
        seed: a.seed,
        rms_error: summary.rms_error,
        bias: summary.bias,
        stderr: summary.stderr,
        theory_delta_phi_w: metrics(kind, a.n, spec.squeezer.chi()).ok().map(|r| r.delta_phi_w),
    };
    let text = match a.format {
        Format::Json => output::json(&report)?,
        Format::Csv => format!(
            "kind,N,chi,phi,shots,seed,rms_error,bias,stderr,theory_delta_phi_w\n{},{},{},{},{},{},{},{},{},{}\n",
            kind,
            a.n,
            output::num(report.chi),
            output::num(a.phi),
            report.shots,
            a.seed,
            output::num(report.rms_error),
            output::num(report.bias),
            output::num(report.stderr),
            report.theory_delta_phi_w.map(output::num).unwrap_or_default()
        ),
    };
    output::emit(&text, a.out.as_deref())
}

/// Builds the `design` JSON object from whichever inputs were given.
pub fn design_values(a: &DesignArgs) -> Result<Value> {
    let e = a.energy_kev;
    let mut m = Map::new();
    m.insert("energy_kev".into(), json!(e));
    m.insert("beta".into(), json!(beta_from_energy(e)?));
    if let Some(ratio) = a.d_over_r {
        m.insert("d_over_r".into(), json!(ratio));
        m.insert("chi_int".into(), json!(chi_int_cylindrical(ratio, e)?));
    }
    match (a.length_m, a.separation_m, a.radius_m) {
        (Some(l), Some(d), Some(r)) => {
            let c = mutual_capacitance(&ChannelGeometry::new(l, d, r)?)?;
            m.insert("capacitance_f".into(), json!(c));
            m.insert("chi_int_general".into(), json!(chi_int_general(l, e, c)?));
        }
        (None, None, None) => {}
        _ => return Err(usage("--length-m, --separation-m and --radius-m go together")),
    }
    if let Some(i) = a.current_na {
        m.insert("current_na".into(), json!(i));
        m.insert("spacing_m".into(), json!(mean_electron_spacing(i, e)?));
    }
    if let Some(s) = a.pair_separation_m {
        m.insert("pair_phase_rad".into(), json!(pair_coulomb_phase(s, a.path_m, e)?));
    }
    match (a.dose, a.pixel_angstrom) {
        (Some(d), Some(p)) => {
            m.insert("batch_size".into(), json!(batch_size(d, p)?));
        }
        (None, None) => {}
        _ => return Err(usage("--dose and --pixel-angstrom go together")),
    }
    match (a.thickness_nm, a.mfp_nm) {
        (Some(t), Some(l)) => {
            m.insert("loss_share".into(), json!(inelastic_loss_share(t, l)?));
        }
        (None, None) => {}
        _ => return Err(usage("--thickness-nm and --mfp-nm go together")),
    }
    Ok(Value::Object(m))
}

pub fn design(a: &DesignArgs) -> Result<()> {
    output::emit(&output::json(&design_values(a)?)?, a.out.as_deref())
}
