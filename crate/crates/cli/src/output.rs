//! CSV and JSON rendering. Floats use 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use squeeze_core::{MetricsRow, OptimumReport, ShotRecord};

pub const METRICS_HEADER: &str = "N,chi,kind,delta_phi_w,delta_phi_f,xi2,fisher,sql,heisenberg";
pub const OPTIMUM_HEADER: &str = "N,kind,chi_opt,delta_phi_w_min,evaluations,bracket_lo,bracket_hi";
pub const WIGNER_HEADER: &str = "chi,theta,phi,W";
pub const SHOTS_HEADER: &str = "shot_index,h,n_L,n_R,phi_hat";

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut s = String::from(METRICS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.n_electrons,
            num(r.chi),
            r.squeezer_kind,
            num(r.delta_phi_w),
            num(r.delta_phi_f),
            num(r.xi2),
            num(r.fisher),
            num(r.sql),
            num(r.heisenberg)
        );
    }
    s
}

pub fn optimum_csv(rows: &[OptimumReport]) -> String {
    let mut s = String::from(OPTIMUM_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n_electrons,
            r.squeezer_kind,
            num(r.chi_opt),
            num(r.delta_phi_w_min),
            r.evaluations,
            num(r.bracket.0),
            num(r.bracket.1)
        );
    }
    s
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WignerPoint {
    pub chi: f64,
    pub theta: f64,
    pub phi: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

pub fn wigner_csv(points: &[WignerPoint]) -> String {
    let mut s = String::from(WIGNER_HEADER);
    s.push('\n');
    for p in points {
        let _ = writeln!(s, "{},{},{},{}", num(p.chi), num(p.theta), num(p.phi), num(p.w));
    }
    s
}

pub fn shots_csv(records: &[ShotRecord]) -> String {
    let mut s = String::from(SHOTS_HEADER);
    s.push('\n');
    for (i, r) in records.iter().enumerate() {
        let h = r.h.map(num).unwrap_or_default();
        let _ = writeln!(s, "{i},{h},{},{},{}", r.n_l, r.n_r, num(r.phi_hat));
    }
    s
}

/// Pretty JSON with a trailing newline. Non-finite floats become `null`.
pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use squeeze_core::SqueezerKind;

    #[test]
    fn numbers_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 1e-300, 123456.789] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn metrics_layout() {
        let row = MetricsRow {
            n_electrons: 4,
            chi: 0.5,
            delta_phi_w: f64::INFINITY,
            delta_phi_f: 0.25,
            xi2: f64::INFINITY,
            fisher: 16.0,
            sql: 0.5,
            heisenberg: 0.25,
            squeezer_kind: SqueezerKind::Interaction,
        };
        let csv = metrics_csv(&[row]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], METRICS_HEADER);
        assert!(lines[1].starts_with("4,5.0000000000000000e-1,interaction,inf,"));
        assert_eq!(lines[1].split(',').count(), 9);
        assert!(csv.ends_with('\n') && !csv.contains('\r'));
    }

    #[test]
    fn shot_rows_leave_h_empty_without_measurement() {
        let rec = ShotRecord { h: None, n_l: 3, n_r: 1, phi_hat: 0.5 };
        let csv = shots_csv(&[rec]);
        assert_eq!(csv.lines().nth(1).unwrap(), "0,,3,1,5.0000000000000000e-1");
    }
}
