//! CSV tables and JSON reports. Numbers carry 12 significant digits.

use std::io::{self, Write};

use hyqc_core::montecarlo::EventBatch;
use hyqc_core::scan::{Extremum, McRow, RunReport, ScanRow};
use serde::Serialize;

pub const DIGITS: usize = 12;

/// `%.12g`: fixed notation for exponents in `-5..12`, otherwise
/// scientific, trailing zeros dropped.
pub fn fmt_g(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    // the exponent after rounding, so 9.9999999999995 prints as 10
    let sci = format!("{:.*e}", DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..DIGITS as i32).contains(&exp) {
        let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `v` rounded to 12 significant digits.
pub fn round_g(v: f64) -> f64 {
    if v.is_finite() {
        format!("{:.*e}", DIGITS - 1, v).parse().unwrap()
    } else {
        v
    }
}

fn cell(v: Option<f64>) -> String {
    v.map(fmt_g).unwrap_or_default()
}

pub const SCAN_HEADER: &str = "x,quantum,classical_lo,classical_hi,modified_lo,modified_hi";
pub const MC_HEADER: &str = "x,analytic,estimate,stderr,n_events,flagged";
pub const EVENT_HEADER: &str = "n1x,n1y,n1z,n2x,n2y,n2z";

/// One-sided bounds leave their cell empty.
pub fn write_scan_csv<W: Write>(mut w: W, rows: &[ScanRow]) -> io::Result<()> {
    writeln!(w, "{SCAN_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_g(r.x),
            fmt_g(r.quantum),
            cell(r.classical.lo),
            cell(r.classical.hi),
            cell(r.modified.lo),
            cell(r.modified.hi)
        )?;
    }
    Ok(())
}

pub fn write_mc_csv<W: Write>(mut w: W, rows: &[McRow]) -> io::Result<()> {
    writeln!(w, "{MC_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_g(r.x),
            fmt_g(r.analytic),
            fmt_g(r.estimate.value),
            fmt_g(r.estimate.stderr),
            r.estimate.n_used,
            r.flagged
        )?;
    }
    Ok(())
}

pub fn write_events_csv<W: Write>(mut w: W, batch: &EventBatch) -> io::Result<()> {
    writeln!(w, "{EVENT_HEADER}")?;
    for e in &batch.events {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_g(e.n1.x),
            fmt_g(e.n1.y),
            fmt_g(e.n1.z),
            fmt_g(e.n2.x),
            fmt_g(e.n2.y),
            fmt_g(e.n2.z)
        )?;
    }
    Ok(())
}

/// JSON view of a report with rounded numbers. Infinite bounds become
/// `null`.
#[derive(Debug, Serialize)]
struct ReportJson<'a> {
    channel_id: &'a str,
    parent: &'a str,
    quantity: &'a str,
    quantum_max: f64,
    argmax: f64,
    classical_bound: Option<f64>,
    modified_bound: Option<f64>,
    violates_classical: bool,
    violates_modified: bool,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then(|| round_g(v))
}

pub fn reports_json(reports: &[RunReport]) -> String {
    let rows: Vec<ReportJson> = reports
        .iter()
        .map(|r| ReportJson {
            channel_id: &r.channel_id,
            parent: r.parent.as_str(),
            quantity: r.quantity.as_str(),
            quantum_max: round_g(r.quantum_max),
            argmax: round_g(r.argmax),
            classical_bound: finite(r.classical_bound),
            modified_bound: finite(r.modified_bound),
            violates_classical: r.violates_classical,
            violates_modified: r.violates_modified,
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("reports always serialize")
}

pub fn extremum_json(e: &Extremum) -> String {
    serde_json::to_string_pretty(&Extremum {
        argmax: round_g(e.argmax),
        value: round_g(e.value),
    })
    .expect("extrema always serialize")
}
