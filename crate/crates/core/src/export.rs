//! Text serialization of sweeps, peaks and walk coefficients.
//!
//! Every number is written with 17 significant digits so values round-trip.

use std::fmt::Write;

use crate::analysis::{PeakReport, Sweep};
use crate::walks::WalkSeries;

/// `printf("%.17g")`: fixed notation for decimal exponents in `[-4, 17)`,
/// scientific otherwise, trailing zeros dropped. Non-finite values print as
/// `nan`, `inf` or `-inf`.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa.to_string()), exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// JSON has no NaN or infinity; those become `null`.
fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_g17(x)
    } else {
        "null".into()
    }
}

pub const SWEEP_CSV_HEADER: &str = "kl,re_t,im_t,t2,r2";

pub fn sweep_csv(sweep: &Sweep) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in sweep.results() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_g17(r.kl),
            fmt_g17(r.t.re),
            fmt_g17(r.t.im),
            fmt_g17(r.transmission()),
            fmt_g17(r.reflection())
        );
    }
    out
}

pub fn sweep_json(sweep: &Sweep) -> String {
    let rows: Vec<String> = sweep
        .results()
        .iter()
        .map(|r| {
            format!(
                "{{\"kl\":{},\"re_t\":{},\"im_t\":{},\"t2\":{},\"r2\":{}}}",
                json_num(r.kl),
                json_num(r.t.re),
                json_num(r.t.im),
                json_num(r.transmission()),
                json_num(r.reflection())
            )
        })
        .collect();
    json_array(&rows)
}

pub fn peaks_json(peaks: &[PeakReport]) -> String {
    let rows: Vec<String> = peaks
        .iter()
        .map(|p| {
            format!(
                "{{\"center\":{},\"height\":{},\"fwhm\":{},\"band\":[{},{}]}}",
                json_num(p.center),
                json_num(p.height),
                json_num(p.fwhm),
                json_num(p.band.low),
                json_num(p.band.high)
            )
        })
        .collect();
    json_array(&rows)
}

pub fn peaks_csv(peaks: &[PeakReport]) -> String {
    let mut out = String::from("center,height,fwhm,band_low,band_high,full_transmission\n");
    for p in peaks {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_g17(p.center),
            fmt_g17(p.height),
            fmt_g17(p.fwhm),
            fmt_g17(p.band.low),
            fmt_g17(p.band.high),
            p.full_transmission
        );
    }
    out
}

/// One row per step count: `m, re_c, im_c, p` with `p = |c_m|²`.
pub fn walk_csv(series: &WalkSeries) -> String {
    let mut out = String::from("m,re_c,im_c,p\n");
    for (m, c) in series.coefficients().iter().enumerate() {
        let _ = writeln!(
            out,
            "{m},{},{},{}",
            fmt_g17(c.re),
            fmt_g17(c.im),
            fmt_g17(c.norm_sqr())
        );
    }
    out
}

pub fn walk_json(series: &WalkSeries) -> String {
    let rows: Vec<String> = series
        .coefficients()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            format!(
                "{{\"m\":{m},\"re_c\":{},\"im_c\":{},\"p\":{}}}",
                json_num(c.re),
                json_num(c.im),
                json_num(c.norm_sqr())
            )
        })
        .collect();
    json_array(&rows)
}

fn json_array(rows: &[String]) -> String {
    if rows.is_empty() {
        return "[]\n".into();
    }
    format!("[\n  {}\n]\n", rows.join(",\n  "))
}
