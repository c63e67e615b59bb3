//! Deterministic export: JSON envelopes, CSV tables, SVG residual plots.
//!
//! Nothing here reads the clock or the environment; equal inputs give equal bytes.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::commutant::ScanTable;
use crate::error::{Error, Result};
use crate::operators::WeightedShift;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub version: String,
    pub argv: Vec<String>,
}

impl Meta {
    pub fn new(argv: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { version: env!("CARGO_PKG_VERSION").to_string(), argv: argv.into_iter().map(Into::into).collect() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub meta: &'a Meta,
    pub data: &'a T,
}

/// `{meta, data}` as pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(meta: &Meta, data: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope { meta, data })
        .map_err(|e| Error::Domain(format!("serialization: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits, enough to round-trip any `f64`. Negative zero prints as zero.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Row-major matrix with interleaved `re_j,im_j` columns.
pub fn matrix_csv(m: &DMatrix<Complex64>) -> String {
    let header: Vec<String> = (0..m.ncols()).flat_map(|j| [format!("re_{j}"), format!("im_{j}")]).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..m.nrows()).map(|i| (0..m.ncols()).flat_map(|j| [fmt_f64(m[(i, j)].re), fmt_f64(m[(i, j)].im)]).collect());
    csv_table(&header, rows)
}

/// Inverse of [`matrix_csv`].
pub fn parse_matrix_csv(text: &str) -> Result<DMatrix<Complex64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Domain("empty matrix CSV".into()))?;
    let width = header.split(',').count();
    if width % 2 != 0 {
        return Err(Error::Domain(format!("header has {width} columns; expected re/im pairs")));
    }
    let mut entries = Vec::new();
    let mut nrows = 0;
    for (i, line) in lines.enumerate() {
        let vals = line
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Domain(format!("row {i}: {v:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != width {
            return Err(Error::Domain(format!("row {i} has {} columns, header has {width}", vals.len())));
        }
        entries.extend(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])));
        nrows += 1;
    }
    Ok(DMatrix::from_row_slice(nrows, width / 2, &entries))
}

/// `k,re,im` for each weight.
pub fn weights_csv(op: &WeightedShift) -> String {
    let rows = op.weights().iter().enumerate().map(|(k, w)| vec![k.to_string(), fmt_f64(w.re), fmt_f64(w.im)]);
    csv_table(&["k", "re", "im"], rows)
}

/// One row per `(m, l)` cell.
pub fn scan_csv(t: &ScanTable) -> String {
    let header = [
        "m", "l", "feasible", "degenerate", "exceptional", "min_residual", "product_residual", "product_feasible",
        "c1_re", "c1_im", "c2_re", "c2_im", "error",
    ];
    let rows = t.rows.iter().map(|r| {
        vec![
            r.m.to_string(),
            r.l.to_string(),
            r.feasible.to_string(),
            r.degenerate.to_string(),
            r.exceptional.to_string(),
            fmt_f64(r.min_residual),
            fmt_f64(r.product_residual),
            r.product_feasible.to_string(),
            fmt_f64(r.c1.re),
            fmt_f64(r.c1.im),
            fmt_f64(r.c2.re),
            fmt_f64(r.c2.im),
            r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
        ]
    });
    csv_table(&header, rows)
}

/// Per-k residuals of every cell, long format.
pub fn scan_residuals_csv(t: &ScanTable) -> String {
    let rows = t
        .rows
        .iter()
        .flat_map(|r| r.per_k.iter().enumerate().map(move |(k, v)| vec![r.m.to_string(), r.l.to_string(), k.to_string(), fmt_f64(*v)]));
    csv_table(&["m", "l", "k", "residual"], rows)
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];
/// Values at or below this are drawn on the floor of the plot.
const LOG_FLOOR: f64 = 1e-17;

/// Residual against `k`, logarithmic ordinate, one polyline per series.
pub fn residual_svg(title: &str, series: &[(String, Vec<(usize, f64)>)]) -> String {
    let (w, h, left, right, top, bottom) = (720.0, 440.0, 70.0, 150.0, 36.0, 44.0);
    let (pw, ph) = (w - left - right, h - top - bottom);
    let finite = series.iter().flat_map(|s| s.1.iter()).map(|p| p.1).filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v.max(LOG_FLOOR)), b.max(v.max(LOG_FLOOR))));
    let (dlo, dhi) = if lo.is_finite() { (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0)) } else { (-17.0, 0.0) };
    let kmax = series.iter().flat_map(|s| s.1.iter()).map(|p| p.0).max().unwrap_or(1).max(1) as f64;
    let x = |k: usize| left + pw * k as f64 / kmax;
    let y = |v: f64| top + ph * (dhi - v.max(LOG_FLOOR).log10()) / (dhi - dlo);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="13">{}</text>"#, left + pw / 2.0, escape(title));
    let step = ((dhi - dlo) / 10.0).ceil().max(1.0);
    let mut e = dlo;
    while e <= dhi {
        let yy = y(10f64.powf(e));
        let _ = writeln!(s, r##"<line x1="{left}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/>"##, left + pw);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.2}" text-anchor="end">1e{}</text>"#, left - 6.0, yy + 4.0, e as i64);
        e += step;
    }
    let kstep = (kmax / 10.0).ceil().max(1.0) as usize;
    for k in (0..=kmax as usize).step_by(kstep) {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{k}</text>"#, x(k), top + ph + 16.0);
    }
    let _ = writeln!(s, r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">k</text>"#, left + pw / 2.0, h - 8.0);
    let _ = writeln!(s, r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">residual</text>"#, top + ph / 2.0, top + ph / 2.0);

    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts.iter().filter(|p| p.1.is_finite()).map(|&(k, v)| format!("{:.2},{:.2}", x(k), y(v))).collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let ly = top + 14.0 * i as f64 + 8.0;
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#, left + pw + 10.0, left + pw + 28.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{}</text>"#, left + pw + 32.0, ly + 4.0, escape(name));
    }
    s.push_str("</svg>\n");
    s
}

/// Residual plot for a scan, one series per cell.
pub fn scan_svg(t: &ScanTable) -> String {
    let series: Vec<(String, Vec<(usize, f64)>)> =
        t.rows.iter().map(|r| (format!("(m,l)=({},{})", r.m, r.l), r.per_k.iter().copied().enumerate().collect())).collect();
    residual_svg(&format!("scan p={} s={} n={} d={} K={}", t.p, t.s, t.n, t.d, t.k), &series)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutant::{scan, FEASIBLE_TOL};
    use crate::operators::{shift_from_symbol, QuasiSymbol};

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.0), fmt_f64(0.0));
    }

    #[test]
    fn matrix_round_trip() {
        let op = shift_from_symbol(&QuasiSymbol::monomial(2, 3), 12).unwrap().scale(Complex64::new(0.7, -1.0 / 3.0));
        let m = op.matrix(10).unwrap();
        let back = parse_matrix_csv(&matrix_csv(&m)).unwrap();
        assert_eq!(back, m);
        assert!(parse_matrix_csv("re_0,im_0\n1,2,3\n").is_err());
        assert!(parse_matrix_csv("re_0\n1\n").is_err());
        assert!(parse_matrix_csv("").is_err());
    }

    #[test]
    fn scan_exports_are_stable() {
        let t = scan(1, 2, 3, 3, 20, FEASIBLE_TOL, Some(3)).unwrap();
        let meta = Meta::new(["qht", "scan"]);
        let a = (to_json(&meta, &t).unwrap(), scan_csv(&t), scan_svg(&t));
        let t2 = scan(1, 2, 3, 3, 20, FEASIBLE_TOL, Some(3)).unwrap();
        assert_eq!(a, (to_json(&meta, &t2).unwrap(), scan_csv(&t2), scan_svg(&t2)));
        assert_eq!(scan_csv(&t).lines().count(), 4);
        assert_eq!(scan_residuals_csv(&t).lines().count(), 1 + 3 * 21);
        let v: serde_json::Value = serde_json::from_str(&a.0).unwrap();
        assert_eq!(v["meta"]["argv"][1], "scan");
        assert_eq!(v["data"]["rows"][0]["m"], 1);
        assert!(a.2.starts_with("<svg") && a.2.contains("polyline"));
    }

    #[test]
    fn svg_handles_zeros() {
        let svg = residual_svg("z<1>", &[("zero".into(), vec![(0, 0.0), (1, 0.0)]), ("nan".into(), vec![(0, f64::NAN)])]);
        assert!(svg.contains("z&lt;1&gt;"));
        assert!(!svg.contains("NaN"));
    }
}
