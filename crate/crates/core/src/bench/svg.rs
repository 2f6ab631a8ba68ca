//! Minimal self-contained SVG line plots with error bars.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::table::Table;
use crate::error::{Error, Result};

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Column holding x coordinates.
    pub x: String,
    /// Column holding y coordinates.
    pub y: String,
    /// Column with the half-height of each error bar.
    pub err: Option<String>,
    /// Text column splitting rows into one line per value.
    pub series: Option<String>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|f| f * mag).find(|s| span / s <= 6.0).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() * step;
    (0..)
        .map(|k| first + k as f64 * step)
        .take_while(|v| *v <= hi + 1e-9 * span)
        .collect()
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v.abs() >= 1e4 || v.abs() < 1e-3 {
        return format!("{v:.1e}");
    }
    let s = format!("{v:.4}");
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

pub fn render_svg(table: &Table, spec: &PlotSpec) -> Result<String> {
    if table.is_empty() {
        return Err(Error::validation("cannot plot an empty table"));
    }
    let col = |name: &str| table.column(name).ok_or_else(|| Error::validation(format!("no column `{name}`")));
    let xc = col(&spec.x)?;
    let yc = col(&spec.y)?;
    let ec = spec.err.as_deref().map(col).transpose()?;
    let sc = spec.series.as_deref().map(col).transpose()?;

    let mut series: BTreeMap<String, Vec<(f64, f64, f64)>> = BTreeMap::new();
    for row in &table.rows {
        let (Some(x), Some(y)) = (row[xc].as_num(), row[yc].as_num()) else {
            return Err(Error::validation("plotted columns must be numeric"));
        };
        let e = ec.and_then(|c| row[c].as_num()).unwrap_or(0.0);
        let name = sc.map(|c| row[c].to_string()).unwrap_or_default();
        series.entry(name).or_default().push((x, y, e));
    }
    for pts in series.values_mut() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    let all = series.values().flatten();
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y, e) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y - e);
        y1 = y1.max(y + e);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| MARGIN_TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="18">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        escape(&spec.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{b2}" stroke="black"/><text x="{x:.2}" y="{ty}" text-anchor="middle" font-size="12">{}</text>"##,
            fmt_tick(t),
            b = MARGIN_TOP + ph,
            b2 = MARGIN_TOP + ph + 5.0,
            ty = MARGIN_TOP + ph + 20.0
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            s,
            r##"<line x1="{l2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{r}" y2="{y:.2}" stroke="#dddddd"/><text x="{tx}" y="{yt:.2}" text-anchor="end" font-size="12">{}</text>"##,
            fmt_tick(t),
            l2 = MARGIN_LEFT - 5.0,
            r = MARGIN_LEFT + pw,
            tx = MARGIN_LEFT - 8.0,
            yt = y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + pw / 2.0,
        HEIGHT - 15.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{cy}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {cy})">{}</text>"#,
        escape(&spec.y_label),
        cy = MARGIN_TOP + ph / 2.0
    );

    for (k, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y, _)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        for &(x, y, e) in pts {
            let (cx, cy) = (sx(x), sy(y));
            if e > 0.0 {
                let (top, bottom) = (sy(y + e), sy(y - e));
                let _ = writeln!(
                    s,
                    r#"<g class="errorbar" stroke="{color}"><line x1="{cx:.2}" y1="{top:.2}" x2="{cx:.2}" y2="{bottom:.2}"/><line x1="{a:.2}" y1="{top:.2}" x2="{b:.2}" y2="{top:.2}"/><line x1="{a:.2}" y1="{bottom:.2}" x2="{b:.2}" y2="{bottom:.2}"/></g>"#,
                    a = cx - 4.0,
                    b = cx + 4.0
                );
            }
            let _ = writeln!(s, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="{color}"/>"#);
        }
        if !name.is_empty() {
            let ly = MARGIN_TOP + 20.0 + 22.0 * k as f64;
            let lx = MARGIN_LEFT + pw + 15.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}" font-size="13">{}</text>"#,
                lx + 25.0,
                lx + 32.0,
                ly + 4.0,
                escape(name)
            );
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::table::Value;

    #[test]
    fn one_polyline_per_series_with_errorbars() {
        let mut t = Table::new(["method", "corruption", "error", "std"]);
        for (m, base) in [("df", 0.1), ("il", 0.2), ("ac", 0.3)] {
            for c in [0.0, 0.5, 1.0] {
                t.push(vec![m.into(), Value::Num(c), Value::Num(base + c / 10.0), Value::Num(0.01)]).unwrap();
            }
        }
        let spec = PlotSpec {
            title: "Error & corruption".into(),
            x_label: "corruption".into(),
            y_label: "0-1 error".into(),
            x: "corruption".into(),
            y: "error".into(),
            err: Some("std".into()),
            series: Some("method".into()),
        };
        let svg = render_svg(&t, &spec).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains(r#"viewBox="0 0 800 500""#));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches(r#"class="errorbar""#).count(), 9);
        assert!(svg.contains("Error &amp; corruption"));
    }

    #[test]
    fn tick_spacing_is_round() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert!(ticks(-3.0, 7.0).contains(&0.0));
    }

    #[test]
    fn empty_table_is_rejected() {
        let spec = PlotSpec {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            x: "a".into(),
            y: "b".into(),
            err: None,
            series: None,
        };
        assert!(render_svg(&Table::new(["a", "b"]), &spec).is_err());
    }
}
