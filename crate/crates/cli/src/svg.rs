//! Line charts of a curve table as standalone SVG 1.1.

use std::fmt::Write;

use crate::table::{format_number, CurveTable};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#333333"];

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    mag * if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per α-dependent column and a horizontal line per reference
/// column. Non-finite values break the polyline.
pub fn render(table: &CurveTable, title: &str) -> String {
    let alpha = table.column("alpha").unwrap_or(&[]);
    let series: Vec<&(String, Vec<f64>)> = table.columns.iter().filter(|c| c.0 != "alpha").collect();
    let ymax = series.iter().flat_map(|c| c.1.iter()).copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let ystep = nice_step(if ymax > 0.0 { ymax * 1.05 } else { 1.0 });
    let ytop = ((if ymax > 0.0 { ymax * 1.05 } else { 1.0 }) / ystep).ceil() * ystep;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |a: f64| LEFT + a * pw;
    let sy = |v: f64| TOP + ph - v / ytop * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, esc(title));
    let _ = writeln!(s, r##"<g stroke="#000" stroke-width="1"><line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/></g>"##, TOP + ph, LEFT + pw, TOP + ph, TOP + ph);

    for k in 0..=10 {
        let a = k as f64 / 10.0;
        let _ = writeln!(
            s,
            r##"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="#000"/><text x="{x}" y="{yt}" font-family="sans-serif" font-size="12" text-anchor="middle">{a:.1}</text>"##,
            x = sx(a),
            y0 = TOP + ph,
            y1 = TOP + ph + 5.0,
            yt = TOP + ph + 20.0
        );
    }
    let nticks = (ytop / ystep).round() as usize;
    for k in 0..=nticks {
        let v = k as f64 * ystep;
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y}" x2="{LEFT}" y2="{y}" stroke="#000"/><text x="{xt}" y="{yl}" font-family="sans-serif" font-size="12" text-anchor="end">{label}</text>"##,
            x0 = LEFT - 5.0,
            y = sy(v),
            xt = LEFT - 8.0,
            yl = sy(v) + 4.0,
            label = format_number((v * 1e9).round() / 1e9)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle">alpha</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0);
    let _ = writeln!(s, r#"<text x="20" y="{}" font-family="sans-serif" font-size="14" text-anchor="middle" transform="rotate(-90 20 {})">bound</text>"#, TOP + ph / 2.0, TOP + ph / 2.0);

    for (i, (name, vals)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let reference = matches!(name.as_str(), "mi" | "lautum" | "true_excess");
        let dash = if reference { r#" stroke-dasharray="6 4""# } else { "" };
        let mut segments: Vec<Vec<String>> = vec![vec![]];
        for (a, v) in alpha.iter().zip(vals.iter()) {
            if v.is_finite() && *v <= ytop {
                segments.last_mut().expect("nonempty").push(format!("{:.2},{:.2}", sx(*a), sy(*v)));
            } else if !segments.last().expect("nonempty").is_empty() {
                segments.push(vec![]);
            }
        }
        for seg in segments.iter().filter(|p| p.len() > 1) {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{}"/>"#, seg.join(" "));
        }
        let ly = TOP + 20.0 + 22.0 * i as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/><text x="{}" y="{}" font-family="sans-serif" font-size="13">{}</text>"#,
            lx + 30.0,
            lx + 38.0,
            ly + 4.0,
            esc(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polylines_and_legend() {
        let t = CurveTable {
            columns: vec![
                ("alpha".into(), vec![0.1, 0.5, 0.9]),
                ("js".into(), vec![0.3, f64::INFINITY, 0.2]),
                ("mi".into(), vec![0.25; 3]),
            ],
            metadata: vec![],
        };
        let svg = render(&t, "demo");
        assert!(svg.contains(r#"width="800" height="600""#));
        assert!(svg.contains(">js</text>") && svg.contains(">mi</text>"));
        // the infinite point splits js into two single points, neither drawable
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(nice_step(0.37), 0.05);
    }
}
