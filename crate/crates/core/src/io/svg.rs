//! Static SVG markup for Z1-Z2 plots.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 48.0;

/// One observation: a single point, or its path over a bandwidth sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct ZplotSeries {
    pub k: usize,
    pub points: Vec<(f64, f64)>,
    pub class: Option<i64>,
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

fn colour(class: Option<i64>) -> &'static str {
    match class {
        Some(c) => PALETTE[c.rem_euclid(PALETTE.len() as i64) as usize],
        None => PALETTE[0],
    }
}

/// Scatter for single-point series, polylines otherwise. `z1` runs along the
/// horizontal axis, `z2 ≥ 0` up the vertical one.
pub fn zplot_svg(series: &[ZplotSeries], title: &str) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1) = (-1.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 < 1e-12 {
        y1 = 1.0;
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * PAD);
    let sy = |y: f64| HEIGHT - PAD - y / y1 * (HEIGHT - 2.0 * PAD);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    // axes: baseline z2 = 0 and the vertical line z1 = 0 when in range
    let _ = writeln!(
        out,
        r#"<line x1="{PAD}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black"/>"#,
        b = sy(0.0),
        r = WIDTH - PAD
    );
    if x0 <= 0.0 && x1 >= 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{x:.2}" y1="{PAD}" x2="{x:.2}" y2="{b:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            x = sx(0.0),
            b = sy(0.0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">z1</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="14" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">z2</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (label, x, anchor) in [(x0, PAD, "start"), (x1, WIDTH - PAD, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{x}" y="{}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{}</text>"#,
            sy(0.0) + 14.0,
            super::fmt_sig(label, 4)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="10" text-anchor="end">{}</text>"#,
        PAD - 4.0,
        sy(y1) + 4.0,
        super::fmt_sig(y1, 4)
    );

    for s in series {
        let c = colour(s.class);
        if let [(x, y)] = s.points[..] {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"><title>{}</title></circle>"#,
                sx(x),
                sy(y),
                s.k
            );
        } else if !s.points.is_empty() {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1" stroke-opacity="0.7"><title>{}</title></polyline>"#,
                pts.join(" "),
                s.k
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
