//! Self-contained SVG line plots and heatmaps.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub values: &'a [f64],
    pub color: &'a str,
}

pub struct Axes<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String, axes: &Axes, comments: &[String]) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    if !comments.is_empty() {
        let _ = writeln!(out, "<!--");
        for c in comments {
            let _ = writeln!(out, "# {}", c.replace("--", "- -"));
        }
        let _ = writeln!(out, "-->");
    }
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        escape(axes.title)
    );
}

fn frame(out: &mut String, axes: &Axes, (x0, x1): (f64, f64), (y0, y1): (f64, f64)) {
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let _ = writeln!(
        out,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let px = LEFT + f * pw;
        let py = TOP + ph - f * ph;
        let _ = writeln!(
            out,
            r#"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0,
            x0 + f * (x1 - x0)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{py:.1}" x2="{LEFT}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0,
            y0 + f * (y1 - y0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(axes.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        TOP + ph / 2.0,
        escape(axes.y_label)
    );
}

/// One polyline per series over a shared x axis, with a legend.
pub fn line_plot(axes: &Axes, x: &[f64], series: &[Series], comments: &[String]) -> String {
    let mut out = String::new();
    header(&mut out, axes, comments);
    let xr = range(x.iter().copied());
    let yr = range(series.iter().flat_map(|s| s.values.iter().copied()).chain([0.0]));
    frame(&mut out, axes, xr, yr);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + (v - xr.0) / (xr.1 - xr.0) * pw;
    let py = |v: f64| TOP + ph - (v - yr.0) / (yr.1 - yr.0) * ph;
    for (k, s) in series.iter().enumerate() {
        let points: Vec<String> = x
            .iter()
            .zip(s.values)
            .filter(|(_, v)| v.is_finite())
            .map(|(&xv, &yv)| format!("{:.2},{:.2}", px(xv), py(yv)))
            .collect();
        if points.len() == 1 {
            let (cx, cy) = points[0].split_once(',').unwrap();
            let _ = writeln!(out, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{}"/>"#, s.color);
        } else {
            let _ = writeln!(
                out,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.8" points="{}"/>"#,
                s.color,
                points.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - RIGHT + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx}" y1="{ly}" x2="{:.1}" y2="{ly}" stroke="{}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 22.0,
            s.color,
            lx + 28.0,
            ly + 4.0,
            escape(s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Piecewise-linear approximation of the viridis colormap on `[0, 1]`.
pub fn colormap(t: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 5] = [
        (68.0, 1.0, 84.0),
        (59.0, 82.0, 139.0),
        (33.0, 145.0, 140.0),
        (94.0, 201.0, 98.0),
        (253.0, 231.0, 37.0),
    ];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let pos = t * (STOPS.len() - 1) as f64;
    let i = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - i as f64;
    let lerp = |a: f64, b: f64| (a + (b - a) * f).round() as u8;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    (lerp(a.0, b.0), lerp(a.1, b.1), lerp(a.2, b.2))
}

/// Heatmap of `values[iy][ix]` over cell-centre coordinates `xs`, `ys`, with
/// the colour scale fixed to `[0, 1]`.
pub fn heatmap(axes: &Axes, xs: &[f64], ys: &[f64], values: &[Vec<f64>], comments: &[String]) -> String {
    let mut out = String::new();
    header(&mut out, axes, comments);

    let half = |v: &[f64]| {
        if v.len() > 1 {
            (v[1] - v[0]).abs() / 2.0
        } else {
            0.5
        }
    };
    let (hx, hy) = (half(xs), half(ys));
    let xr = range(xs.iter().copied());
    let yr = range(ys.iter().copied());
    let xr = (xr.0 - hx, xr.1 + hx);
    let yr = (yr.0 - hy, yr.1 + hy);

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let cw = pw * 2.0 * hx / (xr.1 - xr.0);
    let ch = ph * 2.0 * hy / (yr.1 - yr.0);
    for (iy, row) in values.iter().enumerate() {
        for (ix, &v) in row.iter().enumerate() {
            let (r, g, b) = colormap(v);
            let x = LEFT + (xs[ix] - hx - xr.0) / (xr.1 - xr.0) * pw;
            let y = TOP + ph - (ys[iy] + hy - yr.0) / (yr.1 - yr.0) * ph;
            let _ = writeln!(
                out,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
                cw + 0.3,
                ch + 0.3
            );
        }
    }
    frame(&mut out, axes, xr, yr);

    // colour bar
    let bx = WIDTH - RIGHT + 24.0;
    for i in 0..50 {
        let t = i as f64 / 49.0;
        let (r, g, b) = colormap(t);
        let y = TOP + ph - (i as f64 + 1.0) * ph / 50.0;
        let _ = writeln!(
            out,
            r#"<rect x="{bx}" y="{y:.2}" width="18" height="{:.2}" fill="rgb({r},{g},{b})"/>"#,
            ph / 50.0 + 0.3
        );
    }
    for (label, y) in [("1", TOP + 4.0), ("0", TOP + ph + 4.0)] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{y:.1}">{label}</text>"#, bx + 24.0);
    }
    out.push_str("</svg>\n");
    out
}
