//! Deterministic SVG rendering of heading-versus-time curves.
//!
//! The output contains no timestamps and formats every coordinate to six
//! significant digits, so identical inputs produce identical bytes.

use super::csv::fmt_sig;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 780.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 430.0;

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// One curve: a label for the legend, `(time_s, heading_deg)` samples,
/// and the times of any tile-boundary markers to draw as vertical lines.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub markers: Vec<f64>,
}

fn f6(x: f64) -> String {
    fmt_sig(x, 6)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_heading_plot(series: &[PlotSeries]) -> String {
    let mut t_max = 0.0_f64;
    let mut h_min = f64::INFINITY;
    let mut h_max = f64::NEG_INFINITY;
    for s in series {
        for &(t, h) in &s.points {
            t_max = t_max.max(t);
            h_min = h_min.min(h);
            h_max = h_max.max(h);
        }
        for &t in &s.markers {
            t_max = t_max.max(t);
        }
    }
    if t_max <= 0.0 {
        t_max = 1.0;
    }
    if !h_min.is_finite() || !h_max.is_finite() {
        h_min = -1.0;
        h_max = 1.0;
    }
    // Symmetric padding keeps mirrored data mirrored on the canvas.
    let pad = if h_max > h_min { 0.05 * (h_max - h_min) } else { 1.0 };
    let y_lo = h_min - pad;
    let y_hi = h_max + pad;

    let x_of = |t: f64| LEFT + (t / t_max) * (RIGHT - LEFT);
    let y_of = |h: f64| BOTTOM - (h - y_lo) / (y_hi - y_lo) * (BOTTOM - TOP);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    ));

    // Grid ticks and labels, five per axis.
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let t = frac * t_max;
        let x = x_of(t);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n",
            f6(x),
            f6(TOP),
            f6(BOTTOM)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"#000000\" text-anchor=\"middle\">{}</text>\n",
            f6(x),
            f6(BOTTOM + 18.0),
            f6(t)
        ));
        let h = y_lo + frac * (y_hi - y_lo);
        let y = y_of(h);
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#dddddd\"/>\n",
            f6(LEFT),
            f6(RIGHT),
            f6(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"#000000\" text-anchor=\"end\">{}</text>\n",
            f6(LEFT - 6.0),
            f6(y + 4.0),
            f6(h)
        ));
    }

    // Tile-boundary markers behind the curves.
    for s in series {
        for &t in &s.markers {
            let x = x_of(t);
            svg.push_str(&format!(
                "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#999999\" \
                 stroke-dasharray=\"4 3\"/>\n",
                f6(x),
                f6(TOP),
                f6(BOTTOM)
            ));
        }
    }

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#000000\"/>\n",
        f6(LEFT),
        f6(TOP),
        f6(BOTTOM)
    ));
    svg.push_str(&format!(
        "<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#000000\"/>\n",
        f6(LEFT),
        f6(RIGHT),
        f6(BOTTOM)
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" \
         fill=\"#000000\" text-anchor=\"middle\">time (s)</text>\n",
        f6((LEFT + RIGHT) / 2.0),
        f6(HEIGHT - 12.0)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{0}\" font-family=\"monospace\" font-size=\"14\" fill=\"#000000\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {0})\">orientation (deg)</text>\n",
        f6((TOP + BOTTOM) / 2.0)
    ));

    // Curves.
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut points = String::new();
        for &(t, h) in &s.points {
            if !points.is_empty() {
                points.push(' ');
            }
            points.push_str(&format!("{},{}", f6(x_of(t)), f6(y_of(h))));
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{points}\"/>\n"
        ));
    }

    // Legend, one row per curve.
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let y = TOP + 14.0 + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{2}\" x2=\"{}\" y2=\"{2}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            f6(RIGHT - 140.0),
            f6(RIGHT - 112.0),
            f6(y)
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"#000000\">{}</text>\n",
            f6(RIGHT - 106.0),
            f6(y + 4.0),
            escape(&s.label)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}
