//! Line charts rendered directly as SVG text.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 200.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// One value of a series at a category: its mean and min–max spread.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub label: String,
    /// Sorted by category index.
    pub points: Vec<Point>,
}

/// A chart over categorical x values.
#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub categories: Vec<String>,
    pub series: Vec<Series>,
}

pub fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Tick positions covering `[lo, hi]` with a step of 1, 2 or 5 times a
/// power of ten.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * magnitude).find(|s| *s >= raw).unwrap_or(10.0 * magnitude);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

impl Plot {
    fn y_range(&self) -> (f64, f64) {
        let values = self.series.iter().flat_map(|s| s.points.iter().flat_map(|p| [p.min, p.max, p.mean]));
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            return (lo - 0.5, hi + 0.5);
        }
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }

    pub fn render(&self) -> String {
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let (y_lo, y_hi) = self.y_range();
        let slots = self.categories.len().max(1) as f64;
        let sx = |i: usize| LEFT + plot_w * (i as f64 + 0.5) / slots;
        let sy = |v: f64| TOP + plot_h * (1.0 - (v - y_lo) / (y_hi - y_lo));

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            TOP / 2.0 + 5.0,
            escape_xml(&self.title)
        );

        let _ = writeln!(svg, r#"<g class="bands">"#);
        for (k, s) in self.series.iter().enumerate() {
            if s.points.is_empty() {
                continue;
            }
            let upper = s.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.max)));
            let lower = s.points.iter().rev().map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.min)));
            let pts: Vec<String> = upper.chain(lower).collect();
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{}" fill-opacity="0.15" stroke="none"/>"#,
                pts.join(" "),
                PALETTE[k % PALETTE.len()]
            );
        }
        let _ = writeln!(svg, "</g>");

        let _ = writeln!(svg, r#"<g class="axes" stroke="black">"#);
        let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}"/>"#, TOP + plot_h, LEFT + plot_w, TOP + plot_h);
        let _ = writeln!(svg, r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{}"/>"#, TOP + plot_h);
        for i in 0..self.categories.len() {
            let x = sx(i);
            let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}"/>"#, TOP + plot_h, TOP + plot_h + 5.0);
        }
        let ticks = nice_ticks(y_lo, y_hi, 6);
        for &t in &ticks {
            let y = sy(t);
            let _ = writeln!(svg, r#"<line x1="{}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}"/>"#, LEFT - 5.0);
        }
        let _ = writeln!(svg, "</g>");

        let _ = writeln!(svg, r#"<g class="labels">"#);
        for (i, c) in self.categories.iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
                sx(i),
                TOP + plot_h + 20.0,
                escape_xml(c)
            );
        }
        let step = if ticks.len() > 1 { ticks[1] - ticks[0] } else { 1.0 };
        for &t in &ticks {
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
                LEFT - 8.0,
                sy(t) + 4.0,
                tick_label(t, step)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 20.0,
            escape_xml(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">{}</text>"#,
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            escape_xml(&self.y_label)
        );
        let _ = writeln!(svg, "</g>");

        let _ = writeln!(svg, r#"<g class="series" fill="none" stroke-width="1.5">"#);
        for (k, s) in self.series.iter().enumerate() {
            if s.points.is_empty() {
                continue;
            }
            let pts: Vec<String> = s.points.iter().map(|p| format!("{:.2},{:.2}", sx(p.x), sy(p.mean))).collect();
            let _ = writeln!(svg, r#"<polyline points="{}" stroke="{}"/>"#, pts.join(" "), PALETTE[k % PALETTE.len()]);
        }
        let _ = writeln!(svg, "</g>");

        let _ = writeln!(svg, r#"<g class="legend">"#);
        let lx = LEFT + plot_w + 20.0;
        for (k, s) in self.series.iter().enumerate() {
            let y = TOP + 10.0 + 20.0 * k as f64;
            let color = PALETTE[k % PALETTE.len()];
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"/>"#,
                lx + 24.0
            );
            let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, y + 4.0, escape_xml(&s.label));
        }
        let _ = writeln!(svg, "</g>");
        svg.push_str("</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot() -> Plot {
        let series = (0..3)
            .map(|k| Series {
                label: format!("s<{k}> & \"q\""),
                points: (0..4)
                    .map(|x| {
                        let m = k as f64 + x as f64 * 0.1;
                        Point { x, mean: m, min: m - 0.05, max: m + 0.05 }
                    })
                    .collect(),
            })
            .collect();
        Plot {
            title: "T & <t>".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            categories: vec!["0".into(), "1".into(), "2".into(), "5".into()],
            series,
        }
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape_xml(r#"a<b>&"c"'"#), "a&lt;b&gt;&amp;&quot;c&quot;&apos;");
        let svg = plot().render();
        assert!(svg.contains("T &amp; &lt;t&gt;"));
        assert!(!svg.contains("s<0>"));
    }

    #[test]
    fn one_polyline_and_band_per_series() {
        let svg = plot().render();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert_eq!(svg.matches("<polygon").count(), 3);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_series_draw_nothing() {
        let mut p = plot();
        p.series[1].points.clear();
        assert_eq!(p.render().matches("<polyline").count(), 2);
    }

    #[test]
    fn ticks() {
        assert_eq!(nice_ticks(0.0, 1.0, 5), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(nice_ticks(3.0, 3.0, 5), vec![3.0]);
        assert_eq!(tick_label(0.6000000000000001, 0.2), "0.6");
        assert_eq!(tick_label(-0.0001, 0.1), "0.0");
        assert_eq!(tick_label(20.0, 10.0), "20");
    }
}
