//! Minimal static SVG 1.1 plots: axes, lines, scatter points, shaded bands
//! and horizontal reference lines.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

#[derive(Debug, Clone)]
pub enum Item {
    Line {
        points: Vec<(f64, f64)>,
        color: String,
        label: String,
    },
    Scatter {
        points: Vec<(f64, f64)>,
        color: String,
        label: String,
    },
    /// Filled region between `lower` and `upper` over shared x values.
    Band {
        x: Vec<f64>,
        lower: Vec<f64>,
        upper: Vec<f64>,
        color: String,
    },
    HLine {
        y: f64,
        color: String,
        label: String,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub items: Vec<Item>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Tick label with just enough digits for the tick spacing.
fn tick_label(v: f64, step: f64) -> String {
    let digits = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.digits$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.0 {
        2.0
    } else if f < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

impl Plot {
    fn data_range(&self, pick_x: bool) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut see = |v: f64| {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        };
        for item in &self.items {
            match item {
                Item::Line { points, .. } | Item::Scatter { points, .. } => {
                    points.iter().for_each(|&(x, y)| see(if pick_x { x } else { y }))
                }
                Item::Band { x, lower, upper, .. } => {
                    if pick_x {
                        x.iter().for_each(|&v| see(v));
                    } else {
                        lower.iter().chain(upper).for_each(|&v| see(v));
                    }
                }
                Item::HLine { y, .. } => {
                    if !pick_x {
                        see(*y)
                    }
                }
            }
        }
        if !lo.is_finite() {
            return (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            return (lo - 0.5, hi + 0.5);
        }
        let pad = 0.03 * (hi - lo);
        (lo - pad, hi + pad)
    }

    pub fn render(&self) -> String {
        let (x0, x1) = self.x_range.unwrap_or_else(|| self.data_range(true));
        let (y0, y1) = self.y_range.unwrap_or_else(|| self.data_range(false));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ =
            writeln!(out, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, num(WIDTH / 2.0), escape(&self.title));
        let _ = writeln!(
            out,
            r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{}" height="{}"/></clipPath></defs>"#,
            num(pw),
            num(ph)
        );

        // Ticks and grid.
        for (lo, hi, horizontal) in [(x0, x1, true), (y0, y1, false)] {
            let step = nice_step(hi - lo);
            let mut v = (lo / step).ceil() * step;
            while v <= hi + 1e-9 * step {
                let label = tick_label(v, step);
                if horizontal {
                    let x = num(sx(v));
                    let _ = writeln!(out, r##"<line x1="{x}" y1="{TOP}" x2="{x}" y2="{}" stroke="#e5e5e5"/>"##, num(TOP + ph));
                    let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{label}</text>"#, num(TOP + ph + 16.0));
                } else {
                    let y = num(sy(v));
                    let _ = writeln!(out, r##"<line x1="{LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="#e5e5e5"/>"##, num(LEFT + pw));
                    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{label}</text>"#, num(LEFT - 6.0), num(sy(v) + 4.0));
                }
                v += step;
            }
        }
        let _ = writeln!(out, r#"<rect x="{LEFT}" y="{TOP}" width="{}" height="{}" fill="none" stroke="black"/>"#, num(pw), num(ph));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            num(LEFT + pw / 2.0),
            num(HEIGHT - 14.0),
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
            num(TOP + ph / 2.0),
            num(TOP + ph / 2.0),
            escape(&self.y_label)
        );

        let _ = writeln!(out, r#"<g clip-path="url(#plot)">"#);
        let mut legend = Vec::new();
        for item in &self.items {
            match item {
                Item::Band { x, lower, upper, color } => {
                    let mut pts: Vec<String> = x.iter().zip(upper).map(|(&a, &b)| format!("{},{}", num(sx(a)), num(sy(b)))).collect();
                    pts.extend(x.iter().zip(lower).rev().map(|(&a, &b)| format!("{},{}", num(sx(a)), num(sy(b)))));
                    let _ = writeln!(out, r#"<polygon points="{}" fill="{color}" fill-opacity="0.25" stroke="none"/>"#, pts.join(" "));
                }
                Item::Line { points, color, label } => {
                    let pts: Vec<String> = points.iter().map(|&(a, b)| format!("{},{}", num(sx(a)), num(sy(b)))).collect();
                    let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, pts.join(" "));
                    legend.push((color.clone(), label.clone(), false));
                }
                Item::Scatter { points, color, label } => {
                    for &(a, b) in points {
                        let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, num(sx(a)), num(sy(b)));
                    }
                    legend.push((color.clone(), label.clone(), true));
                }
                Item::HLine { y, color, label } => {
                    let yy = num(sy(*y));
                    let _ = writeln!(
                        out,
                        r#"<line x1="{LEFT}" y1="{yy}" x2="{}" y2="{yy}" stroke="{color}" stroke-dasharray="6 4"/>"#,
                        num(LEFT + pw)
                    );
                    let _ = writeln!(
                        out,
                        r#"<text x="{}" y="{}" text-anchor="end" fill="{color}">{}</text>"#,
                        num(LEFT + pw - 4.0),
                        num(sy(*y) - 4.0),
                        escape(label)
                    );
                }
            }
        }
        let _ = writeln!(out, "</g>");
        for (i, (color, label, dot)) in legend.iter().enumerate().filter(|(_, l)| !l.1.is_empty()) {
            let y = TOP + 14.0 + 16.0 * i as f64;
            let x = LEFT + 10.0;
            if *dot {
                let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#, num(x + 8.0), num(y - 4.0));
            } else {
                let _ = writeln!(
                    out,
                    r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="1.5"/>"#,
                    num(x),
                    num(y - 4.0),
                    num(x + 16.0),
                    num(y - 4.0)
                );
            }
            let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, num(x + 22.0), num(y), escape(label));
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_every_item_kind() {
        let plot = Plot {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            items: vec![
                Item::Band { x: vec![0.0, 1.0], lower: vec![0.0, 0.1], upper: vec![0.2, 0.3], color: "blue".into() },
                Item::Line { points: vec![(0.0, 0.1), (1.0, 0.2)], color: "blue".into(), label: "mean".into() },
                Item::Scatter { points: vec![(0.5, 0.5)], color: "red".into(), label: String::new() },
                Item::HLine { y: 1.0 / 3.0, color: "gray".into(), label: "1/3".into() },
            ],
            ..Default::default()
        };
        let svg = plot.render();
        assert!(svg.starts_with("<?xml"));
        assert!(svg.ends_with("</svg>\n"));
        for tag in ["<polygon", "<polyline", "<circle", "stroke-dasharray", "a &lt; b"] {
            assert!(svg.contains(tag), "{tag}");
        }
        assert_eq!(svg, plot.render());
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(nice_step(17000.0), 5000.0);
        assert_eq!(tick_label(0.30000000000000004, 0.1), "0.3");
        assert_eq!(tick_label(-1e-17, 0.2), "0");
    }
}
