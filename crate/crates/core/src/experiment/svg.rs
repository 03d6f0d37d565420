//! Minimal hand-written SVG plots: line charts, grouped bars and swarm trajectories.

use std::fmt::Write;

use crate::Vec2;

pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const W: f64 = 720.0;
const H: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: String,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        escape(title)
    );
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }

    fn axes(&self, out: &mut String, x_label: &str, y_label: &str) {
        let (l, r, t, b) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
        let _ = writeln!(
            out,
            r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            r - l,
            b - t
        );
        for k in 0..=5 {
            let fx = self.x0 + (self.x1 - self.x0) * k as f64 / 5.0;
            let fy = self.y0 + (self.y1 - self.y0) * k as f64 / 5.0;
            let (px, py) = (self.px(fx), self.py(fy));
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{b}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
                b + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                b + 18.0,
                tick(fx)
            );
            let _ = writeln!(
                out,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{l}" y2="{py:.2}" stroke="black"/>"#,
                l - 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                l - 8.0,
                py + 4.0,
                tick(fy)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (l + r) / 2.0,
            H - 12.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            (t + b) / 2.0,
            (t + b) / 2.0,
            escape(y_label)
        );
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 100.0 || v == v.round() {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn legend(out: &mut String, entries: &[(String, String, bool)]) {
    let x = W - RIGHT + 15.0;
    for (k, (name, color, dashed)) in entries.iter().enumerate() {
        let y = TOP + 10.0 + 18.0 * k as f64;
        let dash = if *dashed { r#" stroke-dasharray="5,3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="2"{dash}/>"#,
            x + 24.0
        );
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, x + 30.0, y + 4.0, escape(name));
    }
}

/// One `<polyline class="curve">` per series.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], y_range: Option<(f64, f64)>) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (x0, x1) = if x0.is_finite() && x1 > x0 {
        (x0, x1)
    } else {
        (0.0, 1.0)
    };
    let (y0, y1) = y_range.unwrap_or_else(|| {
        let ys = series.iter().flat_map(|s| s.points.iter().map(|p| p.1));
        let (a, b) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
        if a.is_finite() && b > a {
            (a, b)
        } else {
            (0.0, 1.0)
        }
    });
    let frame = Frame { x0, x1, y0, y1 };

    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out, x_label, y_label);
    for s in series {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="5,3""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline class="curve" data-name="{}" fill="none" stroke="{}" stroke-width="1.8"{dash} points="{}"/>"#,
            escape(&s.name),
            s.color,
            pts.join(" ")
        );
    }
    let entries: Vec<_> = series
        .iter()
        .map(|s| (s.name.clone(), s.color.clone(), s.dashed))
        .collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Grouped bar chart: `values[g][s]` is the bar of series `s` in group `g`.
pub fn bar_chart(
    title: &str,
    y_label: &str,
    groups: &[String],
    series: &[(String, String)],
    values: &[Vec<f64>],
) -> String {
    let frame = Frame {
        x0: 0.0,
        x1: groups.len().max(1) as f64,
        y0: 0.0,
        y1: 1.0,
    };
    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out, "target", y_label);
    let slot = 0.8 / series.len().max(1) as f64;
    for (g, name) in groups.iter().enumerate() {
        for (s, (_, color)) in series.iter().enumerate() {
            let v = values[g][s];
            if !v.is_finite() {
                continue;
            }
            let left = frame.px(g as f64 + 0.1 + slot * s as f64);
            let right = frame.px(g as f64 + 0.1 + slot * (s + 1) as f64);
            let top = frame.py(v.clamp(0.0, 1.0));
            let _ = writeln!(
                out,
                r#"<rect class="bar" x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{color}"><title>{:.4}</title></rect>"#,
                right - left,
                frame.py(0.0) - top,
                v
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-weight="bold">{}</text>"#,
            frame.px(g as f64 + 0.5),
            TOP + 15.0,
            escape(name)
        );
    }
    let entries: Vec<_> = series.iter().map(|(n, c)| (n.clone(), c.clone(), false)).collect();
    legend(&mut out, &entries);
    out.push_str("</svg>\n");
    out
}

/// Trails of every sheep and the shepherd over `frames` of `(shepherd, sheep)`.
pub fn trajectory(title: &str, frames: &[(Vec2, Vec<Vec2>)], target: Option<usize>) -> String {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (y, xs) in frames {
        for p in xs.iter().chain(std::iter::once(y)) {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
    }
    if !lo.x.is_finite() {
        lo = Vec2::zeros();
        hi = Vec2::new(1.0, 1.0);
    }
    // Equal aspect ratio.
    let span = (hi - lo).max().max(1e-9) * 1.1;
    let mid = (lo + hi) / 2.0;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let aspect = plot_w / plot_h;
    let frame = Frame {
        x0: mid.x - span * aspect / 2.0,
        x1: mid.x + span * aspect / 2.0,
        y0: mid.y - span / 2.0,
        y1: mid.y + span / 2.0,
    };

    let mut out = String::new();
    header(&mut out, title);
    frame.axes(&mut out, "x", "y");
    let n = frames.first().map_or(0, |f| f.1.len());
    for i in 0..n {
        let color = if Some(i) == target { "#d62728" } else { "#1f77b4" };
        let pts: Vec<String> = frames
            .iter()
            .map(|(_, xs)| format!("{:.2},{:.2}", frame.px(xs[i].x), frame.py(xs[i].y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline class="sheep-trail" fill="none" stroke="{color}" stroke-opacity="0.5" points="{}"/>"#,
            pts.join(" ")
        );
        if let (Some(first), Some(last)) = (frames.first(), frames.last()) {
            let (a, b) = (first.1[i], last.1[i]);
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="none" stroke="{color}"/>"#,
                frame.px(a.x),
                frame.py(a.y)
            );
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"><title>sheep {i}</title></circle>"#,
                frame.px(b.x),
                frame.py(b.y)
            );
        }
    }
    let pts: Vec<String> = frames
        .iter()
        .map(|(y, _)| format!("{:.2},{:.2}", frame.px(y.x), frame.py(y.y)))
        .collect();
    let _ = writeln!(
        out,
        r##"<polyline class="shepherd-trail" fill="none" stroke="#2ca02c" stroke-width="1.5" points="{}"/>"##,
        pts.join(" ")
    );
    if let Some((y, _)) = frames.last() {
        let _ = writeln!(
            out,
            r##"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="#2ca02c"><title>shepherd</title></rect>"##,
            frame.px(y.x) - 4.0,
            frame.py(y.y) - 4.0
        );
    }
    legend(
        &mut out,
        &[
            ("sheep".into(), "#1f77b4".into(), false),
            ("target".into(), "#d62728".into(), false),
            ("shepherd".into(), "#2ca02c".into(), false),
        ],
    );
    out.push_str("</svg>\n");
    out
}
