//! Minimal line charts: one panel per series, shared x axis.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 180.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const PANEL_GAP: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub name: &'a str,
    /// `None` (or a non-finite value) leaves a gap in the line.
    pub values: Vec<Option<f64>>,
}

pub fn line_chart(title: &str, x_label: &str, xs: &[f64], series: &[Series]) -> String {
    let height = MARGIN_TOP + series.len() as f64 * (PANEL_HEIGHT + PANEL_GAP);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );

    let (x_min, x_max) = range(xs.iter().copied());
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let sx = |x: f64| MARGIN_LEFT + (x - x_min) / span(x_min, x_max) * plot_w;

    for (k, s) in series.iter().enumerate() {
        let top = MARGIN_TOP + k as f64 * (PANEL_HEIGHT + PANEL_GAP);
        let bottom = top + PANEL_HEIGHT;
        let finite = s.values.iter().flatten().copied().filter(|v| v.is_finite());
        let (y_min, y_max) = range(finite);
        let sy = |y: f64| bottom - (y - y_min) / span(y_min, y_max) * PANEL_HEIGHT;

        // axes
        let _ = writeln!(
            out,
            r#"<path d="M{MARGIN_LEFT} {top} V{bottom} H{}" fill="none" stroke="black"/>"#,
            MARGIN_LEFT + plot_w
        );
        for (y, anchor) in [(y_min, bottom), (y_max, top)] {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
                MARGIN_LEFT - 6.0,
                anchor + 4.0,
                tick(y)
            );
        }
        for (x, anchor) in [(x_min, "start"), (x_max, "end")] {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="{anchor}">{}</text>"#,
                sx(x),
                bottom + 14.0,
                tick(x)
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            bottom + 28.0,
            escape(x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-weight="bold">{}</text>"#,
            MARGIN_LEFT + 4.0,
            top - 6.0,
            escape(s.name)
        );

        // one polyline per unbroken run of finite points
        let color = COLORS[k % COLORS.len()];
        let mut run: Vec<String> = Vec::new();
        let flush = |run: &mut Vec<String>, out: &mut String| {
            if !run.is_empty() {
                let _ = writeln!(
                    out,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                    run.join(" ")
                );
                run.clear();
            }
        };
        for (&x, y) in xs.iter().zip(&s.values) {
            match y.filter(|v| v.is_finite()) {
                Some(y) => run.push(format!("{:.2},{:.2}", sx(x), sy(y))),
                None => flush(&mut run, &mut out),
            }
        }
        flush(&mut run, &mut out);
    }
    out.push_str("</svg>\n");
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    })
}

/// Flat or empty series get a unit span so they plot as a level line.
fn span(lo: f64, hi: f64) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn tick(v: f64) -> String {
    if !v.is_finite() {
        "n/a".into()
    } else if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        format!("{:.4}", v)
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
