//! Minimal deterministic log-log SVG plot: data points, the fitted line and
//! an optional predicted-slope guide line. No timestamps, no randomness.

use std::fmt::Write as _;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 60.0;

pub struct LogLogPlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: &'a [(f64, f64)],
    /// `(slope, ln-intercept)` of the least-squares line, if any.
    pub fit: Option<(f64, f64)>,
    /// Predicted exponent drawn as a guide anchored at the first point.
    pub guide: Option<f64>,
}

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

impl LogLogPlot<'_> {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-family="monospace" font-size="15">{}</text>"#,
            W / 2.0,
            escape(self.title)
        );
        if self.points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) || self.points.is_empty() {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" font-family="monospace" font-size="13">no positive data</text>"#,
                W / 2.0,
                H / 2.0
            );
            let _ = writeln!(s, "</svg>");
            return s;
        }
        let lx: Vec<f64> = self.points.iter().map(|p| p.0.ln()).collect();
        let ly: Vec<f64> = self.points.iter().map(|p| p.1.ln()).collect();
        let (x0, x1) = padded_range(&lx);
        let (y0, y1) = padded_range(&ly);
        let to_px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let to_py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);

        // frame and axis labels
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * MARGIN,
            H - 2.0 * MARGIN
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle" font-family="monospace" font-size="12">{} (log)</text>"#,
            W / 2.0,
            H - 18.0,
            escape(self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="18" y="{}" text-anchor="middle" font-family="monospace" font-size="12" transform="rotate(-90 18 {})">{} (log)</text>"#,
            H / 2.0,
            H / 2.0,
            escape(self.y_label)
        );
        // tick labels at the corners
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{}" font-family="monospace" font-size="10">{}</text>"#,
            H - MARGIN + 14.0,
            fmt(x0.exp())
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="monospace" font-size="10">{}</text>"#,
            W - MARGIN,
            H - MARGIN + 14.0,
            fmt(x1.exp())
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="monospace" font-size="10">{:.3e}</text>"#,
            MARGIN - 4.0,
            H - MARGIN,
            y0.exp()
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="monospace" font-size="10">{:.3e}</text>"#,
            MARGIN - 4.0,
            MARGIN + 4.0,
            y1.exp()
        );

        // guide line (predicted slope through the first point)
        if let Some(g) = self.guide {
            let c = ly[0] - g * lx[0];
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#888888" stroke-dasharray="6 4"/>"##,
                to_px(x0),
                to_py(g * x0 + c),
                to_px(x1),
                to_py(g * x1 + c)
            );
            let _ = writeln!(
                s,
                r##"<text x="{}" y="{}" font-family="monospace" font-size="11" fill="#555555">guide slope {}</text>"##,
                MARGIN + 8.0,
                MARGIN + 16.0,
                fmt(g)
            );
        }
        // fitted line
        if let Some((slope, intercept)) = self.fit {
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#205090" stroke-width="1.5"/>"##,
                to_px(x0),
                to_py(slope * x0 + intercept),
                to_px(x1),
                to_py(slope * x1 + intercept)
            );
            let _ = writeln!(
                s,
                r##"<text x="{}" y="{}" font-family="monospace" font-size="11" fill="#205090">fit slope {}</text>"##,
                MARGIN + 8.0,
                MARGIN + 32.0,
                fmt(slope)
            );
        }
        // points
        for (&x, &y) in lx.iter().zip(&ly) {
            let _ = writeln!(
                s,
                r##"<circle cx="{}" cy="{}" r="4" fill="#c03020"/>"##,
                to_px(x),
                to_py(y)
            );
        }
        let _ = writeln!(s, "</svg>");
        s
    }
}

fn padded_range(v: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in v {
        lo = lo.min(x);
        hi = hi.max(x);
    }
    if hi - lo < 1e-9 {
        lo -= 0.5;
        hi += 0.5;
    }
    let pad = 0.08 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_and_is_deterministic() {
        let pts = [(0.25, 0.02), (0.125, 0.008), (0.0625, 0.003)];
        let plot = LogLogPlot {
            title: "demo",
            x_label: "eps",
            y_label: "err",
            points: &pts,
            fit: Some((1.4, -1.0)),
            guide: Some(1.5),
        };
        let a = plot.render();
        let b = plot.render();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("guide slope 1.500"));
        assert!(a.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_data_still_valid_svg() {
        let plot = LogLogPlot {
            title: "empty",
            x_label: "x",
            y_label: "y",
            points: &[],
            fit: None,
            guide: None,
        };
        let s = plot.render();
        assert!(s.contains("no positive data"));
    }
}
