//! Small SVG plotter for the figure outputs: line series, bar histograms and spike rasters.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone)]
pub enum Layer {
    Line { label: String, points: Vec<(f64, f64)> },
    /// Bars of `(left edge, right edge, height)`.
    Bars { label: String, bins: Vec<(f64, f64, f64)> },
    /// One row of tick marks per train.
    Raster { rows: Vec<(String, Vec<f64>)> },
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub layers: Vec<Layer>,
}

struct Scale {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Scale {
    fn new(lo: f64, hi: f64, px_lo: f64, px_hi: f64) -> Self {
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
        Self { lo, hi, px_lo, px_hi }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            layers: Vec::new(),
        }
    }

    pub fn with(mut self, layer: Layer) -> Self {
        self.layers.push(layer);
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64, f64::NEG_INFINITY);
        let mut x = |v: f64| {
            x0 = x0.min(v);
            x1 = x1.max(v);
        };
        for layer in &self.layers {
            match layer {
                Layer::Line { points, .. } => {
                    for &(px, py) in points {
                        x(px);
                        y0 = y0.min(py);
                        y1 = y1.max(py);
                    }
                }
                Layer::Bars { bins, .. } => {
                    for &(l, r, h) in bins {
                        x(l);
                        x(r);
                        y1 = y1.max(h);
                    }
                }
                Layer::Raster { rows } => {
                    rows.iter().flat_map(|r| r.1.iter()).for_each(|&t| x(t));
                    y1 = y1.max(rows.len() as f64);
                }
            }
        }
        if !x0.is_finite() {
            (x0, x1) = (0.0, 1.0);
        }
        if !y1.is_finite() {
            y1 = 1.0;
        }
        (x0, x1, y0, y1)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let sx = Scale::new(x0, x1, MARGIN, WIDTH - MARGIN / 2.0);
        let sy = Scale::new(y0, y1, HEIGHT - MARGIN, MARGIN / 2.0);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="16" text-anchor="middle" font-size="13">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        self.axes(&mut s, &sx, &sy);
        let mut legend = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            match layer {
                Layer::Line { label, points } => {
                    let path: Vec<String> = points
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx.map(x), sy.map(y)))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
                        path.join(" ")
                    );
                    legend.push((label.clone(), colour));
                }
                Layer::Bars { label, bins } => {
                    for &(l, r, h) in bins {
                        let (px, top) = (sx.map(l), sy.map(h));
                        let _ = writeln!(
                            s,
                            r#"<rect x="{px:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{colour}" fill-opacity="0.7"/>"#,
                            (sx.map(r) - px).max(0.5),
                            (sy.map(y0) - top).max(0.0)
                        );
                    }
                    legend.push((label.clone(), colour));
                }
                Layer::Raster { rows } => {
                    for (row, (name, times)) in rows.iter().enumerate() {
                        let yc = sy.map(row as f64 + 0.5);
                        let c = PALETTE[row % PALETTE.len()];
                        for &t in times {
                            let x = sx.map(t);
                            let _ = writeln!(
                                s,
                                r#"<line x1="{x:.2}" x2="{x:.2}" y1="{:.2}" y2="{:.2}" stroke="{c}"/>"#,
                                yc - 4.0,
                                yc + 4.0
                            );
                        }
                        let _ = writeln!(
                            s,
                            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
                            MARGIN - 4.0,
                            yc + 4.0,
                            escape(name)
                        );
                    }
                }
            }
        }
        for (i, (label, colour)) in legend.iter().enumerate() {
            let y = MARGIN / 2.0 + 14.0 * i as f64 + 8.0;
            let x = WIDTH - MARGIN / 2.0 - 130.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{colour}"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                y - 9.0,
                x + 14.0,
                y,
                escape(label)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    fn axes(&self, s: &mut String, sx: &Scale, sy: &Scale) {
        let (left, right, bottom, top) = (sx.px_lo, sx.px_hi, sy.px_lo, sy.px_hi);
        let _ = writeln!(
            s,
            r#"<path d="M{left:.1},{top:.1} V{bottom:.1} H{right:.1}" fill="none" stroke="black"/>"#
        );
        let raster = self.layers.iter().any(|l| matches!(l, Layer::Raster { .. }));
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = sx.lo + f * (sx.hi - sx.lo);
            let px = sx.map(xv);
            let _ = writeln!(
                s,
                r#"<line x1="{px:.1}" x2="{px:.1}" y1="{bottom:.1}" y2="{:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                bottom + 4.0,
                bottom + 16.0,
                tick(xv)
            );
            if !raster {
                let yv = sy.lo + f * (sy.hi - sy.lo);
                let py = sy.map(yv);
                let _ = writeln!(
                    s,
                    r#"<line x1="{:.1}" x2="{left:.1}" y1="{py:.1}" y2="{py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                    left - 4.0,
                    left - 6.0,
                    py + 4.0,
                    tick(yv)
                );
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            (left + right) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(14,{:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (top + bottom) / 2.0,
            escape(&self.y_label)
        );
    }
}

fn tick(v: f64) -> String {
    if v == 0.0 || (v.abs() >= 0.01 && v.abs() < 1e4) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_plot_has_polyline_and_legend() {
        let svg = Figure::new("f", "x", "y")
            .with(Layer::Line {
                label: "a<b".into(),
                points: vec![(0.0, 0.0), (1.0, 2.0)],
            })
            .render();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains("a&lt;b"));
    }

    #[test]
    fn bars_and_raster_counts() {
        let svg = Figure::new("h", "x", "n")
            .with(Layer::Bars {
                label: "d".into(),
                bins: vec![(0.0, 1.0, 3.0), (1.0, 2.0, 1.0)],
            })
            .render();
        assert_eq!(svg.matches("fill-opacity").count(), 2);
        let svg = Figure::new("r", "t", "")
            .with(Layer::Raster {
                rows: vec![("a".into(), vec![0.1, 0.2]), ("b".into(), vec![0.3])],
            })
            .render();
        assert_eq!(svg.matches("<line x1=").count(), 3 + 5);
    }

    #[test]
    fn empty_figure_renders() {
        let svg = Figure::new("empty", "x", "y").render();
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let f = Figure::new("f", "x", "y").with(Layer::Line {
            label: "l".into(),
            points: vec![(0.1, 0.3), (0.7, 0.2)],
        });
        assert_eq!(f.render(), f.render());
    }

    #[test]
    fn tick_labels() {
        assert_eq!(tick(0.0), "0");
        assert_eq!(tick(0.25), "0.25");
        assert_eq!(tick(20.0), "20");
        assert_eq!(tick(1e-4), "1.0e-4");
    }
}
