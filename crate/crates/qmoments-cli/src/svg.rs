//! Minimal static SVG line plots: axes, ticks, polylines, point markers
//! with error bars, and a legend. Output is deterministic for identical
//! input.

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 6] = ["#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400", "#16a085"];

#[derive(Clone, Debug)]
pub enum SeriesKind {
    Line,
    /// Markers with optional symmetric error bars.
    Points { errors: Option<Vec<f64>> },
}

#[derive(Clone, Debug)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub kind: SeriesKind,
}

#[derive(Clone, Debug)]
pub struct LinePlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl LinePlot {
    pub fn render(&self) -> String {
        let (x_min, x_max, y_min, y_max) = self.ranges();
        let x_span = (x_max - x_min).max(1e-12);
        let y_span = (y_max - y_min).max(1e-12);
        let px = |x: f64| MARGIN_L + (x - x_min) / x_span * (WIDTH - MARGIN_L - MARGIN_R);
        let py = |y: f64| HEIGHT - MARGIN_B - (y - y_min) / y_span * (HEIGHT - MARGIN_T - MARGIN_B);

        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
            WIDTH / 2.0,
            escape(&self.title)
        ));

        // Axes.
        out.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B,
            WIDTH - MARGIN_R,
            HEIGHT - MARGIN_B
        ));
        out.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{MARGIN_T}\" x2=\"{MARGIN_L}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            HEIGHT - MARGIN_B
        ));

        for (value, frac) in ticks(x_min, x_max) {
            let x = px(value);
            out.push_str(&format!(
                "<line x1=\"{x:.1}\" y1=\"{:.1}\" x2=\"{x:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
                HEIGHT - MARGIN_B,
                HEIGHT - MARGIN_B + 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{x:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                HEIGHT - MARGIN_B + 18.0,
                format_tick(value, frac)
            ));
        }
        for (value, frac) in ticks(y_min, y_max) {
            let y = py(value);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{y:.1}\" x2=\"{MARGIN_L}\" y2=\"{y:.1}\" stroke=\"black\"/>\n",
                MARGIN_L - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                MARGIN_L - 8.0,
                y + 4.0,
                format_tick(value, frac)
            ));
        }
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.1})\">{}</text>\n",
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            escape(&self.y_label)
        ));

        // Zero line when the range crosses zero.
        if y_min < 0.0 && y_max > 0.0 {
            let y0 = py(0.0);
            out.push_str(&format!(
                "<line x1=\"{MARGIN_L}\" y1=\"{y0:.1}\" x2=\"{:.1}\" y2=\"{y0:.1}\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n",
                WIDTH - MARGIN_R
            ));
        }

        for (s, series) in self.series.iter().enumerate() {
            let color = PALETTE[s % PALETTE.len()];
            match &series.kind {
                SeriesKind::Line => {
                    let pts: Vec<String> = series
                        .points
                        .iter()
                        .filter(|(x, y)| x.is_finite() && y.is_finite())
                        .map(|(x, y)| format!("{:.2},{:.2}", px(*x), py(*y)))
                        .collect();
                    out.push_str(&format!(
                        "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\" points=\"{}\"/>\n",
                        pts.join(" ")
                    ));
                }
                SeriesKind::Points { errors } => {
                    for (i, (x, y)) in series.points.iter().enumerate() {
                        if !x.is_finite() || !y.is_finite() {
                            continue;
                        }
                        if let Some(errs) = errors {
                            let e = errs.get(i).copied().unwrap_or(0.0);
                            if e.is_finite() && e > 0.0 {
                                out.push_str(&format!(
                                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{color}\"/>\n",
                                    px(*x),
                                    py(y - e),
                                    px(*x),
                                    py(y + e)
                                ));
                            }
                        }
                        out.push_str(&format!(
                            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                            px(*x),
                            py(*y)
                        ));
                    }
                }
            }
            // Legend entry.
            let ly = MARGIN_T + 16.0 * s as f64;
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"{color}\" stroke-width=\"3\"/>\n",
                WIDTH - MARGIN_R - 160.0,
                ly,
                WIDTH - MARGIN_R - 140.0,
                ly
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                WIDTH - MARGIN_R - 134.0,
                ly + 4.0,
                escape(&series.label)
            ));
        }

        out.push_str("</svg>\n");
        out
    }

    fn ranges(&self) -> (f64, f64, f64, f64) {
        let mut x_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_min = f64::INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for s in &self.series {
            let errs = match &s.kind {
                SeriesKind::Points { errors: Some(e) } => Some(e),
                _ => None,
            };
            for (i, (x, y)) in s.points.iter().enumerate() {
                if !x.is_finite() || !y.is_finite() {
                    continue;
                }
                let e = errs.and_then(|v| v.get(i)).copied().unwrap_or(0.0);
                x_min = x_min.min(*x);
                x_max = x_max.max(*x);
                y_min = y_min.min(y - e);
                y_max = y_max.max(y + e);
            }
        }
        if !x_min.is_finite() {
            (0.0, 1.0, 0.0, 1.0)
        } else {
            // A little headroom on y.
            let pad = 0.05 * (y_max - y_min).max(1e-9);
            (x_min, x_max, y_min - pad, y_max + pad)
        }
    }
}

/// About six ticks at a round step; returns (value, fractional_digits).
fn ticks(min: f64, max: f64) -> Vec<(f64, usize)> {
    let span = (max - min).max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(mag * 10.0);
    let digits = if step >= 1.0 { 0 } else { (-step.log10().floor()) as usize };
    let first = (min / step).ceil() as i64;
    let last = (max / step).floor() as i64;
    (first..=last).map(|k| (k as f64 * step, digits)).collect()
}

fn format_tick(v: f64, digits: usize) -> String {
    format!("{v:.digits$}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
