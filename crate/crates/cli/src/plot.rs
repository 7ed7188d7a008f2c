//! Self-contained SVG charts. Coordinates are printed at fixed precision so
//! the files are byte-reproducible.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
    out: String,
}

impl Frame {
    fn new(title: &str, xlabel: &str, ylabel: &str, (x0, x1): (f64, f64), (y0, y1): (f64, f64), log_x: bool) -> Frame {
        let (x0, x1) = if log_x { (x0.log2(), x1.log2()) } else { (x0, x1) };
        let (x0, x1) = if x1 > x0 { (x0, x1) } else { (x0 - 0.5, x0 + 0.5) };
        let (y0, y1) = if y1 > y0 { (y0, y1) } else { (y0 - 0.5, y0 + 0.5) };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">"
        );
        let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>", W / 2.0, esc(title));
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", LEFT + (W - LEFT - RIGHT) / 2.0, H - 10.0, esc(xlabel));
        let _ = writeln!(
            out,
            "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>",
            TOP + (H - TOP - BOTTOM) / 2.0,
            TOP + (H - TOP - BOTTOM) / 2.0,
            esc(ylabel)
        );
        let f = Frame { x0, x1, y0, y1, log_x, out };
        f.axes()
    }

    fn px(&self, x: f64) -> f64 {
        let x = if self.log_x { x.log2() } else { x };
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (H - TOP - BOTTOM)
    }

    fn axes(mut self) -> Frame {
        let (bx, by) = (H - BOTTOM, LEFT);
        let _ = writeln!(self.out, "<line x1=\"{by:.1}\" y1=\"{bx:.1}\" x2=\"{:.1}\" y2=\"{bx:.1}\" stroke=\"black\"/>", W - RIGHT);
        let _ = writeln!(self.out, "<line x1=\"{by:.1}\" y1=\"{TOP:.1}\" x2=\"{by:.1}\" y2=\"{bx:.1}\" stroke=\"black\"/>");
        for k in 0..=4 {
            let y = self.y0 + (self.y1 - self.y0) * k as f64 / 4.0;
            let py = self.py(y);
            let _ = writeln!(
                self.out,
                "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{by:.1}\" y2=\"{py:.1}\" stroke=\"black\"/><text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>",
                by - 4.0,
                by - 6.0,
                py + 4.0,
                tick(y)
            );
        }
        self
    }

    fn x_ticks(&mut self, values: &[f64]) {
        for &v in values {
            let px = self.px(v);
            let _ = writeln!(
                self.out,
                "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/><text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
                H - BOTTOM,
                H - BOTTOM + 4.0,
                H - BOTTOM + 17.0,
                tick(v)
            );
        }
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in vals.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        (0.0, 1.0)
    } else {
        (lo, hi)
    }
}

/// One bar per label, starting from zero.
pub fn bar_chart(title: &str, xlabel: &str, ylabel: &str, labels: &[String], values: &[f64]) -> String {
    let (_, hi) = range(values.iter().copied());
    let n = labels.len().max(1) as f64;
    let mut f = Frame::new(title, xlabel, ylabel, (0.0, n), (0.0, hi.max(0.0) * 1.05), false);
    let slot = (W - LEFT - RIGHT) / n;
    for (k, (label, &v)) in labels.iter().zip(values).enumerate() {
        let v = if v.is_finite() { v.max(0.0) } else { 0.0 };
        let x = LEFT + slot * k as f64 + 0.1 * slot;
        let (y, base) = (f.py(v), f.py(0.0));
        let _ = writeln!(
            f.out,
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{:.1}\" height=\"{:.1}\" fill=\"{}\"/>",
            0.8 * slot,
            base - y,
            COLORS[0]
        );
        let _ = writeln!(f.out, "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>", x + 0.4 * slot, H - BOTTOM + 17.0, esc(label));
    }
    f.finish()
}

/// Line series with markers and a legend.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[(String, Vec<(f64, f64)>)], log_x: bool) -> String {
    let xs = || series.iter().flat_map(|s| s.1.iter().map(|p| p.0));
    let (x0, x1) = range(xs());
    let (y0, y1) = range(series.iter().flat_map(|s| s.1.iter().map(|p| p.1)));
    let pad = 0.05 * (y1 - y0).max(1e-12);
    let mut f = Frame::new(title, xlabel, ylabel, (x0, x1), (y0 - pad, y1 + pad), log_x);
    let mut ticks: Vec<f64> = xs().collect();
    ticks.sort_by(f64::total_cmp);
    ticks.dedup();
    if ticks.len() > 12 {
        let step = ticks.len().div_ceil(12);
        ticks = ticks.into_iter().step_by(step).collect();
    }
    f.x_ticks(&ticks);
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().filter(|p| p.1.is_finite()).map(|&(x, y)| format!("{:.1},{:.1}", f.px(x), f.py(y))).collect();
        let _ = writeln!(f.out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>", path.join(" "));
        for &(x, y) in pts.iter().filter(|p| p.1.is_finite()) {
            let _ = writeln!(f.out, "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>", f.px(x), f.py(y));
        }
        let ly = TOP + 14.0 * k as f64;
        let _ = writeln!(
            f.out,
            "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{color}\"/><text x=\"{:.1}\" y=\"{:.1}\">{}</text>",
            W - RIGHT - 150.0,
            ly,
            W - RIGHT - 135.0,
            ly + 9.0,
            esc(name)
        );
    }
    f.finish()
}

/// Planar projection of a polyline onto its first two coordinates, with
/// equal axis scales.
pub fn curve_plot(title: &str, pts: &[(f64, f64)]) -> String {
    let (x0, x1) = range(pts.iter().map(|p| p.0));
    let (y0, y1) = range(pts.iter().map(|p| p.1));
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let side = (W - LEFT - RIGHT).min(H - TOP - BOTTOM);
    let mut out = String::new();
    let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">");
    let _ = writeln!(out, "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>");
    let _ = writeln!(out, "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>", W / 2.0, esc(title));
    let map = |x: f64, y: f64| (W / 2.0 + (x - cx) / span * side, TOP + (H - TOP - BOTTOM) / 2.0 - (y - cy) / span * side);
    let path: Vec<String> = pts.iter().map(|&(x, y)| {
        let (a, b) = map(x, y);
        format!("{a:.2},{b:.2}")
    }).collect();
    let _ = writeln!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\"/>", path.join(" "), COLORS[0]);
    out.push_str("</svg>\n");
    out
}
