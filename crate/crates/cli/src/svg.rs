//! Minimal deterministic SVG writer: axes, polylines, rectangles, text.

use std::fmt::Write;

pub const WIDTH: f64 = 720.0;
pub const HEIGHT: f64 = 480.0;

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 56.0;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick label with a fixed number of significant decimals for the step.
pub fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Round step (1, 2 or 5 times a power of ten) giving at most `max_ticks` ticks.
pub fn nice_step(span: f64, max_ticks: usize) -> f64 {
    let raw = span.abs().max(1e-12) / max_ticks.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag)
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}" stroke-width="{}"/>"#,
            num(x1),
            num(y1),
            num(x2),
            num(y2),
            num(width)
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], stroke: &str, width: f64) {
        if points.is_empty() {
            return;
        }
        let pts: Vec<String> = points.iter().map(|(x, y)| format!("{},{}", num(*x), num(*y))).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{}"/>"#,
            pts.join(" "),
            num(width)
        );
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
            num(x),
            num(y),
            num(w),
            num(h)
        );
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<circle cx="{}" cy="{}" r="{}" fill="{fill}"/>"#, num(x), num(y), num(r));
    }

    /// `anchor` is one of start, middle, end.
    pub fn text(&mut self, x: f64, y: f64, s: &str, size: f64, anchor: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{}" y="{}" font-family="monospace" font-size="{}" text-anchor="{anchor}">{}</text>"#,
            num(x),
            num(y),
            num(size),
            escape(s)
        );
    }

    pub fn vertical_text(&mut self, x: f64, y: f64, s: &str, size: f64) {
        let _ = writeln!(
            self.body,
            r#"<text x="{0}" y="{1}" font-family="monospace" font-size="{2}" text-anchor="middle" transform="rotate(-90 {0} {1})">{3}</text>"#,
            num(x),
            num(y),
            num(size),
            escape(s)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = num(self.width),
            h = num(self.height)
        )
    }
}

/// Data-to-pixel mapping for one panel.
#[derive(Clone, Copy, Debug)]
pub struct Axes {
    pub x0: f64,
    pub y0: f64,
    pub w: f64,
    pub h: f64,
    pub xlim: (f64, f64),
    pub ylim: (f64, f64),
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(hi > lo) {
        let d = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - d, hi + d);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

impl Axes {
    /// Panel `index` of `count` stacked vertically on the standard canvas.
    pub fn panel(index: usize, count: usize, xlim: (f64, f64), ylim: (f64, f64)) -> Self {
        let total = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let gap = 40.0;
        let h = (total - gap * (count as f64 - 1.0)) / count as f64;
        Self {
            x0: MARGIN_LEFT,
            y0: MARGIN_TOP + index as f64 * (h + gap),
            w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            h,
            xlim,
            ylim,
        }
    }

    /// Limits covering `xs` and `ys` with a 5% margin.
    pub fn fit(index: usize, count: usize, xs: &[f64], ys: &[f64]) -> Self {
        let range = |v: &[f64]| {
            let lo = v.iter().cloned().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max);
            if lo.is_finite() {
                padded(lo, hi)
            } else {
                (0.0, 1.0)
            }
        };
        Self::panel(index, count, range(xs), range(ys))
    }

    pub fn px(&self, x: f64) -> f64 {
        self.x0 + (x - self.xlim.0) / (self.xlim.1 - self.xlim.0) * self.w
    }

    pub fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.ylim.0) / (self.ylim.1 - self.ylim.0) * self.h
    }

    pub fn point(&self, x: f64, y: f64) -> (f64, f64) {
        (self.px(x), self.py(y))
    }

    /// Frame, ticks and labels.
    pub fn draw(&self, svg: &mut Svg, title: &str, xlabel: &str, ylabel: &str) {
        let (l, t, r, b) = (self.x0, self.y0, self.x0 + self.w, self.y0 + self.h);
        svg.polyline(&[(l, t), (r, t), (r, b), (l, b), (l, t)], "black", 1.0);
        let xs = nice_step(self.xlim.1 - self.xlim.0, 8);
        let mut v = (self.xlim.0 / xs).ceil() * xs;
        while v <= self.xlim.1 + 1e-9 * xs {
            let x = self.px(v);
            svg.line(x, b, x, b + 5.0, "black", 1.0);
            svg.text(x, b + 18.0, &tick_label(v, xs), 11.0, "middle");
            v += xs;
        }
        let ys = nice_step(self.ylim.1 - self.ylim.0, 6);
        let mut v = (self.ylim.0 / ys).ceil() * ys;
        while v <= self.ylim.1 + 1e-9 * ys {
            let y = self.py(v);
            svg.line(l - 5.0, y, l, y, "black", 1.0);
            svg.text(l - 8.0, y + 4.0, &tick_label(v, ys), 11.0, "end");
            v += ys;
        }
        svg.text(l + self.w / 2.0, t - 10.0, title, 13.0, "middle");
        svg.text(l + self.w / 2.0, b + 38.0, xlabel, 12.0, "middle");
        svg.vertical_text(l - 62.0, t + self.h / 2.0, ylabel, 12.0);
    }
}

/// Plain-text table with right-aligned columns.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let fmt_row = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = fmt_row(header.to_vec());
    out.push('\n');
    for r in rows {
        out.push_str(&fmt_row(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
