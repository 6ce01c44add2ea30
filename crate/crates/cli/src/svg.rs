//! Self-contained SVG figures. Output is a pure function of the inputs.

use std::fmt::Write as _;

use atomqec::costmodel::{Regime, RegimeMap};

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];
const FONT: &str = "font-family=\"sans-serif\" font-size=\"11\"";

#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<Point>,
}

/// A vertical marker spanning `[low, high]` on the x axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub label: String,
    pub low: f64,
    pub high: f64,
}

/// One bar group: label, value with interval, and stacked parts for the second panel.
#[derive(Clone, Debug, PartialEq)]
pub struct Bar {
    pub label: String,
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
    pub parts: Vec<f64>,
}

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn tick_label(x: f64) -> String {
    if x != 0.0 && (x.abs() < 0.01 || x.abs() >= 1e4) {
        format!("{x:.0e}")
    } else {
        let s = format!("{x:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn header(w: f64, h: f64, title: &str) -> String {
    let mut s = String::new();
    writeln!(s, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">")
        .unwrap();
    writeln!(s, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>").unwrap();
    writeln!(
        s,
        "<text x=\"{}\" y=\"18\" text-anchor=\"middle\" {FONT} font-weight=\"bold\">{}</text>",
        w / 2.0,
        escape(title)
    )
    .unwrap();
    s
}

/// Plot rectangle with data ranges.
struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        if self.log_x {
            x.max(f64::MIN_POSITIVE).log10()
        } else {
            x
        }
    }

    fn sx(&self, x: f64) -> f64 {
        let (a, b) = (self.tx(self.xmin), self.tx(self.xmax));
        let t = if b > a { (self.tx(x) - a) / (b - a) } else { 0.5 };
        self.x0 + t * self.w
    }

    fn sy(&self, y: f64) -> f64 {
        let t = if self.ymax > self.ymin { (y - self.ymin) / (self.ymax - self.ymin) } else { 0.5 };
        self.y0 + self.h - t * self.h
    }

    fn axes(&self, s: &mut String, xlabel: &str, ylabel: &str, xticks: &[f64], yticks: &[f64]) {
        let (x1, y1) = (self.x0 + self.w, self.y0 + self.h);
        writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
            num(self.x0),
            num(self.y0),
            num(self.w),
            num(self.h)
        )
        .unwrap();
        for &t in xticks {
            let x = num(self.sx(t));
            writeln!(s, "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"black\"/>", num(y1), num(y1 + 4.0))
                .unwrap();
            writeln!(
                s,
                "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{}</text>",
                num(y1 + 16.0),
                tick_label(t)
            )
            .unwrap();
        }
        for &t in yticks {
            let y = num(self.sy(t));
            writeln!(s, "<line x1=\"{}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#dddddd\"/>", num(self.x0), num(x1))
                .unwrap();
            writeln!(
                s,
                "<text x=\"{}\" y=\"{y}\" text-anchor=\"end\" dominant-baseline=\"middle\" {FONT}>{}</text>",
                num(self.x0 - 5.0),
                tick_label(t)
            )
            .unwrap();
        }
        writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{}</text>",
            num(self.x0 + self.w / 2.0),
            num(y1 + 32.0),
            escape(xlabel)
        )
        .unwrap();
        let (lx, ly) = (num(self.x0 - 42.0), num(self.y0 + self.h / 2.0));
        writeln!(
            s,
            "<text x=\"{lx}\" y=\"{ly}\" text-anchor=\"middle\" transform=\"rotate(-90 {lx} {ly})\" {FONT}>{}</text>",
            escape(ylabel)
        )
        .unwrap();
    }
}

fn nice_max(v: f64) -> f64 {
    if v <= 0.0 || !v.is_finite() {
        return 1.0;
    }
    let e = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * e).find(|&m| m >= v).unwrap_or(10.0 * e)
}

fn linear_ticks(max: f64) -> Vec<f64> {
    (0..=5).map(|i| max * i as f64 / 5.0).collect()
}

fn log_ticks(min: f64, max: f64) -> Vec<f64> {
    let (a, b) = (min.log10().floor() as i32, max.log10().ceil() as i32);
    let mut t = Vec::new();
    for e in a..=b {
        for m in [1.0, 2.0, 5.0] {
            let v = m * 10f64.powi(e);
            if v >= min * (1.0 - 1e-9) && v <= max * (1.0 + 1e-9) {
                t.push(v);
            }
        }
    }
    t
}

fn legend(s: &mut String, x: f64, y: f64, names: &[(&str, &str)]) {
    for (i, (name, color)) in names.iter().enumerate() {
        let yy = y + 14.0 * i as f64;
        writeln!(s, "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{color}\"/>", num(x), num(yy)).unwrap();
        writeln!(s, "<text x=\"{}\" y=\"{}\" {FONT}>{}</text>", num(x + 14.0), num(yy + 9.0), escape(name)).unwrap();
    }
}

/// Metric curves against alpha with interval whiskers and optional threshold bands.
pub fn line_chart(title: &str, xlabel: &str, ylabel: &str, series: &[Series], bands: &[Band]) -> String {
    let (w, h) = (720.0, 440.0);
    let mut s = header(w, h, title);
    let xs: Vec<f64> = series.iter().flat_map(|c| c.points.iter().map(|p| p.x)).collect();
    let log_x = !xs.is_empty() && xs.iter().all(|&x| x > 0.0);
    let (mut xmin, mut xmax) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !xmin.is_finite() {
        (xmin, xmax) = (0.0, 1.0);
    }
    let ymax = nice_max(series.iter().flat_map(|c| c.points.iter().map(|p| p.hi.max(p.y))).fold(0.0, f64::max));
    let f = Frame { x0: 70.0, y0: 34.0, w: 470.0, h: 340.0, xmin, xmax, ymin: 0.0, ymax, log_x };
    let xticks = if log_x { log_ticks(xmin, xmax) } else { linear_ticks(xmax.max(1e-12)) };
    f.axes(&mut s, xlabel, ylabel, &xticks, &linear_ticks(ymax));
    for b in bands {
        let (a, c) = (f.sx(b.low.clamp(xmin, xmax)), f.sx(b.high.clamp(xmin, xmax)));
        writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#999999\" fill-opacity=\"0.2\"/>",
            num(a),
            num(f.y0),
            num((c - a).max(1.0)),
            num(f.h)
        )
        .unwrap();
        writeln!(s, "<text x=\"{}\" y=\"{}\" {FONT}>{}</text>", num(a + 2.0), num(f.y0 + 12.0), escape(&b.label))
            .unwrap();
    }
    let mut names = Vec::new();
    for (i, c) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        names.push((c.name.as_str(), color));
        let path: Vec<String> = c.points.iter().map(|p| format!("{},{}", num(f.sx(p.x)), num(f.sy(p.y)))).collect();
        writeln!(s, "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>", path.join(" "))
            .unwrap();
        for p in &c.points {
            let x = num(f.sx(p.x));
            writeln!(
                s,
                "<line x1=\"{x}\" y1=\"{}\" x2=\"{x}\" y2=\"{}\" stroke=\"{color}\"/>",
                num(f.sy(p.lo)),
                num(f.sy(p.hi))
            )
            .unwrap();
            writeln!(s, "<circle cx=\"{x}\" cy=\"{}\" r=\"3\" fill=\"{color}\"/>", num(f.sy(p.y))).unwrap();
        }
    }
    legend(&mut s, 555.0, 40.0, &names);
    s.push_str("</svg>\n");
    s
}

/// Two panels: the metric per experiment with whiskers, and stacked discard fractions.
pub fn bar_chart(title: &str, ylabel: &str, bars: &[Bar], part_names: &[&str]) -> String {
    let (w, h) = (900.0, 420.0);
    let mut s = header(w, h, title);
    let n = bars.len().max(1) as f64;
    let ymax = nice_max(bars.iter().map(|b| b.hi.max(b.value)).fold(0.0, f64::max));
    let left = Frame { x0: 70.0, y0: 34.0, w: 330.0, h: 300.0, xmin: 0.0, xmax: n, ymin: 0.0, ymax, log_x: false };
    left.axes(&mut s, "", ylabel, &[], &linear_ticks(ymax));
    let right =
        Frame { x0: 480.0, y0: 34.0, w: 300.0, h: 300.0, xmin: 0.0, xmax: n, ymin: 0.0, ymax: 1.0, log_x: false };
    right.axes(&mut s, "", "discarded fraction", &[], &linear_ticks(1.0));
    let bw = 330.0 / n * 0.6;
    for (i, b) in bars.iter().enumerate() {
        let cx = left.sx(i as f64 + 0.5);
        let top = left.sy(b.value);
        writeln!(
            s,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
            num(cx - bw / 2.0),
            num(top),
            num(bw),
            num(left.sy(0.0) - top),
            PALETTE[0]
        )
        .unwrap();
        writeln!(
            s,
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>",
            num(cx),
            num(left.sy(b.lo)),
            num(left.sy(b.hi))
        )
        .unwrap();
        let (lx, ly) = (num(cx), num(left.sy(0.0) + 12.0));
        writeln!(
            s,
            "<text x=\"{lx}\" y=\"{ly}\" text-anchor=\"end\" transform=\"rotate(-30 {lx} {ly})\" {FONT}>{}</text>",
            escape(&b.label)
        )
        .unwrap();

        let rx = right.sx(i as f64 + 0.5);
        let rbw = 300.0 / n * 0.6;
        let mut acc = 0.0;
        for (j, &p) in b.parts.iter().enumerate() {
            let (y_hi, y_lo) = (right.sy(acc + p), right.sy(acc));
            writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                num(rx - rbw / 2.0),
                num(y_hi),
                num(rbw),
                num(y_lo - y_hi),
                PALETTE[(j + 1) % PALETTE.len()]
            )
            .unwrap();
            acc += p;
        }
        let (lx, ly) = (num(rx), num(right.sy(0.0) + 12.0));
        writeln!(
            s,
            "<text x=\"{lx}\" y=\"{ly}\" text-anchor=\"end\" transform=\"rotate(-30 {lx} {ly})\" {FONT}>{}</text>",
            escape(&b.label)
        )
        .unwrap();
    }
    let names: Vec<(&str, &str)> =
        part_names.iter().enumerate().map(|(j, n)| (*n, PALETTE[(j + 1) % PALETTE.len()])).collect();
    legend(&mut s, 790.0, 40.0, &names);
    s.push_str("</svg>\n");
    s
}

/// Pseudothreshold intervals against N, and stacked discard fractions at the reference alpha.
pub fn scaling_panels(
    title: &str,
    ns: &[usize],
    intervals: &[Option<(f64, f64)>],
    parts: &[Vec<f64>],
    part_names: &[&str],
) -> String {
    let (w, h) = (900.0, 420.0);
    let mut s = header(w, h, title);
    let n = ns.len().max(1) as f64;
    let ymax = nice_max(intervals.iter().flatten().map(|&(_, hi)| hi).fold(0.0, f64::max));
    let left = Frame { x0: 70.0, y0: 34.0, w: 330.0, h: 300.0, xmin: 0.0, xmax: n, ymin: 0.0, ymax, log_x: false };
    left.axes(&mut s, "logical qubits N", "pseudothreshold (alpha)", &[], &linear_ticks(ymax));
    let right =
        Frame { x0: 480.0, y0: 34.0, w: 300.0, h: 300.0, xmin: 0.0, xmax: n, ymin: 0.0, ymax: 1.0, log_x: false };
    right.axes(&mut s, "logical qubits N", "discarded fraction", &[], &linear_ticks(1.0));
    for (i, &nv) in ns.iter().enumerate() {
        let cx = left.sx(i as f64 + 0.5);
        match intervals.get(i).copied().flatten() {
            Some((lo, hi)) => {
                writeln!(
                    s,
                    "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" stroke-width=\"3\"/>",
                    num(cx),
                    num(left.sy(lo)),
                    num(left.sy(hi)),
                    PALETTE[0]
                )
                .unwrap();
                writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>", num(cx), num(left.sy(hi)), PALETTE[0])
                    .unwrap();
            }
            None => {
                writeln!(
                    s,
                    "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>n/a</text>",
                    num(cx),
                    num(left.sy(ymax / 2.0))
                )
                .unwrap();
            }
        }
        writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{nv}</text>",
            num(cx),
            num(left.sy(0.0) + 14.0)
        )
        .unwrap();
        let rx = right.sx(i as f64 + 0.5);
        let rbw = 300.0 / n * 0.6;
        let mut acc = 0.0;
        for (j, &p) in parts.get(i).map(Vec::as_slice).unwrap_or(&[]).iter().enumerate() {
            let (y_hi, y_lo) = (right.sy(acc + p), right.sy(acc));
            writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>",
                num(rx - rbw / 2.0),
                num(y_hi),
                num(rbw),
                num(y_lo - y_hi),
                PALETTE[(j + 1) % PALETTE.len()]
            )
            .unwrap();
            acc += p;
        }
        writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{nv}</text>",
            num(rx),
            num(right.sy(0.0) + 14.0)
        )
        .unwrap();
    }
    let names: Vec<(&str, &str)> =
        part_names.iter().enumerate().map(|(j, n)| (*n, PALETTE[(j + 1) % PALETTE.len()])).collect();
    legend(&mut s, 790.0, 40.0, &names);
    s.push_str("</svg>\n");
    s
}

/// Regime per (distance, spaces) cell; movement-bound cells are shaded by cost.
pub fn regime_heatmap(map: &RegimeMap) -> String {
    let (nd, ns) = (map.distances.len().max(1), map.spaces.len().max(1));
    let cell = (420.0 / nd.max(ns) as f64).clamp(4.0, 40.0);
    let (w, h) = (120.0 + cell * ns as f64 + 160.0, 80.0 + cell * nd as f64 + 50.0);
    let mut s = header(w, h, "Layer cost regime");
    let (x0, y0) = (80.0, 40.0);
    let max_cost = map.cells.iter().flatten().map(|c| c.seconds).fold(0.0, f64::max);
    let step_d = (nd / 10).max(1);
    let step_s = (ns / 10).max(1);
    for (i, d) in map.distances.iter().enumerate() {
        for (j, _) in map.spaces.iter().enumerate() {
            let c = map.cells[i][j];
            let fill = match c.regime {
                Regime::Measurement => "#9ecae1".to_string(),
                Regime::Movement => {
                    let t = if max_cost > 0.0 { (c.seconds / max_cost).clamp(0.0, 1.0) } else { 1.0 };
                    let g = (200.0 - 150.0 * t).round() as u8;
                    format!("#f0{g:02x}{:02x}", g / 2)
                }
            };
            let y = y0 + cell * (nd - 1 - i) as f64;
            writeln!(
                s,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>",
                num(x0 + cell * j as f64),
                num(y),
                num(cell),
                num(cell)
            )
            .unwrap();
        }
        if i % step_d == 0 {
            let y = y0 + cell * (nd - 1 - i) as f64 + cell / 2.0;
            writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" dominant-baseline=\"middle\" {FONT}>{d}</text>",
                num(x0 - 4.0),
                num(y)
            )
            .unwrap();
        }
    }
    for (j, sp) in map.spaces.iter().enumerate() {
        if j % step_s == 0 {
            writeln!(
                s,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>{sp}</text>",
                num(x0 + cell * j as f64 + cell / 2.0),
                num(y0 + cell * nd as f64 + 14.0)
            )
            .unwrap();
        }
    }
    writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" {FONT}>logical movement spaces</text>",
        num(x0 + cell * ns as f64 / 2.0),
        num(y0 + cell * nd as f64 + 32.0)
    )
    .unwrap();
    let (lx, ly) = (num(x0 - 40.0), num(y0 + cell * nd as f64 / 2.0));
    writeln!(s, "<text x=\"{lx}\" y=\"{ly}\" text-anchor=\"middle\" transform=\"rotate(-90 {lx} {ly})\" {FONT}>code distance d</text>").unwrap();
    legend(
        &mut s,
        x0 + cell * ns as f64 + 16.0,
        y0,
        &[("measurement-bound", "#9ecae1"), ("movement-bound", "#f06432")],
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use atomqec::costmodel::{regime_map, TimingParams};

    #[test]
    fn charts_are_well_formed_and_stable() {
        let series = vec![Series {
            name: "a<b".into(),
            points: vec![Point { x: 0.1, y: 0.1, lo: 0.05, hi: 0.2 }, Point { x: 10.0, y: 0.5, lo: 0.4, hi: 0.6 }],
        }];
        let bands = [Band { label: "pt".into(), low: 1.0, high: 2.0 }];
        let a = line_chart("t", "alpha", "TVD", &series, &bands);
        assert_eq!(a, line_chart("t", "alpha", "TVD", &series, &bands));
        assert!(a.starts_with("<svg") && a.ends_with("</svg>\n"));
        assert!(a.contains("a&lt;b"));
        let m = regime_map(&[2, 4, 8], &[0, 1, 2], &TimingParams::default()).unwrap();
        assert!(regime_heatmap(&m).contains("measurement-bound"));
        let bars = [Bar { label: "x".into(), value: 0.2, lo: 0.1, hi: 0.3, parts: vec![0.1, 0.2] }];
        assert_eq!(bar_chart("t", "TVD", &bars, &["a", "b"]).matches("<rect").count(), 8);
    }

    #[test]
    fn degenerate_inputs_do_not_produce_nan() {
        let series = vec![Series { name: "s".into(), points: vec![Point { x: 1.0, y: 0.0, lo: 0.0, hi: 0.0 }] }];
        let out = line_chart("t", "x", "y", &series, &[]);
        assert!(!out.contains("NaN") && !out.contains("inf"));
        let out = scaling_panels("t", &[8], &[None], &[vec![0.5]], &["p"]);
        assert!(!out.contains("NaN"));
    }
}
