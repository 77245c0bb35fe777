//! Static SVG plot of the traced curve with an optional sample cloud.
//!
//! Output depends only on the inputs: coordinates are printed with fixed
//! precision and elements are emitted in input order.

use std::fmt::Write as _;

use nonoverlap::tracer::TraceResult;
use nonoverlap::Complex64;

const SIZE: f64 = 800.0;
const MARGIN: f64 = 0.1;
const TICKS: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
struct Frame {
    x0: f64,
    y0: f64,
    span: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = Complex64>) -> Self {
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            lo_x = lo_x.min(p.re);
            hi_x = hi_x.max(p.re);
            lo_y = lo_y.min(p.im);
            hi_y = hi_y.max(p.im);
        }
        if !lo_x.is_finite() {
            (lo_x, hi_x, lo_y, hi_y) = (-1.0, 1.0, -1.0, 1.0);
        }
        let mut span = (hi_x - lo_x).max(hi_y - lo_y);
        if span == 0.0 {
            span = 0.2 * lo_x.abs().max(lo_y.abs()).max(1e-3);
        }
        let padded = span * (1.0 + 2.0 * MARGIN);
        let (cx, cy) = (0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y));
        Frame {
            x0: cx - 0.5 * padded,
            y0: cy - 0.5 * padded,
            span: padded,
        }
    }

    fn px(&self, x: f64) -> f64 {
        (x - self.x0) / self.span * SIZE
    }

    fn py(&self, y: f64) -> f64 {
        SIZE - (y - self.y0) / self.span * SIZE
    }
}

/// Tick spacing from the 1-2-5 sequence giving about `TICKS` intervals.
fn nice_step(span: f64) -> f64 {
    let raw = span / TICKS;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = nice_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), decimals)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders the accepted boundary points as a polyline (closed when the
/// trace is closed) over the cloud points.
pub fn emit_svg(trace: &TraceResult, cloud: Option<&[Complex64]>) -> String {
    let curve: Vec<Complex64> = trace.values();
    let cloud = cloud.unwrap_or(&[]);
    let frame = Frame::fit(curve.iter().chain(cloud.iter()).copied());
    let mut s = String::new();
    let w = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(&mut s, r#"<?xml version="1.0" encoding="UTF-8"?>"#.into());
    w(
        &mut s,
        format!(r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#),
    );
    w(&mut s, format!(r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#));
    w(
        &mut s,
        format!(
            r#"<title>{} (r = {}, rho = {})</title>"#,
            escape(&trace.functional),
            trace.config.r,
            trace.config.rho
        ),
    );

    // axes, placed at zero when visible and at the frame edge otherwise
    let (lo_x, hi_x) = (frame.x0, frame.x0 + frame.span);
    let (lo_y, hi_y) = (frame.y0, frame.y0 + frame.span);
    let ax_y = if (lo_y..=hi_y).contains(&0.0) { frame.py(0.0) } else { SIZE };
    let ax_x = if (lo_x..=hi_x).contains(&0.0) { frame.px(0.0) } else { 0.0 };
    w(&mut s, r##"<g stroke="#888888" stroke-width="1" font-family="monospace" font-size="11" fill="#444444">"##.into());
    w(&mut s, format!(r#"<line x1="0" y1="{ax_y:.3}" x2="{SIZE}" y2="{ax_y:.3}"/>"#));
    w(&mut s, format!(r#"<line x1="{ax_x:.3}" y1="0" x2="{ax_x:.3}" y2="{SIZE}"/>"#));
    let (xt, xd) = ticks(lo_x, hi_x);
    for t in xt {
        let x = frame.px(t);
        w(&mut s, format!(r#"<line x1="{x:.3}" y1="{:.3}" x2="{x:.3}" y2="{:.3}"/>"#, ax_y - 4.0, ax_y + 4.0));
        let ty = (ax_y + 16.0).min(SIZE - 2.0);
        w(&mut s, format!(r#"<text x="{x:.3}" y="{ty:.3}" stroke="none" text-anchor="middle">{t:.xd$}</text>"#));
    }
    let (yt, yd) = ticks(lo_y, hi_y);
    for t in yt {
        let y = frame.py(t);
        w(&mut s, format!(r#"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}"/>"#, ax_x - 4.0, ax_x + 4.0));
        let tx = (ax_x + 6.0).min(SIZE - 60.0);
        w(&mut s, format!(r#"<text x="{tx:.3}" y="{:.3}" stroke="none">{t:.yd$}</text>"#, y + 4.0));
    }
    w(&mut s, "</g>".into());

    if !cloud.is_empty() {
        w(&mut s, r##"<g fill="#c0392b" fill-opacity="0.45" stroke="none">"##.into());
        for p in cloud {
            w(&mut s, format!(r#"<circle cx="{:.3}" cy="{:.3}" r="1.2"/>"#, frame.px(p.re), frame.py(p.im)));
        }
        w(&mut s, "</g>".into());
    }

    let mut pts = String::new();
    for (i, p) in curve.iter().enumerate() {
        if i > 0 {
            pts.push(' ');
        }
        write!(pts, "{:.3},{:.3}", frame.px(p.re), frame.py(p.im)).expect("writing to a String");
    }
    let tag = if trace.closed { "polygon" } else { "polyline" };
    w(
        &mut s,
        format!(r##"<{tag} points="{pts}" fill="none" stroke="#1f4e9c" stroke-width="1.5" stroke-linejoin="round"/>"##),
    );
    w(&mut s, "</svg>".into());
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(nice_step(10.0), 2.0);
        assert!((nice_step(0.03) - 0.005).abs() < 1e-15);
        let (t, d) = ticks(-0.1, 0.1);
        assert_eq!(d, 2);
        assert!(t.iter().any(|v| v.abs() < 1e-15));
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b&c"), "a&lt;b&amp;c");
    }
}
