//! Minimal SVG plots: planar trajectories and `log10` error curves.

use std::fmt::Write;

use crate::geometry::Point;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SvgError {
    /// No series were given.
    Empty,
    /// Trajectories can only be drawn in the plane.
    NotPlanar(usize),
}

impl std::fmt::Display for SvgError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Empty => write!(f, "nothing to plot"),
            Self::NotPlanar(d) => write!(f, "trajectory plot needs dimension 2, got {d}"),
        }
    }
}

impl std::error::Error for SvgError {}

struct Frame {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
}

impl Frame {
    fn new(xs: (f64, f64), ys: (f64, f64), equal: bool) -> Self {
        let pad = |(lo, hi): (f64, f64)| {
            let w = hi - lo;
            if w > 0.0 {
                (lo - 0.05 * w, hi + 0.05 * w)
            } else {
                (lo - 1.0, hi + 1.0)
            }
        };
        let (xs, ys) = (pad(xs), pad(ys));
        let (pw, ph) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let mut sx = pw / (xs.1 - xs.0);
        let mut sy = ph / (ys.1 - ys.0);
        if equal {
            sx = sx.min(sy);
            sy = sx;
        }
        Frame {
            x0: xs.0,
            y0: ys.0,
            sx,
            sy,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            MARGIN + (x - self.x0) * self.sx,
            HEIGHT - MARGIN - (y - self.y0) * self.sy,
        )
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn open(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn polyline(s: &mut String, pts: &[(f64, f64)], color: &str, markers: bool) {
    let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
        coords.join(" ")
    );
    if markers {
        for (x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2" fill="{color}"/>"#);
        }
    }
}

fn legend(s: &mut String, names: &[&str]) {
    for (i, n) in names.iter().enumerate() {
        let y = MARGIN + 16.0 * i as f64;
        let x = WIDTH - MARGIN - 110.0;
        let c = COLORS[i % COLORS.len()];
        let _ = writeln!(
            s,
            r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{c}" stroke-width="2"/>"#,
            x + 20.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 26.0,
            y + 4.0,
            escape(n)
        );
    }
}

fn axis_labels(s: &mut String, xs: (f64, f64), ys: (f64, f64), frame: &Frame) {
    let (l, b) = frame.map(xs.0, ys.0);
    let (r, t) = frame.map(xs.1, ys.1);
    let _ = writeln!(
        s,
        r##"<rect x="{l:.2}" y="{t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#888"/>"##,
        r - l,
        b - t
    );
    let label = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{v:.3}</text>"#
        );
    };
    label(s, l, b + 14.0, "start", xs.0);
    label(s, r, b + 14.0, "end", xs.1);
    label(s, l - 4.0, b, "end", ys.0);
    label(s, l - 4.0, t + 8.0, "end", ys.1);
}

/// Iterates of each method joined in order, with the origin marked.
pub fn trajectory_svg(series: &[(&str, &[Point])]) -> Result<String, SvgError> {
    if series.is_empty() || series.iter().all(|(_, p)| p.is_empty()) {
        return Err(SvgError::Empty);
    }
    if let Some(d) = series
        .iter()
        .flat_map(|(_, p)| p.iter())
        .map(Point::dim)
        .find(|d| *d != 2)
    {
        return Err(SvgError::NotPlanar(d));
    }
    let all = || series.iter().flat_map(|(_, p)| p.iter());
    let xs = range(all().map(|p| p[0]).chain([0.0]));
    let ys = range(all().map(|p| p[1]).chain([0.0]));
    let frame = Frame::new(xs, ys, true);
    let mut s = open("trajectories");
    let (ox, oy) = frame.map(0.0, 0.0);
    let _ = writeln!(s, r#"<circle cx="{ox:.2}" cy="{oy:.2}" r="3" fill="black"/>"#);
    for (i, (_, pts)) in series.iter().enumerate() {
        let mapped: Vec<_> = pts.iter().map(|p| frame.map(p[0], p[1])).collect();
        polyline(&mut s, &mapped, COLORS[i % COLORS.len()], true);
    }
    legend(&mut s, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    Ok(s)
}

/// `log10` error against `k` for each method. Non-finite values (exact
/// hits give `-inf`) are left out of the curve.
pub fn log_error_svg(series: &[(&str, Vec<f64>)]) -> Result<String, SvgError> {
    let finite = |v: &[f64]| -> Vec<(f64, f64)> {
        v.iter()
            .enumerate()
            .filter(|(_, e)| e.is_finite())
            .map(|(k, e)| (k as f64, *e))
            .collect()
    };
    let curves: Vec<Vec<(f64, f64)>> = series.iter().map(|(_, v)| finite(v)).collect();
    if curves.iter().all(Vec::is_empty) {
        return Err(SvgError::Empty);
    }
    let xs = range(curves.iter().flatten().map(|p| p.0));
    let ys = range(curves.iter().flatten().map(|p| p.1));
    let frame = Frame::new(xs, ys, false);
    let mut s = open("log10 error");
    axis_labels(&mut s, xs, ys, &frame);
    for (i, c) in curves.iter().enumerate() {
        let mapped: Vec<_> = c.iter().map(|(x, y)| frame.map(*x, *y)).collect();
        polyline(&mut s, &mapped, COLORS[i % COLORS.len()], false);
    }
    legend(&mut s, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point;

    #[test]
    fn draws_planar_paths() {
        let p = vec![point![1, 0], point![0.5, 0.2], point![0, 0]];
        let svg = trajectory_svg(&[("a", &p)]).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }

    #[test]
    fn rejects_empty_and_non_planar() {
        assert_eq!(trajectory_svg(&[]), Err(SvgError::Empty));
        let p = vec![point![1, 0, 0]];
        assert_eq!(trajectory_svg(&[("a", &p)]), Err(SvgError::NotPlanar(3)));
        assert_eq!(log_error_svg(&[("a", vec![f64::NEG_INFINITY])]), Err(SvgError::Empty));
    }

    #[test]
    fn skips_infinite_errors() {
        let svg = log_error_svg(&[("a", vec![0.0, -1.0, f64::NEG_INFINITY]), ("b", vec![0.0, -0.5])]).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(!svg.contains("inf"));
    }
}
