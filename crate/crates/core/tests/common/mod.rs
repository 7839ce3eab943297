//! Oracles and random problem generators shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use cutterkit::geometry::{ConvexSet, Point};
use cutterkit::point;
use cutterkit::theory::RelaxationPair;
use rand::Rng;

pub fn x_axis() -> ConvexSet {
    ConvexSet::hyperplane(point![0, 1], 0.0).unwrap()
}

pub fn two_lines_at_pi_6() -> (ConvexSet, ConvexSet) {
    (x_axis(), ConvexSet::line_at_angle(PI / 6.0))
}

/// `sup d(x, 0) / max(d(x, A), d(x, B))` for two lines through the origin
/// at angle `theta`, A the x-axis, evaluated on a uniform grid of the disk
/// of radius `r`. Distances are written out by hand so the result does not
/// depend on the crate's projections.
pub fn grid_kappa_two_lines(theta: f64, r: f64, n: usize) -> f64 {
    let (s, c) = theta.sin_cos();
    let mut best: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let x = -r + 2.0 * r * i as f64 / n as f64;
            let y = -r + 2.0 * r * j as f64 / n as f64;
            let d0 = (x * x + y * y).sqrt();
            if d0 > r || d0 == 0.0 {
                continue;
            }
            let da = y.abs();
            let db = (-s * x + c * y).abs();
            best = best.max(d0 / da.max(db));
        }
    }
    best
}

/// Uniform `lambda, mu > 0` with `lambda mu < 4`.
pub fn random_pair<R: Rng>(rng: &mut R) -> RelaxationPair {
    let lambda: f64 = rng.random_range(0.1..3.8);
    let mu = rng.random_range(0.1..(3.95 / lambda).min(3.8));
    RelaxationPair::new(lambda, mu).unwrap()
}

/// A half-space and a line meeting in a ray or in the whole line.
pub struct HalfSpaceLine {
    pub half: ConvexSet,
    pub line: ConvexSet,
    /// A point of the intersection inside `B(0, 1)`.
    pub anchor: Point,
    dir: Point,
    normal: Point,
    offset: f64,
}

impl HalfSpaceLine {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let angle = |rng: &mut R| rng.random_range(0.0..2.0 * PI);
        let (t, rad) = (angle(rng), rng.random_range(0.0..1.0));
        let anchor = point![rad * t.cos(), rad * t.sin()];
        let phi = angle(rng);
        let dir = point![phi.cos(), phi.sin()];
        let psi = angle(rng);
        let normal = point![psi.cos(), psi.sin()];
        let offset = normal.dot(&anchor) + rng.random_range(0.0..0.5);
        let half = ConvexSet::half_space(normal.clone(), offset).unwrap();
        let line = ConvexSet::line(anchor.clone(), dir.clone()).unwrap();
        Self {
            half,
            line,
            anchor,
            dir,
            normal,
            offset,
        }
    }

    /// Admissible interval of `t` for `anchor + t dir`.
    fn interval(&self) -> (f64, f64) {
        let nd = self.normal.dot(&self.dir);
        let slack = self.offset - self.normal.dot(&self.anchor);
        if nd.abs() < 1e-12 {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else if nd > 0.0 {
            (f64::NEG_INFINITY, slack / nd)
        } else {
            (slack / nd, f64::INFINITY)
        }
    }

    pub fn distance(&self, x: &Point) -> f64 {
        let (lo, hi) = self.interval();
        let t = (x - &self.anchor).dot(&self.dir).clamp(lo, hi);
        x.distance(&self.anchor.add_scaled(t, &self.dir))
    }

    /// Points of the intersection: the anchor and a few along the ray.
    pub fn fixed_points(&self) -> Vec<Point> {
        let (lo, hi) = self.interval();
        [-1.5f64, -0.5, 0.0, 0.7, 1.5]
            .iter()
            .map(|t| t.clamp(lo.max(-2.0), hi.min(2.0)))
            .map(|t| self.anchor.add_scaled(t, &self.dir))
            .collect()
    }
}
