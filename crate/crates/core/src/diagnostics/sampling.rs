use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::geometry::Point;

/// Where and how densely a probe samples: uniformly on the ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub center: Point,
    pub radius: f64,
    /// `max(r, (lambda - 1) r)`: a `lambda`-relaxed cutter maps `B(z, r)`
    /// into `B(z, R)` when `z` is a fixed point.
    pub big_radius: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub tolerance: f64,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl ProbeConfig {
    /// 1000 samples, seed 0, tolerance `1e-9`, and `R = r`.
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("probe radius must be positive, got {radius}")));
        }
        Ok(Self {
            center,
            radius,
            big_radius: radius,
            sample_count: 1000,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    /// Sets `R = max(r, (lambda - 1) r)` for the relaxation of the first operator.
    pub fn for_relaxation(mut self, lambda: f64) -> Self {
        self.big_radius = self.radius.max((lambda - 1.0) * self.radius);
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.sample_count = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    /// The same probe on the larger ball `B(center, R)`.
    pub fn outer(&self) -> Self {
        Self {
            radius: self.big_radius,
            ..self.clone()
        }
    }

    /// The sample points. Deterministic in the seed, and the first `n`
    /// points do not depend on `sample_count`.
    pub fn points(&self) -> Vec<Point> {
        sample_ball(&self.center, self.radius, self.sample_count, self.seed)
    }
}

/// `n` points uniform on `B(center, radius)`: a normalized Gaussian direction
/// scaled by `radius * u^(1/d)`.
pub fn sample_ball(center: &Point, radius: f64, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = center.dim();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let dir: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let u: f64 = rng.random();
        let scale = radius * u.powf(1.0 / d as f64) / norm;
        out.push(Point::from_vec_unchecked(
            center.coords().iter().zip(&dir).map(|(c, v)| c + scale * v).collect(),
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point;

    #[test]
    fn samples_stay_in_ball_and_are_reproducible() {
        let c = point![1, -1, 2];
        let a = sample_ball(&c, 0.5, 500, 7);
        assert!(a.iter().all(|p| p.distance(&c) <= 0.5));
        assert_eq!(a, sample_ball(&c, 0.5, 500, 7));
        assert_ne!(a, sample_ball(&c, 0.5, 500, 8));
        assert_eq!(&sample_ball(&c, 0.5, 800, 7)[..500], &a[..]);
    }

    #[test]
    fn radial_distribution_is_uniform_in_volume() {
        // P(|x| <= r/2) = 2^-d for the uniform distribution on a d-ball
        let pts = sample_ball(&point![0, 0], 1.0, 20_000, 3);
        let inner = pts.iter().filter(|p| p.norm() <= 0.5).count() as f64 / 20_000.0;
        assert!((inner - 0.25).abs() < 0.02, "{inner}");
    }

    #[test]
    fn big_radius() {
        let p = ProbeConfig::new(point![0, 0], 2.0).unwrap();
        assert_eq!(p.clone().for_relaxation(3.0).big_radius, 4.0);
        assert_eq!(p.clone().for_relaxation(1.5).big_radius, 2.0);
        assert_eq!(p.for_relaxation(3.0).outer().radius, 4.0);
        assert!(ProbeConfig::new(point![0, 0], 0.0).is_err());
    }
}
