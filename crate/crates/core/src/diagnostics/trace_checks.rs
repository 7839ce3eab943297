//! Checks on recorded runs: Fejér monotonicity with its quantitative
//! descent inequality, and the Q-linear rate certificate.

use super::report::ProbeOutcome;
use crate::engine::Trace;
use crate::error::Result;
use crate::geometry::Point;
use crate::theory::qlinear_rate;

#[derive(Clone, Debug, PartialEq)]
pub struct FejerReport {
    pub passed: bool,
    /// Index `k + 1` of the first iterate at which any inequality failed.
    pub failed_at: Option<usize>,
    /// `min_k |x^k - w| - |x^{k+1} - w|`.
    pub monotone_margin: f64,
    /// `min_k gap_k - (2 - alpha_k)/alpha_k |x^{k+1} - x^k|^2`.
    pub descent_margin: f64,
    /// `min_k gap_k - (eps/nu)^2 |W(x^k) - x^k|^2` with the widest valid `eps`.
    pub residual_margin: f64,
    /// `min_k 2 d(x^k, C) - |x^k - x_N|`, when a distance to `C` was given.
    pub limit_margin: Option<f64>,
    pub transitions: usize,
}

impl FejerReport {
    pub fn min_margin(&self) -> f64 {
        let m = self.monotone_margin.min(self.descent_margin).min(self.residual_margin);
        self.limit_margin.map_or(m, |l| m.min(l))
    }

    pub fn outcome(&self) -> ProbeOutcome {
        ProbeOutcome {
            name: "fejer".into(),
            passed: self.passed,
            vacuous: false,
            min_margin: self.min_margin(),
            samples: self.transitions,
            seed: None,
        }
    }
}

/// Verifies, for every transition of `trace` and the reference point `w`
/// (which must lie in the common fixed set):
///
/// * `|x^{k+1} - w| <= |x^k - w|`,
/// * `gap_k >= (2 - alpha_k)/alpha_k |x^{k+1} - x^k|^2`,
/// * `gap_k >= (eps/nu)^2 |W(x^k) - x^k|^2`,
///
/// where `gap_k = |x^k - w|^2 - |x^{k+1} - w|^2` and `eps = min_k min(alpha_k, 2 - alpha_k)`.
/// With `intersection_distance` it also verifies `|x^k - x_N| <= 2 d(x^k, C)`
/// against the last iterate `x_N`.
pub fn fejer_check(
    trace: &Trace,
    w: &Point,
    intersection_distance: Option<&dyn Fn(&Point) -> f64>,
    tolerance: f64,
) -> FejerReport {
    let nu = trace.relaxation;
    let eps = trace
        .step_sizes
        .iter()
        .map(|a| a.min(2.0 - a))
        .fold(f64::INFINITY, f64::min);
    let mut report = FejerReport {
        passed: true,
        failed_at: None,
        monotone_margin: f64::INFINITY,
        descent_margin: f64::INFINITY,
        residual_margin: f64::INFINITY,
        limit_margin: None,
        transitions: trace.transitions(),
    };
    let fail = |report: &mut FejerReport, idx: usize| {
        report.passed = false;
        report.failed_at = Some(report.failed_at.map_or(idx, |f| f.min(idx)));
    };

    for k in 0..trace.transitions() {
        let (x, y) = (&trace.iterates[k], &trace.iterates[k + 1]);
        let (dx, dy) = (x.distance(w), y.distance(w));
        let gap = dx * dx - dy * dy;
        let alpha = trace.step_sizes[k];
        let step_sq = y.distance(x).powi(2);

        let m1 = dx - dy;
        let m2 = gap - (2.0 - alpha) / alpha * step_sq;
        let m3 = gap - (eps / nu).powi(2) * trace.residuals[k].powi(2);
        report.monotone_margin = report.monotone_margin.min(m1);
        report.descent_margin = report.descent_margin.min(m2);
        report.residual_margin = report.residual_margin.min(m3);
        if !(m1 >= -tolerance && m2 >= -tolerance && m3 >= -tolerance) {
            fail(&mut report, k + 1);
        }
    }

    if let Some(dist) = intersection_distance {
        let last = trace.last();
        let mut lm = f64::INFINITY;
        for (k, x) in trace.iterates.iter().enumerate() {
            let m = 2.0 * dist(x) - x.distance(last);
            lm = lm.min(m);
            if !(m >= -tolerance) {
                fail(&mut report, k);
            }
        }
        report.limit_margin = Some(lm);
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateStatus {
    Certified,
    Violated,
    /// The trace did not reach its residual tolerance.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub status: RateStatus,
    /// `sqrt(1 - (eps delta / (2 nu))^2)`.
    pub bound: f64,
    /// `|x^{k+1} - x*| / |x^k - x*|` for transitions with `|x^k - x*| > tolerance`.
    pub ratios: Vec<f64>,
    /// Largest entry of `ratios`.
    pub q_max: f64,
    /// Last entry of `ratios`, the asymptotic contraction.
    pub q_tail: f64,
    /// `min_k bound |x^k - x*| - |x^{k+1} - x*|`.
    pub min_margin: f64,
    pub failed_at: Option<usize>,
    pub transitions: usize,
}

impl RateReport {
    pub fn outcome(&self) -> ProbeOutcome {
        ProbeOutcome {
            name: "rate".into(),
            passed: self.status != RateStatus::Violated,
            vacuous: self.bound >= 1.0,
            min_margin: self.min_margin,
            samples: self.transitions,
            seed: None,
        }
    }
}

/// Checks `|x^{k+1} - x*| <= sqrt(1 - (eps delta/(2 nu))^2) |x^k - x*| + tolerance`
/// at every step and reports the empirical Q-factors.
///
/// A trace that did not converge is reported as [`RateStatus::Inconclusive`]
/// (the per-step numbers are still filled in) unless some step already
/// violates the bound.
pub fn rate_certificate(
    trace: &Trace,
    x_star: &Point,
    epsilon: f64,
    delta: f64,
    nu: f64,
    tolerance: f64,
) -> Result<RateReport> {
    let bound = qlinear_rate(epsilon, delta, nu)?;
    let errors: Vec<f64> = trace.iterates.iter().map(|x| x.distance(x_star)).collect();
    let mut min_margin = f64::INFINITY;
    let mut failed_at = None;
    let mut ratios = Vec::new();
    for (k, e) in errors.windows(2).enumerate() {
        let margin = bound * e[0] - e[1];
        min_margin = min_margin.min(margin);
        if !(margin >= -tolerance) && failed_at.is_none() {
            failed_at = Some(k + 1);
        }
        if e[0] > tolerance {
            ratios.push(e[1] / e[0]);
        }
    }
    let status = if failed_at.is_some() {
        RateStatus::Violated
    } else if trace.converged {
        RateStatus::Certified
    } else {
        RateStatus::Inconclusive
    };
    Ok(RateReport {
        status,
        bound,
        q_max: ratios.iter().copied().fold(f64::NAN, f64::max),
        q_tail: ratios.last().copied().unwrap_or(f64::NAN),
        ratios,
        min_margin,
        failed_at,
        transitions: trace.transitions(),
    })
}
