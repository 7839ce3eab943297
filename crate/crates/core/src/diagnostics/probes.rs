//! Sampled checks of the defining inequalities of cutters, relaxed cutters
//! and demicontractions, and of the two lower bounds for products.

use super::report::RegularityReport;
use super::sampling::ProbeConfig;
use crate::error::{invalid, Result};
use crate::geometry::Point;
use crate::operators::Operator;
use crate::theory::{lb2_coefficient, nu, radicals, RelaxationPair};

/// Every `z` must be a fixed point of each operator: `|T(z) - z| <= tol`.
fn check_fixed(ops: &[&Operator], fixed: &[Point], tol: f64) -> Result<()> {
    if fixed.is_empty() {
        return Err(invalid("fixed-point sample is empty"));
    }
    for op in ops {
        for z in fixed {
            let moved = op.apply(z)?.distance(z);
            if !(moved <= tol) {
                return Err(invalid(format!(
                    "sample point {z} is not fixed by {} (moved by {moved:e})",
                    op.label()
                )));
            }
        }
    }
    Ok(())
}

/// `<z - T(x), x - T(x)> <= 0` for sampled `x` and every `z` in `fixed`.
pub fn cutter_check(t: &Operator, fixed: &[Point], probe: &ProbeConfig) -> Result<RegularityReport> {
    check_fixed(&[t], fixed, probe.tolerance)?;
    let mut report = RegularityReport::new("cutter", probe.seed);
    for x in probe.points() {
        let tx = t.apply(&x)?;
        let step = &x - &tx;
        for z in fixed {
            let margin = -(z - &tx).dot(&step);
            report.record(&x, margin, probe.tolerance);
        }
    }
    Ok(report)
}

/// `lambda <z - x, T(x) - x> >= |T(x) - x|^2`, the characterization of
/// `lambda`-relaxed cutters.
pub fn relaxed_cutter_check(
    t: &Operator,
    lambda: f64,
    fixed: &[Point],
    probe: &ProbeConfig,
) -> Result<RegularityReport> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    check_fixed(&[t], fixed, probe.tolerance)?;
    let mut report = RegularityReport::new("relaxed_cutter", probe.seed);
    for x in probe.points() {
        let step = &t.apply(&x)? - &x;
        let sq = step.norm_squared();
        for z in fixed {
            let margin = lambda * (z - &x).dot(&step) - sq;
            report.record(&x, margin, probe.tolerance);
        }
    }
    Ok(report)
}

/// `|T(x) - z|^2 <= |x - z|^2 + rho |T(x) - x|^2` with `rho < 1`.
pub fn demicontraction_check(t: &Operator, rho: f64, fixed: &[Point], probe: &ProbeConfig) -> Result<RegularityReport> {
    if !(rho < 1.0) {
        return Err(invalid(format!("demicontraction parameter must be < 1, got {rho}")));
    }
    check_fixed(&[t], fixed, probe.tolerance)?;
    let mut report = RegularityReport::new("demicontraction", probe.seed);
    for x in probe.points() {
        let tx = t.apply(&x)?;
        let step_sq = tx.distance(&x).powi(2);
        for z in fixed {
            let margin = x.distance(z).powi(2) + rho * step_sq - tx.distance(z).powi(2);
            report.record(&x, margin, probe.tolerance);
        }
    }
    Ok(report)
}

/// `|T(x) - z| <= R` for sampled `x` in `B(z, r)`, where `z` is the probe
/// center and `R` its `big_radius`.
pub fn ball_image_check(t: &Operator, probe: &ProbeConfig) -> Result<RegularityReport> {
    check_fixed(&[t], std::slice::from_ref(&probe.center), probe.tolerance)?;
    let mut report = RegularityReport::new("ball_image", probe.seed);
    for x in probe.points() {
        let margin = probe.big_radius - t.apply(&x)?.distance(&probe.center);
        report.record(&x, margin, probe.tolerance);
    }
    Ok(report)
}

/// Whether the lower bounds use `s a + t b` (`max(lambda, mu) >= 2`) or
/// `s a - t b`.
pub fn lb_sign(pair: RelaxationPair) -> f64 {
    if pair.lambda().max(pair.mu()) >= 2.0 {
        1.0
    } else {
        -1.0
    }
}

/// `<z - x, UT(x) - x> >= |s (T(x) - x) ± t (UT(x) - T(x))|^2` where
/// `s = sqrt(1/lambda - 1/nu)` and `t = sqrt(1/mu - 1/nu)`.
pub fn lb1_check(
    t: &Operator,
    u: &Operator,
    pair: RelaxationPair,
    fixed: &[Point],
    probe: &ProbeConfig,
) -> Result<RegularityReport> {
    check_fixed(&[t, u], fixed, probe.tolerance)?;
    let (s, r) = radicals(pair);
    let sign = lb_sign(pair);
    let mut report = RegularityReport::new("lb1", probe.seed);
    for x in probe.points() {
        let tx = t.apply(&x)?;
        let utx = u.apply(&tx)?;
        let a = &tx - &x;
        let b = &utx - &tx;
        let c = &utx - &x;
        let combo = a.scale(s).add_scaled(sign * r, &b);
        for z in fixed {
            let margin = (z - &x).dot(&c) - combo.norm_squared();
            report.record(&x, margin, probe.tolerance);
        }
    }
    Ok(report)
}

/// `|UT(x) - x| >= (|alpha| / (1 + beta sqrt(nu)))^2 max(|T(x)-x|^2, |UT(x)-T(x)|^2) / d(x, Fix T ∩ Fix U)`.
///
/// Samples with `d(x, Fix T ∩ Fix U) <= tolerance` are skipped. When
/// `lambda == mu` the coefficient is zero and the report is marked vacuous.
pub fn lb2_check(
    t: &Operator,
    u: &Operator,
    pair: RelaxationPair,
    intersection_distance: &dyn Fn(&Point) -> f64,
    probe: &ProbeConfig,
) -> Result<RegularityReport> {
    if pair.is_symmetric() {
        return Ok(RegularityReport::vacuous("lb2", probe.seed));
    }
    let coef = lb2_coefficient(pair);
    debug_assert!(nu(pair) > 0.0);
    let mut report = RegularityReport::new("lb2", probe.seed);
    for x in probe.points() {
        let d = intersection_distance(&x);
        if d <= probe.tolerance {
            continue;
        }
        let tx = t.apply(&x)?;
        let utx = u.apply(&tx)?;
        let a2 = tx.distance(&x).powi(2);
        let b2 = utx.distance(&tx).powi(2);
        let margin = utx.distance(&x) - coef * a2.max(b2) / d;
        report.record(&x, margin, probe.tolerance);
    }
    Ok(report)
}
