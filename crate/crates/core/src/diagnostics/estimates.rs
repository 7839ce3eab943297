//! Empirical regularity constants.

use super::sampling::ProbeConfig;
use crate::error::{Error, Result};
use crate::geometry::ConvexSet;
use crate::operators::Operator;

/// `min |T(x) - x| / d(x, Fix T)` over the probe samples.
///
/// Samples with `d(x, Fix T) <= tolerance` are skipped. Being a minimum over
/// finitely many points, the result is an upper bound on the true modulus
/// over the ball.
pub fn regularity_modulus_estimate(t: &Operator, probe: &ProbeConfig) -> Result<f64> {
    if !t.has_fix_distance() {
        return Err(Error::Estimation(format!(
            "{} has no fixed-set distance oracle",
            t.label()
        )));
    }
    let mut best = f64::INFINITY;
    let mut used = 0usize;
    for x in probe.points() {
        let d = t.fix_distance(&x).expect("checked above");
        if d <= probe.tolerance {
            continue;
        }
        best = best.min(t.apply(&x)?.distance(&x) / d);
        used += 1;
    }
    if used == 0 {
        return Err(Error::Estimation("every sample lies in the fixed point set".into()));
    }
    Ok(best)
}

/// `max d(x, A∩B) / max(d(x, A), d(x, B))` over the probe samples, with
/// `intersection` the set `A∩B`.
///
/// Samples where both distances are within tolerance are skipped. The result
/// is a lower bound on the smallest valid `kappa`, and it can only grow as
/// samples are added.
pub fn pair_regularity_estimate(
    a: &ConvexSet,
    b: &ConvexSet,
    intersection: &ConvexSet,
    probe: &ProbeConfig,
) -> Result<f64> {
    let dim = probe.center.dim();
    for s in [a, b, intersection] {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
    }
    let mut best: f64 = 0.0;
    let mut used = 0usize;
    for x in probe.points() {
        let m = a.distance_unchecked(&x).max(b.distance_unchecked(&x));
        if m <= probe.tolerance {
            continue;
        }
        best = best.max(intersection.distance_unchecked(&x) / m);
        used += 1;
    }
    if used == 0 {
        return Err(Error::Estimation("every sample lies in both sets".into()));
    }
    Ok(best)
}
