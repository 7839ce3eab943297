//! Closed-form constants for products of relaxed cutters.
//!
//! Given a `lambda`-relaxed cutter `T` and a `mu`-relaxed cutter `U` with
//! `lambda * mu < 4`, the product `UT` is a `nu`-relaxed cutter. Everything
//! else here (the regularity modulus of the product, the over-relaxation
//! window and the Q-linear rate of the iteration) is derived from `nu`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Relaxation parameters `(lambda, mu)` of the first (`T`) and second (`U`)
/// operator of a product `UT`.
///
/// Construction enforces `lambda, mu > 0` and `lambda * mu < 4`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RelaxationPair {
    lambda: f64,
    mu: f64,
}

impl RelaxationPair {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0 && mu.is_finite() && mu > 0.0) {
            return Err(invalid(format!(
                "relaxation parameters must be positive, got lambda={lambda}, mu={mu}"
            )));
        }
        if lambda * mu >= 4.0 {
            return Err(invalid(format!("lambda*mu must be < 4 (lambda={lambda}, mu={mu})")));
        }
        Ok(Self { lambda, mu })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn is_symmetric(&self) -> bool {
        self.lambda == self.mu
    }

    pub fn constants(&self) -> ProductConstants {
        ProductConstants::new(*self)
    }
}

impl<'de> Deserialize<'de> for RelaxationPair {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            lambda: f64,
            mu: f64,
        }
        let raw = Raw::deserialize(d)?;
        RelaxationPair::new(raw.lambda, raw.mu).map_err(serde::de::Error::custom)
    }
}

/// All constants attached to a relaxation pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductConstants {
    pub nu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub demicontraction_rho_t: f64,
    pub demicontraction_rho_u: f64,
}

impl ProductConstants {
    pub fn new(pair: RelaxationPair) -> Self {
        let (alpha, beta) = alpha_beta(pair);
        Self {
            nu: nu(pair),
            alpha,
            beta,
            rho: rho_overrelax(pair),
            demicontraction_rho_t: demicontraction_rho(pair.lambda),
            demicontraction_rho_u: demicontraction_rho(pair.mu),
        }
    }
}

/// Relaxation parameter of the product: `4(lambda + mu - lambda mu) / (4 - lambda mu)`.
pub fn nu(pair: RelaxationPair) -> f64 {
    let (l, m) = (pair.lambda, pair.mu);
    4.0 * (l + m - l * m) / (4.0 - l * m)
}

/// `sqrt(1/lambda - 1/nu)` and `sqrt(1/mu - 1/nu)`.
///
/// Both radicands are non-negative because `nu >= max(lambda, mu)`; they are
/// clamped at zero to absorb rounding when `nu == max(lambda, mu)`.
pub fn radicals(pair: RelaxationPair) -> (f64, f64) {
    let inv_nu = 1.0 / nu(pair);
    (
        (1.0 / pair.lambda - inv_nu).max(0.0).sqrt(),
        (1.0 / pair.mu - inv_nu).max(0.0).sqrt(),
    )
}

/// `(alpha, beta)`: the difference and the larger of the two [`radicals`].
///
/// `alpha` is zero exactly when `lambda == mu`.
pub fn alpha_beta(pair: RelaxationPair) -> (f64, f64) {
    let (s, t) = radicals(pair);
    (s - t, s.max(t))
}

fn lb2_denominator(pair: RelaxationPair) -> f64 {
    let (_, beta) = alpha_beta(pair);
    1.0 + beta * nu(pair).sqrt()
}

/// Linear-regularity modulus of `UT` from the moduli `delta1` of `T`,
/// `delta2` of `U` and the regularity constant `kappa` of their fixed sets:
/// `(|alpha| min(delta1, delta2) / (2 kappa (1 + beta sqrt(nu))))^2`.
pub fn delta_product(delta1: f64, delta2: f64, kappa: f64, pair: RelaxationPair) -> Result<f64> {
    for (name, d) in [("delta1", delta1), ("delta2", delta2)] {
        if !(d > 0.0 && d <= 1.0) {
            return Err(invalid(format!("{name} must lie in (0, 1], got {d}")));
        }
    }
    check_kappa(kappa)?;
    Ok(delta_formula(delta1.min(delta2), kappa, pair))
}

/// The same modulus specialized to relaxed metric projections, where
/// `min(delta1, delta2)` becomes `min(lambda, mu)`.
pub fn delta_projections(pair: RelaxationPair, kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(delta_formula(pair.lambda.min(pair.mu), kappa, pair))
}

fn delta_formula(min_modulus: f64, kappa: f64, pair: RelaxationPair) -> f64 {
    let (alpha, _) = alpha_beta(pair);
    let q = alpha.abs() * min_modulus / (2.0 * kappa * lb2_denominator(pair));
    q * q
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("kappa must be positive, got {kappa}")))
    }
}

/// Coefficient `(|alpha| / (1 + beta sqrt(nu)))^2` of the lower bound on
/// `|UT(x) - x|`.
pub fn lb2_coefficient(pair: RelaxationPair) -> f64 {
    let (alpha, _) = alpha_beta(pair);
    let q = alpha.abs() / lb2_denominator(pair);
    q * q
}

/// `rho = (2 - nu) / nu`; the upper end of the step window for the
/// reformulated iteration is `1 + rho`.
pub fn rho_overrelax(pair: RelaxationPair) -> f64 {
    let nu = nu(pair);
    (2.0 - nu) / nu
}

/// The same `rho` through the piecewise expression
/// `(lambda/(2-lambda) + mu/(2-mu))^-1`, or `0` when either parameter is 2.
pub fn rho_overrelax_piecewise(pair: RelaxationPair) -> f64 {
    let (l, m) = (pair.lambda, pair.mu);
    if l == 2.0 || m == 2.0 {
        0.0
    } else {
        1.0 / (l / (2.0 - l) + m / (2.0 - m))
    }
}

/// Q-linear rate `sqrt(1 - (epsilon delta / (2 nu))^2)`.
///
/// Requires `epsilon > 0`, `delta >= 0` and `epsilon delta / (2 nu) < 1`.
pub fn qlinear_rate(epsilon: f64, delta: f64, nu: f64) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    if !(delta >= 0.0) {
        return Err(invalid(format!("delta must be non-negative, got {delta}")));
    }
    if !(nu > 0.0) {
        return Err(invalid(format!("nu must be positive, got {nu}")));
    }
    let q = epsilon * delta / (2.0 * nu);
    if !(q < 1.0) {
        return Err(invalid(format!("epsilon*delta/(2 nu) = {q} must be < 1")));
    }
    Ok((1.0 - q * q).sqrt())
}

/// A `lambda`-relaxed cutter is `(lambda - 2)/lambda`-demicontractive.
pub fn demicontraction_rho(lambda: f64) -> f64 {
    debug_assert!(lambda > 0.0);
    (lambda - 2.0) / lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(l: f64, m: f64) -> RelaxationPair {
        RelaxationPair::new(l, m).unwrap()
    }

    #[test]
    fn pair_validation() {
        assert!(RelaxationPair::new(2.0, 2.0).is_err());
        assert!(RelaxationPair::new(0.0, 1.0).is_err());
        assert!(RelaxationPair::new(1.0, -1.0).is_err());
        assert!(RelaxationPair::new(f64::NAN, 1.0).is_err());
        let err = RelaxationPair::new(2.0, 2.0).unwrap_err().to_string();
        assert!(err.contains("lambda*mu must be < 4"), "{err}");
        assert!(serde_json::from_str::<RelaxationPair>(r#"{"lambda":3,"mu":1.5}"#).is_err());
    }

    #[test]
    fn nu_values() {
        assert_eq!(nu(pair(1.0, 3.0)), 4.0);
        assert_eq!(nu(pair(2.0, 1.0)), 2.0);
        assert!((nu(pair(1.0, 1.0)) - 4.0 / 3.0).abs() < 1e-15);
        let n: f64 = 4.0 / 3.0;
        let lhs = 4.0 * (1.0 - 1.0 / n) * (1.0 - 1.0 / n);
        assert!((lhs - (1.0 - 2.0 / n).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn alpha_beta_values() {
        let (a, b) = alpha_beta(pair(1.0, 3.0));
        assert!((a - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((b - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(alpha_beta(pair(1.3, 1.3)).0, 0.0);
        let (a, b) = alpha_beta(pair(3.0, 1.0));
        assert!((a + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((b - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn delta_values() {
        // (1 / (sqrt(3) * 4 * (1 + sqrt(3))))^2, evaluated to 30 digits
        let expected = 0.002_791_137_421_157_528;
        let d = delta_product(1.0, 1.0, 2.0, pair(1.0, 3.0)).unwrap();
        assert!((d - expected).abs() < 1e-17);
        assert_eq!(delta_projections(pair(1.0, 3.0), 2.0).unwrap(), d);
        assert_eq!(delta_product(1.0, 1.0, 2.0, pair(0.7, 0.7)).unwrap(), 0.0);
        assert_eq!(delta_projections(pair(0.7, 0.7), 2.0).unwrap(), 0.0);

        let d4 = delta_product(1.0, 1.0, 4.0, pair(1.0, 3.0)).unwrap();
        assert!((d4 - d / 4.0).abs() < 1e-18);
    }

    #[test]
    fn delta_projections_decreases_in_kappa() {
        let p = pair(0.5, 3.0);
        let mut prev = f64::INFINITY;
        for k in [1.0, 2.0, 10.0, 1e3, 1e6] {
            let d = delta_projections(p, k).unwrap();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn delta_argument_errors() {
        let p = pair(1.0, 3.0);
        assert!(delta_product(0.0, 1.0, 2.0, p).is_err());
        assert!(delta_product(1.0, 1.5, 2.0, p).is_err());
        assert!(delta_product(1.0, 1.0, 0.0, p).is_err());
        assert!(delta_projections(p, -1.0).is_err());
    }

    #[test]
    fn rho_values() {
        assert!((rho_overrelax(pair(1.0, 3.0)) + 0.5).abs() < 1e-15);
        assert!((rho_overrelax_piecewise(pair(1.0, 3.0)) + 0.5).abs() < 1e-15);
        assert_eq!(rho_overrelax(pair(2.0, 1.0)), 0.0);
        assert_eq!(rho_overrelax_piecewise(pair(2.0, 1.0)), 0.0);
        assert!((rho_overrelax(pair(1.0, 1.0)) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rate_values() {
        assert_eq!(qlinear_rate(1.0, 0.0, 4.0).unwrap(), 1.0);
        assert!(qlinear_rate(1.0, 8.0, 4.0).is_err());
        assert!(qlinear_rate(0.0, 0.1, 4.0).is_err());
        assert!(qlinear_rate(1.0, -0.1, 4.0).is_err());
        let d = delta_projections(pair(1.0, 3.0), 2.0).unwrap();
        let q = qlinear_rate(1.0, d, 4.0).unwrap();
        assert!((q - 0.999_999_939_137_122_3).abs() < 1e-15);
    }

    #[test]
    fn demicontraction_values() {
        assert_eq!(demicontraction_rho(2.0), 0.0);
        assert_eq!(demicontraction_rho(1.0), -1.0);
        assert!((demicontraction_rho(3.0) - 1.0 / 3.0).abs() < 1e-16);
        let c = pair(3.0, 1.0).constants();
        assert_eq!(c.demicontraction_rho_u, -1.0);
        assert!(c.nu >= 3.0 && c.beta > 0.0 && c.rho > -1.0);
    }
}
