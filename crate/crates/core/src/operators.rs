//! Operator algebra on `R^d`: metric projections, subgradient projections,
//! proximal maps, relaxations, products and the generalized Douglas-Rachford
//! operator.
//!
//! An [`Operator`] is an immutable, cheaply clonable closure. It can carry an
//! oracle for the distance to its fixed point set, which the diagnostics use
//! to measure regularity.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{ConvexSet, Point};

type EvalFn = dyn Fn(&Point) -> Result<Point> + Send + Sync;
type DistFn = dyn Fn(&Point) -> f64 + Send + Sync;

/// A self-map of `R^dim`.
#[derive(Clone)]
pub struct Operator {
    dim: usize,
    label: String,
    eval: Arc<EvalFn>,
    fix_distance: Option<Arc<DistFn>>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("fix_distance", &self.fix_distance.is_some())
            .finish()
    }
}

impl Operator {
    /// Wraps an arbitrary map. `eval` receives points of dimension `dim` only.
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        eval: impl Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            label: label.into(),
            eval: Arc::new(eval),
            fix_distance: None,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(dim, "I", |x| Ok(x.clone())).with_fix_distance(|_| 0.0)
    }

    /// Attaches an oracle for `d(x, Fix T)`.
    pub fn with_fix_distance(mut self, dist: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.fix_distance = Some(Arc::new(dist));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.dim)?;
        (self.eval)(x)
    }

    pub fn has_fix_distance(&self) -> bool {
        self.fix_distance.is_some()
    }

    /// `d(x, Fix T)` when an oracle is attached.
    pub fn fix_distance(&self, x: &Point) -> Option<f64> {
        self.fix_distance.as_ref().map(|d| d(x))
    }

    /// `x + lambda (T(x) - x)`.
    pub fn relax(&self, lambda: f64) -> Result<Operator> {
        relax(self, lambda)
    }

    /// `U o T` with `self` as `U`.
    pub fn after(&self, t: &Operator) -> Result<Operator> {
        compose(self, t)
    }
}

/// The metric projection onto `set`, a cutter with `Fix P = set`.
pub fn projection_operator(set: &ConvexSet) -> Operator {
    let label = format!("P[{}]", set_label(set));
    let s1 = set.clone();
    let s2 = set.clone();
    Operator::new(set.dim(), label, move |x| Ok(s1.project_unchecked(x)))
        .with_fix_distance(move |x| s2.distance_unchecked(x))
}

fn set_label(set: &ConvexSet) -> &'static str {
    match set {
        ConvexSet::Hyperplane { .. } => "hyperplane",
        ConvexSet::HalfSpace { .. } => "halfspace",
        ConvexSet::AffineSubspace { .. } => "affine",
        ConvexSet::Ball { .. } => "ball",
        ConvexSet::Box { .. } => "box",
    }
}

/// The `lambda`-relaxation `T_lambda = I + lambda (T - I)`.
///
/// For `lambda > 0` the fixed point set is unchanged, so the distance oracle is
/// kept. `lambda = 0` gives the identity.
pub fn relax(t: &Operator, lambda: f64) -> Result<Operator> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(invalid(format!("relaxation parameter must be >= 0, got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(Operator::identity(t.dim).with_label(format!("({})_0", t.label)));
    }
    let inner = t.eval.clone();
    let op = Operator::new(t.dim, format!("({})_{lambda}", t.label), move |x| {
        let tx = inner(x)?;
        Ok(x.lerp(lambda, &tx))
    });
    Ok(match &t.fix_distance {
        Some(d) => Operator {
            fix_distance: Some(d.clone()),
            ..op
        },
        None => op,
    })
}

/// The product `U o T` (apply `T` first).
///
/// The product carries no distance oracle: its fixed set is
/// `Fix T ∩ Fix U` for relaxed cutters, which has no general closed form.
/// Use [`compose_with_intersection`] when that distance is known.
pub fn compose(u: &Operator, t: &Operator) -> Result<Operator> {
    if u.dim != t.dim {
        return Err(Error::DimensionMismatch {
            expected: t.dim,
            found: u.dim,
        });
    }
    let (fu, ft) = (u.eval.clone(), t.eval.clone());
    Ok(Operator::new(t.dim, format!("{} {}", u.label, t.label), move |x| {
        fu(&ft(x)?)
    }))
}

/// `U o T` with `d(x, Fix T ∩ Fix U)` supplied by `intersection_distance`.
///
/// Both factors must already carry distance oracles.
pub fn compose_with_intersection(
    u: &Operator,
    t: &Operator,
    intersection_distance: impl Fn(&Point) -> f64 + Send + Sync + 'static,
) -> Result<Operator> {
    if !(u.has_fix_distance() && t.has_fix_distance()) {
        return Err(invalid("both factors need a fixed-set distance oracle"));
    }
    Ok(compose(u, t)?.with_fix_distance(intersection_distance))
}

/// The subgradient projection onto the sublevel set `{f <= 0}`:
/// `x - f(x)/|g(x)|^2 g(x)` when `f(x) > 0`, and `x` otherwise.
///
/// Evaluating at a point with `f(x) > 0` and `g(x) = 0` fails with
/// [`Error::DegenerateSubgradient`].
pub fn subgradient_projection(
    dim: usize,
    f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    g: impl Fn(&Point) -> Point + Send + Sync + 'static,
) -> Operator {
    Operator::new(dim, "Psub", move |x| {
        let value = f(x);
        if value <= 0.0 {
            return Ok(x.clone());
        }
        let grad = g(x);
        grad.check_dim(x.dim())?;
        let n2 = grad.norm_squared();
        if n2 == 0.0 {
            return Err(Error::DegenerateSubgradient { value });
        }
        Ok(x.add_scaled(-value / n2, &grad))
    })
}

/// Functions whose proximal map has a closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "function", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProxFunction {
    /// `1/2 |x - center|^2`
    Quadratic { center: Point },
    /// `|x|_1`
    L1,
    /// Indicator of a convex set; its proximal map is the projection.
    Indicator { set: ConvexSet },
}

/// `prox_{t f}(x) = argmin_y f(y) + |y - x|^2 / (2t)`.
pub fn proximal(f: &ProxFunction, t: f64, dim: usize) -> Result<Operator> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid(format!("prox step must be positive, got {t}")));
    }
    match f {
        ProxFunction::Quadratic { center } => {
            center.check_dim(dim)?;
            let c1 = center.clone();
            let c2 = center.clone();
            Ok(
                Operator::new(dim, "prox[quad]", move |x| Ok(x.lerp(t / (1.0 + t), &c1)))
                    .with_fix_distance(move |x| x.distance(&c2)),
            )
        }
        ProxFunction::L1 => Ok(Operator::new(dim, "prox[l1]", move |x| {
            Ok(Point::from_vec_unchecked(
                x.coords().iter().map(|v| v.signum() * (v.abs() - t).max(0.0)).collect(),
            ))
        })
        .with_fix_distance(|x| x.norm())),
        ProxFunction::Indicator { set } => {
            if set.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: set.dim(),
                });
            }
            Ok(projection_operator(set).with_label(format!("prox[{}]", set_label(set))))
        }
    }
}

/// Relaxed projections `(P_A)_lambda` and `(P_B)_mu` as `(T, U)`.
pub fn relaxed_projections(a: &ConvexSet, b: &ConvexSet, lambda: f64, mu: f64) -> Result<(Operator, Operator)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok((
        relax(&projection_operator(a), lambda)?,
        relax(&projection_operator(b), mu)?,
    ))
}

/// The generalized Douglas-Rachford operator
/// `V = I + abar ((P_B)_mu (P_A)_lambda - I)`.
///
/// With `lambda = mu = 2` and `abar = 1/2` this is the classical
/// Douglas-Rachford map `(I + R_B R_A) / 2`.
pub fn generalized_dr(a: &ConvexSet, b: &ConvexSet, lambda: f64, mu: f64, abar: f64) -> Result<Operator> {
    if !(lambda > 0.0 && mu > 0.0 && abar > 0.0) {
        return Err(invalid("generalized DR requires lambda, mu, abar > 0"));
    }
    let (t, u) = relaxed_projections(a, b, lambda, mu)?;
    let w = compose(&u, &t)?;
    Ok(relax(&w, abar)?.with_label(format!("GDR(lambda={lambda}, mu={mu}, abar={abar})")))
}
