use serde::{Deserialize, Serialize};

use super::Point;
use crate::error::{invalid, Error, Result};

/// Relative threshold below which a direction is treated as linearly
/// dependent on the ones already accepted.
pub(crate) const RANK_TOL: f64 = 1e-10;

/// A closed convex set with a closed-form metric projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SetSpec", into = "SetSpec")]
pub enum ConvexSet {
    /// `{x : <normal, x> = offset}`
    Hyperplane {
        normal: Point,
        offset: f64,
    },
    /// `{x : <normal, x> <= offset}`
    HalfSpace {
        normal: Point,
        offset: f64,
    },
    /// `anchor + span(basis)` with an orthonormal basis (possibly empty).
    AffineSubspace {
        anchor: Point,
        basis: Vec<Point>,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    Box {
        lo: Point,
        hi: Point,
    },
}

impl ConvexSet {
    pub fn hyperplane(normal: Point, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self::Hyperplane { normal, offset })
    }

    pub fn half_space(normal: Point, offset: f64) -> Result<Self> {
        check_normal(&normal, offset)?;
        Ok(Self::HalfSpace { normal, offset })
    }

    /// `anchor + span(directions)`. The directions are orthonormalized with
    /// two passes of modified Gram-Schmidt; dependent directions are dropped.
    pub fn affine(anchor: Point, directions: &[Point]) -> Result<Self> {
        for d in directions {
            d.check_dim(anchor.dim())?;
        }
        let basis = orthonormalize(directions);
        Ok(Self::AffineSubspace { anchor, basis })
    }

    /// The line through `anchor` spanned by `direction`.
    pub fn line(anchor: Point, direction: Point) -> Result<Self> {
        if direction.norm() == 0.0 {
            return Err(invalid("line direction must be nonzero"));
        }
        Self::affine(anchor, &[direction])
    }

    /// The line through the origin of `R^2` making angle `theta` with the x-axis.
    pub fn line_at_angle(theta: f64) -> Self {
        let dir = Point::from_vec_unchecked(vec![theta.cos(), theta.sin()]);
        Self::AffineSubspace {
            anchor: Point::zeros(2),
            basis: vec![dir],
        }
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn cuboid(lo: Point, hi: Point) -> Result<Self> {
        hi.check_dim(lo.dim())?;
        if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
            return Err(invalid("box requires lo <= hi componentwise"));
        }
        Ok(Self::Box { lo, hi })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Hyperplane { normal, .. } | Self::HalfSpace { normal, .. } => normal.dim(),
            Self::AffineSubspace { anchor, .. } => anchor.dim(),
            Self::Ball { center, .. } => center.dim(),
            Self::Box { lo, .. } => lo.dim(),
        }
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, Self::Hyperplane { .. } | Self::AffineSubspace { .. })
    }

    /// Metric projection: the unique nearest point of the set.
    pub fn project(&self, x: &Point) -> Result<Point> {
        x.check_dim(self.dim())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Point) -> Point {
        match self {
            Self::Hyperplane { normal, offset } => {
                let t = (normal.dot(x) - offset) / normal.norm_squared();
                x.add_scaled(-t, normal)
            }
            Self::HalfSpace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.add_scaled(-excess / normal.norm_squared(), normal)
                }
            }
            Self::AffineSubspace { anchor, basis } => {
                let rel = x - anchor;
                basis
                    .iter()
                    .fold(anchor.clone(), |acc, u| acc.add_scaled(rel.dot(u), u))
            }
            Self::Ball { center, radius } => {
                let rel = x - center;
                let n = rel.norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center.add_scaled(radius / n, &rel)
                }
            }
            Self::Box { lo, hi } => Point::from_vec_unchecked(
                x.coords()
                    .iter()
                    .zip(lo.coords().iter().zip(hi.coords()))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect(),
            ),
        }
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance(&self, x: &Point) -> Result<f64> {
        x.check_dim(self.dim())?;
        Ok(self.distance_unchecked(x))
    }

    pub(crate) fn distance_unchecked(&self, x: &Point) -> f64 {
        match self {
            Self::Hyperplane { normal, offset } => (normal.dot(x) - offset).abs() / normal.norm(),
            Self::HalfSpace { normal, offset } => (normal.dot(x) - offset).max(0.0) / normal.norm(),
            Self::Ball { center, radius } => (x.distance(center) - radius).max(0.0),
            _ => x.distance(&self.project_unchecked(x)),
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        x.dim() == self.dim() && self.distance_unchecked(x) <= tol
    }
}

fn check_normal(normal: &Point, offset: f64) -> Result<()> {
    if normal.norm() == 0.0 {
        return Err(invalid("normal vector must be nonzero"));
    }
    if !offset.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Orthonormal basis of `span(vectors)` by modified Gram-Schmidt with one
/// re-orthogonalization pass.
pub(crate) fn orthonormalize(vectors: &[Point]) -> Vec<Point> {
    let mut basis: Vec<Point> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = v.norm();
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &basis {
                let c = w.dot(u);
                w = w.add_scaled(-c, u);
            }
        }
        let n = w.norm();
        if n > RANK_TOL * scale {
            basis.push(w.scale(1.0 / n));
        }
    }
    basis
}

/// Serialized form of [`ConvexSet`], as it appears in experiment configs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Hyperplane {
        normal: Point,
        offset: f64,
    },
    HalfSpace {
        normal: Point,
        offset: f64,
    },
    Affine {
        anchor: Point,
        #[serde(default)]
        basis: Vec<Point>,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    Box {
        lo: Point,
        hi: Point,
    },
}

impl TryFrom<SetSpec> for ConvexSet {
    type Error = Error;

    fn try_from(spec: SetSpec) -> Result<Self> {
        match spec {
            SetSpec::Hyperplane { normal, offset } => ConvexSet::hyperplane(normal, offset),
            SetSpec::HalfSpace { normal, offset } => ConvexSet::half_space(normal, offset),
            SetSpec::Affine { anchor, basis } => ConvexSet::affine(anchor, &basis),
            SetSpec::Ball { center, radius } => ConvexSet::ball(center, radius),
            SetSpec::Box { lo, hi } => ConvexSet::cuboid(lo, hi),
        }
    }
}

impl From<ConvexSet> for SetSpec {
    fn from(set: ConvexSet) -> Self {
        match set {
            ConvexSet::Hyperplane { normal, offset } => SetSpec::Hyperplane { normal, offset },
            ConvexSet::HalfSpace { normal, offset } => SetSpec::HalfSpace { normal, offset },
            ConvexSet::AffineSubspace { anchor, basis } => SetSpec::Affine { anchor, basis },
            ConvexSet::Ball { center, radius } => SetSpec::Ball { center, radius },
            ConvexSet::Box { lo, hi } => SetSpec::Box { lo, hi },
        }
    }
}
