use nalgebra::{DMatrix, DVector};

use super::sets::{orthonormalize, RANK_TOL};
use super::{ConvexSet, Point};
use crate::error::{invalid, Error, Result};

/// Largest relative residual of the stacked constraints accepted as consistent.
const FEASIBILITY_TOL: f64 = 1e-9;

/// Intersection of two affine sets (hyperplanes or affine subspaces).
///
/// Both sets are rewritten as linear constraints `Mx = m` and stacked. The
/// anchor is the minimum-norm least-squares solution, and the basis is an
/// orthonormal basis of the null space of the stacked matrix. Parallel
/// disjoint sets give [`Error::Infeasible`].
pub fn intersect_affine(a: &ConvexSet, b: &ConvexSet) -> Result<ConvexSet> {
    let dim = a.dim();
    if b.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: b.dim(),
        });
    }
    let mut rows = constraints(a)?;
    rows.extend(constraints(b)?);
    if rows.is_empty() {
        // both sets are the whole space
        return ConvexSet::affine(Point::zeros(dim), &identity_basis(dim));
    }

    let n_rows = rows.len().max(dim);
    let mut m = DMatrix::<f64>::zeros(n_rows, dim);
    let mut rhs = DVector::<f64>::zeros(n_rows);
    for (i, (normal, offset)) in rows.iter().enumerate() {
        for j in 0..dim {
            m[(i, j)] = normal[j];
        }
        rhs[i] = *offset;
    }

    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let cutoff = RANK_TOL * sigma_max.max(1.0);
    let solution = svd.solve(&rhs, cutoff).map_err(|e| invalid(e.to_string()))?;

    let residual = (&m * &solution - &rhs).norm();
    if residual > FEASIBILITY_TOL * (1.0 + rhs.norm()) {
        return Err(Error::Infeasible);
    }

    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let null_dirs: Vec<Point> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(i, _)| Point::from_vec_unchecked(v_t.row(i).iter().copied().collect()))
        .collect();

    let anchor = Point::new(solution.iter().copied().collect())?;
    Ok(ConvexSet::AffineSubspace {
        anchor,
        basis: orthonormalize(&null_dirs),
    })
}

/// `(normal, offset)` rows describing an affine set as `<normal, x> = offset`.
fn constraints(set: &ConvexSet) -> Result<Vec<(Point, f64)>> {
    match set {
        ConvexSet::Hyperplane { normal, offset } => Ok(vec![(normal.clone(), *offset)]),
        ConvexSet::AffineSubspace { anchor, basis } => Ok(complement(basis, anchor.dim())
            .into_iter()
            .map(|n| {
                let off = n.dot(anchor);
                (n, off)
            })
            .collect()),
        _ => Err(invalid(
            "intersect_affine only accepts hyperplanes and affine subspaces",
        )),
    }
}

/// Orthonormal basis of the orthogonal complement of `span(basis)`.
fn complement(basis: &[Point], dim: usize) -> Vec<Point> {
    let mut all: Vec<Point> = basis.to_vec();
    all.extend(identity_basis(dim));
    orthonormalize(&all).split_off(basis.len())
}

fn identity_basis(dim: usize) -> Vec<Point> {
    (0..dim).map(|i| Point::unit(dim, i)).collect()
}
