//! Products of relaxed cutters with relaxation parameters beyond two.
//!
//! A *cutter* is an operator `T` with `<z - T(x), x - T(x)> <= 0` for every
//! `x` and every fixed point `z`; metric projections are the standard example.
//! Relaxing a cutter by `lambda > 2` loses quasi-nonexpansiveness, but the
//! product `UT` of a `lambda`-relaxed and a `mu`-relaxed cutter is still a
//! `nu`-relaxed cutter whenever `lambda * mu < 4`. This crate provides
//!
//! * [`geometry`]: points, convex sets and exact projections,
//! * [`theory`]: the closed-form constants (`nu`, `alpha`, `beta`, `delta`, `rho`, rates),
//! * [`operators`]: projections, relaxations, products and proximal maps,
//! * [`engine`]: the over-relaxed product iteration and its baselines,
//! * [`diagnostics`]: sampled checks of every inequality involved,
//! * [`cli`]: the config-driven experiment runner behind the `cutterkit` binary.
//!
//! ```
//! use cutterkit::engine::{iterate, IterationConfig};
//! use cutterkit::geometry::ConvexSet;
//! use cutterkit::operators::relaxed_projections;
//! use cutterkit::theory::RelaxationPair;
//! use cutterkit::point;
//!
//! let a = ConvexSet::hyperplane(point![0, 1], 0.0)?;
//! let b = ConvexSet::line_at_angle(std::f64::consts::PI / 6.0);
//! let (t, u) = relaxed_projections(&a, &b, 3.0, 1.0)?;
//! let config = IterationConfig::new(RelaxationPair::new(3.0, 1.0)?, point![1, 0]);
//! let trace = iterate(&t, &u, &config)?;
//! assert!(trace.converged && trace.last().norm() < 1e-11);
//! # Ok::<(), cutterkit::Error>(())
//! ```

// `!(x >= y)` is used on purpose so that NaN counts as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod diagnostics;
pub mod engine;
mod error;
pub mod geometry;
pub mod operators;
pub mod theory;

pub use error::{Error, Result};
