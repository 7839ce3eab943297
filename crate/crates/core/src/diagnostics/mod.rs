//! Numerical certification of the inequalities satisfied by relaxed cutters
//! and their products, plus empirical regularity constants.
//!
//! Every probe samples points uniformly in a ball `B(z, r)` (see
//! [`ProbeConfig`]) and reports the smallest margin by which the inequality
//! held. In finite dimension weak and norm regularity coincide, so only
//! norm regularity is probed.

mod estimates;
mod probes;
mod report;
mod sampling;
mod trace_checks;

pub use estimates::{pair_regularity_estimate, regularity_modulus_estimate};
pub use probes::{
    ball_image_check, cutter_check, demicontraction_check, lb1_check, lb2_check, lb_sign, relaxed_cutter_check,
};
pub use report::{ProbeOutcome, RegularityReport, Violation};
pub use sampling::{sample_ball, ProbeConfig, DEFAULT_TOLERANCE};
pub use trace_checks::{fejer_check, rate_certificate, FejerReport, RateReport, RateStatus};
