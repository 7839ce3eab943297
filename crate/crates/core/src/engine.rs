//! Drivers for the over-relaxed product iteration
//!
//! ```text
//! x^{k+1} = x^k + (alpha_k / nu) (U T(x^k) - x^k),   alpha_k in [eps, 2 - eps]
//! ```
//!
//! its reformulation with a direct step `abar_k = alpha_k / nu`, and the two
//! classical baselines (alternating projections and Douglas-Rachford).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{ConvexSet, Point};
use crate::operators::{compose, generalized_dr, projection_operator, Operator};
use crate::theory::{nu, rho_overrelax, RelaxationPair};

/// How the step `alpha_k` is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepPolicy {
    Constant(f64),
    /// Used cyclically when shorter than the number of iterations.
    Sequence(Vec<f64>),
}

impl StepPolicy {
    pub fn step(&self, k: usize) -> f64 {
        match self {
            Self::Constant(a) => *a,
            Self::Sequence(s) => s[k % s.len()],
        }
    }

    fn values(&self) -> &[f64] {
        match self {
            Self::Constant(a) => std::slice::from_ref(a),
            Self::Sequence(s) => s,
        }
    }

    /// Largest `eps` for which every step lies in `[eps, 2 - eps]`.
    pub fn widest_epsilon(&self) -> f64 {
        self.values()
            .iter()
            .map(|a| a.min(2.0 - a))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct IterationConfig {
    pub pair: RelaxationPair,
    pub epsilon: f64,
    pub step_policy: StepPolicy,
    pub max_iter: usize,
    pub residual_tol: f64,
    pub x0: Point,
}

impl IterationConfig {
    /// Constant step `alpha_k = 1`, `epsilon = 1`, at most 1000 iterations,
    /// residual tolerance `1e-12`.
    pub fn new(pair: RelaxationPair, x0: Point) -> Self {
        Self {
            pair,
            epsilon: 1.0,
            step_policy: StepPolicy::Constant(1.0),
            max_iter: 1000,
            residual_tol: 1e-12,
            x0,
        }
    }

    pub fn with_steps(mut self, policy: StepPolicy, epsilon: f64) -> Self {
        self.step_policy = policy;
        self.epsilon = epsilon;
        self
    }

    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }

    pub fn with_residual_tol(mut self, tol: f64) -> Self {
        self.residual_tol = tol;
        self
    }

    fn check_common(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(invalid("residual_tol must be positive"));
        }
        if let StepPolicy::Sequence(s) = &self.step_policy {
            if s.is_empty() {
                return Err(invalid("step sequence must not be empty"));
            }
        }
        Ok(())
    }

    /// Every `alpha_k` must lie in `[eps, 2 - eps]` with `0 < eps <= 1`.
    pub fn validate(&self) -> Result<()> {
        self.check_common()?;
        let eps = self.epsilon;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1], got {eps}")));
        }
        for &a in self.step_policy.values() {
            if !(a >= eps && a <= 2.0 - eps) {
                return Err(invalid(format!("step {a} outside [{eps}, {}]", 2.0 - eps)));
            }
        }
        Ok(())
    }

    /// For the reformulated iteration: every `abar_k` must lie in
    /// `[eps, 1 + rho - eps]` with `eps > 0`.
    pub fn validate_reformulated(&self) -> Result<()> {
        self.check_common()?;
        let eps = self.epsilon;
        if !(eps > 0.0) {
            return Err(invalid(format!("epsilon must be positive, got {eps}")));
        }
        let hi = 1.0 + rho_overrelax(self.pair) - eps;
        for &a in self.step_policy.values() {
            if !(a >= eps && a <= hi) {
                return Err(invalid(format!("step {a} outside [{eps}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// A recorded run.
///
/// `iterates` holds `x^0, ..., x^n`; `residuals[k] = |W(x^k) - x^k|` and
/// `step_sizes[k] = alpha_k` for each of the `n` transitions, where `W` is the
/// driver's base map (`UT` for the product iteration). The step actually taken
/// is `alpha_k / relaxation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub iterates: Vec<Point>,
    pub residuals: Vec<f64>,
    pub step_sizes: Vec<f64>,
    /// The normalizing constant `nu` of the steps.
    pub relaxation: f64,
    /// Residual at the last iterate.
    pub final_residual: f64,
    /// True when the run stopped on the residual tolerance.
    pub converged: bool,
    pub fejer_gaps: Option<Vec<f64>>,
    pub solution_errors: Option<Vec<f64>>,
}

impl Trace {
    fn start(x0: Point, relaxation: f64) -> Self {
        Self {
            iterates: vec![x0],
            residuals: Vec::new(),
            step_sizes: Vec::new(),
            relaxation,
            final_residual: f64::NAN,
            converged: false,
            fejer_gaps: None,
            solution_errors: None,
        }
    }

    pub fn transitions(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn last(&self) -> &Point {
        self.iterates.last().expect("trace always holds x0")
    }

    /// Residual at every iterate, including the last one.
    pub fn residuals_per_iterate(&self) -> Vec<f64> {
        let mut r = self.residuals.clone();
        r.push(self.final_residual);
        r
    }

    /// Records `|x^k - w|^2 - |x^{k+1} - w|^2` for each transition.
    pub fn record_fejer_gaps(&mut self, w: &Point) {
        self.fejer_gaps = Some(
            self.iterates
                .windows(2)
                .map(|p| p[0].distance(w).powi(2) - p[1].distance(w).powi(2))
                .collect(),
        );
    }

    /// Records `|x^k - x*|` for each iterate.
    pub fn record_solution_errors(&mut self, x_star: &Point) {
        self.solution_errors = Some(self.iterates.iter().map(|x| x.distance(x_star)).collect());
    }
}

/// Runs `x^{k+1} = x^k + (alpha_k/nu)(UT(x^k) - x^k)` with `nu` from the pair.
///
/// Stops when `|UT(x^k) - x^k| <= residual_tol` or after `max_iter` steps. A
/// non-finite iterate aborts with [`Error::Diverged`] carrying the partial
/// trace.
pub fn iterate(t: &Operator, u: &Operator, config: &IterationConfig) -> Result<Trace> {
    config.validate()?;
    let nu = nu(config.pair);
    let ut = compose(u, t)?;
    run(&ut, config, nu, |k| {
        let a = config.step_policy.step(k);
        (a / nu, a)
    })
}

/// Runs `x^{k+1} = x^k + abar_k (UT(x^k) - x^k)` where the step policy gives
/// `abar_k` directly and `epsilon` bounds the window `[eps, 1 + rho - eps]`.
///
/// Recorded step sizes are `alpha_k = abar_k nu`, so the trace is comparable
/// to one from [`iterate`].
pub fn iterate_reformulated(t: &Operator, u: &Operator, config: &IterationConfig) -> Result<Trace> {
    config.validate_reformulated()?;
    let nu = nu(config.pair);
    let ut = compose(u, t)?;
    run(&ut, config, nu, |k| {
        let abar = config.step_policy.step(k);
        (abar, abar * nu)
    })
}

fn run(map: &Operator, config: &IterationConfig, relaxation: f64, step: impl Fn(usize) -> (f64, f64)) -> Result<Trace> {
    let mut trace = Trace::start(config.x0.clone(), relaxation);
    let mut x = config.x0.clone();
    x.check_dim(map.dim())?;
    for k in 0..config.max_iter {
        let y = map.apply(&x)?;
        let r = y.distance(&x);
        if !r.is_finite() {
            return Err(diverged(k, trace));
        }
        if r <= config.residual_tol {
            trace.final_residual = r;
            trace.converged = true;
            return Ok(trace);
        }
        let (coef, alpha) = step(k);
        let next = x.lerp(coef, &y);
        if !next.is_finite() {
            return Err(diverged(k + 1, trace));
        }
        trace.residuals.push(r);
        trace.step_sizes.push(alpha);
        trace.iterates.push(next.clone());
        x = next;
    }
    let r = map.apply(&x)?.distance(&x);
    trace.final_residual = r;
    trace.converged = r <= config.residual_tol;
    Ok(trace)
}

fn diverged(iteration: usize, mut trace: Trace) -> Error {
    trace.final_residual = f64::NAN;
    Error::Diverged {
        iteration,
        trace: Box::new(trace),
    }
}

/// Applies `map` exactly `n` times, recording a trace with constant step
/// `alpha` under normalization `relaxation`.
fn run_fixed(map: &Operator, x0: &Point, n: usize, relaxation: f64, alpha: f64) -> Result<Trace> {
    let mut trace = Trace::start(x0.clone(), relaxation);
    let mut x = x0.clone();
    x.check_dim(map.dim())?;
    for k in 0..n {
        let y = map.apply(&x)?;
        if !y.is_finite() {
            return Err(diverged(k + 1, trace));
        }
        trace.residuals.push(y.distance(&x));
        trace.step_sizes.push(alpha);
        trace.iterates.push(y.clone());
        x = y;
    }
    trace.final_residual = map.apply(&x)?.distance(&x);
    Ok(trace)
}

/// Alternating projections `x^{k+1} = P_B P_A x^k` for `n` steps.
///
/// Recorded as the product iteration with `lambda = mu = 1`
/// (`nu = 4/3`, `alpha_k = 4/3`).
pub fn run_map(a: &ConvexSet, b: &ConvexSet, x0: &Point, n: usize) -> Result<Trace> {
    let map = compose(&projection_operator(b), &projection_operator(a))?;
    let nu = 4.0 / 3.0;
    let mut trace = run_fixed(&map, x0, n, nu, nu)?;
    trace.converged = trace.final_residual == 0.0;
    Ok(trace)
}

/// Douglas-Rachford `x^{k+1} = x^k + 1/2 ((P_B)_2 (P_A)_2 x^k - x^k)` for `n`
/// steps.
///
/// `lambda mu = 4` lies outside the product hypothesis, so this is a
/// standalone driver. Residuals are measured against the reflection product
/// `R_B R_A`, and steps are recorded as `alpha_k = 1` with normalization 2.
pub fn run_dr(a: &ConvexSet, b: &ConvexSet, x0: &Point, n: usize) -> Result<Trace> {
    let dr = generalized_dr(a, b, 2.0, 2.0, 0.5)?;
    let mut trace = run_fixed(&dr, x0, n, 2.0, 1.0)?;
    // |V x - x| = |R_B R_A x - x| / 2
    for r in trace.residuals.iter_mut() {
        *r *= 2.0;
    }
    trace.final_residual *= 2.0;
    trace.converged = trace.final_residual == 0.0;
    Ok(trace)
}
