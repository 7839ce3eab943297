//! Experiment configuration: a single JSON document.
//!
//! ```json
//! {
//!   "problem": {
//!     "sets": [ {"type": "hyperplane", "normal": [0, 1], "offset": 0},
//!               {"type": "affine", "anchor": [0, 0], "basis": [[0.866, 0.5]]} ],
//!     "intersection": {"type": "affine", "anchor": [0, 0]},
//!     "solution": [0, 0]
//!   },
//!   "methods": [
//!     {"name": "map", "driver": "map"},
//!     {"name": "dr", "driver": "dr"},
//!     {"name": "new", "driver": "product", "lambda": 3, "mu": 1,
//!      "step": {"constant": 1}, "epsilon": 1}
//!   ],
//!   "x0": [1, 0],
//!   "iterations": 30,
//!   "seed": 0,
//!   "outputs": {"csv_dir": "out", "svg_dir": "out", "report": "out/report.txt"}
//! }
//! ```
//!
//! The first set is `A`, the second `B`. Product methods use
//! `T = (P_A)_lambda` and `U = (P_B)_mu` unless explicit `operators` are given.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::engine::StepPolicy;
use crate::error::Error;
use crate::geometry::{ConvexSet, Point};
use crate::operators::{compose, projection_operator, proximal, relax, Operator, ProxFunction};
use crate::theory::RelaxationPair;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub methods: Vec<MethodSpec>,
    pub x0: Point,
    pub iterations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeSpec>,
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub sets: Vec<ConvexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<ConvexSet>,
    /// Known solution; enables the error columns of the CSV output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<Point>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Driver {
    Map,
    Dr,
    Product,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub name: String,
    pub driver: Driver,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<StepPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Explicit `T` and `U`; `lambda` and `mu` are then their declared
    /// relaxation parameters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operators: Option<OperatorPair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorPair {
    pub t: OperatorSpec,
    pub u: OperatorSpec,
}

/// A tree of operators built from the problem's sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpec {
    Identity,
    /// Projection onto `problem.sets[index]`.
    Project(usize),
    Relax {
        op: Box<OperatorSpec>,
        lambda: f64,
    },
    /// `outer o inner`
    Compose {
        outer: Box<OperatorSpec>,
        inner: Box<OperatorSpec>,
    },
    Prox {
        f: ProxFunction,
        t: f64,
    },
}

impl OperatorSpec {
    pub fn build(&self, sets: &[ConvexSet], dim: usize) -> Result<Operator, CliError> {
        Ok(match self {
            Self::Identity => Operator::identity(dim),
            Self::Project(i) => {
                let set = sets.get(*i).ok_or_else(|| {
                    CliError::config(format!(
                        "operator references set {i}, but only {} sets exist",
                        sets.len()
                    ))
                })?;
                projection_operator(set)
            }
            Self::Relax { op, lambda } => relax(&op.build(sets, dim)?, *lambda)?,
            Self::Compose { outer, inner } => compose(&outer.build(sets, dim)?, &inner.build(sets, dim)?)?,
            Self::Prox { f, t } => proximal(f, *t, dim)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_samples() -> usize {
    1000
}

fn default_tolerance() -> f64 {
    crate::diagnostics::DEFAULT_TOLERANCE
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            center: None,
            radius: None,
            samples: default_samples(),
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Directory for per-method trace CSVs.
    pub csv_dir: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg_dir: Option<PathBuf>,
    pub report: PathBuf,
    /// Where `verify` writes its probe lines; defaults to `verify.txt` next
    /// to `report`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify_report: Option<PathBuf>,
}

impl Outputs {
    /// Resolves relative paths against `base`.
    pub fn resolve(&self, base: &Path) -> Outputs {
        let join = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        Outputs {
            csv_dir: join(&self.csv_dir),
            svg_dir: self.svg_dir.as_deref().map(join),
            report: join(&self.report),
            verify_report: self.verify_report.as_deref().map(join),
        }
    }

    pub fn verify_report_path(&self) -> PathBuf {
        self.verify_report
            .clone()
            .unwrap_or_else(|| self.report.with_file_name("verify.txt"))
    }
}

/// A product method with everything resolved.
#[derive(Clone, Debug)]
pub struct ProductMethod {
    pub pair: RelaxationPair,
    pub step: StepPolicy,
    pub epsilon: f64,
    /// True when `T` and `U` are the default relaxed projections onto `A` and `B`.
    pub set_backed: bool,
}

impl MethodSpec {
    pub fn product(&self) -> Result<ProductMethod, CliError> {
        let (Some(lambda), Some(mu)) = (self.lambda, self.mu) else {
            return Err(CliError::config(format!(
                "method '{}': product driver needs lambda and mu",
                self.name
            )));
        };
        let pair = RelaxationPair::new(lambda, mu)
            .map_err(|e| CliError::validation(format!("method '{}': {e}", self.name)))?;
        let step = self.step.clone().unwrap_or(StepPolicy::Constant(1.0));
        let epsilon = self.epsilon.unwrap_or_else(|| step.widest_epsilon());
        Ok(ProductMethod {
            pair,
            step,
            epsilon,
            set_backed: self.operators.is_none(),
        })
    }

    /// `(T, U)` for a product method.
    pub fn operators(&self, sets: &[ConvexSet], dim: usize) -> Result<(Operator, Operator), CliError> {
        match &self.operators {
            Some(ops) => Ok((ops.t.build(sets, dim)?, ops.u.build(sets, dim)?)),
            None => {
                let m = self.product()?;
                Ok((
                    relax(&projection_operator(&sets[0]), m.pair.lambda())?,
                    relax(&projection_operator(&sets[1]), m.pair.mu())?,
                ))
            }
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.methods.is_empty() {
            return Err(CliError::validation("methods list is empty"));
        }
        if self.iterations < 1 {
            return Err(CliError::validation("iterations must be >= 1"));
        }
        if self.problem.sets.len() < 2 {
            return Err(CliError::validation("problem needs at least two sets (A and B)"));
        }
        let dim = self.dim();
        let mismatch =
            |what: &str, found: usize| CliError::dimension(format!("{what} has dimension {found}, x0 has {dim}"));
        for (i, s) in self.problem.sets.iter().enumerate() {
            if s.dim() != dim {
                return Err(mismatch(&format!("set {i}"), s.dim()));
            }
        }
        if let Some(c) = &self.problem.intersection {
            if c.dim() != dim {
                return Err(mismatch("intersection", c.dim()));
            }
        }
        if let Some(s) = &self.problem.solution {
            if s.dim() != dim {
                return Err(mismatch("solution", s.dim()));
            }
        }
        if let Some(ProbeSpec { center: Some(c), .. }) = &self.probe {
            if c.dim() != dim {
                return Err(mismatch("probe center", c.dim()));
            }
        }
        let mut names = std::collections::BTreeSet::new();
        for m in &self.methods {
            if m.name.is_empty()
                || !m
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
            {
                return Err(CliError::config(format!(
                    "method name '{}' must be [A-Za-z0-9_-]+",
                    m.name
                )));
            }
            if !names.insert(m.name.as_str()) {
                return Err(CliError::config(format!("duplicate method name '{}'", m.name)));
            }
            if m.driver == Driver::Product {
                let p = m.product()?;
                crate::engine::IterationConfig::new(p.pair, self.x0.clone())
                    .with_steps(p.step, p.epsilon)
                    .validate()
                    .map_err(|e| CliError::validation(format!("method '{}': {e}", m.name)))?;
                if let Some(ops) = &m.operators {
                    ops.t.build(&self.problem.sets, dim)?;
                    ops.u.build(&self.problem.sets, dim)?;
                }
            }
        }
        Ok(())
    }

    /// Two lines through the origin at angle pi/6 (A the x-axis), started at
    /// `(1, 0)` and run for 30 steps with alternating projections,
    /// Douglas-Rachford, and the product iteration with `T = (P_A)_3`,
    /// `U = P_B` and step `1/4`.
    pub fn paper_example(out_dir: &Path) -> Self {
        let a = ConvexSet::hyperplane(Point::unit(2, 1), 0.0).expect("valid normal");
        let b = ConvexSet::line_at_angle(PI / 6.0);
        let origin = Point::zeros(2);
        ExperimentConfig {
            problem: Problem {
                sets: vec![a, b],
                intersection: Some(ConvexSet::AffineSubspace {
                    anchor: origin.clone(),
                    basis: vec![],
                }),
                solution: Some(origin),
            },
            methods: vec![
                MethodSpec::simple("map", Driver::Map),
                MethodSpec::simple("dr", Driver::Dr),
                MethodSpec {
                    lambda: Some(3.0),
                    mu: Some(1.0),
                    step: Some(StepPolicy::Constant(1.0)),
                    epsilon: Some(1.0),
                    ..MethodSpec::simple("new", Driver::Product)
                },
            ],
            x0: Point::unit(2, 0),
            iterations: 30,
            seed: 0,
            probe: None,
            outputs: Outputs {
                csv_dir: out_dir.to_path_buf(),
                svg_dir: Some(out_dir.to_path_buf()),
                report: out_dir.join("report.txt"),
                verify_report: None,
            },
        }
    }
}

impl MethodSpec {
    pub fn simple(name: &str, driver: Driver) -> Self {
        Self {
            name: name.into(),
            driver,
            lambda: None,
            mu: None,
            step: None,
            epsilon: None,
            operators: None,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => CliError::dimension(e.to_string()),
            _ => CliError::validation(e.to_string()),
        }
    }
}
