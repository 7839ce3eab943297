use std::fmt;

use crate::geometry::Point;

/// One sampled point where an inequality failed by more than the tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub probe: String,
    pub point: Point,
    pub margin: f64,
}

/// Outcome of a sampled inequality probe.
///
/// `margin` is `allowed - actual` for each checked inequality, so a
/// non-negative margin means it holds exactly; the probe passes when every
/// margin is at least `-tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub name: String,
    pub delta_hat: Option<f64>,
    pub kappa_hat: Option<f64>,
    pub violations: Vec<Violation>,
    pub passed: bool,
    /// The bound degenerates (e.g. `lambda == mu` for the product lower bound)
    /// and nothing was checked.
    pub vacuous: bool,
    pub min_margin: f64,
    pub samples: usize,
    pub seed: u64,
}

impl RegularityReport {
    pub(crate) fn new(name: impl Into<String>, seed: u64) -> Self {
        Self {
            name: name.into(),
            delta_hat: None,
            kappa_hat: None,
            violations: Vec::new(),
            passed: true,
            vacuous: false,
            min_margin: f64::INFINITY,
            samples: 0,
            seed,
        }
    }

    pub(crate) fn vacuous(name: impl Into<String>, seed: u64) -> Self {
        Self {
            vacuous: true,
            ..Self::new(name, seed)
        }
    }

    pub(crate) fn record(&mut self, x: &Point, margin: f64, tol: f64) {
        self.samples += 1;
        self.min_margin = self.min_margin.min(margin);
        if !(margin >= -tol) {
            self.passed = false;
            self.violations.push(Violation {
                probe: self.name.clone(),
                point: x.clone(),
                margin,
            });
        }
    }

    pub fn outcome(&self) -> ProbeOutcome {
        ProbeOutcome {
            name: self.name.clone(),
            passed: self.passed,
            vacuous: self.vacuous,
            min_margin: self.min_margin,
            samples: self.samples,
            seed: Some(self.seed),
        }
    }
}

/// The line-oriented summary of any probe:
///
/// ```text
/// PROBE <name> PASS|FAIL margin=<min margin> samples=<n> seed=<s>
/// ```
///
/// Vacuous probes print as `PASS` with a trailing ` vacuous`; probes that
/// do not sample print `seed=-`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeOutcome {
    pub name: String,
    pub passed: bool,
    pub vacuous: bool,
    pub min_margin: f64,
    pub samples: usize,
    pub seed: Option<u64>,
}

impl ProbeOutcome {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl fmt::Display for ProbeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "PROBE {} {status} margin={:e} samples={}",
            self.name, self.min_margin, self.samples
        )?;
        match self.seed {
            Some(s) => write!(f, " seed={s}")?,
            None => write!(f, " seed=-")?,
        }
        if self.vacuous {
            write!(f, " vacuous")?;
        }
        Ok(())
    }
}
