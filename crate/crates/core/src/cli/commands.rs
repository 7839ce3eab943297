//! The three subcommands.

use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};

use super::config::{Driver, ExperimentConfig, Outputs, ProbeSpec};
use super::output::{fmt_f64, write_log_errors_csv, write_trace_csv};
use super::svg::{log_error_svg, trajectory_svg, SvgError};
use super::CliError;
use crate::diagnostics::{
    ball_image_check, cutter_check, demicontraction_check, fejer_check, lb1_check, lb2_check, pair_regularity_estimate,
    rate_certificate, relaxed_cutter_check, sample_ball, ProbeConfig, ProbeOutcome,
};
use crate::engine::{iterate, run_dr, run_map, IterationConfig, StepPolicy, Trace};
use crate::geometry::{intersect_affine, ConvexSet, Point};
use crate::operators::{compose, generalized_dr, projection_operator, relax};
use crate::theory::{delta_projections, demicontraction_rho, nu, RelaxationPair};

/// Command-line values that take precedence over the config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub iterations: Option<usize>,
    pub tolerance: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), CliError> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = self.iterations {
            cfg.iterations = n;
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::config(format!(
                    "--tol must be a finite non-negative number, got {t}"
                )));
            }
            cfg.probe.get_or_insert_with(ProbeSpec::default).tolerance = t;
        }
        cfg.validate()
    }
}

pub struct MethodRun {
    pub name: String,
    pub driver: Driver,
    pub trace: Trace,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::io(format!("{}: {e}", path.display()))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    ExperimentConfig::from_json(&text)
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

/// Runs every method for exactly `cfg.iterations` steps (the product
/// iteration stops early only on an exact fixed point).
pub fn run_methods(cfg: &ExperimentConfig) -> Result<Vec<MethodRun>, CliError> {
    let (a, b) = (&cfg.problem.sets[0], &cfg.problem.sets[1]);
    let mut runs = Vec::new();
    for m in &cfg.methods {
        let trace = match m.driver {
            Driver::Map => run_map(a, b, &cfg.x0, cfg.iterations)?,
            Driver::Dr => run_dr(a, b, &cfg.x0, cfg.iterations)?,
            Driver::Product => {
                let p = m.product()?;
                let (t, u) = m.operators(&cfg.problem.sets, cfg.dim())?;
                let ic = IterationConfig::new(p.pair, cfg.x0.clone())
                    .with_steps(p.step, p.epsilon)
                    .with_max_iter(cfg.iterations)
                    .with_residual_tol(f64::MIN_POSITIVE);
                iterate(&t, &u, &ic)?
            }
        };
        info!(
            "{}: {} steps, final residual {:e}",
            m.name,
            trace.transitions(),
            trace.final_residual
        );
        runs.push(MethodRun {
            name: m.name.clone(),
            driver: m.driver,
            trace,
        });
    }
    Ok(runs)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Writes CSVs, SVGs and the run report. Returns the report text.
pub fn write_outputs(cfg: &ExperimentConfig, out: &Outputs, runs: &[MethodRun]) -> Result<String, CliError> {
    let solution = cfg.problem.solution.as_ref();
    for r in runs {
        let mut buf = Vec::new();
        write_trace_csv(&mut buf, &r.trace, solution).map_err(|e| CliError::io(e.to_string()))?;
        write_file(&out.csv_dir.join(format!("{}.csv", r.name)), &buf)?;
    }
    let log_errors: Option<Vec<(&str, Vec<f64>)>> = solution.map(|s| {
        runs.iter()
            .map(|r| {
                (
                    r.name.as_str(),
                    r.trace.iterates.iter().map(|x| x.distance(s).log10()).collect(),
                )
            })
            .collect()
    });
    if let Some(series) = &log_errors {
        let mut buf = Vec::new();
        write_log_errors_csv(&mut buf, series).map_err(|e| CliError::io(e.to_string()))?;
        write_file(&out.csv_dir.join("log_errors.csv"), &buf)?;
    }
    if let Some(dir) = &out.svg_dir {
        let paths: Vec<(&str, &[Point])> = runs
            .iter()
            .map(|r| (r.name.as_str(), r.trace.iterates.as_slice()))
            .collect();
        match trajectory_svg(&paths) {
            Ok(svg) => write_file(&dir.join("trajectories.svg"), svg.as_bytes())?,
            Err(e @ SvgError::NotPlanar(_)) => warn!("skipping trajectory plot: {e}"),
            Err(e) => return Err(CliError::config(e.to_string())),
        }
        if let Some(series) = &log_errors {
            match log_error_svg(series) {
                Ok(svg) => write_file(&dir.join("log_errors.svg"), svg.as_bytes())?,
                Err(e) => warn!("skipping error plot: {e}"),
            }
        }
    }
    let mut report = format!(
        "RUN seed={} iterations={} dim={}\n",
        cfg.seed,
        cfg.iterations,
        cfg.dim()
    );
    for r in runs {
        let driver = serde_json::to_value(r.driver).expect("enum serializes");
        report.push_str(&format!(
            "METHOD {} driver={} transitions={} final_residual={}",
            r.name,
            driver.as_str().unwrap_or_default(),
            r.trace.transitions(),
            fmt_f64(r.trace.final_residual)
        ));
        if let Some(s) = solution {
            report.push_str(&format!(" final_error={}", fmt_f64(r.trace.last().distance(s))));
        }
        report.push('\n');
    }
    write_file(&out.report, report.as_bytes())?;
    Ok(report)
}

/// Runs the built-in two-lines example and writes its outputs plus a
/// `config.json` that reproduces them with `cutterkit run`.
pub fn cmd_example_paper(out: &Path, overrides: &Overrides) -> Result<String, CliError> {
    let mut cfg = ExperimentConfig::paper_example(Path::new("."));
    cfg.outputs.report = PathBuf::from("report.txt");
    overrides.apply(&mut cfg)?;
    let text = serde_json::to_string_pretty(&cfg).expect("config serializes") + "\n";
    write_file(&out.join("config.json"), text.as_bytes())?;
    let runs = run_methods(&cfg)?;
    write_outputs(&cfg, &cfg.outputs.resolve(out), &runs)
}

pub fn cmd_run(path: &Path, overrides: &Overrides) -> Result<String, CliError> {
    let mut cfg = load_config(path)?;
    overrides.apply(&mut cfg)?;
    let runs = run_methods(&cfg)?;
    write_outputs(&cfg, &cfg.outputs.resolve(&base_dir(path)), &runs)
}

/// Outcome of `cutterkit verify`.
#[derive(Clone, Debug)]
pub struct Verification {
    pub outcomes: Vec<ProbeOutcome>,
    /// `ESTIMATE` lines with the constants used.
    pub estimates: Vec<String>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn report(&self) -> String {
        let mut s = String::new();
        for e in &self.estimates {
            s.push_str(e);
            s.push('\n');
        }
        for o in &self.outcomes {
            s.push_str(&o.to_string());
            s.push('\n');
        }
        let failed = self.outcomes.iter().filter(|o| !o.passed).count();
        let status = if failed == 0 { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "VERIFY {status} probes={} failed={failed}\n",
            self.outcomes.len()
        ));
        s
    }
}

/// Residual tolerance and step budget for the runs behind the trace probes.
const VERIFY_RESIDUAL_TOL: f64 = 1e-12;
const VERIFY_MIN_ITER: usize = 10_000;

fn intersection(cfg: &ExperimentConfig) -> Result<ConvexSet, CliError> {
    if let Some(c) = &cfg.problem.intersection {
        return Ok(c.clone());
    }
    let (a, b) = (&cfg.problem.sets[0], &cfg.problem.sets[1]);
    if a.is_affine() && b.is_affine() {
        return Ok(intersect_affine(a, b)?);
    }
    Err(CliError::validation(
        "verify needs problem.intersection when the sets are not both affine",
    ))
}

fn skipped(name: String) -> ProbeOutcome {
    ProbeOutcome {
        name,
        passed: true,
        vacuous: true,
        min_margin: f64::INFINITY,
        samples: 0,
        seed: None,
    }
}

/// Samples every inequality the hypotheses promise, for each method.
pub fn verify(cfg: &ExperimentConfig) -> Result<Verification, CliError> {
    let spec = cfg.probe.clone().unwrap_or_default();
    let c = intersection(cfg)?;
    let center = c.project(spec.center.as_ref().unwrap_or(&cfg.x0))?;
    let radius = spec.radius.unwrap_or_else(|| cfg.x0.distance(&center).max(1.0));
    let probe = ProbeConfig::new(center.clone(), radius)?
        .with_samples(spec.samples)
        .with_seed(cfg.seed)
        .with_tolerance(spec.tolerance);
    let mut fixed = vec![center.clone()];
    for x in sample_ball(&center, radius, 8, cfg.seed.wrapping_add(1)) {
        fixed.push(c.project(&x)?);
    }
    let dist_c = |x: &Point| c.distance_unchecked(x);
    let (a, b) = (&cfg.problem.sets[0], &cfg.problem.sets[1]);

    let mut v = Verification {
        outcomes: Vec::new(),
        estimates: Vec::new(),
    };
    for m in &cfg.methods {
        let n = &m.name;
        if m.driver == Driver::Dr {
            let dr = generalized_dr(a, b, 2.0, 2.0, 0.5)?;
            v.outcomes.push(
                cutter_check(&dr, &fixed, &probe)?
                    .outcome()
                    .with_name(format!("{n}.cutter")),
            );
            let tr = run_dr(a, b, &cfg.x0, cfg.iterations)?;
            let fe = fejer_check(&tr, &center, None, spec.tolerance);
            v.outcomes.push(fe.outcome().with_name(format!("{n}.fejer")));
            continue;
        }

        let (pair, step, eps, set_backed, t, u) = if m.driver == Driver::Map {
            let pa = projection_operator(a);
            let pb = projection_operator(b);
            (
                RelaxationPair::new(1.0, 1.0)?,
                StepPolicy::Constant(4.0 / 3.0),
                2.0 / 3.0,
                true,
                pa,
                pb,
            )
        } else {
            let p = m.product()?;
            let (t, u) = m.operators(&cfg.problem.sets, cfg.dim())?;
            (p.pair, p.step, p.epsilon, p.set_backed, t, u)
        };
        let (l, mu) = (pair.lambda(), pair.mu());
        let nu = nu(pair);

        for (tag, op, r) in [("t", &t, l), ("u", &u, mu)] {
            let rc = relaxed_cutter_check(op, r, &fixed, &probe)?;
            v.outcomes
                .push(rc.outcome().with_name(format!("{n}.{tag}.relaxed_cutter")));
            let dc = demicontraction_check(op, demicontraction_rho(r), &fixed, &probe)?;
            v.outcomes
                .push(dc.outcome().with_name(format!("{n}.{tag}.demicontraction")));
            let bi = ball_image_check(op, &probe.clone().for_relaxation(r))?;
            v.outcomes.push(bi.outcome().with_name(format!("{n}.{tag}.ball_image")));
        }
        let product = relax(&compose(&u, &t)?, 1.0 / nu)?;
        v.outcomes.push(
            cutter_check(&product, &fixed, &probe)?
                .outcome()
                .with_name(format!("{n}.product.cutter")),
        );
        v.outcomes.push(
            lb1_check(&t, &u, pair, &fixed, &probe)?
                .outcome()
                .with_name(format!("{n}.lb1")),
        );
        v.outcomes.push(
            lb2_check(&t, &u, pair, &dist_c, &probe)?
                .outcome()
                .with_name(format!("{n}.lb2")),
        );

        let ic = IterationConfig::new(pair, cfg.x0.clone())
            .with_steps(step, eps)
            .with_max_iter(cfg.iterations.max(VERIFY_MIN_ITER))
            .with_residual_tol(VERIFY_RESIDUAL_TOL);
        let tr = iterate(&t, &u, &ic)?;
        let fe = fejer_check(&tr, &center, Some(&dist_c), spec.tolerance);
        v.outcomes.push(fe.outcome().with_name(format!("{n}.fejer")));

        if !set_backed {
            v.outcomes.push(skipped(format!("{n}.rate")));
            continue;
        }
        let kappa = pair_regularity_estimate(a, b, &c, &probe)?.max(1.0);
        let delta = delta_projections(pair, kappa)?;
        let x_star = match &cfg.problem.solution {
            Some(s) => s.clone(),
            None => c.project(tr.last())?,
        };
        let rate = rate_certificate(&tr, &x_star, eps, delta, nu, spec.tolerance)?;
        v.estimates.push(format!(
            "ESTIMATE {n} nu={} kappa_hat={} delta={} rate_bound={} q_tail={} status={:?}",
            fmt_f64(nu),
            fmt_f64(kappa),
            fmt_f64(delta),
            fmt_f64(rate.bound),
            fmt_f64(rate.q_tail),
            rate.status
        ));
        v.outcomes.push(rate.outcome().with_name(format!("{n}.rate")));
    }
    Ok(v)
}

pub fn cmd_verify(path: &Path, overrides: &Overrides) -> Result<(String, bool), CliError> {
    let mut cfg = load_config(path)?;
    overrides.apply(&mut cfg)?;
    let v = verify(&cfg)?;
    let report = v.report();
    let out = cfg.outputs.resolve(&base_dir(path));
    write_file(&out.verify_report_path(), report.as_bytes())?;
    Ok((report, v.passed()))
}
