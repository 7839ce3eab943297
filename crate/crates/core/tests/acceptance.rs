//! Acceptance gate: one `ACCEPTANCE <n> PASS|FAIL <detail>` line per
//! criterion. Exits non-zero when any criterion fails.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{grid_kappa_two_lines, two_lines_at_pi_6, random_pair, HalfSpaceLine};
use cutterkit::cli::output::{read_table, Table};
use cutterkit::diagnostics::{
    cutter_check, demicontraction_check, fejer_check, lb1_check, lb2_check, pair_regularity_estimate, rate_certificate,
    relaxed_cutter_check, ProbeConfig, RateStatus,
};
use cutterkit::engine::{iterate, iterate_reformulated, run_dr, run_map, IterationConfig, StepPolicy};
use cutterkit::geometry::{ConvexSet, Point};
use cutterkit::operators::{compose, projection_operator, relax, relaxed_projections};
use cutterkit::point;
use cutterkit::theory::{
    delta_projections, demicontraction_rho, nu, rho_overrelax, rho_overrelax_piecewise, RelaxationPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("runtime {elapsed:?} exceeds {limit:?}"))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let n13 = nu(RelaxationPair::new(1.0, 3.0).map_err(|e| e.to_string())?);
    ensure(n13 == 4.0, || format!("nu(1,3) = {n13}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_pair(&mut rng);
        let (l, m) = (p.lambda(), p.mu());
        let v = nu(p);
        let lhs = 4.0 * (1.0 / l - 1.0 / v) * (1.0 / m - 1.0 / v);
        let rhs = (1.0 - 2.0 / v).powi(2);
        let err = (lhs - rhs).abs() / rhs.abs().max(1.0);
        worst = worst.max(err);
        ensure(err <= 1e-12, || format!("identity off by {err:e} at ({l}, {m})"))?;
        let s_nu = (v - 2.0).signum();
        let s_max = (l.max(m) - 2.0).signum();
        ensure(s_nu == s_max, || format!("trichotomy fails at ({l}, {m}): nu = {v}"))?;
        ensure(v >= l.max(m) - 1e-12, || format!("nu = {v} < max at ({l}, {m})"))?;
    }
    let tie = nu(RelaxationPair::new(2.0, 1.3).unwrap());
    ensure((tie - 2.0).abs() <= 1e-12, || format!("nu(2, 1.3) = {tie}"))?;
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("nu(1,3)=4, 10^4 pairs, worst identity error {worst:.1e}"))
}

fn run_example(out: &Path) -> Result<Duration, String> {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_cutterkit"))
        .args(["example-paper", "--out"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(status.status.success(), || {
        format!("example-paper exited with {}", status.status)
    })?;
    Ok(elapsed)
}

fn load(out: &Path, name: &str) -> Result<Table, String> {
    let f = std::fs::File::open(out.join(format!("{name}.csv"))).map_err(|e| e.to_string())?;
    read_table(f)
}

fn criterion_2() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let elapsed = run_example(dir.path())?;
    let s3 = 3f64.sqrt();
    let expected_first = [
        ("map", [0.75, s3 / 4.0]),
        ("dr", [0.75, s3 / 4.0]),
        ("new", [15.0 / 16.0, s3 / 16.0]),
    ];
    let mut problems = Vec::new();
    let mut finals = Vec::new();
    for (name, first) in expected_first {
        let t = load(dir.path(), name)?;
        ensure(t.rows.len() == 31, || format!("{name}: {} rows", t.rows.len()))?;
        let x1 = &t.rows[1][1..3];
        let off = (x1[0] - first[0]).abs().max((x1[1] - first[1]).abs());
        if off > 1e-12 {
            problems.push(format!("{name} first iterate off by {off:e}"));
        }
        let logs = t.column("log10_err").ok_or("missing log10_err")?;
        if let Some(k) = logs.windows(2).position(|w| !(w[1] < w[0])) {
            problems.push(format!("{name} log10 error not decreasing at k={}", k + 1));
        }
        let errs = t.column("err_norm").ok_or("missing err_norm")?;
        let last = errs[30];
        finals.push(format!("{name}={last:.4e}"));
        if !(last < 1e-2) {
            problems.push(format!("{name} final error {last:.6e} >= 1e-2"));
        }
        if name == "map" {
            // the start lies on A, so the first step contracts by cos(pi/6)
            for k in 1..30 {
                let q = errs[k + 1] / errs[k];
                if (q - 0.75).abs() > 1e-6 {
                    problems.push(format!("map ratio {q} at k={k}"));
                    break;
                }
            }
        }
    }
    if elapsed >= Duration::from_secs(1) {
        problems.push(format!("runtime {elapsed:?}"));
    }
    let summary = format!("final errors {}", finals.join(" "));
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", problems.join("; ")))
    }
}

fn criterion_3() -> Outcome {
    let sets = vec![
        ConvexSet::hyperplane(point![0, 1], 0.0).unwrap(),
        ConvexSet::line_at_angle(PI / 6.0),
        ConvexSet::half_space(point![1, 1], 0.5).unwrap(),
        ConvexSet::ball(point![0.5, -0.25], 0.75).unwrap(),
        ConvexSet::cuboid(point![-0.5, -1], point![1, 0.25]).unwrap(),
    ];
    let probe = ProbeConfig::new(point![0, 0], 2.0)
        .unwrap()
        .with_samples(1000)
        .with_seed(3)
        .with_tolerance(TOL);
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for set in &sets {
        let fixed: Vec<Point> = [point![0, 0], point![1.5, 1], point![-1, 0.3], point![0.2, -1.7]]
            .iter()
            .map(|x| set.project(x).unwrap())
            .collect();
        for lambda in [0.5, 1.0, 2.0, 3.0] {
            let t = relax(&projection_operator(set), lambda).unwrap();
            let rc = relaxed_cutter_check(&t, lambda, &fixed, &probe).map_err(|e| e.to_string())?;
            let dc =
                demicontraction_check(&t, demicontraction_rho(lambda), &fixed, &probe).map_err(|e| e.to_string())?;
            ensure(rc.passed && dc.passed, || {
                format!(
                    "lambda={lambda}: relaxed_cutter {} / demicontraction {}",
                    rc.min_margin, dc.min_margin
                )
            })?;
            worst = worst.min(rc.min_margin).min(dc.min_margin);
            count += 1;
        }
    }
    Ok(format!("{count} operators agree, worst margin {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let probe = ProbeConfig::new(point![0, 0], 2.0)
        .unwrap()
        .with_samples(10_000)
        .with_seed(4)
        .with_tolerance(TOL);
    let (a, b) = two_lines_at_pi_6();
    let pair = RelaxationPair::new(3.0, 1.0).unwrap();
    let (t, u) = relaxed_projections(&a, &b, 3.0, 1.0).unwrap();
    let w = relax(&compose(&u, &t).unwrap(), 1.0 / nu(pair)).unwrap();
    let r = cutter_check(&w, &[point![0, 0]], &probe).map_err(|e| e.to_string())?;
    ensure(r.passed, || format!("example pair: margin {:e}", r.min_margin))?;
    let mut worst = r.min_margin;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..20 {
        let g = HalfSpaceLine::random(&mut rng);
        let pair = random_pair(&mut rng);
        let (first, second) = if rng.random_bool(0.5) {
            (&g.half, &g.line)
        } else {
            (&g.line, &g.half)
        };
        let (t, u) = relaxed_projections(first, second, pair.lambda(), pair.mu()).unwrap();
        let w = relax(&compose(&u, &t).unwrap(), 1.0 / nu(pair)).unwrap();
        let r = cutter_check(&w, &g.fixed_points(), &probe).map_err(|e| e.to_string())?;
        ensure(r.passed, || {
            format!("random pair {i} {pair:?}: margin {:e}", r.min_margin)
        })?;
        worst = worst.min(r.min_margin);
    }
    Ok(format!("21 products are cutters, worst margin {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let probe = ProbeConfig::new(point![0, 0], 2.0)
        .unwrap()
        .with_samples(10_000)
        .with_seed(5)
        .with_tolerance(TOL);
    let (a, b) = two_lines_at_pi_6();
    let origin = |x: &Point| x.norm();
    let pair = RelaxationPair::new(3.0, 1.0).unwrap();
    let (t, u) = relaxed_projections(&a, &b, 3.0, 1.0).unwrap();
    let l1 = lb1_check(&t, &u, pair, &[point![0, 0]], &probe).map_err(|e| e.to_string())?;
    let l2 = lb2_check(&t, &u, pair, &origin, &probe).map_err(|e| e.to_string())?;
    ensure(l1.passed && l2.passed && !l2.vacuous, || {
        format!("example: lb1 {:e}, lb2 {:e}", l1.min_margin, l2.min_margin)
    })?;
    let mut worst = l1.min_margin.min(l2.min_margin);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..20 {
        let g = HalfSpaceLine::random(&mut rng);
        let pair = random_pair(&mut rng);
        ensure(!pair.is_symmetric(), || format!("drew lambda = mu at {i}"))?;
        let (first, second) = if rng.random_bool(0.5) {
            (&g.half, &g.line)
        } else {
            (&g.line, &g.half)
        };
        let (t, u) = relaxed_projections(first, second, pair.lambda(), pair.mu()).unwrap();
        let dist = |x: &Point| g.distance(x);
        let l1 = lb1_check(&t, &u, pair, &g.fixed_points(), &probe).map_err(|e| e.to_string())?;
        let l2 = lb2_check(&t, &u, pair, &dist, &probe).map_err(|e| e.to_string())?;
        ensure(l1.passed && l2.passed, || {
            format!(
                "random config {i} {pair:?}: lb1 {:e}, lb2 {:e}",
                l1.min_margin, l2.min_margin
            )
        })?;
        worst = worst.min(l1.min_margin).min(l2.min_margin);
    }

    let sym = RelaxationPair::new(1.5, 1.5).unwrap();
    let (t, u) = relaxed_projections(&a, &b, 1.5, 1.5).unwrap();
    let l2 = lb2_check(&t, &u, sym, &origin, &probe).map_err(|e| e.to_string())?;
    ensure(l2.vacuous && l2.passed, || "lb2 not vacuous for lambda = mu".into())?;
    Ok(format!(
        "lb1/lb2 on 21 configs, worst margin {worst:.2e}; lambda=mu vacuous"
    ))
}

fn criterion_6() -> Outcome {
    let origin = point![0, 0];
    let dist = |x: &Point| x.norm();
    let mut traces = Vec::new();
    let (a, b) = two_lines_at_pi_6();
    let x0 = point![1, 0];
    let (t, u) = relaxed_projections(&a, &b, 3.0, 1.0).unwrap();
    let cfg = IterationConfig::new(RelaxationPair::new(3.0, 1.0).unwrap(), x0.clone()).with_max_iter(100_000);
    traces.push(("new".to_string(), iterate(&t, &u, &cfg).map_err(|e| e.to_string())?));
    traces.push(("map".to_string(), run_map(&a, &b, &x0, 200).map_err(|e| e.to_string())?));
    traces.push(("dr".to_string(), run_dr(&a, &b, &x0, 300).map_err(|e| e.to_string())?));

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for i in 0..20 {
        let theta = rng.random_range(0.2..(PI - 0.2));
        let b = ConvexSet::line_at_angle(theta);
        let pair = random_pair(&mut rng);
        let eps = rng.random_range(0.1..1.0);
        let steps: Vec<f64> = (0..7).map(|_| rng.random_range(eps..(2.0 - eps))).collect();
        let phi = rng.random_range(0.0..2.0 * PI);
        let x0 = point![2.0 * phi.cos(), 2.0 * phi.sin()];
        let (t, u) = relaxed_projections(&a, &b, pair.lambda(), pair.mu()).unwrap();
        let cfg = IterationConfig::new(pair, x0)
            .with_steps(StepPolicy::Sequence(steps), eps)
            .with_max_iter(200_000);
        traces.push((format!("random{i}"), iterate(&t, &u, &cfg).map_err(|e| e.to_string())?));
    }

    let mut worst = f64::INFINITY;
    let mut steps = 0;
    for (name, tr) in &traces {
        ensure(tr.last().norm() < 1e-8, || {
            format!("{name} did not converge: |x_N| = {:e}", tr.last().norm())
        })?;
        let r = fejer_check(tr, &origin, Some(&dist), TOL);
        ensure(r.passed, || {
            format!("{name}: fails at iterate {:?}, {r:?}", r.failed_at)
        })?;
        worst = worst.min(r.min_margin());
        steps += r.transitions;
    }
    Ok(format!(
        "{} runs, {steps} steps, worst margin {worst:.2e}",
        traces.len()
    ))
}

fn criterion_7() -> Outcome {
    let (a, b) = two_lines_at_pi_6();
    let c = ConvexSet::affine(point![0, 0], &[]).unwrap();
    let probe = ProbeConfig::new(point![0, 0], 2.0)
        .unwrap()
        .with_samples(10_000)
        .with_seed(7)
        .with_tolerance(TOL);
    let kappa = pair_regularity_estimate(&a, &b, &c, &probe).map_err(|e| e.to_string())?;
    let oracle = grid_kappa_two_lines(PI / 6.0, 2.0, 800);
    ensure(kappa <= oracle * (1.0 + 1e-9) && kappa >= 0.99 * oracle, || {
        format!("kappa_hat {kappa} vs grid oracle {oracle}")
    })?;
    let pair = RelaxationPair::new(3.0, 1.0).unwrap();
    let delta = delta_projections(pair, kappa).map_err(|e| e.to_string())?;
    let (t, u) = relaxed_projections(&a, &b, 3.0, 1.0).unwrap();
    let cfg = IterationConfig::new(pair, point![1, 0]).with_max_iter(100_000);
    let tr = iterate(&t, &u, &cfg).map_err(|e| e.to_string())?;
    let rate = rate_certificate(&tr, &point![0, 0], 1.0, delta, nu(pair), TOL).map_err(|e| e.to_string())?;
    ensure(rate.status == RateStatus::Certified, || {
        format!("status {:?} at {:?}", rate.status, rate.failed_at)
    })?;
    ensure(rate.q_max < 1.0, || format!("empirical Q-factor {}", rate.q_max))?;
    Ok(format!(
        "kappa_hat={kappa:.4} (grid {oracle:.4}), delta={delta:.4e}, bound={:.12}, q_max={:.4}",
        rate.bound, rate.q_max
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let g = HalfSpaceLine::random(&mut rng);
        let pair = random_pair(&mut rng);
        let v = nu(pair);
        let eps = rng.random_range(0.05..1.0);
        let alphas: Vec<f64> = (0..5).map(|_| rng.random_range(eps..(2.0 - eps))).collect();
        let abars: Vec<f64> = alphas.iter().map(|a| a / v).collect();
        let x0 = point![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let (t, u) = relaxed_projections(&g.half, &g.line, pair.lambda(), pair.mu()).unwrap();
        let base = IterationConfig::new(pair, x0)
            .with_max_iter(60)
            .with_residual_tol(1e-300);
        let t1 =
            iterate(&t, &u, &base.clone().with_steps(StepPolicy::Sequence(alphas), eps)).map_err(|e| e.to_string())?;
        let t2 = iterate_reformulated(&t, &u, &base.with_steps(StepPolicy::Sequence(abars), eps / v))
            .map_err(|e| e.to_string())?;
        ensure(t1.iterates.len() == t2.iterates.len(), || {
            format!("config {i}: lengths differ")
        })?;
        for (x, y) in t1.iterates.iter().zip(&t2.iterates) {
            worst = worst.max(x.distance(y));
        }
        ensure(worst <= 1e-12, || {
            format!("config {i}: trajectories differ by {worst:e}")
        })?;
    }
    let mut rho_worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_pair(&mut rng);
        if p.lambda() == 2.0 || p.mu() == 2.0 {
            continue;
        }
        rho_worst = rho_worst.max((rho_overrelax(p) - rho_overrelax_piecewise(p)).abs());
    }
    ensure(rho_worst <= 1e-12, || format!("rho branches differ by {rho_worst:e}"))?;
    Ok(format!(
        "100 configs, worst gap {worst:.1e}; rho branches agree to {rho_worst:.1e}"
    ))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = dir.path().join("config.json");
    std::fs::copy(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/paper-example.json"),
        &cfg,
    )
    .map_err(|e| e.to_string())?;
    let mut text = std::fs::read_to_string(&cfg).map_err(|e| e.to_string())?;
    text = text.replace("../out/paper-example", "out");
    std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let s = Command::new(env!("CARGO_BIN_EXE_cutterkit"))
            .args(["run", "--seed", "42"])
            .arg(&cfg)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(s.status.success(), || format!("run exited with {}", s.status))?;
        let mut files = Vec::new();
        for name in ["map", "dr", "new", "log_errors"] {
            files.push(std::fs::read(dir.path().join("out").join(format!("{name}.csv"))).map_err(|e| e.to_string())?);
        }
        snapshots.push(files);
        std::fs::remove_dir_all(dir.path().join("out")).map_err(|e| e.to_string())?;
    }
    ensure(snapshots[0] == snapshots[1], || {
        "CSV outputs differ between runs".into()
    })?;
    Ok("two runs produce byte-identical CSVs".into())
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut failed = 0;
    for (n, f) in criteria {
        match f() {
            Ok(detail) => println!("ACCEPTANCE {n} PASS {detail}"),
            Err(detail) => {
                failed += 1;
                println!("ACCEPTANCE {n} FAIL {detail}");
            }
        }
    }
    println!("ACCEPTANCE SUMMARY {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
