//! The ten-point acceptance suite: every release-gating check in one place,
//! shared by the `all` subcommand and the integration test.

use crate::experiments::{
    corollary_forms, default_lambda_schedule, envelope_check, gy_reduction, limit_sweep,
    truncation_study, verify_heart, sandwich_check,
};
use crate::measure::{
    exact_single_measure, grid_bruteforce_measure, required_grid_halfwidth, LevelSetQuery,
    MeasureError,
};
use crate::report::sweep_csv_string;
use crate::rng::CounterRng;
use crate::weaknorm::{
    check_monotone, check_quasi_triangle, exact_weak_lp_p_power, gagliardo_seminorm_p_power,
    GagliardoValue,
};
use crate::TestFunction;
use std::time::Instant;

#[derive(Clone, Debug)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

const SEED: u64 = 42;

fn ball_sym() -> TestFunction {
    TestFunction::ball(1, 1.0, 1.0).unwrap()
}

fn chi01() -> TestFunction {
    TestFunction::shifted(vec![0.5], TestFunction::ball(1, 1.0, 0.5).unwrap()).unwrap()
}

fn chi45() -> TestFunction {
    TestFunction::shifted(vec![4.5], TestFunction::ball(1, 1.0, 0.5).unwrap()).unwrap()
}

fn zero1() -> TestFunction {
    TestFunction::zero(1).unwrap()
}

fn signed_step() -> TestFunction {
    TestFunction::radial_step(1, vec![0.5, 1.0], vec![1.0, -1.0]).unwrap()
}

/// 1: with `v = 0` and `u` the symmetric unit indicator, the scaled measure
/// equals 4 at every lambda — Monte Carlo within 3 sigma, the closed form to
/// 1e-12, and the counting grid within 1%.
fn heart_identity() -> Result<(bool, String), MeasureError> {
    let u = ball_sym();
    let report = verify_heart(&u, 1.0, &[0.1, 1.0, 10.0], 1_000_000, SEED)?;
    let mut pass = report.pass();
    let mut notes = vec![format!("mc pass={}", report.pass())];

    for lambda in [0.1, 1.0, 10.0] {
        let q = LevelSetQuery::new(u.clone(), zero1(), 1.0, lambda)?;
        let exact = lambda * exact_single_measure(&q)?.measure;
        let ok = (exact - 4.0).abs() < 1e-12;
        pass &= ok;
        notes.push(format!("exact@{lambda}={exact:.3e}"));

        let halfwidth = required_grid_halfwidth(&q)?;
        let grid = lambda * grid_bruteforce_measure(&q, halfwidth, 1e-3)?.measure;
        let gok = (grid - 4.0).abs() < 0.04;
        pass &= gok;
        notes.push(format!("grid@{lambda}={grid:.6}"));
    }
    Ok((pass, notes.join(", ")))
}

/// 2: the distant-pair sweep extrapolates to 4 within 2%.
fn limit_law() -> Result<(bool, String), MeasureError> {
    let sweep = limit_sweep(&chi01(), &chi45(), 1.0, &default_lambda_schedule(), 1_000_000, SEED)?;
    let rel = (sweep.extrapolated_limit - 4.0).abs() / 4.0;
    Ok((rel < 0.02, format!("limit={:.5}, rel err={:.4}", sweep.extrapolated_limit, rel)))
}

/// 3: the odd-pair reduction hits `2 kappa_1 ||u||_1` for the unit and the
/// doubled indicator.
fn odd_pair_reduction() -> Result<(bool, String), MeasureError> {
    let (r1, s1) = gy_reduction(&chi01(), 1.0, &default_lambda_schedule(), 1_000_000, SEED)?;
    let doubled = TestFunction::scaled(2.0, chi01()).map_err(|e| MeasureError::Usage(e.to_string()))?;
    let (r2, s2) = gy_reduction(&doubled, 1.0, &default_lambda_schedule(), 1_000_000, SEED)?;
    Ok((
        r1.pass() && r2.pass(),
        format!(
            "limits {:.4} (target 4), {:.4} (target 8)",
            s1.extrapolated_limit, s2.extrapolated_limit
        ),
    ))
}

/// 4: for six compactly supported pairs, the scaled estimate (with 3-sigma
/// slack) and, where the box is tractable, the grid value sit inside the
/// two-sided envelope at every lambda of the default schedule.
fn envelope_criterion() -> Result<(bool, String), MeasureError> {
    let pairs: Vec<(TestFunction, TestFunction, f64)> = vec![
        (ball_sym(), zero1(), 1.0),
        (chi01(), chi45(), 5.0),
        (chi01(), TestFunction::negated(chi01()), 1.0),
        (
            TestFunction::scaled(2.0, chi01()).unwrap(),
            chi01(),
            1.0,
        ),
        (signed_step(), zero1(), 1.0),
        (
            TestFunction::radial_step(1, vec![0.5, 1.0], vec![2.0, 1.0]).unwrap(),
            ball_sym(),
            1.0,
        ),
    ];
    let schedule = default_lambda_schedule();
    let mut pass = true;
    let mut notes = Vec::new();
    for (i, (u, v, r)) in pairs.iter().enumerate() {
        let rep = envelope_check(u, v, 1.0, *r, &schedule, 1_000_000, SEED + i as u64)?;
        pass &= rep.pass();
        let grids = rep.verdicts.iter().filter(|vd| vd.name.starts_with("grid")).count();
        notes.push(format!("pair {i}: pass={}, grid checks={}", rep.pass(), grids / 2));
    }
    Ok((pass, notes.join("; ")))
}

/// 5: the quasinorm sandwich holds for ten pairs at p in {1, 2}.
fn sandwich_criterion() -> Result<(bool, String), MeasureError> {
    let ball2 = TestFunction::ball(2, 1.0, 1.0).unwrap();
    let pairs: Vec<(TestFunction, TestFunction)> = vec![
        (chi01(), chi01()),
        (chi01(), zero1()),
        (ball_sym(), ball_sym()),
        (ball_sym(), TestFunction::negated(ball_sym())),
        (chi01(), chi45()),
        (signed_step(), ball_sym()),
        (TestFunction::scaled(2.0, chi01()).unwrap(), chi01()),
        (
            TestFunction::radial_step(1, vec![0.5, 1.0], vec![2.0, 1.0]).unwrap(),
            zero1(),
        ),
        (TestFunction::abs(signed_step()), signed_step()),
        (ball2.clone(), TestFunction::negated(ball2)),
    ];
    let mut pass = true;
    let mut failures = Vec::new();
    for (i, (u, v)) in pairs.iter().enumerate() {
        for &p in &[1.0, 2.0] {
            let rep = sandwich_check(u, v, p, 100_000, SEED + i as u64)?;
            if !rep.pass() {
                pass = false;
                failures.push(format!("pair {i} p={p}"));
            }
        }
    }
    let detail = if failures.is_empty() {
        format!("{} pair/p combinations pass", pairs.len() * 2)
    } else {
        format!("failed: {}", failures.join(", "))
    };
    Ok((pass, detail))
}

/// 6: quasi-triangle and monotonicity of the exact weak quasinorm on 50
/// randomized shared-edge step functions, at p in {1, 2, 3}.
fn quasinorm_properties() -> Result<(bool, String), MeasureError> {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for case in 0..50u64 {
        let mut rng = CounterRng::for_sample(SEED, 6, case);
        let dim = 1 + (rng.next_u64() % 2) as usize;
        let k = 2 + (rng.next_u64() % 3) as usize;
        let mut edges: Vec<f64> = (0..k).map(|_| 0.05 + 1.95 * rng.next_f64()).collect();
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let draw = |rng: &mut CounterRng, n: usize| -> Vec<f64> {
            (0..n).map(|_| 6.0 * rng.next_f64() - 3.0).collect()
        };
        let fv = draw(&mut rng, edges.len());
        let gv = draw(&mut rng, edges.len());
        let sum: Vec<f64> = fv.iter().zip(&gv).map(|(a, b)| a + b).collect();
        // |h| >= |f| pointwise: inflate each value in place
        let hv: Vec<f64> = fv.iter().map(|v| v * (1.0 + rng.next_f64())).collect();

        let step = |vals: &[f64]| TestFunction::radial_step(dim, edges.clone(), vals.to_vec()).unwrap();
        let (f, g, fg, h) = (step(&fv), step(&gv), step(&sum), step(&hv));
        for &p in &[1.0, 2.0, 3.0] {
            let wf = exact_weak_lp_p_power(&f, p)?;
            let wg = exact_weak_lp_p_power(&g, p)?;
            let wfg = exact_weak_lp_p_power(&fg, p)?;
            let wh = exact_weak_lp_p_power(&h, p)?;
            checked += 1;
            if !check_quasi_triangle(wf, wg, wfg, p, 1e-9) {
                failures += 1;
            }
            if !check_monotone(wf, wh, p, 1e-9) {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("{checked} case/p combinations, {failures} failures")))
}

/// 7: the rearranged-form chain holds for the unit indicator and a
/// sign-changing step, at p in {1, 2}.
fn corollary_criterion() -> Result<(bool, String), MeasureError> {
    let mut pass = true;
    let mut notes = Vec::new();
    for (label, u) in [("indicator", chi01()), ("sign-changing", signed_step())] {
        for &p in &[1.0, 2.0] {
            let rep = corollary_forms(&u, p, 100_000, SEED)?;
            pass &= rep.pass();
            notes.push(format!("{label} p={p}: {}", rep.pass()));
        }
    }
    Ok((pass, notes.join(", ")))
}

/// 8: the fractional-seminorm diagnostic returns 16 for the unit indicator
/// at s = 1/2, p = 1, within 1e-4 relative, and flags divergence at
/// p = 2, s = 0.6.
fn gagliardo_criterion() -> Result<(bool, String), MeasureError> {
    let u = chi01();
    let finite = match gagliardo_seminorm_p_power(&u, 0.5, 1.0, 1e-6)? {
        GagliardoValue::Finite(g) => g,
        GagliardoValue::Divergent => return Ok((false, "unexpected divergence at s=1/2".into())),
    };
    let rel = (finite - 16.0).abs() / 16.0;
    let diverges =
        gagliardo_seminorm_p_power(&u, 0.6, 2.0, 1e-4)? == GagliardoValue::Divergent;
    Ok((
        rel < 1e-4 && diverges,
        format!("value={finite:.8} (rel err {rel:.2e}), divergence flag={diverges}"),
    ))
}

/// 9: the Gaussian truncation sequence converges to `kappa_1 sqrt(pi/2)`
/// within 3% by R = 4.
fn truncation_criterion() -> Result<(bool, String), MeasureError> {
    let g = TestFunction::gaussian(1).unwrap();
    let rep = truncation_study(&g, &zero1(), 2.0, &[2.0, 3.0, 4.0], 400_000, SEED)?;
    let last = rep.results["points"].as_array().unwrap().last().unwrap()["lambda_p_measure"]
        .as_f64()
        .unwrap();
    let target = 2.0 * (std::f64::consts::PI / 2.0).sqrt();
    Ok((
        rep.pass(),
        format!("final={last:.5}, target={target:.5}, verdicts pass={}", rep.pass()),
    ))
}

/// 10: the sweep CSV payload is byte-identical under 1 and 8 workers.
fn determinism_criterion() -> Result<(bool, String), MeasureError> {
    let run = |threads: usize| -> Result<String, MeasureError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| MeasureError::Usage(e.to_string()))?;
        pool.install(|| {
            let sweep =
                limit_sweep(&chi01(), &chi45(), 1.0, &default_lambda_schedule()[..6], 200_000, SEED)?;
            Ok(sweep_csv_string(&sweep))
        })
    };
    let a = run(1)?;
    let b = run(8)?;
    Ok((a == b, format!("1-worker and 8-worker CSVs identical: {}", a == b)))
}

type Criterion = fn() -> Result<(bool, String), MeasureError>;

const CRITERIA: &[(&str, Criterion)] = &[
    ("heart identity", heart_identity),
    ("limit law", limit_law),
    ("odd-pair reduction", odd_pair_reduction),
    ("envelope", envelope_criterion),
    ("sandwich", sandwich_criterion),
    ("quasinorm properties", quasinorm_properties),
    ("rearranged forms", corollary_criterion),
    ("fractional seminorm", gagliardo_criterion),
    ("truncation stability", truncation_criterion),
    ("determinism", determinism_criterion),
];

pub fn criterion_count() -> usize {
    CRITERIA.len()
}

/// Run criterion `index` (1-based).
pub fn run_criterion(index: usize) -> CriterionOutcome {
    let (name, f) = CRITERIA[index - 1];
    let t0 = Instant::now();
    let (pass, detail) = match f() {
        Ok((pass, detail)) => (pass, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome { index, name, pass, detail, seconds: t0.elapsed().as_secs_f64() }
}

/// Run the full suite in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=CRITERIA.len()).map(run_criterion).collect()
}
