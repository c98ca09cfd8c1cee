//! Stratified hit-or-miss Monte Carlo estimation of the level-set measure
//! over a certified bounded sampling region.
//!
//! The region is the union of two strata: `{x in supp u, |x-y| <= rho}` and
//! `{y in supp v, |x-y| <= rho}` with `rho = ((M_u+M_v)/lambda)^{p/N}`; every
//! point of `E_lambda` lies in at least one of them. A hit landing in `k`
//! overlapping strata counts with weight `1/k`, so the union is not double
//! counted and no intersection volume is ever computed.

use crate::measure::{bounding_rho, LevelSetQuery, MeasureError, Method};
use crate::rng::{sub_seed, CounterRng};
use crate::special::unit_ball_volume;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One stratum: `x` uniform in `x_ball`, then `y` uniform in
/// `B(x, y_relative_radius)`. The y-side stratum is stored with the roles
/// swapped and flagged.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stratum {
    pub x_ball_center: Vec<f64>,
    pub x_ball_radius: f64,
    pub y_relative_radius: f64,
    /// when set, the sampled pair is `(y, x)` instead of `(x, y)`
    pub swapped: bool,
    pub volume: f64,
}

/// Union of strata certified to contain `E_lambda`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundingRegion {
    pub strata: Vec<Stratum>,
    pub total_volume: f64,
}

/// An estimated measure with its sampling provenance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub region_volume: f64,
}

impl MeasureEstimate {
    pub fn as_measure_value(&self) -> crate::measure::MeasureValue {
        crate::measure::MeasureValue {
            measure: self.value,
            method: Method::MonteCarlo,
            error_bound: Some(3.0 * self.stderr),
        }
    }
}

/// The certified sampling region for `(u, v, p, lambda)`.
///
/// Requires finite supports and finite sup-norms; unbounded functions are
/// rejected toward the truncation workflow. Strata with zero volume (zero
/// function on one side) are dropped.
pub fn bounding_region(q: &LevelSetQuery) -> Result<BoundingRegion, MeasureError> {
    let dim = q.dim();
    let (cu, ru) = q.u.support_ball();
    let (cv, rv) = q.v.support_ball();
    if !ru.is_finite() || !rv.is_finite() {
        return Err(MeasureError::Unsupported(
            "infinite support; route through the truncation workflow".into(),
        ));
    }
    let rho = bounding_rho(q)?;
    let kappa = unit_ball_volume(dim);
    let mut strata = Vec::new();
    let mut total_volume = 0.0;
    for (center, radius, swapped) in [(cu, ru, false), (cv, rv, true)] {
        let volume = kappa * radius.powi(dim as i32) * kappa * rho.powi(dim as i32);
        if volume > 0.0 {
            total_volume += volume;
            strata.push(Stratum {
                x_ball_center: center,
                x_ball_radius: radius,
                y_relative_radius: rho,
                swapped,
                volume,
            });
        }
    }
    Ok(BoundingRegion { strata, total_volume })
}

/// Whether the pair `(x, y)` lies in the stratum.
fn stratum_contains(s: &Stratum, x: &[f64], y: &[f64]) -> bool {
    let (sx, sy) = if s.swapped { (y, x) } else { (x, y) };
    let mut dc = 0.0;
    let mut dxy = 0.0;
    for i in 0..x.len() {
        let a = sx[i] - s.x_ball_center[i];
        dc += a * a;
        let b = sx[i] - sy[i];
        dxy += b * b;
    }
    dc.sqrt() <= s.x_ball_radius && dxy.sqrt() <= s.y_relative_radius
}

/// Stratified estimate of `L^{2N}(E_lambda)`.
///
/// Samples are allocated to strata proportionally to volume. Each sample is
/// keyed by `(seed, stratum, index)`, and per-sample weights are exact
/// multiples of 1/2, so the reduction is bit-identical for any worker count.
pub fn estimate_measure(
    q: &LevelSetQuery,
    n_samples: u64,
    seed: u64,
) -> Result<MeasureEstimate, MeasureError> {
    if n_samples == 0 {
        return Err(MeasureError::Usage("n_samples must be positive".into()));
    }
    let region = bounding_region(q)?;
    if region.strata.is_empty() {
        return Ok(MeasureEstimate {
            value: 0.0,
            stderr: 0.0,
            samples: n_samples,
            seed,
            region_volume: 0.0,
        });
    }

    let dim = q.dim();
    let mut value = 0.0;
    let mut weight_total = 0.0;
    for (stratum_id, stratum) in region.strata.iter().enumerate() {
        // last stratum takes the remainder so the counts sum to n_samples
        let n_s = if stratum_id + 1 == region.strata.len() {
            n_samples
                - region.strata[..stratum_id]
                    .iter()
                    .map(|s| alloc(n_samples, s.volume, region.total_volume))
                    .sum::<u64>()
        } else {
            alloc(n_samples, stratum.volume, region.total_volume)
        };
        if n_s == 0 {
            continue;
        }
        let weight_sum: f64 = (0..n_s)
            .into_par_iter()
            .map(|i| {
                let mut rng = CounterRng::for_sample(seed, stratum_id as u64, i);
                let mut x = [0.0; crate::functions::MAX_DIMENSION];
                let mut y = [0.0; crate::functions::MAX_DIMENSION];
                rng.next_ball_point(stratum.x_ball_radius, dim, &mut x);
                for (xi, ci) in x[..dim].iter_mut().zip(&stratum.x_ball_center) {
                    *xi += ci;
                }
                rng.next_ball_point(stratum.y_relative_radius, dim, &mut y);
                for (yi, xi) in y[..dim].iter_mut().zip(&x[..dim]) {
                    *yi += xi;
                }
                let (px, py) = if stratum.swapped {
                    (&y[..dim], &x[..dim])
                } else {
                    (&x[..dim], &y[..dim])
                };
                if !q.contains(px, py) {
                    return 0.0;
                }
                let k = region
                    .strata
                    .iter()
                    .filter(|s| stratum_contains(s, px, py))
                    .count();
                // the generating stratum always contains its own sample
                1.0 / k as f64
            })
            .sum();
        value += stratum.volume * weight_sum / n_s as f64;
        weight_total += weight_sum;
    }

    let q_frac = (weight_total / n_samples as f64).clamp(0.0, 1.0);
    let stderr =
        region.total_volume * (q_frac * (1.0 - q_frac) / n_samples as f64).sqrt();
    Ok(MeasureEstimate {
        value,
        stderr,
        samples: n_samples,
        seed,
        region_volume: region.total_volume,
    })
}

fn alloc(n: u64, volume: f64, total: f64) -> u64 {
    ((n as f64) * volume / total).round() as u64
}

/// One estimate per lambda, each with its own derived sub-seed
/// (`sub_seed(seed, index)`), independent across the grid.
pub fn estimate_sweep(
    u: &crate::TestFunction,
    v: &crate::TestFunction,
    p: f64,
    lambda_grid: &[f64],
    n_samples: u64,
    seed: u64,
) -> Result<Vec<(f64, MeasureEstimate)>, MeasureError> {
    if lambda_grid.is_empty() {
        return Err(MeasureError::Usage("lambda grid must be non-empty".into()));
    }
    for w in lambda_grid.windows(2) {
        if !(w[1] < w[0]) {
            return Err(MeasureError::Usage(
                "lambda grid must be strictly decreasing".into(),
            ));
        }
    }
    lambda_grid
        .iter()
        .enumerate()
        .map(|(i, &lambda)| {
            let q = LevelSetQuery::new(u.clone(), v.clone(), p, lambda)?;
            let est = estimate_measure(&q, n_samples, sub_seed(seed, i as u64))?;
            Ok((lambda, est))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TestFunction;

    fn symmetric_interval() -> TestFunction {
        // chi_{[-1,1]}
        TestFunction::ball(1, 1.0, 1.0).unwrap()
    }

    fn zero1() -> TestFunction {
        TestFunction::zero(1).unwrap()
    }

    #[test]
    fn region_for_two_unit_balls() {
        let q = LevelSetQuery::new(symmetric_interval(), symmetric_interval(), 1.0, 1.0).unwrap();
        let r = bounding_region(&q).unwrap();
        assert_eq!(r.strata.len(), 2);
        assert!((r.strata[0].y_relative_radius - 2.0).abs() < 1e-12);
        assert!((r.strata[0].volume - 8.0).abs() < 1e-12);
        assert!((r.total_volume - 16.0).abs() < 1e-12);
    }

    #[test]
    fn region_drops_zero_side() {
        let q = LevelSetQuery::new(symmetric_interval(), zero1(), 1.0, 1.0).unwrap();
        let r = bounding_region(&q).unwrap();
        assert_eq!(r.strata.len(), 1);
        assert!(!r.strata[0].swapped);
    }

    #[test]
    fn region_shrinks_as_lambda_grows() {
        let mut prev = f64::INFINITY;
        for lambda in [1.0, 10.0, 100.0, 1000.0] {
            let q = LevelSetQuery::new(symmetric_interval(), zero1(), 1.0, lambda).unwrap();
            let vol = bounding_region(&q).unwrap().total_volume;
            assert!(vol < prev);
            prev = vol;
        }
    }

    #[test]
    fn region_rejects_unbounded_support() {
        let g = TestFunction::gaussian(1).unwrap();
        let q = LevelSetQuery::new(g, zero1(), 2.0, 1.0).unwrap();
        assert!(matches!(
            bounding_region(&q),
            Err(MeasureError::Unsupported(_))
        ));
    }

    #[test]
    fn single_interval_estimate_matches_exact() {
        // for an indicator with v = 0 the bounding region equals E_lambda,
        // so every sample is a hit and the estimate is exact
        let q = LevelSetQuery::new(symmetric_interval(), zero1(), 1.0, 1.0).unwrap();
        let est = estimate_measure(&q, 1_000_000, 20240801).unwrap();
        assert_eq!(est.value, 4.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn two_interval_estimate_matches_quadrature() {
        let q = LevelSetQuery::new(symmetric_interval(), symmetric_interval(), 1.0, 1.0).unwrap();
        let est = estimate_measure(&q, 1_000_000, 20240801).unwrap();
        let oracle = crate::measure::radial_quadrature_measure(&q, 1e-9)
            .unwrap()
            .measure;
        assert!(est.stderr > 0.0 && est.stderr < 0.02, "stderr {}", est.stderr);
        assert!(
            (est.value - oracle).abs() < 3.0 * est.stderr,
            "value {} oracle {oracle} stderr {}",
            est.value,
            est.stderr
        );
    }

    #[test]
    fn zero_pair_estimates_zero() {
        let q = LevelSetQuery::new(zero1(), zero1(), 1.0, 1.0).unwrap();
        let est = estimate_measure(&q, 1000, 1).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn rejects_zero_samples() {
        let q = LevelSetQuery::new(symmetric_interval(), zero1(), 1.0, 1.0).unwrap();
        assert!(matches!(
            estimate_measure(&q, 0, 1),
            Err(MeasureError::Usage(_))
        ));
    }

    #[test]
    fn deterministic_across_worker_counts() {
        let q = LevelSetQuery::new(symmetric_interval(), symmetric_interval(), 1.0, 0.7).unwrap();
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| estimate_measure(&q, 200_000, 99).unwrap());
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| estimate_measure(&q, 200_000, 99).unwrap());
        assert_eq!(one, many);
    }

    #[test]
    fn unbiased_over_many_seeds() {
        // degenerate case: zero variance, mean must be exactly 4
        let q = LevelSetQuery::new(symmetric_interval(), zero1(), 1.0, 1.0).unwrap();
        let mut sum = 0.0;
        for s in 0..200u64 {
            sum += estimate_measure(&q, 40_000, sub_seed(7, s)).unwrap().value;
        }
        assert_eq!(sum / 200.0, 4.0);

        // noisy case against the deterministic oracle
        let q = LevelSetQuery::new(symmetric_interval(), symmetric_interval(), 1.0, 1.0).unwrap();
        let oracle = crate::measure::radial_quadrature_measure(&q, 1e-9)
            .unwrap()
            .measure;
        let n_seeds = 200u64;
        let mut sum = 0.0;
        let mut stderr = 0.0;
        for s in 0..n_seeds {
            let est = estimate_measure(&q, 40_000, sub_seed(7, s)).unwrap();
            sum += est.value;
            stderr = est.stderr;
        }
        let mean = sum / n_seeds as f64;
        let band = 4.0 * stderr / (n_seeds as f64).sqrt();
        assert!((mean - oracle).abs() < band, "mean {mean}, oracle {oracle}, band {band}");
    }

    #[test]
    fn monotone_in_lambda_within_noise() {
        let u = symmetric_interval();
        let v = TestFunction::ball(1, 0.5, 0.5).unwrap();
        let mut prev: Option<MeasureEstimate> = None;
        for lambda in [0.5, 1.0, 2.0] {
            let q = LevelSetQuery::new(u.clone(), v.clone(), 1.0, lambda).unwrap();
            let est = estimate_measure(&q, 300_000, 5).unwrap();
            if let Some(p) = prev {
                assert!(
                    est.value <= p.value + 4.0 * (est.stderr + p.stderr),
                    "not monotone within noise at lambda {lambda}"
                );
            }
            prev = Some(est);
        }
    }

    #[test]
    fn points_outside_region_are_never_hits() {
        // shell around the bounding region: no point of E_lambda may be there
        let u = symmetric_interval();
        let v = TestFunction::ball(1, 2.0, 0.5).unwrap();
        let q = LevelSetQuery::new(u, v, 1.0, 1.0).unwrap();
        let region = bounding_region(&q).unwrap();
        let outer = 2.0
            * region
                .strata
                .iter()
                .map(|s| s.x_ball_radius + s.y_relative_radius)
                .fold(0.0, f64::max);
        let mut checked = 0u64;
        let mut i = 0u64;
        while checked < 100_000 {
            let mut rng = CounterRng::for_sample(11, 7, i);
            i += 1;
            let x = [outer * (2.0 * rng.next_f64() - 1.0)];
            let y = [outer * (2.0 * rng.next_f64() - 1.0)];
            if region.strata.iter().any(|s| stratum_contains(s, &x, &y)) {
                continue;
            }
            checked += 1;
            assert!(!q.contains(&x, &y), "hit outside region at ({}, {})", x[0], y[0]);
        }
    }

    #[test]
    fn sweep_is_deterministic_and_matches_single() {
        let u = symmetric_interval();
        let v = zero1();
        let grid = [1.0, 0.5, 0.25];
        let a = estimate_sweep(&u, &v, 1.0, &grid, 50_000, 3).unwrap();
        let b = estimate_sweep(&u, &v, 1.0, &grid, 50_000, 3).unwrap();
        assert_eq!(a, b);
        for (lambda, est) in &a {
            // lambda^p * value constant = 4 within noise
            assert!(
                (lambda * est.value - 4.0).abs() < 4.0 * lambda * est.stderr + 1e-9,
                "lambda {lambda}: {}",
                lambda * est.value
            );
        }
        let single = estimate_sweep(&u, &v, 1.0, &[1.0], 50_000, 3).unwrap();
        let direct = estimate_measure(
            &LevelSetQuery::new(u, v, 1.0, 1.0).unwrap(),
            50_000,
            sub_seed(3, 0),
        )
        .unwrap();
        assert_eq!(single[0].1, direct);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let u = symmetric_interval();
        let v = zero1();
        assert!(estimate_sweep(&u, &v, 1.0, &[], 10, 1).is_err());
        assert!(estimate_sweep(&u, &v, 1.0, &[0.5, 1.0], 10, 1).is_err());
    }

    #[test]
    fn two_dimensional_pair_within_band() {
        let u = TestFunction::ball(2, 1.0, 1.0).unwrap();
        let q = LevelSetQuery::new(u.clone(), u, 1.0, 2.0).unwrap();
        let est = estimate_measure(&q, 400_000, 17).unwrap();
        let oracle = crate::measure::radial_quadrature_measure(&q, 1e-8)
            .unwrap()
            .measure;
        assert!(est.stderr > 0.0, "expected a noisy estimate");
        assert!(
            (est.value - oracle).abs() < 3.0 * est.stderr,
            "value {} oracle {oracle} stderr {}",
            est.value,
            est.stderr
        );
    }
}
