//! Exact and deterministic oracles for the level-set measure
//! `L^{2N}(E_lambda)` where
//! `E_lambda = {(x,y) : |u(x)+v(y)| >= lambda |x-y|^{N/p}}`.

use crate::functions::{distance, FunctionError, TestFunction};
use crate::quad;
use crate::special::{unit_ball_volume, unit_sphere_area};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("grid box too small: required halfwidth {required}, got {got}")]
    BoxTooSmall { required: f64, got: f64 },
}

/// The tuple `(u, v, N, p, lambda)` defining `E_lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetQuery {
    pub u: TestFunction,
    pub v: TestFunction,
    pub p: f64,
    pub lambda: f64,
}

impl LevelSetQuery {
    pub fn new(u: TestFunction, v: TestFunction, p: f64, lambda: f64) -> Result<Self, MeasureError> {
        if u.dimension() != v.dimension() {
            return Err(MeasureError::Usage(format!(
                "u lives on R^{}, v on R^{}",
                u.dimension(),
                v.dimension()
            )));
        }
        if !(p >= 1.0) {
            return Err(MeasureError::Usage(format!("p must be >= 1, got {p}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(MeasureError::Usage(format!("lambda must be positive, got {lambda}")));
        }
        Ok(LevelSetQuery { u, v, p, lambda })
    }

    pub fn dim(&self) -> usize {
        self.u.dimension()
    }

    /// Membership test for `E_lambda`; points exactly on the level surface
    /// count as hits (the `>=` convention).
    pub fn contains(&self, x: &[f64], y: &[f64]) -> bool {
        let val = (self.u.eval_unchecked(x) + self.v.eval_unchecked(y)).abs();
        if val.is_nan() {
            return false;
        }
        if val.is_infinite() {
            return true;
        }
        let d = distance(x, y);
        val >= self.lambda * d.powf(self.dim() as f64 / self.p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Quadrature,
    Grid,
    MonteCarlo,
}

/// A measure with its provenance and, when known, an error bound.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasureValue {
    pub measure: f64,
    pub method: Method,
    /// `None` means unknown.
    pub error_bound: Option<f64>,
}

/// Closed-form measure for the single-function case `v = 0`:
/// `L^{2N}(E_lambda) = kappa_N ||u||_p^p / lambda^p`, valid at every
/// `lambda > 0`.
pub fn exact_single_measure(q: &LevelSetQuery) -> Result<MeasureValue, MeasureError> {
    if !q.v.is_zero() {
        return Err(MeasureError::Usage(
            "exact_single_measure requires v = 0".into(),
        ));
    }
    let norm_p = q.u.lp_norm_p_power(q.p)?;
    let kappa = unit_ball_volume(q.dim());
    let measure = if norm_p.is_finite() {
        kappa * norm_p / q.lambda.powf(q.p)
    } else {
        f64::INFINITY
    };
    Ok(MeasureValue { measure, method: Method::Exact, error_bound: Some(0.0) })
}

/// Radius `rho = ((M_u + M_v)/lambda)^{p/N}` of the per-point bounding ball:
/// every `(x,y)` in `E_lambda` satisfies `|x-y| <= rho`.
pub fn bounding_rho(q: &LevelSetQuery) -> Result<f64, MeasureError> {
    let m = q.u.sup_norm() + q.v.sup_norm();
    if !m.is_finite() {
        return Err(MeasureError::Unsupported(
            "infinite sup-norm; route through the truncation workflow".into(),
        ));
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok((m / q.lambda).powf(q.p / q.dim() as f64))
}

/// Halfwidth a centered grid box must have to contain the certified
/// bounding region.
pub fn required_grid_halfwidth(q: &LevelSetQuery) -> Result<f64, MeasureError> {
    let ru = q.u.support_radius();
    let rv = q.v.support_radius();
    if !ru.is_finite() || !rv.is_finite() {
        return Err(MeasureError::Unsupported(
            "infinite support; route through the truncation workflow".into(),
        ));
    }
    Ok(ru.max(rv) + bounding_rho(q)?)
}

/// Midpoint-rule counting oracle on a 2D grid (N = 1 only).
///
/// Rows are counted in parallel; the total is a sum of per-row integer
/// counts combined in index order, so the result is identical for any
/// worker count.
pub fn grid_bruteforce_measure(
    q: &LevelSetQuery,
    box_halfwidth: f64,
    h: f64,
) -> Result<MeasureValue, MeasureError> {
    if q.dim() != 1 {
        return Err(MeasureError::Unsupported(
            "grid oracle is restricted to N = 1".into(),
        ));
    }
    if !(h > 0.0) {
        return Err(MeasureError::Usage(format!("grid step must be positive, got {h}")));
    }
    let required = required_grid_halfwidth(q)?;
    if box_halfwidth < required {
        return Err(MeasureError::BoxTooSmall { required, got: box_halfwidth });
    }

    let n = ((2.0 * box_halfwidth) / h).ceil() as usize;
    let center = |i: usize| -box_halfwidth + (i as f64 + 0.5) * h;
    let v_vals: Vec<f64> = (0..n).map(|j| q.v.eval_unchecked(&[center(j)])).collect();
    let p_is_one = q.p == 1.0;
    let inv_lambda = 1.0 / q.lambda;

    let row_counts: Vec<u64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = center(i);
            let ux = q.u.eval_unchecked(&[x]);
            let mut count = 0u64;
            let mut cached_val = f64::NAN;
            let mut cached_thresh = 0.0;
            for (j, &vy) in v_vals.iter().enumerate() {
                let val = (ux + vy).abs();
                if val == 0.0 {
                    continue;
                }
                if val.is_infinite() {
                    count += 1;
                    continue;
                }
                // |x-y| <= (val/lambda)^p
                let thresh = if val == cached_val {
                    cached_thresh
                } else {
                    let t = if p_is_one {
                        val * inv_lambda
                    } else {
                        (val * inv_lambda).powf(q.p)
                    };
                    cached_val = val;
                    cached_thresh = t;
                    t
                };
                if (x - center(j)).abs() <= thresh {
                    count += 1;
                }
            }
            count
        })
        .collect();

    let hits: u64 = row_counts.iter().sum();
    Ok(MeasureValue {
        measure: h * h * hits as f64,
        method: Method::Grid,
        error_bound: None,
    })
}

/// Effective outer radius for a (possibly unbounded) radial function: the
/// support radius when finite, otherwise a truncation radius whose tail
/// contributes less than `budget` to the measure.
fn effective_radius(f: &TestFunction, p: f64, lambda: f64, budget: f64, dim: usize) -> Result<f64, MeasureError> {
    let r = f.support_radius();
    if r.is_finite() {
        return Ok(r);
    }
    let kappa = unit_ball_volume(dim);
    let mut radius = 1.0_f64;
    while radius <= 64.0 {
        let tail = f.tail_lp_norm_p_power(radius, p)?;
        if tail.is_finite()
            && kappa * 2.0_f64.powf(p) * tail / lambda.powf(p) < budget
        {
            return Ok(radius);
        }
        radius += 1.0;
    }
    Err(MeasureError::Unsupported(
        "function tail does not decay fast enough for quadrature; \
         route through the truncation workflow"
            .into(),
    ))
}

/// Angular content at `|x| = r`, `|y| = s` of the directions with
/// `|x - y| <= rho`, already multiplied by the radial density `s^{N-1}`.
fn shell_content(dim: usize, r: f64, s: f64, rho: f64) -> f64 {
    let full = unit_sphere_area(dim) * s.powf(dim as f64 - 1.0);
    if rho <= 0.0 {
        return 0.0;
    }
    if r * s < 1e-300 {
        // the distance is sqrt(r^2 + s^2) for every direction
        return if (r * r + s * s).sqrt() <= rho { full } else { 0.0 };
    }
    match dim {
        1 => {
            let mut c = 0.0;
            if (r - s).abs() <= rho {
                c += 1.0;
            }
            if r + s <= rho {
                c += 1.0;
            }
            c
        }
        2 => {
            let cos = (r * r + s * s - rho * rho) / (2.0 * r * s);
            if cos <= -1.0 {
                full
            } else if cos >= 1.0 {
                0.0
            } else {
                2.0 * cos.acos() * s
            }
        }
        3 => {
            let cos = (r * r + s * s - rho * rho) / (2.0 * r * s);
            if cos <= -1.0 {
                full
            } else if cos >= 1.0 {
                0.0
            } else {
                2.0 * std::f64::consts::PI * (1.0 - cos) * s * s
            }
        }
        _ => unreachable!("quadrature oracle supports N <= 3"),
    }
}

/// Content of `{|y| <= cap_r} intersect {|y - x| <= rho}` with `|x| = d`,
/// in closed form (interval overlap, circle lens, sphere lens).
pub(crate) fn ball_intersection(dim: usize, cap_r: f64, d: f64, rho: f64) -> f64 {
    if cap_r <= 0.0 || rho <= 0.0 {
        return 0.0;
    }
    if d >= cap_r + rho {
        return 0.0;
    }
    if d <= (cap_r - rho).abs() {
        let small = cap_r.min(rho);
        return unit_ball_volume(dim) * small.powi(dim as i32);
    }
    match dim {
        1 => (cap_r.min(d + rho) - (-cap_r).max(d - rho)).max(0.0),
        2 => {
            let (r2, p2, d2) = (cap_r * cap_r, rho * rho, d * d);
            let a1 = ((d2 + r2 - p2) / (2.0 * d * cap_r)).clamp(-1.0, 1.0).acos();
            let a2 = ((d2 + p2 - r2) / (2.0 * d * rho)).clamp(-1.0, 1.0).acos();
            let t = (-d + cap_r + rho)
                * (d + cap_r - rho)
                * (d - cap_r + rho)
                * (d + cap_r + rho);
            r2 * a1 + p2 * a2 - 0.5 * t.max(0.0).sqrt()
        }
        3 => {
            let sum = cap_r + rho;
            std::f64::consts::PI * (sum - d) * (sum - d)
                * (d * d + 2.0 * d * sum - 3.0 * (cap_r - rho) * (cap_r - rho))
                / (12.0 * d)
        }
        _ => unreachable!("quadrature oracle supports N <= 3"),
    }
}

/// Sign-change locations of `h` on `[a, b]`, found by dense sampling plus
/// bisection. `h` must be continuous on the open interval; `seeds` are extra
/// sample points (e.g. a known interior maximum) so that narrow features
/// between grid points are not skipped.
fn sign_roots<H: Fn(f64) -> f64>(h: &H, a: f64, b: f64, seeds: &[f64]) -> Vec<f64> {
    const SAMPLES: usize = 128;
    let w = b - a;
    let mut pts: Vec<f64> = (0..=SAMPLES).map(|k| a + w * k as f64 / SAMPLES as f64).collect();
    // radial profiles are left-continuous, so the value at `a` belongs to the
    // previous piece; nudge the first sample inward
    pts[0] = a + w * 1e-9;
    let lo_edge = pts[0];
    pts.extend(seeds.iter().copied().filter(|&s| s > lo_edge && s < b));
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut roots = Vec::new();
    let mut prev_t = pts[0];
    let mut prev_pos = h(prev_t) >= 0.0;
    for &t in &pts[1..] {
        let pos = h(t) >= 0.0;
        if pos != prev_pos {
            let (mut lo, mut hi) = (prev_t, t);
            let lo_pos = prev_pos;
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (h(mid) >= 0.0) == lo_pos {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_pos = pos;
    }
    roots
}

/// Length of `{s in [a, b] : h(s) >= 0}` for `h` continuous on `(a, b)`.
fn level_set_length<H: Fn(f64) -> f64>(h: &H, a: f64, b: f64, seeds: &[f64]) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let roots = sign_roots(h, a, b, seeds);
    let mut edges = vec![a];
    edges.extend(roots);
    edges.push(b);
    let mut len = 0.0;
    for w in edges.windows(2) {
        if h(0.5 * (w[0] + w[1])) >= 0.0 {
            len += w[1] - w[0];
        }
    }
    len
}

/// Deterministic oracle for radial pairs via the radial-angular reduction,
/// `1 <= N <= 3`. A common shift of both functions is stripped first.
///
/// For `N = 1` the inner (shell) integral is a plain set length and is
/// computed exactly by root isolation. For `N = 2, 3` the inner integrand is
/// continuous in `s` away from the profile breakpoints; those plus the
/// shell-transition roots are passed to the quadrature as split points, so
/// every segment it refines is smooth.
pub fn radial_quadrature_measure(q: &LevelSetQuery, tol: f64) -> Result<MeasureValue, MeasureError> {
    if !(tol > 0.0) {
        return Err(MeasureError::Usage(format!("tolerance must be positive, got {tol}")));
    }
    let dim = q.dim();
    if dim > 3 {
        return Err(MeasureError::Unsupported(
            "quadrature oracle supports 1 <= N <= 3".into(),
        ));
    }
    let (u, v) = strip_common_shift(&q.u, &q.v)?;
    if !u.sup_norm().is_finite() || !v.sup_norm().is_finite() {
        return Err(MeasureError::Unsupported(
            "infinite sup-norm; route through the truncation workflow".into(),
        ));
    }

    let n = dim as f64;
    let p = q.p;
    let lambda = q.lambda;
    let ru = effective_radius(&u, p, lambda, tol / 10.0, dim)?;
    let rv = effective_radius(&v, p, lambda, tol / 10.0, dim)?;
    let rho_max = ((u.sup_norm() + v.sup_norm()) / lambda).powf(p / n);
    if rho_max == 0.0 {
        return Ok(MeasureValue { measure: 0.0, method: Method::Quadrature, error_bound: Some(0.0) });
    }
    let r_max = if v.is_zero() { ru } else { ru.max(rv + rho_max) };
    let s_max = if u.is_zero() { rv } else { rv.max(ru + rho_max) };

    let surf = unit_sphere_area(dim);
    let outer_scale = surf * (1.0 + r_max).powf(n);
    let inner_tol = tol * 1e-2 / outer_scale;

    // s-pieces on which the v profile (hence rho) is continuous
    let mut piece_edges: Vec<f64> = v
        .radial_breakpoints()
        .into_iter()
        .filter(|&e| e > 0.0 && e < s_max)
        .collect();
    piece_edges.push(0.0);
    piece_edges.push(s_max);
    piece_edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    piece_edges.dedup();
    let pieces: Vec<(f64, f64)> = piece_edges.windows(2).map(|w| (w[0], w[1])).collect();

    let mut outer_breaks = u.radial_breakpoints();
    outer_breaks.push(ru);
    outer_breaks.push(rv);

    let rho_at = |ur: f64, vs: f64| -> f64 {
        let val = (ur + vs).abs();
        if val == 0.0 {
            0.0
        } else if val.is_infinite() {
            f64::INFINITY
        } else {
            (val / lambda).powf(p / n)
        }
    };

    // rho is constant on each piece when the v profile is; the shell measure
    // is then an exact ball-intersection difference
    let v_pc = v.radial_piecewise_constant();
    let piece_vals: Vec<f64> = pieces
        .iter()
        .map(|&(a, b)| v.radial_value(0.5 * (a + b)))
        .collect();

    // shell measure at radius r: for piecewise-constant profiles and N = 1
    // computed exactly, otherwise an adaptive integral over s whose split
    // points cover every shell transition
    let inner = |r: f64| -> f64 {
        let ur = u.radial_value(r);
        let mut total = 0.0;
        for (idx, &(a, b)) in pieces.iter().enumerate() {
            if v_pc {
                let rho = rho_at(ur, piece_vals[idx]);
                total += ball_intersection(dim, b, r, rho) - ball_intersection(dim, a, r, rho);
                continue;
            }
            // same-side rays: |r - s| <= rho(s); opposite rays: r + s <= rho(s)
            let near = |s: f64| rho_at(ur, v.radial_value(s)) - (r - s).abs();
            let far = |s: f64| rho_at(ur, v.radial_value(s)) - (r + s);
            if dim == 1 {
                total += level_set_length(&near, a, b, &[r]);
                total += level_set_length(&far, a, b, &[]);
            } else {
                let mut breaks = sign_roots(&near, a, b, &[r]);
                breaks.extend(sign_roots(&far, a, b, &[]));
                let f = |s: f64| shell_content(dim, r, s, rho_at(ur, v.radial_value(s)));
                total += quad::integrate_with_breakpoints(
                    f,
                    a,
                    b,
                    &breaks,
                    inner_tol * (b - a) / s_max,
                )
                .value;
            }
        }
        total
    };

    let outer = quad::integrate_with_breakpoints(
        |r: f64| r.powf(n - 1.0) * inner(r),
        0.0,
        r_max,
        &outer_breaks,
        tol / (2.0 * surf),
    );

    Ok(MeasureValue {
        measure: surf * outer.value,
        method: Method::Quadrature,
        error_bound: Some(tol),
    })
}

fn strip_common_shift(
    u: &TestFunction,
    v: &TestFunction,
) -> Result<(TestFunction, TestFunction), MeasureError> {
    let radial_err = || {
        MeasureError::Unsupported(
            "quadrature oracle requires radial functions (possibly after a common shift)".into(),
        )
    };
    match (u, v) {
        (
            TestFunction::Shifted { shift: su, inner: iu },
            TestFunction::Shifted { shift: sv, inner: iv },
        ) if su == sv => {
            if iu.is_radial() && iv.is_radial() {
                Ok((iu.as_ref().clone(), iv.as_ref().clone()))
            } else {
                Err(radial_err())
            }
        }
        (TestFunction::Shifted { inner, .. }, other) if other.is_zero() => {
            if inner.is_radial() {
                Ok((inner.as_ref().clone(), other.clone()))
            } else {
                Err(radial_err())
            }
        }
        (other, TestFunction::Shifted { inner, .. }) if other.is_zero() => {
            if inner.is_radial() {
                Ok((other.clone(), inner.as_ref().clone()))
            } else {
                Err(radial_err())
            }
        }
        _ => {
            if u.is_radial() && v.is_radial() {
                Ok((u.clone(), v.clone()))
            } else {
                Err(radial_err())
            }
        }
    }
}
