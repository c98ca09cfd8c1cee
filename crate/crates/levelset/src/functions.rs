//! Catalog of test functions on `R^N` with analytically known norms.
//!
//! Every entry carries closed-form `L^p` norms, sup-norms, and support radii
//! so that experiments always have an exact target. The catalog is closed:
//! there are no user-supplied evaluators.

use crate::quad;
use crate::special::{unit_ball_volume, unit_sphere_area};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FunctionError {
    #[error("dimension mismatch: function lives on R^{expected}, point has {got} coordinates")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("L^p norms require p >= 1, got p = {0}")]
    InvalidExponent(f64),
    #[error("operation requires a radial function, got {0}")]
    NotRadial(String),
}

/// A catalog function on `R^N`.
///
/// Indicator-like kinds evaluate to their amplitude on the *closed* ball;
/// the boundary is measure-zero so all measures are unaffected.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    /// The zero function.
    Zero { dim: usize },
    /// `a * chi_{B_r}`.
    BallIndicator { dim: usize, amplitude: f64, radius: f64 },
    /// Piecewise-constant radial function: `values[0]` on `[0, edges[0]]`,
    /// `values[i]` on `(edges[i-1], edges[i]]`, zero beyond the last edge.
    RadialStep { dim: usize, edges: Vec<f64>, values: Vec<f64> },
    /// `exp(-|x|^2)`.
    Gaussian { dim: usize },
    /// `|x|^{-alpha}` on `B_r`, zero outside.
    TruncatedPower { dim: usize, alpha: f64, radius: f64 },
    /// `|x|^{-N/p0}`: lies in weak-L^{p0} but in no `L^p`.
    WeakLpWitness { dim: usize, p0: f64 },
    /// `inner(x - shift)`.
    Shifted { shift: Vec<f64>, inner: Box<TestFunction> },
    /// `factor * inner(x)`.
    Scaled { factor: f64, inner: Box<TestFunction> },
    /// `|inner(x)|`.
    AbsValue { inner: Box<TestFunction> },
    /// `-inner(x)`.
    Negated { inner: Box<TestFunction> },
    /// `chi_{B_radius} * inner`, the interior part of the truncation split.
    /// Requires a radial inner function.
    Truncated { radius: f64, inner: Box<TestFunction> },
}

pub const MAX_DIMENSION: usize = 8;

fn check_dim(dim: usize) -> Result<(), FunctionError> {
    if dim == 0 || dim > MAX_DIMENSION {
        return Err(FunctionError::InvalidParameter(format!(
            "dimension must be in 1..={MAX_DIMENSION}, got {dim}"
        )));
    }
    Ok(())
}

impl TestFunction {
    pub fn zero(dim: usize) -> Result<Self, FunctionError> {
        check_dim(dim)?;
        Ok(TestFunction::Zero { dim })
    }

    pub fn ball(dim: usize, amplitude: f64, radius: f64) -> Result<Self, FunctionError> {
        check_dim(dim)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(FunctionError::InvalidParameter(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        if !amplitude.is_finite() {
            return Err(FunctionError::InvalidParameter("amplitude must be finite".into()));
        }
        Ok(TestFunction::BallIndicator { dim, amplitude, radius })
    }

    pub fn radial_step(dim: usize, edges: Vec<f64>, values: Vec<f64>) -> Result<Self, FunctionError> {
        check_dim(dim)?;
        if edges.is_empty() || edges.len() != values.len() {
            return Err(FunctionError::InvalidParameter(
                "step needs equally many edges and values, at least one each".into(),
            ));
        }
        let mut prev = 0.0;
        for &e in &edges {
            if !(e > prev) || !e.is_finite() {
                return Err(FunctionError::InvalidParameter(format!(
                    "step edges must be strictly increasing and positive, got {edges:?}"
                )));
            }
            prev = e;
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FunctionError::InvalidParameter("step values must be finite".into()));
        }
        Ok(TestFunction::RadialStep { dim, edges, values })
    }

    pub fn gaussian(dim: usize) -> Result<Self, FunctionError> {
        check_dim(dim)?;
        Ok(TestFunction::Gaussian { dim })
    }

    pub fn truncated_power(dim: usize, alpha: f64, radius: f64) -> Result<Self, FunctionError> {
        check_dim(dim)?;
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(FunctionError::InvalidParameter(format!(
                "power radius must be positive and finite, got {radius}"
            )));
        }
        if !alpha.is_finite() {
            return Err(FunctionError::InvalidParameter("alpha must be finite".into()));
        }
        Ok(TestFunction::TruncatedPower { dim, alpha, radius })
    }

    pub fn weak_lp_witness(dim: usize, p0: f64) -> Result<Self, FunctionError> {
        check_dim(dim)?;
        if !(p0 >= 1.0) {
            return Err(FunctionError::InvalidExponent(p0));
        }
        Ok(TestFunction::WeakLpWitness { dim, p0 })
    }

    pub fn shifted(shift: Vec<f64>, inner: TestFunction) -> Result<Self, FunctionError> {
        if shift.len() != inner.dimension() {
            return Err(FunctionError::DimensionMismatch {
                expected: inner.dimension(),
                got: shift.len(),
            });
        }
        if shift.iter().any(|v| !v.is_finite()) {
            return Err(FunctionError::InvalidParameter("shift must be finite".into()));
        }
        Ok(TestFunction::Shifted { shift, inner: Box::new(inner) })
    }

    pub fn scaled(factor: f64, inner: TestFunction) -> Result<Self, FunctionError> {
        if !factor.is_finite() {
            return Err(FunctionError::InvalidParameter("scale factor must be finite".into()));
        }
        Ok(TestFunction::Scaled { factor, inner: Box::new(inner) })
    }

    pub fn abs(inner: TestFunction) -> Self {
        TestFunction::AbsValue { inner: Box::new(inner) }
    }

    pub fn negated(inner: TestFunction) -> Self {
        TestFunction::Negated { inner: Box::new(inner) }
    }

    /// Interior truncation `chi_{B_radius} * inner`. Returns the inner
    /// function unchanged when the truncation is the identity.
    pub fn truncated(radius: f64, inner: TestFunction) -> Result<Self, FunctionError> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(FunctionError::InvalidParameter(format!(
                "truncation radius must be positive and finite, got {radius}"
            )));
        }
        if !inner.is_radial() {
            return Err(FunctionError::NotRadial(inner.spec_string()));
        }
        if radius >= inner.support_radius() {
            return Ok(inner);
        }
        Ok(TestFunction::Truncated { radius, inner: Box::new(inner) })
    }

    pub fn dimension(&self) -> usize {
        match self {
            TestFunction::Zero { dim }
            | TestFunction::BallIndicator { dim, .. }
            | TestFunction::RadialStep { dim, .. }
            | TestFunction::Gaussian { dim }
            | TestFunction::TruncatedPower { dim, .. }
            | TestFunction::WeakLpWitness { dim, .. } => *dim,
            TestFunction::Shifted { inner, .. }
            | TestFunction::Scaled { inner, .. }
            | TestFunction::AbsValue { inner }
            | TestFunction::Negated { inner }
            | TestFunction::Truncated { inner, .. } => inner.dimension(),
        }
    }

    /// True when the function depends on `x` only through `|x|`.
    pub fn is_radial(&self) -> bool {
        match self {
            TestFunction::Shifted { .. } => false,
            TestFunction::Scaled { inner, .. }
            | TestFunction::AbsValue { inner }
            | TestFunction::Negated { inner }
            | TestFunction::Truncated { inner, .. } => inner.is_radial(),
            _ => true,
        }
    }

    /// Whether the radial profile is constant between consecutive
    /// [`radial_breakpoints`](Self::radial_breakpoints).
    pub fn radial_piecewise_constant(&self) -> bool {
        match self {
            TestFunction::Zero { .. }
            | TestFunction::BallIndicator { .. }
            | TestFunction::RadialStep { .. } => true,
            TestFunction::Scaled { inner, .. }
            | TestFunction::AbsValue { inner }
            | TestFunction::Negated { inner }
            | TestFunction::Truncated { inner, .. } => inner.radial_piecewise_constant(),
            _ => false,
        }
    }

    /// Evaluate at `x`, checking the dimension.
    ///
    /// Kinds with a blow-up at the origin return `f64::INFINITY` there; any
    /// level-set comparison then treats the point as exceeding every
    /// threshold. The point is measure-zero.
    pub fn eval(&self, x: &[f64]) -> Result<f64, FunctionError> {
        if x.len() != self.dimension() {
            return Err(FunctionError::DimensionMismatch {
                expected: self.dimension(),
                got: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluate without the dimension check; callers validate once up front.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::BallIndicator { amplitude, radius, .. } => {
                if norm(x) <= *radius {
                    *amplitude
                } else {
                    0.0
                }
            }
            TestFunction::RadialStep { edges, values, .. } => {
                let r = norm(x);
                if r <= edges[0] {
                    return values[0];
                }
                for i in 1..edges.len() {
                    if r <= edges[i] {
                        return values[i];
                    }
                }
                0.0
            }
            TestFunction::Gaussian { .. } => (-norm_sq(x)).exp(),
            TestFunction::TruncatedPower { alpha, radius, .. } => {
                let r = norm(x);
                if r > *radius {
                    0.0
                } else if r == 0.0 {
                    if *alpha > 0.0 {
                        f64::INFINITY
                    } else if *alpha == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    r.powf(-alpha)
                }
            }
            TestFunction::WeakLpWitness { dim, p0 } => {
                let r = norm(x);
                if r == 0.0 {
                    f64::INFINITY
                } else {
                    r.powf(-(*dim as f64) / p0)
                }
            }
            TestFunction::Shifted { shift, inner } => {
                let mut y = [0.0; MAX_DIMENSION];
                for i in 0..x.len() {
                    y[i] = x[i] - shift[i];
                }
                inner.eval_unchecked(&y[..x.len()])
            }
            TestFunction::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor * inner.eval_unchecked(x)
                }
            }
            TestFunction::AbsValue { inner } => inner.eval_unchecked(x).abs(),
            TestFunction::Negated { inner } => -inner.eval_unchecked(x),
            TestFunction::Truncated { radius, inner } => {
                if norm(x) <= *radius {
                    inner.eval_unchecked(x)
                } else {
                    0.0
                }
            }
        }
    }

    /// Value on the radial profile, i.e. at `(r, 0, ..., 0)`.
    pub fn radial_value(&self, r: f64) -> f64 {
        let mut x = [0.0; MAX_DIMENSION];
        x[0] = r;
        self.eval_unchecked(&x[..self.dimension()])
    }

    /// `int |f|^p dx` in closed form; `f64::INFINITY` when divergent.
    pub fn lp_norm_p_power(&self, p: f64) -> Result<f64, FunctionError> {
        if !(p >= 1.0) {
            return Err(FunctionError::InvalidExponent(p));
        }
        Ok(self.lp_p_power_inner(p))
    }

    fn lp_p_power_inner(&self, p: f64) -> f64 {
        let n = self.dimension() as f64;
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::BallIndicator { dim, amplitude, radius } => {
                amplitude.abs().powf(p) * unit_ball_volume(*dim) * radius.powf(n)
            }
            TestFunction::RadialStep { dim, edges, values } => {
                let kappa = unit_ball_volume(*dim);
                let mut total = 0.0;
                let mut prev = 0.0_f64;
                for (e, v) in edges.iter().zip(values) {
                    total += v.abs().powf(p) * kappa * (e.powf(n) - prev.powf(n));
                    prev = *e;
                }
                total
            }
            TestFunction::Gaussian { .. } => (std::f64::consts::PI / p).powf(n / 2.0),
            TestFunction::TruncatedPower { dim, alpha, radius } => {
                let expo = n - alpha * p;
                if expo <= 0.0 {
                    f64::INFINITY
                } else {
                    unit_sphere_area(*dim) * radius.powf(expo) / expo
                }
            }
            // diverges at the origin for p >= p0 and at infinity for p <= p0
            TestFunction::WeakLpWitness { .. } => f64::INFINITY,
            TestFunction::Shifted { inner, .. } => inner.lp_p_power_inner(p),
            TestFunction::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor.abs().powf(p) * inner.lp_p_power_inner(p)
                }
            }
            TestFunction::AbsValue { inner } | TestFunction::Negated { inner } => {
                inner.lp_p_power_inner(p)
            }
            TestFunction::Truncated { radius, inner } => truncated_lp_p_power(inner, *radius, p),
        }
    }

    /// A ball `B(center, radius)` containing the support; tighter than
    /// [`support_radius`](Self::support_radius) for shifted functions.
    pub fn support_ball(&self) -> (Vec<f64>, f64) {
        match self {
            TestFunction::Shifted { shift, inner } => {
                let (c, r) = inner.support_ball();
                let center = shift.iter().zip(c.iter()).map(|(a, b)| a + b).collect();
                (center, r)
            }
            _ => (vec![0.0; self.dimension()], self.support_radius()),
        }
    }

    /// Smallest `R` with `f == 0` outside the closed ball `B_R`, or infinity.
    pub fn support_radius(&self) -> f64 {
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::BallIndicator { amplitude, radius, .. } => {
                if *amplitude == 0.0 {
                    0.0
                } else {
                    *radius
                }
            }
            TestFunction::RadialStep { edges, values, .. } => {
                for i in (0..edges.len()).rev() {
                    if values[i] != 0.0 {
                        return edges[i];
                    }
                }
                0.0
            }
            TestFunction::Gaussian { .. } | TestFunction::WeakLpWitness { .. } => f64::INFINITY,
            TestFunction::TruncatedPower { radius, .. } => *radius,
            TestFunction::Shifted { shift, inner } => {
                let r = inner.support_radius();
                if r.is_finite() {
                    r + norm(shift)
                } else {
                    f64::INFINITY
                }
            }
            TestFunction::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    inner.support_radius()
                }
            }
            TestFunction::AbsValue { inner } | TestFunction::Negated { inner } => {
                inner.support_radius()
            }
            TestFunction::Truncated { radius, inner } => radius.min(inner.support_radius()),
        }
    }

    /// Essential supremum of `|f|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            TestFunction::Zero { .. } => 0.0,
            TestFunction::BallIndicator { amplitude, .. } => amplitude.abs(),
            TestFunction::RadialStep { values, .. } => {
                values.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
            TestFunction::Gaussian { .. } => 1.0,
            TestFunction::TruncatedPower { alpha, radius, .. } => {
                if *alpha > 0.0 {
                    f64::INFINITY
                } else if *alpha == 0.0 {
                    1.0
                } else {
                    radius.powf(-alpha)
                }
            }
            TestFunction::WeakLpWitness { .. } => f64::INFINITY,
            TestFunction::Shifted { inner, .. } => inner.sup_norm(),
            TestFunction::Scaled { factor, inner } => {
                if *factor == 0.0 {
                    0.0
                } else {
                    factor.abs() * inner.sup_norm()
                }
            }
            TestFunction::AbsValue { inner } | TestFunction::Negated { inner } => inner.sup_norm(),
            TestFunction::Truncated { radius, inner } => truncated_sup(inner, *radius),
        }
    }

    /// Radii where the radial profile jumps or kinks; used as quadrature
    /// breakpoints.
    pub fn radial_breakpoints(&self) -> Vec<f64> {
        match self {
            TestFunction::Zero { .. }
            | TestFunction::Gaussian { .. }
            | TestFunction::WeakLpWitness { .. } => vec![],
            TestFunction::BallIndicator { radius, .. }
            | TestFunction::TruncatedPower { radius, .. } => vec![*radius],
            TestFunction::RadialStep { edges, .. } => edges.clone(),
            TestFunction::Shifted { inner, .. }
            | TestFunction::Scaled { inner, .. }
            | TestFunction::AbsValue { inner }
            | TestFunction::Negated { inner } => inner.radial_breakpoints(),
            TestFunction::Truncated { radius, inner } => {
                let mut v = inner.radial_breakpoints();
                v.push(*radius);
                v
            }
        }
    }

    /// True when the function is identically zero.
    pub fn is_zero(&self) -> bool {
        self.sup_norm() == 0.0
    }

    /// `(‖f‖_p^p - ‖chi_{B_R} f‖_p^p)`, the p-power norm of the exterior tail.
    pub fn tail_lp_norm_p_power(&self, radius: f64, p: f64) -> Result<f64, FunctionError> {
        let full = self.lp_norm_p_power(p)?;
        if !full.is_finite() {
            return Ok(f64::INFINITY);
        }
        let interior = TestFunction::truncated(radius, self.clone())?.lp_norm_p_power(p)?;
        Ok((full - interior).max(0.0))
    }
}

fn truncated_lp_p_power(inner: &TestFunction, radius: f64, p: f64) -> f64 {
    let n = inner.dimension() as f64;
    match inner {
        TestFunction::Zero { .. } => 0.0,
        TestFunction::BallIndicator { dim, amplitude, radius: r } => {
            amplitude.abs().powf(p) * unit_ball_volume(*dim) * r.min(radius).powf(n)
        }
        TestFunction::RadialStep { dim, edges, values } => {
            let kappa = unit_ball_volume(*dim);
            let mut total = 0.0;
            let mut prev = 0.0_f64;
            for (e, v) in edges.iter().zip(values) {
                let hi = e.min(radius);
                let lo = prev.min(radius);
                total += v.abs().powf(p) * kappa * (hi.powf(n) - lo.powf(n));
                prev = *e;
            }
            total
        }
        TestFunction::Gaussian { dim } => {
            let area = unit_sphere_area(*dim);
            let nn = n;
            quad::integrate(
                move |r: f64| r.powf(nn - 1.0) * (-p * r * r).exp(),
                0.0,
                radius,
                1e-13,
            )
            .value
                * area
        }
        TestFunction::TruncatedPower { dim, alpha, radius: r } => {
            let expo = n - alpha * p;
            if expo <= 0.0 {
                f64::INFINITY
            } else {
                unit_sphere_area(*dim) * r.min(radius).powf(expo) / expo
            }
        }
        TestFunction::WeakLpWitness { dim, p0 } => {
            let expo = n * (1.0 - p / p0);
            if expo <= 0.0 {
                f64::INFINITY
            } else {
                unit_sphere_area(*dim) * radius.powf(expo) / expo
            }
        }
        TestFunction::Scaled { factor, inner } => {
            if *factor == 0.0 {
                0.0
            } else {
                factor.abs().powf(p) * truncated_lp_p_power(inner, radius, p)
            }
        }
        TestFunction::AbsValue { inner } | TestFunction::Negated { inner } => {
            truncated_lp_p_power(inner, radius, p)
        }
        TestFunction::Truncated { radius: r2, inner } => {
            truncated_lp_p_power(inner, radius.min(*r2), p)
        }
        // the constructor rejects non-radial inners
        TestFunction::Shifted { .. } => unreachable!("Truncated requires a radial inner"),
    }
}

fn truncated_sup(inner: &TestFunction, radius: f64) -> f64 {
    match inner {
        TestFunction::Zero { .. } => 0.0,
        TestFunction::BallIndicator { amplitude, .. } => amplitude.abs(),
        TestFunction::RadialStep { edges, values, .. } => {
            let mut m = 0.0_f64;
            let mut prev = 0.0;
            for (e, v) in edges.iter().zip(values) {
                if prev < radius {
                    m = m.max(v.abs());
                }
                prev = *e;
            }
            m
        }
        TestFunction::Gaussian { .. } => 1.0,
        TestFunction::TruncatedPower { alpha, radius: r, .. } => {
            if *alpha > 0.0 {
                f64::INFINITY
            } else if *alpha == 0.0 {
                1.0
            } else {
                r.min(radius).powf(-alpha)
            }
        }
        TestFunction::WeakLpWitness { .. } => f64::INFINITY,
        TestFunction::Scaled { factor, inner } => {
            if *factor == 0.0 {
                0.0
            } else {
                factor.abs() * truncated_sup(inner, radius)
            }
        }
        TestFunction::AbsValue { inner } | TestFunction::Negated { inner } => {
            truncated_sup(inner, radius)
        }
        TestFunction::Truncated { radius: r2, inner } => truncated_sup(inner, radius.min(*r2)),
        TestFunction::Shifted { .. } => unreachable!("Truncated requires a radial inner"),
    }
}

pub fn norm(x: &[f64]) -> f64 {
    norm_sq(x).sqrt()
}

pub fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

pub fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ball111() -> TestFunction {
        TestFunction::ball(1, 1.0, 1.0).unwrap()
    }

    #[test]
    fn eval_ball_indicator() {
        let f = ball111();
        assert_eq!(f.eval(&[0.5]).unwrap(), 1.0);
        assert_eq!(f.eval(&[2.0]).unwrap(), 0.0);
        // closed-ball convention
        assert_eq!(f.eval(&[1.0]).unwrap(), 1.0);
    }

    #[test]
    fn eval_gaussian_origin() {
        let f = TestFunction::gaussian(2).unwrap();
        assert_eq!(f.eval(&[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn eval_dimension_mismatch() {
        let f = ball111();
        assert!(matches!(
            f.eval(&[0.0, 0.0]),
            Err(FunctionError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn lp_norm_examples() {
        assert!((ball111().lp_norm_p_power(1.0).unwrap() - 2.0).abs() < 1e-15);
        let g = TestFunction::gaussian(1).unwrap();
        assert!((g.lp_norm_p_power(2.0).unwrap() - (PI / 2.0).sqrt()).abs() < 1e-14);
        let pw = TestFunction::truncated_power(1, 0.5, 1.0).unwrap();
        assert!((pw.lp_norm_p_power(1.0).unwrap() - 4.0).abs() < 1e-13);
        let w = TestFunction::weak_lp_witness(1, 2.0).unwrap();
        assert_eq!(w.lp_norm_p_power(2.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn lp_norm_rejects_small_p() {
        assert!(matches!(
            ball111().lp_norm_p_power(0.5),
            Err(FunctionError::InvalidExponent(_))
        ));
    }

    #[test]
    fn support_radius_examples() {
        assert_eq!(TestFunction::ball(1, 1.0, 3.0).unwrap().support_radius(), 3.0);
        assert_eq!(TestFunction::zero(1).unwrap().support_radius(), 0.0);
        assert_eq!(TestFunction::gaussian(1).unwrap().support_radius(), f64::INFINITY);
        let shifted =
            TestFunction::shifted(vec![0.5], TestFunction::ball(1, 1.0, 0.5).unwrap()).unwrap();
        assert!((shifted.support_radius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sup_norm_examples() {
        assert_eq!(TestFunction::ball(1, 2.0, 1.0).unwrap().sup_norm(), 2.0);
        assert_eq!(TestFunction::gaussian(3).unwrap().sup_norm(), 1.0);
        assert_eq!(
            TestFunction::truncated_power(1, 0.5, 1.0).unwrap().sup_norm(),
            f64::INFINITY
        );
    }

    #[test]
    fn scaled_shifted_abs_invariants() {
        let f = TestFunction::radial_step(2, vec![0.5, 1.5], vec![2.0, -1.0]).unwrap();
        let base = f.lp_norm_p_power(2.0).unwrap();
        for c in [-2.0, 0.5, 3.0] {
            let s = TestFunction::scaled(c, f.clone()).unwrap();
            let got = s.lp_norm_p_power(2.0).unwrap();
            assert!((got - c.abs().powf(2.0) * base).abs() < 1e-12 * base.max(1.0));
        }
        let sh = TestFunction::shifted(vec![1.0, -2.0], f.clone()).unwrap();
        assert_eq!(sh.lp_norm_p_power(2.0).unwrap(), base);
        assert_eq!(sh.sup_norm(), f.sup_norm());
        let a = TestFunction::abs(f.clone());
        assert_eq!(a.lp_norm_p_power(2.0).unwrap(), base);
    }

    #[test]
    fn scaled_by_zero_is_zero() {
        let s = TestFunction::scaled(0.0, TestFunction::gaussian(1).unwrap()).unwrap();
        assert_eq!(s.lp_norm_p_power(3.0).unwrap(), 0.0);
        assert_eq!(s.support_radius(), 0.0);
        assert!(s.is_zero());
    }

    #[test]
    fn witness_blows_up_at_origin() {
        let w = TestFunction::weak_lp_witness(2, 2.0).unwrap();
        assert_eq!(w.eval(&[0.0, 0.0]).unwrap(), f64::INFINITY);
        assert!((w.eval(&[3.0, 4.0]).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn truncation_identity_when_radius_covers_support() {
        let f = ball111();
        let t = TestFunction::truncated(2.0, f.clone()).unwrap();
        assert_eq!(t, f);
    }

    #[test]
    fn truncated_gaussian_norm_and_tail() {
        let g = TestFunction::gaussian(1).unwrap();
        let t = TestFunction::truncated(1.0, g.clone()).unwrap();
        // int_{-1}^{1} e^{-2x^2} dx = sqrt(pi/2) erf(sqrt(2))
        let direct = quad::integrate(|x: f64| (-2.0 * x * x).exp(), -1.0, 1.0, 1e-13).value;
        let got = t.lp_norm_p_power(2.0).unwrap();
        assert!((got - direct).abs() < 1e-10, "got {got}, direct {direct}");
        let tail = g.tail_lp_norm_p_power(1.0, 2.0).unwrap();
        assert!((got + tail - (PI / 2.0).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn truncation_rejects_non_radial() {
        let sh = TestFunction::shifted(vec![1.0], ball111()).unwrap();
        assert!(matches!(
            TestFunction::truncated(0.5, sh),
            Err(FunctionError::NotRadial(_))
        ));
    }

    /// Quadrature reproduction of the closed-form norms (N = 1 and N = 2).
    #[test]
    fn quadrature_reproduces_closed_form_norms() {
        let cases_1d: Vec<(TestFunction, f64)> = vec![
            (ball111(), 1.0),
            (TestFunction::ball(1, -1.5, 0.7).unwrap(), 2.0),
            (TestFunction::radial_step(1, vec![0.5, 1.0, 2.0], vec![3.0, -1.0, 0.5]).unwrap(), 1.0),
            (TestFunction::truncated_power(1, 0.5, 1.0).unwrap(), 1.0),
            (TestFunction::gaussian(1).unwrap(), 2.0),
            (
                TestFunction::truncated(0.8, TestFunction::gaussian(1).unwrap()).unwrap(),
                2.0,
            ),
        ];
        for (f, p) in cases_1d {
            let target = f.lp_norm_p_power(p).unwrap();
            let rmax = if f.support_radius().is_finite() {
                f.support_radius()
            } else {
                8.0
            };
            let integrand = |r: f64| 2.0 * f.radial_value(r).abs().powf(p);
            let singular = matches!(f, TestFunction::TruncatedPower { alpha, .. } if alpha > 0.0);
            let got = if singular {
                let alpha_p = match f {
                    TestFunction::TruncatedPower { alpha, .. } => alpha * p,
                    _ => unreachable!(),
                };
                quad::integrate_singular_lower(integrand, alpha_p, rmax, 1e-10).value
            } else {
                quad::integrate_with_breakpoints(
                    integrand,
                    0.0,
                    rmax,
                    &f.radial_breakpoints(),
                    1e-10,
                )
                .value
            };
            let rel = (got - target).abs() / target.max(1e-12);
            assert!(rel < 1e-6, "{f:?} at p={p}: got {got}, want {target}");
        }

        // N = 2, radial reduction: int = 2*pi int r |f|^p dr
        let cases_2d: Vec<(TestFunction, f64)> = vec![
            (TestFunction::ball(2, 2.0, 1.5).unwrap(), 1.0),
            (TestFunction::gaussian(2).unwrap(), 2.0),
            (TestFunction::radial_step(2, vec![1.0, 2.0], vec![1.0, -0.5]).unwrap(), 3.0),
        ];
        for (f, p) in cases_2d {
            let target = f.lp_norm_p_power(p).unwrap();
            let rmax = if f.support_radius().is_finite() {
                f.support_radius()
            } else {
                8.0
            };
            let integrand = |r: f64| 2.0 * PI * r * f.radial_value(r).abs().powf(p);
            let got = quad::integrate_with_breakpoints(
                integrand,
                0.0,
                rmax,
                &f.radial_breakpoints(),
                1e-10,
            )
            .value;
            let rel = (got - target).abs() / target.max(1e-12);
            assert!(rel < 1e-6, "{f:?} at p={p}: got {got}, want {target}");
        }
    }
}
