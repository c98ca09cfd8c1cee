//! Property-based invariants spanning module boundaries.

use levelset::measure::{exact_single_measure, LevelSetQuery};
use levelset::parser::parse_function;
use levelset::report::fmt_float;
use levelset::weaknorm::exact_weak_lp_p_power;
use levelset::TestFunction;
use proptest::prelude::*;

fn base_function() -> impl Strategy<Value = TestFunction> {
    let dim = 1..=3usize;
    prop_oneof![
        dim.clone().prop_map(|n| TestFunction::zero(n).unwrap()),
        (dim.clone(), 0.1..5.0f64, 0.1..4.0f64)
            .prop_map(|(n, a, r)| TestFunction::ball(n, a, r).unwrap()),
        (dim.clone(), prop::collection::vec(0.05..2.0f64, 1..4))
            .prop_map(|(n, mut widths)| {
                let mut edges = Vec::new();
                let mut acc = 0.0;
                for w in widths.drain(..) {
                    acc += w;
                    edges.push(acc);
                }
                let values: Vec<f64> = (0..edges.len()).map(|i| (i as f64) - 1.0).collect();
                TestFunction::radial_step(n, edges, values).unwrap()
            }),
        dim.prop_map(|n| TestFunction::gaussian(n).unwrap()),
    ]
}

fn wrapped_function() -> impl Strategy<Value = TestFunction> {
    base_function().prop_flat_map(|f| {
        let dim = f.dimension();
        prop_oneof![
            Just(f.clone()),
            Just(TestFunction::abs(f.clone())),
            Just(TestFunction::negated(f.clone())),
            (0.1..3.0f64).prop_map({
                let f = f.clone();
                move |c| TestFunction::scaled(c, f.clone()).unwrap()
            }),
            (prop::collection::vec(-2.0..2.0f64, dim..=dim)).prop_map({
                let f = f.clone();
                move |by| TestFunction::shifted(by, f.clone()).unwrap()
            }),
            (0.5..4.0f64).prop_map(move |r| TestFunction::truncated(r, f.clone()).unwrap()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The spec string printed for a function reparses to a function with
    /// the identical spec string.
    #[test]
    fn spec_string_round_trips(f in wrapped_function()) {
        let spec = f.spec_string();
        let back = parse_function(&spec).unwrap();
        prop_assert_eq!(back.spec_string(), spec);
        prop_assert_eq!(back.dimension(), f.dimension());
    }

    /// The single-function closed form makes `lambda^p L` independent of
    /// lambda.
    #[test]
    fn scaled_exact_measure_is_constant(
        amp in 0.1..4.0f64,
        radius in 0.1..2.0f64,
        p in 1.0..3.0f64,
        l1 in 0.01..100.0f64,
        l2 in 0.01..100.0f64,
    ) {
        let u = TestFunction::ball(1, amp, radius).unwrap();
        let z = TestFunction::zero(1).unwrap();
        let m = |l: f64| {
            let q = LevelSetQuery::new(u.clone(), z.clone(), p, l).unwrap();
            l.powf(p) * exact_single_measure(&q).unwrap().measure
        };
        let (a, b) = (m(l1), m(l2));
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()));
    }

    /// The exact weak quasinorm p-power is |c|^p-homogeneous and monotone
    /// under scaling up.
    #[test]
    fn weak_quasinorm_homogeneity(
        amp in 0.2..3.0f64,
        c in 0.1..4.0f64,
        p in 1.0..3.0f64,
    ) {
        let f = TestFunction::radial_step(1, vec![0.5, 1.5], vec![amp, -0.3 * amp]).unwrap();
        let cf = TestFunction::scaled(c, f.clone()).unwrap();
        let wf = exact_weak_lp_p_power(&f, p).unwrap();
        let wcf = exact_weak_lp_p_power(&cf, p).unwrap();
        prop_assert!((wcf - c.powf(p) * wf).abs() <= 1e-9 * wcf.max(1.0));
    }

    /// 17-significant-digit float formatting reparses to the exact value.
    #[test]
    fn float_format_round_trips(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        prop_assert_eq!(fmt_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}
