mod common;

use dispatch::costfn::CostFunction;
use dispatch::numeric::derivative_from;
use dispatch::optimality::cheap_redistribution;
use dispatch::scenario::{piecewise_constant_load, synth_duck_curve, TimeGrid};
use dispatch::transcribe::{DiscreteSolution, Scheme};
use proptest::prelude::*;

fn cost_strategy() -> impl Strategy<Value = CostFunction> {
    prop_oneof![
        (0.01..10.0f64, -5.0..5.0f64).prop_map(|(g, c)| CostFunction::quadratic_centered(g, c)),
        (0.0..2.0f64, 0.01..2.0f64, 0.1..10.0f64).prop_map(|(k1, k2, cap)| CostFunction::scaled_polynomial(k1, k2, cap)),
    ]
}

fn span(c: &CostFunction) -> f64 {
    match *c {
        CostFunction::ScaledPolynomial { capacity, .. } => 2.0 * capacity,
        CostFunction::Quadratic { center, .. } => 2.0 * (1.0 + center.abs()),
    }
}

proptest! {
    #[test]
    fn inverse_derivative_round_trips(c in cost_strategy(), s in -1.0..1.0f64) {
        let v = c.center() + s * span(&c);
        let m = c.d1(v);
        let back = c.inv_d1(m).unwrap();
        prop_assert!((back - v).abs() <= 1e-9 * (1.0 + v.abs()), "v {v} back {back}");
    }

    #[test]
    fn derivatives_match_differences(c in cost_strategy(), s in -1.0..1.0f64) {
        let v = c.center() + s * span(&c);
        let e = 1e-5 * (1.0 + v.abs());
        let fd1 = (c.eval(v + e) - c.eval(v - e)) / (2.0 * e);
        let fd2 = (c.d1(v + e) - c.d1(v - e)) / (2.0 * e);
        prop_assert!((fd1 - c.d1(v)).abs() <= 1e-5 * (1.0 + c.d1(v).abs()));
        prop_assert!((fd2 - c.d2(v)).abs() <= 1e-5 * (1.0 + c.d2(v).abs()));
    }

    #[test]
    fn derivative_is_strictly_increasing(c in cost_strategy(), s in -1.0..1.0f64, gap in 1e-3..1.0f64) {
        let a = c.center() + s * span(&c);
        let b = a + gap;
        prop_assert!(c.d1(b) > c.d1(a));
        prop_assert!(c.d2(a) >= c.strong_convexity() * (1.0 - 1e-12));
        prop_assert!(c.eval(a) >= 0.0);
    }

    #[test]
    fn duck_curve_is_smooth_and_spans_the_swing(seed in 0u64..1000, base in 10.0..60.0f64, swing in 1.0..60.0f64) {
        let grid = TimeGrid::new(24.0, 288).unwrap();
        let nl = synth_duck_curve(&grid, base, swing, seed);
        let lo = nl.values.iter().cloned().fold(f64::MAX, f64::min);
        let hi = nl.values.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!((hi - lo - swing).abs() <= 1e-9 * swing);
        prop_assert!(((hi + lo) / 2.0 - base).abs() <= 1e-9 * (base + swing));
        // consecutive samples move by at most h * max|dl/dt| (+ curvature slack)
        let h = grid.h();
        let dmax = nl.derivative.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for w in nl.values.windows(2) {
            prop_assert!((w[1] - w[0]).abs() <= 1.05 * h * dmax + 1e-9);
        }
        // the stored derivative agrees with differences of the values
        let fd = derivative_from(&nl.values, h, 0);
        for k in 1..grid.steps {
            prop_assert!((fd[k] - nl.derivative[k]).abs() <= 0.02 * dmax + 1e-9);
        }
    }

    #[test]
    fn duck_curve_is_seed_deterministic(seed in 0u64..1000) {
        let grid = TimeGrid::new(24.0, 96).unwrap();
        prop_assert_eq!(synth_duck_curve(&grid, 30.0, 40.0, seed), synth_duck_curve(&grid, 30.0, 40.0, seed));
    }

    #[test]
    fn cheap_control_has_zero_net_ramp(
        dx in proptest::collection::vec(-2.0..2.0f64, 2..6),
        dz_seed in proptest::collection::vec(-2.0..2.0f64, 6),
        delta in 0.01..1.0f64,
        s in 0.0..1.0f64,
    ) {
        let m = dx.len();
        let mean = dx.iter().sum::<f64>() / m as f64;
        let dx: Vec<f64> = dx.iter().map(|v| v - mean).collect();
        let zmean = dz_seed[..m].iter().sum::<f64>() / m as f64;
        let dz: Vec<f64> = dz_seed[..m].iter().map(|v| v - zmean).collect();
        let zeros = vec![0.0; m];
        let c = cheap_redistribution(&zeros, &zeros, &dx, &dz, delta).unwrap();
        let u = c.inputs(s * delta);
        let scale = 1.0 + u.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        prop_assert!(u.iter().sum::<f64>().abs() <= 1e-12 * scale);
        prop_assert!(c.inputs(delta * 1.5).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn step_load_holds_levels(level0 in 0.0..50.0f64, jump in -40.0..40.0f64, at in 2.0..20.0f64) {
        let grid = TimeGrid::new(24.0, 96).unwrap();
        let nl = piecewise_constant_load(&grid, &[(0.0, level0), (at, level0 + jump)]).unwrap();
        for (k, v) in nl.values.iter().enumerate() {
            let t = grid.t(k);
            if t <= at - grid.h() {
                prop_assert!((v - level0).abs() < 1e-12);
            } else if t >= at {
                prop_assert!((v - level0 - jump).abs() < 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn csv_round_trip_is_lossless(seed in 0u64..100, scheme in prop_oneof![Just(Scheme::Euler), Just(Scheme::Trapezoidal)]) {
        let mut s = common::lq_scenario(16);
        if let dispatch::scenario::NetLoadSource::Duck { base, swing, .. } = s.source {
            s = dispatch::scenario::Scenario::new(
                s.classes.clone(),
                s.kappa_g(),
                s.generation.ramp_kappa,
                None,
                s.grid,
                dispatch::scenario::NetLoadSource::Duck { base, swing, seed },
                s.x0.clone(),
                s.z0.clone(),
            ).unwrap();
        }
        let sol = common::solved(&s, scheme);
        let back = DiscreteSolution::from_csv(&sol.to_csv(), &s).unwrap();
        prop_assert_eq!(&back.x, &sol.x);
        prop_assert_eq!(&back.g, &sol.g);
        prop_assert_eq!(&back.rho, &sol.rho);
        prop_assert_eq!(back.lambda_mean(), sol.lambda_mean());
    }
}
