//! Independent checks of the solver: a dense one-shot KKT solve, random
//! feasible points, a forward integration of the cheap control, and the
//! Lagrangian dual.

mod common;

use common::*;
use dispatch::collapse::reconstruct;
use dispatch::economics::{dual_value, equilibrium_price, euler_lagrange_residuals};
use dispatch::kkt::{LinearSolver, NewtonOptions};
use dispatch::optimality::{cheap_redistribution, CheapControl};
use dispatch::transcribe::{build, solve, Scheme};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SCHEMES: [Scheme; 2] = [Scheme::Trapezoidal, Scheme::Euler];

#[test]
fn newton_matches_dense_kkt_solve_on_lq() {
    for scheme in SCHEMES {
        for n in [8, 50] {
            let p = build(&lq_scenario(n), scheme);
            let sol = solve(&p, &NewtonOptions::default()).unwrap();
            let (v, nu) = dense_kkt_solve(&p);
            assert!(sol.newton_iters <= 2, "{scheme} N={n}: {} iterations", sol.newton_iters);
            assert!(max_rel_diff(&sol.raw_primal, &v) <= 1e-8, "{scheme} N={n} primal");
            assert!(max_rel_diff(&sol.raw_dual, &nu) <= 1e-8, "{scheme} N={n} dual");
        }
    }
}

#[test]
fn banded_and_dense_linear_algebra_agree() {
    let s = duck(24);
    for scheme in SCHEMES {
        let p = build(&s, scheme);
        let banded = solve(&p, &NewtonOptions::default()).unwrap();
        let dense = solve(
            &p,
            &NewtonOptions {
                linear: LinearSolver::Dense,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(max_rel_diff(&banded.raw_primal, &dense.raw_primal) <= 1e-9);
        assert!(max_rel_diff(&banded.raw_dual, &dense.raw_dual) <= 1e-9);
    }
}

#[test]
fn projected_random_points_cost_no_less_than_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in [lq_scenario(40), duck(48)] {
        for scheme in SCHEMES {
            let p = build(&s, scheme);
            let sol = solve(&p, &NewtonOptions::default()).unwrap();
            for _ in 0..10 {
                let spread = rng.random_range(0.01..3.0);
                let guess: Vec<f64> = sol.raw_primal.iter().map(|v| v + spread * rng.random_range(-1.0..1.0)).collect();
                let q = p.project_feasible(&guess).unwrap();
                let infeas = max_abs(&p.constraint_residual(&q));
                assert!(infeas <= 1e-8, "projection infeasible by {infeas}");
                let j = p.objective(&q);
                assert!(j >= sol.objective - 1e-9 * (1.0 + sol.objective.abs()), "{j} < {}", sol.objective);
            }
        }
    }
}

/// RK4 on x' = -alpha x - z, z' = u over [0, delta].
fn integrate(c: &CheapControl, alpha: &[f64], x0: &[f64], z0: &[f64], steps: usize) -> (Vec<f64>, Vec<f64>) {
    let m = alpha.len();
    let h = c.delta / steps as f64;
    let rhs = |t: f64, y: &[f64]| -> Vec<f64> {
        let u = c.inputs(t);
        let mut d = vec![0.0; 2 * m];
        for i in 0..m {
            d[i] = -alpha[i] * y[i] - y[m + i];
            d[m + i] = u[i];
        }
        d
    };
    let mut y: Vec<f64> = x0.iter().chain(z0).copied().collect();
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = rhs(t, &y);
        let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
        let k2 = rhs(t + 0.5 * h, &y2);
        let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
        let k3 = rhs(t + 0.5 * h, &y3);
        let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
        let k4 = rhs(t + h, &y4);
        for j in 0..2 * m {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    (y[..m].to_vec(), y[m..].to_vec())
}

#[test]
fn cheap_control_moves_the_state_at_zero_net_ramp() {
    let alpha = [0.25, 0.04, 0.01, 0.1, 0.004];
    let (x0, z0) = ([1.0, 0.5, -0.2, 0.0, 0.3], [0.1, -0.1, 0.0, 0.2, -0.2]);
    let (x1, z1) = ([0.0, 1.0, 0.4, -0.3, 0.5], [-0.2, 0.1, 0.2, 0.0, -0.1]);
    let mut errors = Vec::new();
    for delta in [0.1, 0.05, 0.025] {
        let c = cheap_redistribution(&x0, &z0, &x1, &z1, delta).unwrap();
        let (x, z) = integrate(&c, &alpha, &x0, &z0, 4000);
        let ez = z.iter().zip(&z1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(ez <= 1e-8, "z misses its target by {ez}");
        errors.push(x.iter().zip(&x1).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        for k in 0..=50 {
            let t = k as f64 * delta / 50.0;
            assert!(c.inputs(t).iter().sum::<f64>().abs() <= 1e-10 / delta);
        }
    }
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.6..=2.4).contains(&ratio), "x error is not first order in delta: {errors:?}");
    }
}

fn vanishing_perturbation(rng: &mut ChaCha8Rng, base: &[f64], scale: f64) -> Vec<f64> {
    let n = base.len() - 1;
    let j = rng.random_range(1..=5) as f64;
    let a = rng.random_range(0.05..1.0) * scale;
    let b = rng.random_range(-1.0..1.0) * scale;
    base.iter()
        .enumerate()
        .map(|(k, p)| {
            let r = k as f64 / n as f64;
            p + a * (std::f64::consts::PI * j * r).sin() + b * r * (1.0 - r)
        })
        .collect()
}

#[test]
fn lagrangian_dual_is_weak_and_tight() {
    let opts = NewtonOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for s in [lq_scenario(60), duck(144)] {
        for scheme in SCHEMES {
            let sol = solved(&s, scheme);
            let price = equilibrium_price(&sol);
            let primal = sol.objective;
            let d = dual_value(&price, &s, scheme, &opts).unwrap().value;
            assert!((primal - d).abs() <= 1e-7 * (1.0 + primal.abs()), "{scheme}: primal {primal} dual {d}");
            let scale = 0.1 + max_abs(&price);
            for _ in 0..6 {
                let rho = vanishing_perturbation(&mut rng, &price, scale);
                let dv = dual_value(&rho, &s, scheme, &opts).unwrap().value;
                assert!(dv <= primal + 1e-9 * (1.0 + primal.abs()), "weak duality violated: {dv} > {primal}");
            }
            let mut bad = price.clone();
            *bad.last_mut().unwrap() = 0.5;
            assert_eq!(dual_value(&bad, &s, scheme, &opts).unwrap().value, f64::NEG_INFINITY);
        }
    }
}

#[test]
fn best_responses_at_equilibrium_price_reproduce_the_optimum() {
    let s = duck(288);
    for scheme in SCHEMES {
        let sol = solved(&s, scheme);
        let price = equilibrium_price(&sol);
        let d = dual_value(&price, &s, scheme, &NewtonOptions::default()).unwrap();
        let gen = d.generator.as_ref().unwrap();
        let eg = gen.g.iter().zip(&sol.g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(eg <= 1e-5 * (1.0 + max_abs(&sol.g)), "{scheme}: generation off by {eg}");
        for (i, r) in d.classes.iter().enumerate() {
            let ex = r.x.iter().zip(&sol.x[i]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(ex <= 1e-5 * s.classes[i].capacity, "{scheme}: class {i} SoC off by {ex}");
        }
        let el = euler_lagrange_residuals(&price, &d, &s).unwrap();
        assert!(el.terminal_price <= 1e-9);
        assert!(
            el.generator <= 0.05 * (1.0 + max_abs(&price)),
            "{scheme}: generator Euler-Lagrange residual {}",
            el.generator
        );
    }
}

#[test]
fn co_state_does_not_depend_on_the_source_pair() {
    let mut diffs = Vec::new();
    for n in [288, 576] {
        let s = duck(n);
        let sol = solved(&s, Scheme::Trapezoidal);
        let idx = |name: &str| s.class_index(name).unwrap();
        let pair = |a: &str, b: &str| {
            let (i, j) = (idx(a), idx(b));
            reconstruct(&sol.x[i], &sol.x[j], &s.classes[i], &s.classes[j]).unwrap()
        };
        let (r1, r2) = (pair("acs", "fwh"), pair("swh", "rfg"));
        let lmax = max_abs(&r1.lambda);
        let d = r1.lambda.iter().zip(&r2.lambda).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / lmax;
        assert!(d <= 1e-2, "N={n}: pairs disagree by {d} relative");
        diffs.push(d);
    }
    assert!(diffs[1] <= 0.5 * diffs[0], "pair disagreement does not shrink: {diffs:?}");
}

#[test]
fn solving_twice_is_bit_identical() {
    let s = duck(96);
    for scheme in SCHEMES {
        assert_eq!(solved(&s, scheme).to_csv(), solved(&s, scheme).to_csv());
    }
}
