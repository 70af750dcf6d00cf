#![allow(dead_code)]

use std::path::PathBuf;

use dispatch::costfn::CostFunction;
use dispatch::kkt::NewtonOptions;
use dispatch::scenario::{load_scenario_file, LoadClass, NetLoadSource, Scenario, TimeGrid};
use dispatch::transcribe::{build, solve, DiscreteProgram, DiscreteSolution, Scheme};
use nalgebra::{DMatrix, DVector};

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

pub fn scenario(name: &str, steps: usize) -> Scenario {
    load_scenario_file(&scenario_path(name)).unwrap().with_steps(steps).unwrap()
}

pub fn duck(steps: usize) -> Scenario {
    scenario("five_class_duck.toml", steps)
}

pub fn solved(s: &Scenario, scheme: Scheme) -> DiscreteSolution {
    solve(&build(s, scheme), &NewtonOptions::default()).unwrap()
}

pub fn class(name: &str, alpha: f64, capacity: f64, cost: CostFunction) -> LoadClass {
    LoadClass {
        name: name.into(),
        alpha,
        capacity,
        cost,
    }
}

/// Two quadratic classes and a quadratic generator on a short duck curve,
/// started away from rest.
pub fn lq_scenario(steps: usize) -> Scenario {
    Scenario::new(
        vec![
            class("fast", 0.25, 4.0, CostFunction::quadratic(0.5)),
            class("slow", 0.02, 2.0, CostFunction::quadratic(2.0)),
        ],
        0.3,
        0.5,
        None,
        TimeGrid::new(6.0, steps).unwrap(),
        NetLoadSource::Duck {
            base: 30.0,
            swing: 10.0,
            seed: 3,
        },
        vec![0.4, -0.2],
        vec![0.1, 0.3],
    )
    .unwrap()
}

/// One-shot dense solve of the KKT system of a program with quadratic
/// costs: H v + grad(0) + A^T nu = 0, A v = b.
pub fn dense_kkt_solve(p: &DiscreteProgram) -> (Vec<f64>, Vec<f64>) {
    let (n, m) = (p.n_vars(), p.n_constraints());
    let zero = vec![0.0; n];
    let (g0, hdiag) = p.gradient_hessian(&zero);
    let mut k = DMatrix::<f64>::zeros(n + m, n + m);
    for (i, h) in hdiag.iter().enumerate() {
        k[(i, i)] = *h;
    }
    for (r, c, a) in p.jacobian_triplets() {
        k[(n + r, c)] += a;
        k[(c, n + r)] += a;
    }
    let mut rhs = DVector::<f64>::zeros(n + m);
    for i in 0..n {
        rhs[i] = -g0[i];
    }
    for (r, b) in p.constraint_rhs().iter().enumerate() {
        rhs[n + r] = *b;
    }
    let sol = k.lu().solve(&rhs).expect("KKT matrix is nonsingular");
    (sol.rows(0, n).iter().copied().collect(), sol.rows(n, m).iter().copied().collect())
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

pub fn stddev(a: &[f64]) -> f64 {
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    (a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
