//! Prices, the decomposed dual, average-price identities and welfare.

use serde::Serialize;

use crate::costfn::CostFunction;
use crate::kkt::{NewtonOptions, SeparableProgram, SolveError};
use crate::numeric::{derivative_from, max_abs, trapezoid};
use crate::scenario::Scenario;
use crate::transcribe::{balance_weights, cells_to_nodes, soc_row, DiscreteSolution, Scheme};

/// Equilibrium price: the negated SoC co-state.
pub fn equilibrium_price(sol: &DiscreteSolution) -> Vec<f64> {
    sol.lambda_mean().iter().map(|l| -l).collect()
}

/// Price divided by its largest magnitude (all zeros for a zero price).
pub fn normalized_price(price: &[f64]) -> Vec<f64> {
    let m = max_abs(price.iter().copied());
    if m > 0.0 {
        price.iter().map(|p| p / m).collect()
    } else {
        vec![0.0; price.len()]
    }
}

/// max over k >= 1 of |price_k - rho_k|.
pub fn price_multiplier_gap(sol: &DiscreteSolution) -> f64 {
    let p = equilibrium_price(sol);
    max_abs((1..p.len()).map(|k| p[k] - sol.rho[k]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceReport {
    pub price: Vec<f64>,
    pub price_normalized: Vec<f64>,
    pub rho_avg: f64,
    pub mc_g_avg: f64,
    pub mv_avg: Vec<f64>,
    /// None for classes without leakage (identity not applicable).
    pub e_d: Vec<Option<f64>>,
    pub e_g: f64,
    pub mv_identity_residual: Vec<Option<f64>>,
    pub mv_identity_relative: Vec<Option<f64>>,
    pub mc_identity_residual: f64,
    pub mc_identity_relative: f64,
    pub price_multiplier_gap: f64,
    pub dual_value: Option<f64>,
    pub duality_gap: Option<f64>,
    pub welfare: f64,
    pub qos: Vec<f64>,
    pub class_names: Vec<String>,
    pub averaging_window: (f64, f64),
}

fn rel(res: f64, terms: &[f64]) -> f64 {
    let s = terms.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if s > 0.0 {
        res / s
    } else {
        res
    }
}

/// Averages over (t_1, T]; the price right after the initial jump is taken at node 1.
pub fn averages(sol: &DiscreteSolution, scenario: &Scenario) -> PriceReport {
    let n = sol.grid.steps;
    let h = sol.grid.h();
    let window = sol.grid.horizon - sol.grid.t(1);
    let avg = |a: &[f64]| trapezoid(&a[1..], h) / window;
    let price = equilibrium_price(sol);
    let rho_avg = avg(&price);
    let cg = scenario.generation.cost_g;
    let kappa = scenario.generation.ramp_kappa;
    let mc: Vec<f64> = sol.g.iter().map(|&g| cg.d1(g)).collect();
    let mc_g_avg = avg(&mc);
    let e_g = 2.0 * kappa * (sol.gamma[1] - sol.gamma[n]);
    let mc_res = rho_avg - mc_g_avg - e_g / window;

    let mut mv_avg = Vec::new();
    let (mut e_d, mut mv_res, mut mv_rel) = (Vec::new(), Vec::new(), Vec::new());
    for (i, c) in scenario.classes.iter().enumerate() {
        let mv: Vec<f64> = sol.x[i].iter().map(|&x| -c.cost.d1(x)).collect();
        let a = avg(&mv);
        mv_avg.push(a);
        if c.alpha > 0.0 {
            let ed = (price[n] - price[1]) / c.alpha;
            let r = rho_avg - a / c.alpha - ed / window;
            e_d.push(Some(ed));
            mv_res.push(Some(r));
            mv_rel.push(Some(rel(r, &[rho_avg, a / c.alpha, ed / window])));
        } else {
            e_d.push(None);
            mv_res.push(None);
            mv_rel.push(None);
        }
    }
    let (welfare, qos) = welfare_and_qos(sol, scenario);
    PriceReport {
        price_normalized: normalized_price(&price),
        price,
        rho_avg,
        mc_g_avg,
        mv_avg,
        e_d,
        e_g,
        mv_identity_residual: mv_res,
        mv_identity_relative: mv_rel,
        mc_identity_residual: mc_res,
        mc_identity_relative: rel(mc_res, &[rho_avg, mc_g_avg, e_g / window]),
        price_multiplier_gap: price_multiplier_gap(sol),
        dual_value: None,
        duality_gap: None,
        welfare,
        qos,
        class_names: sol.class_names.clone(),
        averaging_window: (sol.grid.t(1), sol.grid.horizon),
    }
}

/// Welfare is the negated objective; QoS_i is the trapezoid integral of c_i(x_i).
pub fn welfare_and_qos(sol: &DiscreteSolution, scenario: &Scenario) -> (f64, Vec<f64>) {
    let h = sol.grid.h();
    let qos = scenario
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let v: Vec<f64> = sol.x[i].iter().map(|&x| c.cost.eval(x)).collect();
            trapezoid(&v, h)
        })
        .collect();
    (-sol.objective, qos)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorResponse {
    pub g: Vec<f64>,
    /// Node values of the ramp rate.
    pub gamma: Vec<f64>,
    pub value: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassResponse {
    /// Raw SoC unknowns (x_0 pinned, then one per interval).
    pub x_raw: Vec<f64>,
    /// Node values.
    pub x: Vec<f64>,
    pub value: f64,
    pub iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualValue {
    /// -inf when the price does not vanish at the horizon.
    pub value: f64,
    pub balance_term: f64,
    pub generator: Option<GeneratorResponse>,
    pub classes: Vec<ClassResponse>,
}

/// Lagrangian dual of the balance constraint, evaluated by solving the
/// generator and per-class subproblems separately.
pub fn dual_value(rho: &[f64], scenario: &Scenario, scheme: Scheme, opts: &NewtonOptions) -> Result<DualValue, SolveError> {
    let grid = scenario.grid;
    let (n, h) = (grid.steps, grid.h());
    assert_eq!(rho.len(), n + 1, "price must be sampled on the grid");
    let b = balance_weights(scheme, &grid);
    let ell = &scenario.net_load.values;
    let balance_term: f64 = (0..=n).map(|k| b[k] * rho[k] * ell[k]).sum();
    let scale = 1.0 + max_abs(rho.iter().copied());
    if rho[n].abs() > 1e-9 * scale {
        // z_N is then unbounded in every class subproblem
        return Ok(DualValue {
            value: f64::NEG_INFINITY,
            balance_term,
            generator: None,
            classes: Vec::new(),
        });
    }

    let generator = generator_response(rho, scenario, scheme, &b, opts)?;
    let mut classes = Vec::new();
    for i in 0..scenario.m() {
        classes.push(class_response(rho, scenario, scheme, &b, i, h, opts)?);
    }
    let value = balance_term + generator.value + classes.iter().map(|c| c.value).sum::<f64>();
    Ok(DualValue {
        value,
        balance_term,
        generator: Some(generator),
        classes,
    })
}

fn generator_response(
    rho: &[f64],
    scenario: &Scenario,
    scheme: Scheme,
    b: &[f64],
    opts: &NewtonOptions,
) -> Result<GeneratorResponse, SolveError> {
    let grid = scenario.grid;
    let (n, h) = (grid.steps, grid.h());
    let cg = scenario.generation.cost_g;
    let ramp = CostFunction::quadratic(scenario.generation.ramp_kappa);
    let mut p = SeparableProgram::default();
    let mut gi = Vec::new();
    let mut ri = Vec::new();
    for k in 0..=n {
        gi.push(p.add_var(k, Some((cg, b[k]))));
        ri.push(p.add_var(k, Some((ramp, if k == 0 { 0.0 } else { h }))));
        p.linear[gi[k]] = -b[k] * rho[k];
    }
    for k in 1..=n {
        p.add_row(vec![(gi[k - 1], 1.0), (gi[k], -1.0), (ri[k], h)], 0.0);
    }
    let z0_sum: f64 = scenario.z0.iter().sum();
    p.add_row(vec![(gi[0], 1.0)], scenario.net_load.values[0] - z0_sum);
    p.add_row(vec![(ri[0], 1.0), (ri[1], -1.0)], 0.0);
    let r = p.solve(opts)?;
    let g: Vec<f64> = gi.iter().map(|&j| r.v[j]).collect();
    let raw: Vec<f64> = ri.iter().map(|&j| r.v[j]).collect();
    let gamma = match scheme {
        Scheme::Trapezoidal => {
            let mut o = cells_to_nodes(&raw);
            o[0] = raw[1];
            o
        }
        Scheme::Euler => {
            let mut o = raw[1..].to_vec();
            o.push(0.0);
            o
        }
    };
    Ok(GeneratorResponse {
        g,
        gamma,
        value: p.objective(&r.v),
        iters: r.iters,
    })
}

/// Class subproblem with the deviation eliminated through the SoC rows,
/// leaving an unconstrained problem in x_1..x_N.
fn class_response(
    rho: &[f64],
    scenario: &Scenario,
    scheme: Scheme,
    b: &[f64],
    i: usize,
    h: f64,
    opts: &NewtonOptions,
) -> Result<ClassResponse, SolveError> {
    let n = scenario.grid.steps;
    let class = &scenario.classes[i];
    let x0 = scenario.x0[i];
    let mut p = SeparableProgram::default();
    for k in 1..=n {
        p.add_var(k, Some((class.cost, h)));
    }
    // w_k = -(a x_k + c x_{k+1}) / d enters the Lagrangian as -b_k rho_k w_k
    let mut constant = 0.0;
    for k in 0..n {
        let r = soc_row(scheme, class.alpha, h, k);
        let s = b[k] * rho[k] / r.d;
        if k == 0 {
            constant += s * r.a * x0;
        } else {
            p.linear[k - 1] += s * r.a;
        }
        p.linear[k] += s * r.c;
    }
    let res = p.solve(opts)?;
    let mut x_raw = vec![x0];
    x_raw.extend_from_slice(&res.v);
    let x = match scheme {
        Scheme::Trapezoidal => {
            let mut o = cells_to_nodes(&x_raw);
            o[0] = x0;
            o
        }
        Scheme::Euler => x_raw.clone(),
    };
    Ok(ClassResponse {
        x_raw,
        x,
        value: p.objective(&res.v) + constant,
        iters: res.iters,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EulerLagrangeResiduals {
    /// max_k>=1 |c_g'(g) - 2 kappa dgamma/dt - price|.
    pub generator: f64,
    /// Per class, max_k>=1 |c_i'(x_i) + alpha_i price - dprice/dt|.
    pub classes: Vec<f64>,
    /// |2 kappa gamma(T)|.
    pub terminal_ramp: f64,
    /// |price(T)|.
    pub terminal_price: f64,
}

pub fn euler_lagrange_residuals(rho: &[f64], dual: &DualValue, scenario: &Scenario) -> Option<EulerLagrangeResiduals> {
    let gen = dual.generator.as_ref()?;
    let n = scenario.grid.steps;
    let h = scenario.grid.h();
    let kappa = scenario.generation.ramp_kappa;
    let cg = scenario.generation.cost_g;
    let dgam = derivative_from(&gen.gamma, h, 1);
    let drho = derivative_from(rho, h, 1);
    let generator = max_abs((1..=n).map(|k| cg.d1(gen.g[k]) - 2.0 * kappa * dgam[k] - rho[k]));
    let classes = scenario
        .classes
        .iter()
        .zip(&dual.classes)
        .map(|(c, r)| max_abs((1..=n).map(|k| c.cost.d1(r.x[k]) + c.alpha * rho[k] - drho[k])))
        .collect();
    Some(EulerLagrangeResiduals {
        generator,
        classes,
        terminal_ramp: (2.0 * kappa * gen.gamma[n]).abs(),
        terminal_price: rho[n].abs(),
    })
}

/// Averages plus the dual value at the equilibrium price.
pub fn price_report(sol: &DiscreteSolution, scenario: &Scenario, opts: &NewtonOptions) -> Result<PriceReport, SolveError> {
    let mut rep = averages(sol, scenario);
    let scheme = sol.scheme.unwrap_or_default();
    let d = dual_value(&rep.price, scenario, scheme, opts)?;
    rep.dual_value = Some(d.value);
    rep.duality_gap = Some(sol.objective - d.value);
    Ok(rep)
}
