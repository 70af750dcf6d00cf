//! Time discretization of the dispatch program and its Newton-KKT solve.
//!
//! Variables per node k = 0..N, in stage order
//! `x_0..x_{M-1}, z_0.., u_0.., g, gamma`. The layout is staggered:
//!
//! * `z_{i,k}` and `g_k` sit at the node t_k.
//! * `x_{i,k}`, `u_{i,k}` and `gamma_k` for k >= 1 describe the interval
//!   [t_{k-1}, t_k] (cell centres for the trapezoidal scheme).
//! * `x_{i,0} = x0` and `z_{i,0} = z0` are pinned; `u_{i,0}` carries the
//!   deviation right after the initial jump, used on the first interval.
//!
//! Rows: balance per node (weighted by quadrature weights so the multiplier
//! is a price), SoC dynamics per interval and class, deviation and generation
//! dynamics per interval, pins, a gamma closure at the start and a closure at
//! the end that fixes the otherwise free split of z_N among classes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::costfn::CostFunction;
use crate::kkt::{LinearSolver, NewtonOptions, SeparableProgram, SolveError};
use crate::scenario::{Scenario, ScenarioError, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Euler,
    #[default]
    Trapezoidal,
}

impl Scheme {
    pub fn nominal_order(&self) -> f64 {
        match self {
            Scheme::Euler => 1.0,
            Scheme::Trapezoidal => 2.0,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Euler => "euler",
            Scheme::Trapezoidal => "trapezoidal",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euler" => Ok(Scheme::Euler),
            "trapezoidal" | "trap" => Ok(Scheme::Trapezoidal),
            other => Err(format!("unknown scheme {other:?} (expected euler or trapezoidal)")),
        }
    }
}

/// Index arithmetic for the primal vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layout {
    pub m: usize,
    pub steps: usize,
}

impl Layout {
    pub fn per_node(&self) -> usize {
        3 * self.m + 2
    }
    pub fn n_vars(&self) -> usize {
        (self.steps + 1) * self.per_node()
    }
    pub fn x(&self, i: usize, k: usize) -> usize {
        k * self.per_node() + i
    }
    pub fn z(&self, i: usize, k: usize) -> usize {
        k * self.per_node() + self.m + i
    }
    pub fn u(&self, i: usize, k: usize) -> usize {
        k * self.per_node() + 2 * self.m + i
    }
    pub fn g(&self, k: usize) -> usize {
        k * self.per_node() + 3 * self.m
    }
    pub fn gamma(&self, k: usize) -> usize {
        k * self.per_node() + 3 * self.m + 1
    }
}

/// Row offsets of each constraint block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowBlocks {
    pub balance: usize,
    pub soc: usize,
    pub deviation: usize,
    pub generation: usize,
    pub pins: usize,
    pub gamma_closure: usize,
    pub terminal: usize,
    pub end: usize,
}

/// x-row k of one class reads `a x_k + c x_{k+1} + d w_k = 0`, where w_0 is
/// the post-jump deviation and w_k = z_k otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SocRow {
    pub a: f64,
    pub c: f64,
    pub d: f64,
}

pub(crate) fn soc_row(scheme: Scheme, alpha: f64, h: f64, k: usize) -> SocRow {
    match scheme {
        Scheme::Trapezoidal if k == 0 => SocRow {
            a: 1.0,
            c: -(1.0 + 0.5 * alpha * h),
            d: -0.5 * h,
        },
        Scheme::Trapezoidal => SocRow {
            a: 1.0 - 0.5 * alpha * h,
            c: -(1.0 + 0.5 * alpha * h),
            d: -h,
        },
        Scheme::Euler => SocRow {
            a: 1.0 - alpha * h,
            c: -1.0,
            d: -h,
        },
    }
}

/// Balance-row quadrature weights b_k.
pub(crate) fn balance_weights(scheme: Scheme, grid: &TimeGrid) -> Vec<f64> {
    let (n, h) = (grid.steps, grid.h());
    let mut b = vec![h; n + 1];
    if scheme == Scheme::Trapezoidal {
        b[0] = 0.5 * h;
        b[n] = 0.5 * h;
    }
    b
}

#[derive(Debug, Clone)]
pub struct DiscreteProgram {
    pub scheme: Scheme,
    pub layout: Layout,
    pub rows: RowBlocks,
    pub scenario: Scenario,
    pub(crate) nlp: SeparableProgram,
}

pub fn build(scenario: &Scenario, scheme: Scheme) -> DiscreteProgram {
    let m = scenario.m();
    let grid = scenario.grid;
    let (n, h) = (grid.steps, grid.h());
    let lay = Layout { m, steps: n };
    let b = balance_weights(scheme, &grid);
    let ell = &scenario.net_load.values;
    let ramp = CostFunction::quadratic(scenario.generation.ramp_kappa);
    let cg = scenario.generation.cost_g;

    let mut p = SeparableProgram::default();
    for k in 0..=n {
        let wx = if k == 0 { 0.0 } else { h };
        for i in 0..m {
            p.add_var(k, Some((scenario.classes[i].cost, wx)));
        }
        for _ in 0..2 * m {
            p.add_var(k, None);
        }
        p.add_var(k, Some((cg, b[k])));
        p.add_var(k, Some((ramp, if k == 0 { 0.0 } else { h })));
    }
    debug_assert_eq!(p.n(), lay.n_vars());

    let balance = p.m();
    for k in 0..=n {
        let mut e = vec![(lay.g(k), -b[k])];
        for i in 0..m {
            let w = if k == 0 { lay.u(i, 0) } else { lay.z(i, k) };
            e.push((w, -b[k]));
        }
        p.add_row(e, -b[k] * ell[k]);
    }
    let soc = p.m();
    for i in 0..m {
        let alpha = scenario.classes[i].alpha;
        for k in 0..n {
            let r = soc_row(scheme, alpha, h, k);
            let w = if k == 0 { lay.u(i, 0) } else { lay.z(i, k) };
            p.add_row(vec![(lay.x(i, k), r.a), (lay.x(i, k + 1), r.c), (w, r.d)], 0.0);
        }
    }
    let deviation = p.m();
    for i in 0..m {
        for k in 1..=n {
            p.add_row(vec![(lay.z(i, k), 1.0), (lay.z(i, k - 1), -1.0), (lay.u(i, k), -h)], 0.0);
        }
    }
    let generation = p.m();
    for k in 1..=n {
        p.add_row(vec![(lay.g(k - 1), 1.0), (lay.g(k), -1.0), (lay.gamma(k), h)], 0.0);
    }
    let pins = p.m();
    for i in 0..m {
        p.add_row(vec![(lay.x(i, 0), 1.0)], scenario.x0[i]);
        p.add_row(vec![(lay.z(i, 0), 1.0)], scenario.z0[i]);
    }
    let z0_sum: f64 = scenario.z0.iter().sum();
    p.add_row(vec![(lay.g(0), 1.0)], ell[0] - z0_sum);
    let gamma_closure = p.m();
    p.add_row(vec![(lay.gamma(0), 1.0), (lay.gamma(1), -1.0)], 0.0);
    let terminal = p.m();
    // Difference of u_N (second order when possible) is equal across classes.
    let stencil: &[(usize, f64)] = if n >= 3 {
        &[(0, 1.0), (1, -2.0), (2, 1.0)]
    } else {
        &[(0, 1.0), (1, -1.0)]
    };
    for i in 0..m.saturating_sub(1) {
        let mut e = Vec::new();
        for &(back, c) in stencil {
            e.push((lay.u(i, n - back), c));
            e.push((lay.u(m - 1, n - back), -c));
        }
        p.add_row(e, 0.0);
    }
    let end = p.m();
    DiscreteProgram {
        scheme,
        layout: lay,
        rows: RowBlocks {
            balance,
            soc,
            deviation,
            generation,
            pins,
            gamma_closure,
            terminal,
            end,
        },
        scenario: scenario.clone(),
        nlp: p,
    }
}

impl DiscreteProgram {
    pub fn n_vars(&self) -> usize {
        self.nlp.n()
    }

    pub fn n_constraints(&self) -> usize {
        self.nlp.m()
    }

    /// Quadrature of the generation, ramp and SoC costs at a primal point.
    pub fn objective(&self, point: &[f64]) -> f64 {
        self.nlp.objective(point)
    }

    /// Constraint Jacobian as (row, column, value) triplets.
    pub fn jacobian_triplets(&self) -> Vec<(usize, usize, f64)> {
        self.nlp
            .rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(j, a)| (r, j, a)))
            .collect()
    }

    pub fn constraint_rhs(&self) -> &[f64] {
        &self.nlp.rhs
    }

    /// Objective gradient and diagonal Hessian.
    pub fn gradient_hessian(&self, point: &[f64]) -> (Vec<f64>, Vec<f64>) {
        self.nlp.gradient_hessian(point)
    }

    pub fn constraint_residual(&self, point: &[f64]) -> Vec<f64> {
        self.nlp.row_residual(point)
    }

    pub fn kkt_residual(&self, point: &[f64], multipliers: &[f64]) -> f64 {
        self.nlp.kkt_residual(point, multipliers)
    }

    /// Nearest feasible point in the Euclidean sense.
    pub fn project_feasible(&self, point: &[f64]) -> Result<Vec<f64>, SolveError> {
        self.nlp.project(point, LinearSolver::Banded)
    }

    /// Turns a raw primal/dual pair into node trajectories.
    pub fn extract(&self, v: Vec<f64>, nu: Vec<f64>, iters: usize, residual: f64) -> DiscreteSolution {
        extract(self, v, nu, iters, residual)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSolution {
    pub scheme: Option<Scheme>,
    pub grid: TimeGrid,
    pub class_names: Vec<String>,
    pub t: Vec<f64>,
    /// Node values, `[class][node]`.
    pub x: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub g: Vec<f64>,
    pub gamma: Vec<f64>,
    /// SoC co-state per class.
    pub lambda: Vec<Vec<f64>>,
    /// Deviation co-state per class.
    pub beta: Vec<Vec<f64>>,
    /// Balance multiplier.
    pub rho: Vec<f64>,
    /// Generation-dynamics multiplier.
    pub eta: Vec<f64>,
    /// Deviation-dynamics multipliers (identically zero at an optimum).
    pub q: Vec<Vec<f64>>,
    pub objective: f64,
    pub newton_iters: usize,
    pub kkt_residual: f64,
    #[serde(skip)]
    pub raw_primal: Vec<f64>,
    #[serde(skip)]
    pub raw_dual: Vec<f64>,
}

impl DiscreteSolution {
    pub fn m(&self) -> usize {
        self.x.len()
    }

    /// Class-averaged SoC co-state.
    pub fn lambda_mean(&self) -> Vec<f64> {
        mean_rows(&self.lambda)
    }

    pub fn beta_mean(&self) -> Vec<f64> {
        mean_rows(&self.beta)
    }

    pub fn z_sum(&self) -> Vec<f64> {
        sum_rows(&self.z)
    }

    pub fn u_sum(&self) -> Vec<f64> {
        sum_rows(&self.u)
    }
}

fn mean_rows(a: &[Vec<f64>]) -> Vec<f64> {
    let mut s = sum_rows(a);
    let m = a.len() as f64;
    s.iter_mut().for_each(|v| *v /= m);
    s
}

fn sum_rows(a: &[Vec<f64>]) -> Vec<f64> {
    let mut s = vec![0.0; a[0].len()];
    for row in a {
        for (acc, v) in s.iter_mut().zip(row) {
            *acc += v;
        }
    }
    s
}

pub fn solve(program: &DiscreteProgram, opts: &NewtonOptions) -> Result<DiscreteSolution, SolveError> {
    let r = program.nlp.solve(opts)?;
    Ok(extract(program, r.v, r.nu, r.iters, r.residual))
}

/// Half-node samples a[1..=N] (a[k] on the cell ending at t_k) to nodes 1..=N
/// by cubic interpolation, quadratic near the ends. Index 0 is left as NaN.
pub(crate) fn cells_to_nodes(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let mut o = vec![f64::NAN; n + 1];
    if n < 3 {
        // N = 2: linear
        o[1] = 0.5 * (a[1] + a[2]);
        o[2] = 1.5 * a[2] - 0.5 * a[1];
        return o;
    }
    for k in 2..n - 1 {
        o[k] = (-a[k - 1] + 9.0 * a[k] + 9.0 * a[k + 1] - a[k + 2]) / 16.0;
    }
    o[1] = (3.0 * a[1] + 6.0 * a[2] - a[3]) / 8.0;
    o[n - 1] = (-a[n - 2] + 6.0 * a[n - 1] + 3.0 * a[n]) / 8.0;
    o[n] = (15.0 * a[n] - 10.0 * a[n - 1] + 3.0 * a[n - 2]) / 8.0;
    o
}

/// As `cells_to_nodes`, ignoring the first cell (it contains the initial jump).
fn cells_to_nodes_skip_first(a: &[f64]) -> Vec<f64> {
    let n = a.len() - 1;
    let mut o = cells_to_nodes(a);
    if n >= 5 {
        o[1] = (15.0 * a[2] - 10.0 * a[3] + 3.0 * a[4]) / 8.0;
        o[2] = (3.0 * a[2] + 6.0 * a[3] - a[4]) / 8.0;
    }
    o
}

fn extract(p: &DiscreteProgram, v: Vec<f64>, nu: Vec<f64>, iters: usize, residual: f64) -> DiscreteSolution {
    let s = &p.scenario;
    let lay = p.layout;
    let (m, n) = (lay.m, lay.steps);
    let h = s.grid.h();
    let rb = p.rows;
    let kappa = s.generation.ramp_kappa;
    let cg = s.generation.cost_g;

    let col = |f: &dyn Fn(usize) -> usize| -> Vec<f64> { (0..=n).map(|k| v[f(k)]).collect() };
    let x_raw: Vec<Vec<f64>> = (0..m).map(|i| col(&|k| lay.x(i, k))).collect();
    let z: Vec<Vec<f64>> = (0..m).map(|i| col(&|k| lay.z(i, k))).collect();
    let u_raw: Vec<Vec<f64>> = (0..m).map(|i| col(&|k| lay.u(i, k))).collect();
    let g = col(&|k| lay.g(k));
    let gam_raw = col(&|k| lay.gamma(k));
    let rho: Vec<f64> = nu[rb.balance..rb.balance + n + 1].to_vec();
    let mu: Vec<&[f64]> = (0..m).map(|i| &nu[rb.soc + i * n..rb.soc + (i + 1) * n]).collect();
    let qrow: Vec<&[f64]> = (0..m).map(|i| &nu[rb.deviation + i * n..rb.deviation + (i + 1) * n]).collect();
    // eta_row[k] for k = 1..=N, plus the value the interior stationarity
    // condition would give one step past the end.
    let mut eta_row = vec![0.0; n + 2];
    eta_row[1..=n].copy_from_slice(&nu[rb.generation..rb.generation + n]);
    eta_row[n + 1] = eta_row[n] - h * (cg.d1(g[n]) - rho[n]);

    let mut lambda = vec![vec![0.0; n + 1]; m];
    for i in 0..m {
        let alpha = s.classes[i].alpha;
        let c = s.classes[i].cost;
        lambda[i][..n].copy_from_slice(mu[i]);
        // virtual multiplier of an x-row past the end (discrete transversality)
        let r = soc_row(p.scheme, alpha, h, n.max(1));
        lambda[i][n] = (-r.c * mu[i][n - 1] - h * c.d1(x_raw[i][n])) / r.a;
    }

    let (x, u, gamma, eta, q) = match p.scheme {
        Scheme::Trapezoidal => {
            let x: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    let mut o = cells_to_nodes(&x_raw[i]);
                    o[0] = x_raw[i][0];
                    o
                })
                .collect();
            let u: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    let mut o = cells_to_nodes_skip_first(&u_raw[i]);
                    o[0] = u_raw[i][1];
                    o
                })
                .collect();
            let mut gamma = cells_to_nodes(&gam_raw);
            gamma[0] = if n >= 3 {
                (15.0 * gam_raw[1] - 10.0 * gam_raw[2] + 3.0 * gam_raw[3]) / 8.0
            } else {
                gam_raw[1]
            };
            let mut eta = vec![0.0; n + 1];
            eta[0] = eta_row[1];
            for k in 1..=n {
                eta[k] = 0.5 * (eta_row[k] + eta_row[k + 1]);
            }
            let q: Vec<Vec<f64>> = (0..m)
                .map(|i| {
                    let mut qq = vec![0.0; n + 2];
                    qq[1..=n].copy_from_slice(qrow[i]);
                    (0..=n).map(|k| 0.5 * (qq[k] + qq[k + 1])).collect()
                })
                .collect();
            (x, u, gamma, eta, q)
        }
        Scheme::Euler => {
            let shift = |a: &[f64], last: f64| -> Vec<f64> {
                let mut o: Vec<f64> = a[1..].to_vec();
                o.push(last);
                o
            };
            let u: Vec<Vec<f64>> = (0..m).map(|i| shift(&u_raw[i], u_raw[i][n])).collect();
            let eta = eta_row[1..].to_vec();
            let gamma = shift(&gam_raw, -eta_row[n + 1] / (2.0 * kappa));
            let q: Vec<Vec<f64>> = (0..m).map(|i| shift(&[&[0.0][..], qrow[i]].concat(), 0.0)).collect();
            (x_raw.clone(), u, gamma, eta, q)
        }
    };
    let beta: Vec<Vec<f64>> = q
        .iter()
        .map(|qi| qi.iter().zip(&eta).map(|(a, b)| a - b).collect())
        .collect();

    DiscreteSolution {
        scheme: Some(p.scheme),
        grid: s.grid,
        class_names: s.classes.iter().map(|c| c.name.clone()).collect(),
        t: s.grid.times(),
        x,
        z,
        u,
        g,
        gamma,
        lambda,
        beta,
        rho,
        eta,
        q,
        objective: p.nlp.objective(&v),
        newton_iters: iters,
        kkt_residual: residual,
        raw_primal: v,
        raw_dual: nu,
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

pub fn solution_header(names: &[String]) -> Vec<String> {
    let mut h: Vec<String> = ["t", "g", "gamma", "rho", "lambda", "beta"].iter().map(|s| s.to_string()).collect();
    for prefix in ["x", "z", "u"] {
        h.extend(names.iter().map(|n| format!("{prefix}_{n}")));
    }
    h.push("price".into());
    h.push("price_normalized".into());
    h
}

impl DiscreteSolution {
    /// One row per node; the equilibrium price and its normalized form are appended.
    pub fn to_csv(&self) -> String {
        let lam = self.lambda_mean();
        let beta = self.beta_mean();
        let price = crate::economics::equilibrium_price(self);
        let pn = crate::economics::normalized_price(&price);
        let mut out = solution_header(&self.class_names).join(",");
        out.push('\n');
        for k in 0..self.t.len() {
            let mut row = vec![self.t[k], self.g[k], self.gamma[k], self.rho[k], lam[k], beta[k]];
            for a in [&self.x, &self.z, &self.u] {
                row.extend(a.iter().map(|c| c[k]));
            }
            row.push(price[k]);
            row.push(pn[k]);
            let cells: Vec<String> = row.into_iter().map(fmt_f64).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Reads a solution CSV written by `to_csv`; the scenario supplies class
    /// names and the horizon, the row count fixes N. Per-class co-states are
    /// the exported class averages.
    pub fn from_csv(text: &str, scenario: &Scenario) -> Result<DiscreteSolution, ScenarioError> {
        let names: Vec<String> = scenario.classes.iter().map(|c| c.name.clone()).collect();
        let expected = solution_header(&names);
        let mut rdr = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| ScenarioError::Parse(e.to_string()))?
            .iter()
            .map(|s| s.to_string())
            .collect();
        if headers.len() < expected.len() - 2 || headers[..expected.len() - 2] != expected[..expected.len() - 2] {
            return Err(ScenarioError::Parse(format!(
                "solution header does not match scenario classes: {}",
                headers.join(",")
            )));
        }
        let mut cols: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
        for rec in rdr.records() {
            let rec = rec.map_err(|e| ScenarioError::Parse(e.to_string()))?;
            for (j, cell) in rec.iter().enumerate() {
                let v: f64 = cell
                    .trim()
                    .parse()
                    .map_err(|e| ScenarioError::Parse(format!("bad number {cell:?}: {e}")))?;
                cols[j].push(v);
            }
        }
        let rows = cols[0].len();
        if rows < 3 {
            return Err(ScenarioError::Parse(format!("solution has only {rows} rows")));
        }
        let n = rows - 1;
        let grid = TimeGrid::new(scenario.grid.horizon, n)?;
        for (k, &t) in cols[0].iter().enumerate() {
            if (t - grid.t(k)).abs() > 1e-9 * (1.0 + grid.horizon) {
                return Err(ScenarioError::Validation(format!(
                    "time column does not match a uniform grid on [0, {}] at row {k}",
                    grid.horizon
                )));
            }
        }
        let m = names.len();
        let block = |start: usize| -> Vec<Vec<f64>> { (0..m).map(|i| cols[start + i].clone()).collect() };
        let lam = cols[4].clone();
        let beta = cols[5].clone();
        Ok(DiscreteSolution {
            scheme: None,
            grid,
            class_names: names,
            t: cols[0].clone(),
            x: block(6),
            z: block(6 + m),
            u: block(6 + 2 * m),
            g: cols[1].clone(),
            gamma: cols[2].clone(),
            lambda: vec![lam; m],
            beta: vec![beta; m],
            rho: cols[3].clone(),
            eta: vec![f64::NAN; rows],
            q: vec![vec![0.0; rows]; m],
            objective: f64::NAN,
            newton_iters: 0,
            kkt_residual: f64::NAN,
            raw_primal: Vec::new(),
            raw_dual: Vec::new(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{LoadClass, NetLoadSource};

    fn one_class(steps: usize) -> Scenario {
        Scenario::new(
            vec![LoadClass {
                name: "a".into(),
                alpha: 0.1,
                capacity: 1.0,
                cost: CostFunction::quadratic(1.0),
            }],
            1.0,
            1.0,
            None,
            TimeGrid::new(24.0, steps).unwrap(),
            NetLoadSource::Steps {
                levels: vec![(0.0, 30.0)],
            },
            vec![0.0],
            vec![0.0],
        )
        .unwrap()
    }

    #[test]
    fn variable_counts() {
        let s = one_class(2);
        let p = build(&s, Scheme::Trapezoidal);
        assert_eq!(p.n_vars(), 15);
        let e = build(&s, Scheme::Euler);
        assert_eq!(e.n_vars(), p.n_vars());
        assert_eq!(e.n_constraints(), p.n_constraints());
    }

    #[test]
    fn dof_count() {
        // one free ramp per class and interval remains
        let s = one_class(10);
        let p = build(&s, Scheme::Trapezoidal);
        assert_eq!(p.n_vars() - p.n_constraints(), 10);
    }

    #[test]
    fn cell_map_exact_on_cubics() {
        let n = 12;
        let h = 0.5;
        let f = |t: f64| 1.0 + t - 0.3 * t * t + 0.05 * t * t * t;
        let mut a = vec![0.0; n + 1];
        for k in 1..=n {
            a[k] = f((k as f64 - 0.5) * h);
        }
        let o = cells_to_nodes(&a);
        for k in 2..n - 1 {
            assert!((o[k] - f(k as f64 * h)).abs() < 1e-12);
        }
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("euler".parse::<Scheme>().unwrap(), Scheme::Euler);
        assert_eq!("trapezoidal".parse::<Scheme>().unwrap(), Scheme::Trapezoidal);
        assert!("rk4".parse::<Scheme>().is_err());
    }
}
