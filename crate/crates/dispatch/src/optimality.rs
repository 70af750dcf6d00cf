//! Certification of a discrete solution against the continuous optimality
//! system, the collapse relation and the initial-jump mapping.

use serde::Serialize;
use thiserror::Error;

use crate::numeric::{derivative_from, max_abs, rms};
use crate::scenario::{Scenario, TimeGrid};
use crate::transcribe::DiscreteSolution;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimalityError {
    #[error("grid too coarse: N = {0}, need N >= 8")]
    GridTooCoarse(usize),
    #[error("skip_nodes must be at least 1")]
    SkipNodes,
    #[error("initial conditions differ in their sums ({what}: {lhs} vs {rhs})")]
    SumMismatch { what: &'static str, lhs: f64, rhs: f64 },
}

pub const MIN_STEPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub max: f64,
    pub rms: f64,
    /// Largest magnitude among the terms of the equation, for relative checks.
    pub scale: f64,
}

impl Residual {
    fn from(values: &[f64], scale: f64) -> Self {
        Residual {
            max: max_abs(values.iter().copied()),
            rms: rms(values),
            scale,
        }
    }

    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.max / self.scale
        } else {
            self.max
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    /// SoC dynamics: dx/dt + alpha x + z.
    pub r_soc: Residual,
    /// Ramp: dz/dt - u.
    pub r_ramp: Residual,
    /// SoC co-state: dlambda/dt + c'(x) - alpha lambda, all classes.
    pub r_lambda: Residual,
    /// Same, per class.
    pub r_lambda_per_class: Vec<f64>,
    /// Deviation co-state: dbeta/dt - c_g'(l - z_sum) - lambda.
    pub r_beta: Residual,
    /// Aggregate ramp: u_sum - dl/dt + beta / (2 kappa).
    pub r_usum: Residual,
    /// Collapse relation c'(x) = alpha lambda - dlambda/dt.
    pub r_collapse: Residual,
    /// Collapse relation at the first node after the jump, per class.
    pub r_ic0: Vec<f64>,
    pub h: f64,
    pub steps: usize,
    pub first_node: usize,
    pub last_node: usize,
}

impl ResidualReport {
    pub fn named(&self) -> Vec<(&'static str, &Residual)> {
        vec![
            ("r_soc", &self.r_soc),
            ("r_ramp", &self.r_ramp),
            ("r_lambda", &self.r_lambda),
            ("r_beta", &self.r_beta),
            ("r_usum", &self.r_usum),
            ("r_collapse", &self.r_collapse),
        ]
    }
}

fn scale_of(terms: &[&[f64]]) -> f64 {
    terms
        .iter()
        .map(|t| max_abs(t.iter().copied()))
        .fold(0.0, f64::max)
}

pub fn optimality_residuals(sol: &DiscreteSolution, scenario: &Scenario) -> Result<ResidualReport, OptimalityError> {
    let n = sol.grid.steps;
    if n < MIN_STEPS {
        return Err(OptimalityError::GridTooCoarse(n));
    }
    let h = sol.grid.h();
    let d = |a: &[f64]| derivative_from(a, h, 1);
    let tail = |a: &[f64]| a[1..].to_vec();
    let lam = sol.lambda_mean();
    let beta = sol.beta_mean();
    let dlam = d(&lam);

    let (mut soc, mut ramp, mut costate, mut coll) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut s_soc, mut s_ramp, mut s_co, mut s_coll) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut per_class = Vec::new();
    for (i, c) in scenario.classes.iter().enumerate() {
        let (x, z, u, li) = (&sol.x[i], &sol.z[i], &sol.u[i], &sol.lambda[i]);
        let dx = d(x);
        let dz = d(z);
        let dli = d(li);
        let ax: Vec<f64> = x.iter().map(|v| c.alpha * v).collect();
        let cp: Vec<f64> = x.iter().map(|&v| c.cost.d1(v)).collect();
        let ali: Vec<f64> = li.iter().map(|v| c.alpha * v).collect();
        let alam: Vec<f64> = lam.iter().map(|v| c.alpha * v).collect();
        let mut worst = 0.0_f64;
        for k in 1..=n {
            soc.push(dx[k] + ax[k] + z[k]);
            ramp.push(dz[k] - u[k]);
            let r = dli[k] + cp[k] - ali[k];
            worst = worst.max(r.abs());
            costate.push(r);
            coll.push(cp[k] - (alam[k] - dlam[k]));
        }
        per_class.push(worst);
        s_soc = s_soc.max(scale_of(&[&dx[1..], &ax[1..], &z[1..]]));
        s_ramp = s_ramp.max(scale_of(&[&dz[1..], &u[1..]]));
        s_co = s_co.max(scale_of(&[&dli[1..], &cp[1..], &ali[1..]]));
        s_coll = s_coll.max(scale_of(&[&cp[1..], &alam[1..], &dlam[1..]]));
    }

    let zs = sol.z_sum();
    let us = sol.u_sum();
    let cg = scenario.generation.cost_g;
    let kappa = scenario.generation.ramp_kappa;
    let ell = &scenario.net_load.values;
    let dell = &scenario.net_load.derivative;
    let dbeta = d(&beta);
    let cgp: Vec<f64> = (0..=n).map(|k| cg.d1(ell[k] - zs[k])).collect();
    let bk: Vec<f64> = beta.iter().map(|b| b / (2.0 * kappa)).collect();
    let rb: Vec<f64> = (1..=n).map(|k| dbeta[k] - cgp[k] - lam[k]).collect();
    let ru: Vec<f64> = (1..=n).map(|k| us[k] - dell[k] + bk[k]).collect();

    Ok(ResidualReport {
        r_soc: Residual::from(&soc, s_soc),
        r_ramp: Residual::from(&ramp, s_ramp),
        r_lambda: Residual::from(&costate, s_co),
        r_lambda_per_class: per_class,
        r_beta: Residual::from(&rb, scale_of(&[&tail(&dbeta), &tail(&cgp), &tail(&lam)])),
        r_usum: Residual::from(&ru, scale_of(&[&tail(&us), &tail(dell), &tail(&bk)])),
        r_collapse: Residual::from(&coll, s_coll),
        r_ic0: ic_mapping_check(sol, scenario),
        h,
        steps: n,
        first_node: 1,
        last_node: n,
    })
}

/// max over classes and k >= skip_nodes of |c_i'(x_i) - (alpha_i lambda - dlambda/dt)|.
pub fn collapse_residual(sol: &DiscreteSolution, scenario: &Scenario, skip_nodes: usize) -> Result<f64, OptimalityError> {
    if skip_nodes == 0 {
        return Err(OptimalityError::SkipNodes);
    }
    let n = sol.grid.steps;
    if n < skip_nodes + 3 {
        return Err(OptimalityError::GridTooCoarse(n));
    }
    let lam = sol.lambda_mean();
    let dlam = derivative_from(&lam, sol.grid.h(), skip_nodes);
    let mut worst = 0.0_f64;
    for (i, c) in scenario.classes.iter().enumerate() {
        for k in skip_nodes..=n {
            let r = c.cost.d1(sol.x[i][k]) - (c.alpha * lam[k] - dlam[k]);
            worst = if r.is_nan() { f64::NAN } else { worst.max(r.abs()) };
        }
    }
    Ok(worst)
}

/// Collapse relation right after the initial jump (node 1, one-sided
/// difference), per class.
pub fn ic_mapping_check(sol: &DiscreteSolution, scenario: &Scenario) -> Vec<f64> {
    let lam = sol.lambda_mean();
    let h = sol.grid.h();
    let dl1 = (-3.0 * lam[1] + 4.0 * lam[2] - lam[3]) / (2.0 * h);
    scenario
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.cost.d1(sol.x[i][1]) - (c.alpha * lam[1] - dl1)).abs())
        .collect()
}

/// Zero-net-ramp input moving (x_from, z_from) to (z_to, x_to + O(delta)) in time delta:
/// u_i(t) = dz_i f(t) - dx_i f'(t) with f(t) = 30 s^2 (1 - s)^2 / delta, s = t / delta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheapControl {
    pub dx: Vec<f64>,
    pub dz: Vec<f64>,
    pub delta: f64,
}

impl CheapControl {
    pub fn bump(&self, t: f64) -> f64 {
        let s = t / self.delta;
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        30.0 * s * s * (1.0 - s) * (1.0 - s) / self.delta
    }

    pub fn bump_rate(&self, t: f64) -> f64 {
        let s = t / self.delta;
        if !(0.0..=1.0).contains(&s) {
            return 0.0;
        }
        60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (self.delta * self.delta)
    }

    pub fn input(&self, i: usize, t: f64) -> f64 {
        self.dz[i] * self.bump(t) - self.dx[i] * self.bump_rate(t)
    }

    pub fn inputs(&self, t: f64) -> Vec<f64> {
        (0..self.dz.len()).map(|i| self.input(i, t)).collect()
    }

    /// Samples per class on the grid nodes.
    pub fn sample(&self, grid: &TimeGrid) -> Vec<Vec<f64>> {
        let times = grid.times();
        (0..self.dz.len())
            .map(|i| times.iter().map(|&t| self.input(i, t)).collect())
            .collect()
    }
}

pub fn cheap_redistribution(
    x_from: &[f64],
    z_from: &[f64],
    x_to: &[f64],
    z_to: &[f64],
    delta: f64,
) -> Result<CheapControl, OptimalityError> {
    let sum = |a: &[f64]| a.iter().sum::<f64>();
    for (what, a, b) in [("x", x_from, x_to), ("z", z_from, z_to)] {
        let (l, r) = (sum(a), sum(b));
        if (l - r).abs() > 1e-9 * (1.0 + l.abs().max(r.abs())) {
            return Err(OptimalityError::SumMismatch { what, lhs: l, rhs: r });
        }
    }
    Ok(CheapControl {
        dx: x_to.iter().zip(x_from).map(|(a, b)| a - b).collect(),
        dz: z_to.iter().zip(z_from).map(|(a, b)| a - b).collect(),
        delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_endpoints_give_zero_input() {
        let c = cheap_redistribution(&[1.0, 2.0], &[0.5, 0.5], &[1.0, 2.0], &[0.5, 0.5], 0.1).unwrap();
        for k in 0..=20 {
            assert_eq!(c.inputs(k as f64 * 0.005), vec![0.0, 0.0]);
        }
    }

    #[test]
    fn sum_mismatch_is_rejected() {
        let r = cheap_redistribution(&[1.0, 0.0], &[0.0, 0.0], &[1.0, 1.0], &[0.0, 0.0], 0.1);
        assert!(matches!(r, Err(OptimalityError::SumMismatch { what: "x", .. })));
    }

    #[test]
    fn bump_integrates_to_one() {
        let c = CheapControl {
            dx: vec![],
            dz: vec![],
            delta: 0.2,
        };
        let n = 2000;
        let h = 0.2 / n as f64;
        let integral: f64 = (0..n).map(|k| c.bump((k as f64 + 0.5) * h) * h).sum();
        assert!((integral - 1.0).abs() < 1e-6);
        assert_eq!(c.bump(0.0), 0.0);
        assert_eq!(c.bump(0.2), 0.0);
    }
}
