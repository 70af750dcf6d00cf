//! Newton's method for equality-constrained programs with a separable
//! convex objective: minimize sum_j w_j c_j(v_j) + l_j v_j subject to A v = b.
//!
//! Variables and rows carry a stage index (the grid node they belong to);
//! ordering the KKT system by stage makes it banded.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::banded::BandMatrix;
use crate::costfn::CostFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("Newton iteration did not converge in {iters} iterations (KKT residual {residual:.3e})")]
    MaxIters { iters: usize, residual: f64 },
    #[error("KKT matrix is singular ({detail})")]
    SingularKKT { detail: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearSolver {
    Banded,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub linear: LinearSolver,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iters: 50,
            linear: LinearSolver::Banded,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub v: Vec<f64>,
    /// Row multipliers, stationarity grad f + A^T nu = 0.
    pub nu: Vec<f64>,
    pub iters: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SeparableProgram {
    pub costs: Vec<Option<(CostFunction, f64)>>,
    pub linear: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    pub var_stage: Vec<usize>,
    pub row_stage: Vec<usize>,
}

impl SeparableProgram {
    pub fn add_var(&mut self, stage: usize, cost: Option<(CostFunction, f64)>) -> usize {
        self.costs.push(cost);
        self.linear.push(0.0);
        self.var_stage.push(stage);
        self.costs.len() - 1
    }

    /// Adds the row sum(coef * v) = rhs; its stage is the latest stage it touches.
    pub fn add_row(&mut self, entries: Vec<(usize, f64)>, rhs: f64) -> usize {
        let stage = entries.iter().map(|&(j, _)| self.var_stage[j]).max().unwrap_or(0);
        self.rows.push(entries);
        self.rhs.push(rhs);
        self.row_stage.push(stage);
        self.rows.len() - 1
    }

    pub fn n(&self) -> usize {
        self.costs.len()
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self, v: &[f64]) -> f64 {
        let mut f = 0.0;
        for (j, c) in self.costs.iter().enumerate() {
            if let Some((c, w)) = c {
                if *w != 0.0 {
                    f += w * c.eval(v[j]);
                }
            }
            f += self.linear[j] * v[j];
        }
        f
    }

    pub fn gradient_hessian(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let mut g = self.linear.clone();
        let mut h = vec![0.0; n];
        for (j, c) in self.costs.iter().enumerate() {
            if let Some((c, w)) = c {
                g[j] += w * c.d1(v[j]);
                h[j] = w * c.d2(v[j]);
            }
        }
        (g, h)
    }

    /// A v - b.
    pub fn row_residual(&self, v: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| row.iter().map(|&(j, a)| a * v[j]).sum::<f64>() - b)
            .collect()
    }

    /// A^T nu.
    pub fn transpose_times(&self, nu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (row, &y) in self.rows.iter().zip(nu) {
            for &(j, a) in row {
                out[j] += a * y;
            }
        }
        out
    }

    pub fn kkt_residual(&self, v: &[f64], nu: &[f64]) -> f64 {
        let (g, _) = self.gradient_hessian(v);
        let at = self.transpose_times(nu);
        let stat = g.iter().zip(&at).fold(0.0_f64, |m, (a, b)| nan_max(m, (a + b).abs()));
        self.row_residual(v).iter().fold(stat, |m, r| nan_max(m, r.abs()))
    }

    pub fn solve(&self, opts: &NewtonOptions) -> Result<NewtonResult, SolveError> {
        self.solve_from(vec![0.0; self.n()], opts)
    }

    pub fn solve_from(&self, mut v: Vec<f64>, opts: &NewtonOptions) -> Result<NewtonResult, SolveError> {
        let (n, m) = (self.n(), self.m());
        let mut nu = vec![0.0; m];
        let layout = KktLayout::new(self);
        let mut res = self.kkt_residual(&v, &nu);
        for it in 0..=opts.max_iters {
            if res <= opts.tol {
                return Ok(NewtonResult {
                    v,
                    nu,
                    iters: it,
                    residual: res,
                });
            }
            if it == opts.max_iters {
                break;
            }
            let (g, h) = self.gradient_hessian(&v);
            let r = self.row_residual(&v);
            let rhs: Vec<f64> = g.iter().chain(&r).map(|x| -x).collect();
            let sol = layout.solve(self, &h, rhs, opts.linear)?;
            let dv = &sol[..n];
            let dnu: Vec<f64> = sol[n..].iter().zip(&nu).map(|(a, b)| a - b).collect();
            let mut s = 1.0;
            let (mut vt, mut nut) = (v.clone(), nu.clone());
            let mut rt = f64::INFINITY;
            for _ in 0..=30 {
                for j in 0..n {
                    vt[j] = v[j] + s * dv[j];
                }
                for i in 0..m {
                    nut[i] = nu[i] + s * dnu[i];
                }
                rt = self.kkt_residual(&vt, &nut);
                if rt <= (1.0 - 1e-4 * s) * res {
                    break;
                }
                s *= 0.5;
            }
            v = vt;
            nu = nut;
            res = rt;
        }
        Err(SolveError::MaxIters {
            iters: opts.max_iters,
            residual: res,
        })
    }

    /// Closest point to `v0` (Euclidean) satisfying A v = b.
    pub fn project(&self, v0: &[f64], linear: LinearSolver) -> Result<Vec<f64>, SolveError> {
        let n = self.n();
        let layout = KktLayout::new(self);
        let r = self.row_residual(v0);
        let rhs: Vec<f64> = std::iter::repeat_n(0.0, n).chain(r.iter().map(|x| -x)).collect();
        let sol = layout.solve(self, &vec![1.0; n], rhs, linear)?;
        Ok(v0.iter().zip(&sol[..n]).map(|(a, d)| a + d).collect())
    }
}

fn nan_max(m: f64, v: f64) -> f64 {
    if v.is_nan() || m.is_nan() {
        f64::NAN
    } else {
        m.max(v)
    }
}

/// Stage-major ordering of KKT unknowns (variables first, then rows, per stage).
struct KktLayout {
    pos: Vec<usize>,
    band: usize,
}

impl KktLayout {
    fn new(p: &SeparableProgram) -> Self {
        let (n, m) = (p.n(), p.m());
        let mut keys: Vec<(usize, u8, usize)> = (0..n)
            .map(|j| (p.var_stage[j], 0u8, j))
            .chain((0..m).map(|i| (p.row_stage[i], 1u8, n + i)))
            .collect();
        keys.sort_unstable();
        let mut pos = vec![0; n + m];
        for (q, &(_, _, u)) in keys.iter().enumerate() {
            pos[u] = q;
        }
        let mut band = 0;
        for (i, row) in p.rows.iter().enumerate() {
            for &(j, _) in row {
                band = band.max(pos[n + i].abs_diff(pos[j]));
            }
        }
        KktLayout { pos, band }
    }

    fn solve(&self, p: &SeparableProgram, h: &[f64], rhs: Vec<f64>, linear: LinearSolver) -> Result<Vec<f64>, SolveError> {
        let n = p.n();
        let dim = n + p.m();
        match linear {
            LinearSolver::Banded => {
                let mut k = BandMatrix::zeros(dim, self.band, self.band);
                for j in 0..n {
                    k.add(self.pos[j], self.pos[j], h[j]);
                }
                for (i, row) in p.rows.iter().enumerate() {
                    let pi = self.pos[n + i];
                    for &(j, a) in row {
                        k.add(pi, self.pos[j], a);
                        k.add(self.pos[j], pi, a);
                    }
                }
                let lu = k.factor().map_err(|e| SolveError::SingularKKT {
                    detail: format!("zero pivot at ordered position {}", e.column),
                })?;
                let mut b = vec![0.0; dim];
                for u in 0..dim {
                    b[self.pos[u]] = rhs[u];
                }
                lu.solve_in_place(&mut b);
                Ok((0..dim).map(|u| b[self.pos[u]]).collect())
            }
            LinearSolver::Dense => {
                let mut k = DMatrix::<f64>::zeros(dim, dim);
                for j in 0..n {
                    k[(j, j)] = h[j];
                }
                for (i, row) in p.rows.iter().enumerate() {
                    for &(j, a) in row {
                        k[(n + i, j)] += a;
                        k[(j, n + i)] += a;
                    }
                }
                let sol = k.lu().solve(&DVector::from_vec(rhs)).ok_or(SolveError::SingularKKT {
                    detail: "dense LU failed".into(),
                })?;
                if sol.iter().any(|v| !v.is_finite()) {
                    return Err(SolveError::SingularKKT {
                        detail: "dense LU produced non-finite values".into(),
                    });
                }
                Ok(sol.iter().copied().collect())
            }
        }
    }
}
