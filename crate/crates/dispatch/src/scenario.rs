//! Fleet, generation and net-load model plus config parsing.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::costfn::CostFunction;
use crate::numeric::trapezoid;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Validation(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoadClass {
    pub name: String,
    /// SoC leakage rate, 1/h.
    pub alpha: f64,
    /// GWh.
    pub capacity: f64,
    pub cost: CostFunction,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationModel {
    pub cost_g: CostFunction,
    /// Weight of the squared ramp rate.
    pub ramp_kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub horizon: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self, ScenarioError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return invalid(format!("horizon must be positive, got {horizon}"));
        }
        if steps < 2 {
            return invalid(format!("need at least 2 steps, got {steps}"));
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn h(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    pub fn t(&self, k: usize) -> f64 {
        if k == self.steps {
            self.horizon
        } else {
            k as f64 * self.h()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.t(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetLoad {
    /// GW at grid nodes.
    pub values: Vec<f64>,
    /// GW/h at grid nodes.
    pub derivative: Vec<f64>,
    pub mean: f64,
}

impl NetLoad {
    fn from_values(grid: &TimeGrid, values: Vec<f64>, derivative: Option<Vec<f64>>) -> Self {
        let derivative = derivative.unwrap_or_else(|| central_differences(&values, grid.h()));
        let mean = trapezoid(&values, grid.h()) / grid.horizon;
        NetLoad {
            values,
            derivative,
            mean,
        }
    }
}

fn central_differences(a: &[f64], h: f64) -> Vec<f64> {
    let n = a.len();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        d[k] = (a[k + 1] - a[k - 1]) / (2.0 * h);
    }
    if n >= 3 {
        d[0] = (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h);
        d[n - 1] = (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * h);
    }
    d
}

/// How the net load is produced; kept so the scenario can be re-gridded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum NetLoadSource {
    Table {
        t: Vec<f64>,
        load: Vec<f64>,
        dload: Option<Vec<f64>>,
    },
    Duck {
        base: f64,
        swing: f64,
        seed: u64,
    },
    Steps {
        levels: Vec<(f64, f64)>,
    },
}

impl NetLoadSource {
    pub fn sample(&self, grid: &TimeGrid) -> Result<NetLoad, ScenarioError> {
        match self {
            NetLoadSource::Table { t, load, dload } => resample_table(grid, t, load, dload.as_deref()),
            NetLoadSource::Duck { base, swing, seed } => {
                if !(*swing >= 0.0) {
                    return invalid("duck swing must be non-negative");
                }
                Ok(synth_duck_curve(grid, *base, *swing, *seed))
            }
            NetLoadSource::Steps { levels } => piecewise_constant_load(grid, levels),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub classes: Vec<LoadClass>,
    pub generation: GenerationModel,
    pub grid: TimeGrid,
    pub net_load: NetLoad,
    pub x0: Vec<f64>,
    pub z0: Vec<f64>,
    pub source: NetLoadSource,
    /// Fixed generation-cost center; `None` tracks the net-load mean.
    pub gen_center: Option<f64>,
}

impl Scenario {
    /// Assembles and validates a scenario. The quadratic generation cost
    /// `kappa_g (g - center)^2` is centered on the net-load mean unless a
    /// center is given.
    pub fn new(
        classes: Vec<LoadClass>,
        kappa_g: f64,
        ramp_kappa: f64,
        gen_center: Option<f64>,
        grid: TimeGrid,
        source: NetLoadSource,
        x0: Vec<f64>,
        z0: Vec<f64>,
    ) -> Result<Self, ScenarioError> {
        if classes.is_empty() {
            return invalid("at least one load class is required");
        }
        for (i, c) in classes.iter().enumerate() {
            if c.name.is_empty() {
                return invalid(format!("class {i} has an empty name"));
            }
            if classes[..i].iter().any(|o| o.name == c.name) {
                return invalid(format!("duplicate class name {}", c.name));
            }
            if !(c.alpha >= 0.0 && c.alpha.is_finite()) {
                return invalid(format!("class {}: alpha must be >= 0", c.name));
            }
            if !(c.capacity > 0.0 && c.capacity.is_finite()) {
                return invalid(format!("class {}: capacity must be > 0", c.name));
            }
            check_cost(&c.name, &c.cost)?;
        }
        if !(ramp_kappa > 0.0 && ramp_kappa.is_finite()) {
            return invalid("generation kappa must be > 0");
        }
        if !(kappa_g >= 0.0 && kappa_g.is_finite()) {
            return invalid("generation kappa_g must be >= 0");
        }
        let m = classes.len();
        if x0.len() != m || z0.len() != m {
            return invalid(format!(
                "initial condition lengths ({}, {}) do not match {m} classes",
                x0.len(),
                z0.len()
            ));
        }
        if x0.iter().chain(&z0).any(|v| !v.is_finite()) {
            return invalid("initial condition must be finite");
        }
        let net_load = source.sample(&grid)?;
        let center = gen_center.unwrap_or(net_load.mean);
        Ok(Scenario {
            classes,
            generation: GenerationModel {
                cost_g: CostFunction::quadratic_centered(kappa_g, center),
                ramp_kappa,
            },
            grid,
            net_load,
            x0,
            z0,
            source,
            gen_center,
        })
    }

    pub fn m(&self) -> usize {
        self.classes.len()
    }

    pub fn kappa_g(&self) -> f64 {
        match self.generation.cost_g {
            CostFunction::Quadratic { gain, .. } => gain,
            CostFunction::ScaledPolynomial { .. } => unreachable!("generation cost is quadratic"),
        }
    }

    /// Same scenario on a grid with `steps` intervals.
    pub fn with_steps(&self, steps: usize) -> Result<Self, ScenarioError> {
        let grid = TimeGrid::new(self.grid.horizon, steps)?;
        self.with_grid(grid)
    }

    pub fn with_grid(&self, grid: TimeGrid) -> Result<Self, ScenarioError> {
        Scenario::new(
            self.classes.clone(),
            self.kappa_g(),
            self.generation.ramp_kappa,
            self.gen_center,
            grid,
            self.source.clone(),
            self.x0.clone(),
            self.z0.clone(),
        )
    }

    pub fn with_initial(&self, x0: Vec<f64>, z0: Vec<f64>) -> Result<Self, ScenarioError> {
        Scenario::new(
            self.classes.clone(),
            self.kappa_g(),
            self.generation.ramp_kappa,
            self.gen_center,
            self.grid,
            self.source.clone(),
            x0,
            z0,
        )
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c.name == name)
    }
}

fn check_cost(name: &str, c: &CostFunction) -> Result<(), ScenarioError> {
    let ok = match *c {
        CostFunction::Quadratic { gain, center } => gain > 0.0 && gain.is_finite() && center.is_finite(),
        CostFunction::ScaledPolynomial {
            kappa1,
            kappa2,
            capacity,
        } => {
            kappa1 >= 0.0
                && kappa2 >= 0.0
                && kappa1 + kappa2 > 0.0
                && capacity > 0.0
                && (kappa1 + kappa2).is_finite()
        }
    };
    if ok {
        Ok(())
    } else {
        invalid(format!("class {name}: cost parameters must be non-negative and not all zero"))
    }
}

/// Periodic cubic spline through equally spaced knots on [0, period].
struct PeriodicSpline {
    y: Vec<f64>,
    m2: Vec<f64>,
    step: f64,
}

impl PeriodicSpline {
    fn new(y: Vec<f64>, period: f64) -> Self {
        let n = y.len();
        let step = period / n as f64;
        let mut a = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        for j in 0..n {
            let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
            a[(j, jm)] += 1.0;
            a[(j, j)] += 4.0;
            a[(j, jp)] += 1.0;
            rhs[j] = 6.0 * (y[jp] - 2.0 * y[j] + y[jm]) / (step * step);
        }
        let m2 = a.lu().solve(&rhs).expect("periodic spline system is diagonally dominant");
        PeriodicSpline {
            y,
            m2: m2.iter().copied().collect(),
            step,
        }
    }

    fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.y.len();
        let s = self.step;
        let pos = (t / s).max(0.0);
        let j = (pos.floor() as usize).min(n - 1);
        let jp = (j + 1) % n;
        let a = t - j as f64 * s;
        let b = s - a;
        let (mj, mk) = (self.m2[j], self.m2[jp]);
        let (yj, yk) = (self.y[j], self.y[jp]);
        let c1 = yj - mj * s * s / 6.0;
        let c2 = yk - mk * s * s / 6.0;
        let v = mj * b.powi(3) / (6.0 * s) + mk * a.powi(3) / (6.0 * s) + (c1 * b + c2 * a) / s;
        let d = -mj * b * b / (2.0 * s) + mk * a * a / (2.0 * s) + (c2 - c1) / s;
        (v, d)
    }
}

const DUCK_KNOTS: [f64; 8] = [0.55, 0.5, 0.3, 0.05, 0.1, 0.75, 1.0, 0.7];
const DUCK_JITTER: f64 = 0.02;

/// Synthetic daily net-load profile: midday trough, evening peak, stretched
/// over the grid horizon. Interior knots get a seeded jitter; the result is
/// rescaled so that max - min over the grid equals `swing`, centered on `base`.
pub fn synth_duck_curve(grid: &TimeGrid, base: f64, swing: f64, seed: u64) -> NetLoad {
    let n = grid.steps + 1;
    if swing == 0.0 {
        return NetLoad::from_values(grid, vec![base; n], Some(vec![0.0; n]));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut knots = DUCK_KNOTS.to_vec();
    for v in knots.iter_mut().skip(1) {
        *v += DUCK_JITTER * (2.0 * rng.random::<f64>() - 1.0);
    }
    let spline = PeriodicSpline::new(knots, grid.horizon);
    let (raw, draw): (Vec<f64>, Vec<f64>) = grid.times().iter().map(|&t| spline.eval(t)).unzip();
    let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scale = swing / (hi - lo);
    let values = raw.iter().map(|v| base - 0.5 * swing + scale * (v - lo)).collect();
    let derivative = draw.iter().map(|d| scale * d).collect();
    NetLoad::from_values(grid, values, Some(derivative))
}

/// Step profile. Each step at `s` is a linear ramp over [s - h, s]; the
/// derivative is the central difference of the node values.
pub fn piecewise_constant_load(grid: &TimeGrid, levels: &[(f64, f64)]) -> Result<NetLoad, ScenarioError> {
    if levels.is_empty() {
        return invalid("steps need at least one level");
    }
    if levels[0].0.abs() > 1e-12 {
        return invalid("first step must start at 0");
    }
    for w in levels.windows(2) {
        if !(w[1].0 > w[0].0) {
            return invalid("step start times must be strictly increasing");
        }
    }
    if levels.iter().any(|l| !l.1.is_finite()) {
        return invalid("step levels must be finite");
    }
    if levels.last().unwrap().0 >= grid.horizon {
        return invalid("step start beyond the horizon");
    }
    let h = grid.h();
    let values: Vec<f64> = grid
        .times()
        .iter()
        .map(|&t| {
            let mut v = levels[0].1;
            for w in levels.windows(2) {
                let ramp = ((t - (w[1].0 - h)) / h).clamp(0.0, 1.0);
                v += (w[1].1 - w[0].1) * ramp;
            }
            v
        })
        .collect();
    Ok(NetLoad::from_values(grid, values, None))
}

fn resample_table(
    grid: &TimeGrid,
    t: &[f64],
    load: &[f64],
    dload: Option<&[f64]>,
) -> Result<NetLoad, ScenarioError> {
    if t.len() < 2 || load.len() != t.len() || dload.is_some_and(|d| d.len() != t.len()) {
        return invalid("net-load table needs at least two rows of equal length");
    }
    for w in t.windows(2) {
        if !(w[1] > w[0]) {
            return invalid("net-load times must be strictly increasing");
        }
    }
    let tol = 1e-9 * (1.0 + grid.horizon);
    if t[0] > tol || *t.last().unwrap() < grid.horizon - tol {
        return invalid(format!(
            "net-load table covers [{}, {}] but the horizon is [0, {}]",
            t[0],
            t.last().unwrap(),
            grid.horizon
        ));
    }
    let interp = |data: &[f64], x: f64| -> f64 {
        let j = match t.partition_point(|&tk| tk <= x) {
            0 => 0,
            p => (p - 1).min(t.len() - 2),
        };
        let w = ((x - t[j]) / (t[j + 1] - t[j])).clamp(0.0, 1.0);
        data[j] + w * (data[j + 1] - data[j])
    };
    let times = grid.times();
    let values = times.iter().map(|&x| interp(load, x)).collect();
    let derivative = dload.map(|d| times.iter().map(|&x| interp(d, x)).collect());
    Ok(NetLoad::from_values(grid, values, derivative))
}

/// Parses `t_hours,load_gw[,dload_gw_per_h]`.
pub fn read_netload_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>, Option<Vec<f64>>), ScenarioError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| ScenarioError::Parse(e.to_string()))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let with_d = match cols.as_slice() {
        ["t_hours", "load_gw"] => false,
        ["t_hours", "load_gw", "dload_gw_per_h"] => true,
        _ => {
            return Err(ScenarioError::Parse(format!(
                "net-load header must be t_hours,load_gw[,dload_gw_per_h], got {}",
                cols.join(",")
            )))
        }
    };
    let (mut t, mut l, mut d) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ScenarioError::Parse(e.to_string()))?;
        let num = |i: usize| -> Result<f64, ScenarioError> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| ScenarioError::Parse(format!("bad number {:?}: {e}", &rec[i])))
        };
        t.push(num(0)?);
        l.push(num(1)?);
        if with_d {
            d.push(num(2)?);
        }
    }
    Ok((t, l, with_d.then_some(d)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    grid: GridCfg,
    #[serde(default)]
    generation: GenerationCfg,
    #[serde(rename = "class")]
    classes: Vec<ClassCfg>,
    initial: Option<InitialCfg>,
    netload: NetLoadCfg,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GridCfg {
    #[serde(default = "default_horizon")]
    horizon: f64,
    #[serde(default = "default_steps")]
    steps: usize,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg {
            horizon: default_horizon(),
            steps: default_steps(),
        }
    }
}

fn default_horizon() -> f64 {
    24.0
}
fn default_steps() -> usize {
    576
}
fn default_one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenerationCfg {
    #[serde(default = "default_one")]
    kappa_g: f64,
    #[serde(default = "default_one")]
    kappa: f64,
    center: Option<f64>,
}

impl Default for GenerationCfg {
    fn default() -> Self {
        GenerationCfg {
            kappa_g: 1.0,
            kappa: 1.0,
            center: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassCfg {
    name: String,
    alpha: f64,
    capacity: f64,
    cost: CostCfg,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CostCfg {
    kind: String,
    kappa1: Option<f64>,
    kappa2: Option<f64>,
    gain: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialCfg {
    x0: Option<Vec<f64>>,
    z0: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum NetLoadCfg {
    Inline {
        t: Vec<f64>,
        load: Vec<f64>,
        dload: Option<Vec<f64>>,
    },
    Csv {
        path: PathBuf,
    },
    Duck {
        #[serde(default = "default_base")]
        base: f64,
        #[serde(default = "default_swing")]
        swing: f64,
        #[serde(default)]
        seed: u64,
    },
    Steps {
        levels: Vec<(f64, f64)>,
    },
}

fn default_base() -> f64 {
    30.0
}
fn default_swing() -> f64 {
    40.0
}

/// Parses a scenario config; relative CSV paths resolve against the working directory.
pub fn load_scenario(config_text: &str) -> Result<Scenario, ScenarioError> {
    load_scenario_in(config_text, Path::new("."))
}

/// Reads a scenario file; relative CSV paths resolve against its directory.
pub fn load_scenario_file(path: &Path) -> Result<Scenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_scenario_in(&text, path.parent().unwrap_or(Path::new(".")))
}

pub fn load_scenario_in(config_text: &str, base_dir: &Path) -> Result<Scenario, ScenarioError> {
    let cfg: ConfigFile = toml::from_str(config_text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let grid = TimeGrid::new(cfg.grid.horizon, cfg.grid.steps)?;
    let mut classes = Vec::with_capacity(cfg.classes.len());
    for c in cfg.classes {
        let need = |v: Option<f64>, key: &str| -> Result<f64, ScenarioError> {
            v.ok_or_else(|| ScenarioError::Parse(format!("class {}: missing cost.{key}", c.name)))
        };
        let cost = match c.cost.kind.as_str() {
            "quadratic" => CostFunction::quadratic(need(c.cost.gain, "gain")?),
            "scaled_polynomial" | "polynomial" => CostFunction::scaled_polynomial(
                c.cost.kappa1.unwrap_or(0.0),
                need(c.cost.kappa2, "kappa2")?,
                c.capacity,
            ),
            other => return Err(ScenarioError::Parse(format!("class {}: unknown cost kind {other}", c.name))),
        };
        classes.push(LoadClass {
            name: c.name,
            alpha: c.alpha,
            capacity: c.capacity,
            cost,
        });
    }
    let m = classes.len();
    let (x0, z0) = match cfg.initial {
        Some(init) => (init.x0.unwrap_or(vec![0.0; m]), init.z0.unwrap_or(vec![0.0; m])),
        None => (vec![0.0; m], vec![0.0; m]),
    };
    let source = match cfg.netload {
        NetLoadCfg::Inline { t, load, dload } => NetLoadSource::Table { t, load, dload },
        NetLoadCfg::Csv { path } => {
            let full = if path.is_absolute() { path } else { base_dir.join(path) };
            let text = std::fs::read_to_string(&full).map_err(|source| ScenarioError::Io {
                path: full.clone(),
                source,
            })?;
            let (t, load, dload) = read_netload_csv(&text)?;
            NetLoadSource::Table { t, load, dload }
        }
        NetLoadCfg::Duck { base, swing, seed } => NetLoadSource::Duck { base, swing, seed },
        NetLoadCfg::Steps { levels } => NetLoadSource::Steps { levels },
    };
    Scenario::new(
        classes,
        cfg.generation.kappa_g,
        cfg.generation.kappa,
        cfg.generation.center,
        grid,
        source,
        x0,
        z0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIVE: &str = r#"
[grid]
horizon = 24.0
steps = 96

[[class]]
name = "acs"
alpha = 0.25
capacity = 4.0
cost = { kind = "scaled_polynomial", kappa1 = 1.0, kappa2 = 0.1 }

[[class]]
name = "fwh"
alpha = 0.04
capacity = 2.0
cost.kind = "scaled_polynomial"
cost.kappa1 = 1.0
cost.kappa2 = 0.1

[[class]]
name = "swh"
alpha = 0.01
capacity = 5.0
cost = { kind = "scaled_polynomial", kappa1 = 1.0, kappa2 = 0.1 }

[[class]]
name = "rfg"
alpha = 0.10
capacity = 0.5
cost = { kind = "scaled_polynomial", kappa1 = 1.0, kappa2 = 0.1 }

[[class]]
name = "pp"
alpha = 0.004
capacity = 2.0
cost = { kind = "scaled_polynomial", kappa1 = 0.0, kappa2 = 1.0 }

[netload]
kind = "duck"
swing = 40.0
seed = 3
"#;

    #[test]
    fn five_class_config() {
        let s = load_scenario(FIVE).unwrap();
        assert_eq!(s.m(), 5);
        let alphas: Vec<f64> = s.classes.iter().map(|c| c.alpha).collect();
        assert_eq!(alphas, vec![0.25, 0.04, 0.01, 0.10, 0.004]);
        let caps: Vec<f64> = s.classes.iter().map(|c| c.capacity).collect();
        assert_eq!(caps, vec![4.0, 2.0, 5.0, 0.5, 2.0]);
        assert_eq!(s.x0, vec![0.0; 5]);
        assert_eq!(s.generation.ramp_kappa, 1.0);
        assert_eq!(s.kappa_g(), 1.0);
    }

    #[test]
    fn trivial_and_invalid_configs() {
        let ok = r#"
[grid]
steps = 8
[[class]]
name = "a"
alpha = 0.1
capacity = 1.0
cost = { kind = "quadratic", gain = 1.0 }
[netload]
kind = "steps"
levels = [[0.0, 30.0]]
"#;
        let s = load_scenario(ok).unwrap();
        assert!(s.net_load.values.iter().all(|&v| v == 30.0));
        assert_eq!(s.net_load.mean, 30.0);
        assert_eq!(s.grid.horizon, 24.0);

        let bad = ok.replace("capacity = 1.0", "capacity = 0.0");
        assert!(matches!(load_scenario(&bad), Err(ScenarioError::Validation(_))));
        let short = ok.replace("steps = 8", "steps = 1");
        assert!(matches!(load_scenario(&short), Err(ScenarioError::Validation(_))));
        let mism = format!("{ok}\n[initial]\nx0 = [1.0, 2.0]\n");
        assert!(matches!(load_scenario(&mism), Err(ScenarioError::Validation(_))));
        assert!(matches!(load_scenario("[grid"), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn duck_curve_swing_and_determinism() {
        let g = TimeGrid::new(24.0, 576).unwrap();
        let a = synth_duck_curve(&g, 30.0, 40.0, 11);
        let b = synth_duck_curve(&g, 30.0, 40.0, 11);
        assert_eq!(a, b);
        let hi = a.values.iter().cloned().fold(f64::MIN, f64::max);
        let lo = a.values.iter().cloned().fold(f64::MAX, f64::min);
        assert!((hi - lo - 40.0).abs() < 1e-6);
        let flat = synth_duck_curve(&g, 30.0, 0.0, 11);
        assert!(flat.values.iter().all(|&v| v == 30.0));
        let c = synth_duck_curve(&g, 30.0, 40.0, 12);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn duck_derivative_matches_differences() {
        let g = TimeGrid::new(24.0, 576).unwrap();
        let a = synth_duck_curve(&g, 30.0, 40.0, 0);
        let h = g.h();
        for k in 1..576 {
            let fd = (a.values[k + 1] - a.values[k - 1]) / (2.0 * h);
            assert!((fd - a.derivative[k]).abs() < 1e-2, "k={k}");
        }
    }

    #[test]
    fn steps_profile() {
        let g = TimeGrid::new(24.0, 48).unwrap();
        let l = piecewise_constant_load(&g, &[(0.0, 30.0), (18.0, 70.0)]).unwrap();
        assert_eq!(l.values[35], 30.0);
        assert_eq!(l.values[36], 70.0);
        assert_eq!(l.values[34], 30.0);
        assert_eq!(l.derivative[35], 40.0 / (2.0 * g.h()));
        assert_eq!(l.derivative[10], 0.0);
        let same = piecewise_constant_load(&g, &[(0.0, 30.0), (5.0, 30.0)]).unwrap();
        assert!(same.values.iter().all(|&v| v == 30.0));
        assert!(piecewise_constant_load(&g, &[(0.0, 1.0), (5.0, 2.0), (4.0, 3.0)]).is_err());
    }

    #[test]
    fn csv_ingestion() {
        let text = "t_hours,load_gw\n0,10\n12,30\n24,10\n";
        let (t, l, d) = read_netload_csv(text).unwrap();
        assert_eq!(t, vec![0.0, 12.0, 24.0]);
        assert!(d.is_none());
        let g = TimeGrid::new(24.0, 4).unwrap();
        let nl = resample_table(&g, &t, &l, None).unwrap();
        assert_eq!(nl.values, vec![10.0, 20.0, 30.0, 20.0, 10.0]);
        assert!(read_netload_csv("time,load\n0,1\n").is_err());
        assert!(resample_table(&g, &[0.0, 12.0], &[1.0, 2.0], None).is_err());
        assert!(resample_table(&g, &[0.0, 30.0, 24.0], &[1.0, 2.0, 3.0], None).is_err());
    }
}
