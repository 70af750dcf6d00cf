//! `dispatch` command line: solve, check, recover, sweep.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::collapse::{reconstruct, recover_class, CollapseError};
use crate::economics::{averages, price_report};
use crate::kkt::{NewtonOptions, SolveError};
use crate::numeric::{fitted_order, max_abs};
use crate::optimality::{collapse_residual, optimality_residuals, ResidualReport, MIN_STEPS};
use crate::scenario::{load_scenario_file, Scenario, ScenarioError};
use crate::transcribe::{build, fmt_f64, solve, DiscreteSolution, Scheme};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_CHECK: i32 = 4;
pub const EXIT_SINGULAR: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "dispatch", version, about = "Demand-dispatch solver and certification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a scenario and write the solution and reports.
    Solve(SolveArgs),
    /// Re-certify a solution CSV against a scenario.
    Check(CheckArgs),
    /// Reconstruct the co-state from two classes and recover the others.
    Recover(RecoverArgs),
    /// Grid-refinement study.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SolverFlags {
    #[arg(long, default_value = "trapezoidal")]
    scheme: Scheme,
    /// KKT residual tolerance (infinity norm).
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 50)]
    max_iters: usize,
}

impl SolverFlags {
    fn options(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            ..Default::default()
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    solution: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value_t = 1)]
    skip_nodes: usize,
    /// Relative tolerance for the discretization-dependent checks.
    #[arg(long, default_value_t = 0.1)]
    rel_tol: f64,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(long)]
    solution: PathBuf,
    #[arg(long)]
    scenario: PathBuf,
    /// Two source classes, `a,b`.
    #[arg(long)]
    from: String,
    /// A class name or `all`.
    #[arg(long, default_value = "all")]
    target: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Strictly increasing list `N1,N2,...`.
    #[arg(long)]
    steps: String,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Solver(String),
    Check(Vec<String>),
    Singular(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Solver(_) => EXIT_SOLVER,
            Failure::Check(_) => EXIT_CHECK,
            Failure::Singular(_) => EXIT_SINGULAR,
            Failure::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) | Failure::Solver(m) | Failure::Singular(m) | Failure::Io(m) => m.clone(),
            Failure::Check(names) => format!("violated: {}", names.join(", ")),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let case = match e {
            SolveError::MaxIters { .. } => "MaxIters",
            SolveError::SingularKKT { .. } => "SingularKKT",
        };
        Failure::Solver(format!("{case}: {e}"))
    }
}

pub fn main() -> i32 {
    run(std::env::args())
}

/// Runs the CLI on an argument list (first item is the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let command: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a, &command),
        Command::Check(a) => cmd_check(a),
        Command::Recover(a) => cmd_recover(a, &command),
        Command::Sweep(a) => cmd_sweep(a, &command),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

/// serde_json formatter writing floats with 17 significant digits.
struct Digits17(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

/// Write-then-rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let io_err = |e: io::Error| Failure::Io(format!("cannot write {}: {e}", path.display()));
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(io_err)?;
        }
    }
    let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
    std::fs::write(&tmp, contents).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

fn scenario_hash(s: &Scenario) -> String {
    let canon = serde_json::to_string(s).expect("scenario serializes");
    Sha256::digest(canon.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize)]
struct GridInfo {
    horizon: f64,
    steps: usize,
    h: f64,
}

#[derive(Serialize)]
struct Tolerances {
    kkt_tol: f64,
    max_iters: usize,
}

#[derive(Serialize)]
pub struct RunManifest {
    command: Vec<String>,
    scenario: String,
    scenario_sha256: String,
    grid: Vec<GridInfo>,
    scheme: Option<Scheme>,
    tolerances: Option<Tolerances>,
    objective: Option<f64>,
    newton_iters: Option<usize>,
    outputs: Vec<String>,
    wall_seconds: f64,
}

fn grid_info(s: &Scenario) -> GridInfo {
    GridInfo {
        horizon: s.grid.horizon,
        steps: s.grid.steps,
        h: s.grid.h(),
    }
}

fn load(path: &Path, steps: Option<usize>) -> Result<Scenario, Failure> {
    let s = load_scenario_file(path)?;
    match steps {
        Some(n) => Ok(s.with_steps(n)?),
        None => Ok(s),
    }
}

/// Reads a solution CSV; the scenario is re-gridded to the CSV's node count.
fn load_solution(path: &Path, scenario: Scenario) -> Result<(DiscreteSolution, Scenario), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let first = DiscreteSolution::from_csv(&text, &scenario)?;
    if first.grid.steps == scenario.grid.steps {
        return Ok((first, scenario));
    }
    let s = scenario.with_steps(first.grid.steps)?;
    let sol = DiscreteSolution::from_csv(&text, &s)?;
    Ok((sol, s))
}

fn cmd_solve(a: SolveArgs, command: &[String]) -> Result<(), Failure> {
    let start = Instant::now();
    let s = load(&a.scenario, a.steps)?;
    let opts = a.solver.options();
    let p = build(&s, a.solver.scheme);
    let sol = solve(&p, &opts)?;
    let residuals = match optimality_residuals(&sol, &s) {
        Ok(r) => to_json(&r),
        Err(e) => to_json(&serde_json::json!({ "error": e.to_string(), "steps": s.grid.steps })),
    };
    let prices = price_report(&sol, &s, &opts)?;
    let files = [
        ("solution.csv", sol.to_csv()),
        ("residuals.json", residuals),
        ("prices.json", to_json(&prices)),
    ];
    let mut outputs = Vec::new();
    for (name, body) in &files {
        write_atomic(&a.out.join(name), body)?;
        outputs.push(name.to_string());
    }
    outputs.push("manifest.json".into());
    let manifest = RunManifest {
        command: command.to_vec(),
        scenario: a.scenario.display().to_string(),
        scenario_sha256: scenario_hash(&s),
        grid: vec![grid_info(&s)],
        scheme: Some(a.solver.scheme),
        tolerances: Some(Tolerances {
            kkt_tol: opts.tol,
            max_iters: opts.max_iters,
        }),
        objective: Some(sol.objective),
        newton_iters: Some(sol.newton_iters),
        outputs,
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    write_atomic(&a.out.join("manifest.json"), &to_json(&manifest))?;
    println!(
        "converged in {} Newton iterations, KKT residual {:.3e}, objective {}",
        sol.newton_iters,
        sol.kkt_residual,
        fmt_f64(sol.objective)
    );
    Ok(())
}

pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    /// Unscaled size; relative checks also pass when this is at round-off.
    pub absolute: f64,
    /// Reported but never fails the check.
    pub informational: bool,
}

/// Absolute floor under which a relative check passes regardless.
pub const ROUNDOFF_FLOOR: f64 = 1e-9;

impl CheckLine {
    pub fn pass(&self) -> bool {
        self.value <= self.tol || self.absolute <= ROUNDOFF_FLOOR
    }
}

fn line(name: &str, value: f64, tol: f64, absolute: f64) -> CheckLine {
    CheckLine {
        name: name.into(),
        value,
        tol,
        absolute,
        informational: false,
    }
}

fn info(name: &str, value: f64, tol: f64, absolute: f64) -> CheckLine {
    CheckLine {
        informational: true,
        ..line(name, value, tol, absolute)
    }
}

/// An absolute check; the round-off floor does not apply.
fn strict(name: &str, value: f64, tol: f64) -> CheckLine {
    line(name, value, tol, f64::INFINITY)
}

fn scaled(v: f64, scale: f64) -> f64 {
    v / scale.max(f64::MIN_POSITIVE)
}

/// All re-certification checks on a solution. The differential residuals are
/// judged by RMS over the grid, which tolerates isolated jumps in the load.
pub fn check_suite(sol: &DiscreteSolution, s: &Scenario, skip_nodes: usize, rel_tol: f64) -> Result<Vec<CheckLine>, String> {
    let n = sol.grid.steps;
    if n < MIN_STEPS {
        return Err(format!("grid too coarse for certification (N = {n})"));
    }
    let mut out = Vec::new();
    let ell = &s.net_load.values;
    let zs = sol.z_sum();
    out.push(strict(
        "balance g + z_sum = l",
        max_abs((0..=n).map(|k| (sol.g[k] + zs[k] - ell[k]) / (1.0 + ell[k].abs()))),
        1e-8,
    ));
    let lam = sol.lambda_mean();
    let lscale = 1.0 + max_abs(sol.lambda.iter().flatten().copied());
    out.push(strict(
        "price duality rho = -lambda",
        max_abs((1..=n).map(|k| sol.rho[k] + lam[k])) / lscale,
        1e-6,
    ));
    out.push(strict(
        "co-state agreement across classes",
        max_abs((0..=n).flat_map(|k| sol.lambda.iter().map(move |l| l[k] - sol.lambda[0][k]))) / lscale,
        1e-6,
    ));
    out.push(strict("terminal lambda(T) = 0", max_abs(sol.lambda.iter().map(|l| l[n])), 1e-6));
    out.push(strict("terminal beta(T) = 0", max_abs(sol.beta.iter().map(|b| b[n])), 1e-6));

    let rep: ResidualReport = optimality_residuals(sol, s).map_err(|e| e.to_string())?;
    for (name, r) in rep.named() {
        out.push(line(&format!("{name} (rms relative)"), scaled(r.rms, r.scale), rel_tol, r.rms));
    }
    let cscale = rep.r_collapse.scale;
    let coll = collapse_residual(sol, s, skip_nodes).map_err(|e| e.to_string())?;
    out.push(line(
        &format!("collapse from node {skip_nodes} (max relative)"),
        scaled(coll, cscale),
        rel_tol,
        coll,
    ));
    let ic = max_abs(rep.r_ic0.iter().copied());
    out.push(line("collapse at node 1 (relative)", scaled(ic, cscale), rel_tol, ic));

    let pr = averages(sol, s);
    let mv_rel = max_abs(pr.mv_identity_relative.iter().flatten().copied());
    let mv_abs = max_abs(pr.mv_identity_residual.iter().flatten().copied());
    // horizon averages are first-order approximations divided by the leakage
    // rate, so they are shown without gating
    out.push(info("average price vs marginal values (relative)", mv_rel, rel_tol, mv_abs));
    out.push(info(
        "average price vs marginal cost (relative)",
        pr.mc_identity_relative.abs(),
        rel_tol,
        pr.mc_identity_residual.abs(),
    ));
    Ok(out)
}

fn cmd_check(a: CheckArgs) -> Result<(), Failure> {
    let s = load(&a.scenario, None)?;
    let (sol, s) = load_solution(&a.solution, s)?;
    if a.skip_nodes == 0 {
        return Err(Failure::Usage("--skip-nodes must be at least 1".into()));
    }
    let lines = check_suite(&sol, &s, a.skip_nodes, a.rel_tol).map_err(Failure::Usage)?;
    println!("{:<46} {:>24} {:>10}  result", "check", "value", "tolerance");
    let mut failed = Vec::new();
    for l in &lines {
        let ok = l.pass();
        let verdict = match (l.informational, ok) {
            (true, _) => "INFO",
            (false, true) => "PASS",
            (false, false) => "FAIL",
        };
        println!("{:<46} {:>24} {:>10.1e}  {verdict}", l.name, fmt_f64(l.value), l.tol);
        if !ok && !l.informational {
            failed.push(l.name.clone());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed))
    }
}

#[derive(Serialize)]
struct RecoverySummary {
    sources: (String, String),
    condition: f64,
    targets: Vec<TargetError>,
}

#[derive(Serialize)]
struct TargetError {
    class: String,
    max_abs_error: f64,
    fraction_of_capacity: f64,
}

fn cmd_recover(a: RecoverArgs, command: &[String]) -> Result<(), Failure> {
    let start = Instant::now();
    let s = load(&a.scenario, None)?;
    let (sol, s) = load_solution(&a.solution, s)?;
    let names: Vec<&str> = a.from.split(',').map(str::trim).collect();
    if names.len() != 2 {
        return Err(Failure::Usage(format!("--from needs two classes, got {:?}", a.from)));
    }
    let idx = |n: &str| s.class_index(n).ok_or_else(|| Failure::Usage(format!("unknown class {n:?}")));
    let (ia, ib) = (idx(names[0])?, idx(names[1])?);
    let rec = reconstruct(&sol.x[ia], &sol.x[ib], &s.classes[ia], &s.classes[ib]).map_err(|e| match e {
        CollapseError::SingularPair { .. } => Failure::Singular(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    let targets: Vec<usize> = if a.target == "all" {
        (0..s.m()).filter(|&i| i != ia && i != ib).collect()
    } else {
        vec![idx(&a.target)?]
    };
    let mut recovered = Vec::new();
    let mut errors = Vec::new();
    for &i in &targets {
        let x = recover_class(&rec, &s.classes[i]).map_err(|e| Failure::Solver(e.to_string()))?;
        let err = max_abs(x.iter().zip(&sol.x[i][rec.first_node..]).map(|(a, b)| a - b));
        errors.push(TargetError {
            class: s.classes[i].name.clone(),
            max_abs_error: err,
            fraction_of_capacity: err / s.classes[i].capacity,
        });
        recovered.push(x);
    }
    let mut csv = String::from("t,lambda,dlambda");
    for &i in &targets {
        csv.push_str(&format!(",x_{}_recovered", s.classes[i].name));
    }
    csv.push('\n');
    for (j, k) in (rec.first_node..=sol.grid.steps).enumerate() {
        let mut row = vec![fmt_f64(sol.t[k]), fmt_f64(rec.lambda[j]), fmt_f64(rec.dlambda[j])];
        row.extend(recovered.iter().map(|x| fmt_f64(x[j])));
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    let summary = RecoverySummary {
        sources: rec.sources.clone(),
        condition: rec.condition,
        targets: errors,
    };
    write_atomic(&a.out.join("recovery.csv"), &csv)?;
    write_atomic(&a.out.join("recovery.json"), &to_json(&summary))?;
    let manifest = RunManifest {
        command: command.to_vec(),
        scenario: a.scenario.display().to_string(),
        scenario_sha256: scenario_hash(&s),
        grid: vec![grid_info(&s)],
        scheme: None,
        tolerances: None,
        objective: None,
        newton_iters: None,
        outputs: vec!["recovery.csv".into(), "recovery.json".into(), "manifest.json".into()],
        wall_seconds: start.elapsed().as_secs_f64(),
    };
    write_atomic(&a.out.join("manifest.json"), &to_json(&manifest))?;
    println!("sources {},{} (condition number {:.3e})", summary.sources.0, summary.sources.1, summary.condition);
    for t in &summary.targets {
        println!(
            "{:<12} max |error| {} GWh ({:.4}% of capacity)",
            t.class,
            fmt_f64(t.max_abs_error),
            100.0 * t.fraction_of_capacity
        );
    }
    Ok(())
}

pub fn parse_steps(list: &str) -> Result<Vec<usize>, String> {
    let steps: Vec<usize> = list
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad step count {t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if steps.is_empty() {
        return Err("empty step list".into());
    }
    if steps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("step list must be strictly increasing: {list}"));
    }
    if let Some(n) = steps.iter().find(|&&n| n < MIN_STEPS) {
        return Err(format!("step count {n} is below the minimum {MIN_STEPS}"));
    }
    Ok(steps)
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var("DISPATCH_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("DISPATCH_THREADS must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(None),
    }
}

#[derive(Serialize)]
struct SweepRow {
    steps: usize,
    h: f64,
    newton_iters: usize,
    residuals: ResidualReport,
}

#[derive(Serialize)]
struct SweepReport {
    scheme: Scheme,
    rows: Vec<SweepRow>,
    /// Least-squares slope of log residual against log h, per residual.
    orders: Vec<(String, Option<f64>)>,
}

fn cmd_sweep(a: SweepArgs, command: &[String]) -> Result<(), Failure> {
    let start = Instant::now();
    let steps = parse_steps(&a.steps).map_err(Failure::Usage)?;
    let base = load(&a.scenario, None)?;
    let scenarios: Vec<Scenario> = steps.iter().map(|&n| base.with_steps(n)).collect::<Result<_, _>>()?;
    let opts = a.solver.options();
    let scheme = a.solver.scheme;
    let run_all = || -> Vec<Result<SweepRow, Failure>> {
        scenarios
            .par_iter()
            .map(|s| {
                let sol = solve(&build(s, scheme), &opts)?;
                let residuals = optimality_residuals(&sol, s).map_err(|e| Failure::Usage(e.to_string()))?;
                Ok(SweepRow {
                    steps: s.grid.steps,
                    h: s.grid.h(),
                    newton_iters: sol.newton_iters,
                    residuals,
                })
            })
            .collect()
    };
    let results = match threads_from_env()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::Io(e.to_string()))?
            .install(run_all),
        None => run_all(),
    };
    let rows: Vec<SweepRow> = results.into_iter().collect::<Result<_, _>>()?;
    let names = ["r_soc", "r_ramp", "r_lambda", "r_beta", "r_usum", "r_collapse"];
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let orders: Vec<(String, Option<f64>)> = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let rs: Vec<f64> = rows.iter().map(|r| r.residuals.named()[j].1.max).collect();
            (name.to_string(), fitted_order(&hs, &rs))
        })
        .collect();

    print!("{:>7} {:>12} {:>5}", "N", "h", "iters");
    for n in names {
        print!(" {n:>11}");
    }
    println!();
    for r in &rows {
        print!("{:>7} {:>12.5e} {:>5}", r.steps, r.h, r.newton_iters);
        for (_, res) in r.residuals.named() {
            print!(" {:>11.4e}", res.max);
        }
        println!();
    }
    print!("{:>7} {:>12} {:>5}", "order", "", "");
    for (_, o) in &orders {
        match o {
            Some(v) => print!(" {v:>11.3}"),
            None => print!(" {:>11}", "n/a"),
        }
    }
    println!();

    if let Some(out) = &a.out {
        let report = SweepReport { scheme, rows, orders };
        write_atomic(&out.join("sweep.json"), &to_json(&report))?;
        let manifest = RunManifest {
            command: command.to_vec(),
            scenario: a.scenario.display().to_string(),
            scenario_sha256: scenario_hash(&base),
            grid: scenarios.iter().map(grid_info).collect(),
            scheme: Some(scheme),
            tolerances: Some(Tolerances {
                kkt_tol: opts.tol,
                max_iters: opts.max_iters,
            }),
            objective: None,
            newton_iters: None,
            outputs: vec!["sweep.json".into(), "manifest.json".into()],
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        write_atomic(&out.join("manifest.json"), &to_json(&manifest))?;
    }
    Ok(())
}
