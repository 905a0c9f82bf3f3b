//! Experiment orchestration behind the `osphg` CLI: instance generation,
//! constant derivation, and the run / benchmark / sweep / validate /
//! check-function pipelines with their file outputs.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analysis::{self, validate_dual_bounds, DualBoundsReport, MasterProbes, ScalingFit};
use crate::benchmark::{self, WindowUtility};
use crate::budget::{random_price_stream, BudgetStream};
use crate::config::ExperimentConfig;
use crate::domain::{dot, norm, FeasibleDomain};
use crate::error::{Error, Result};
use crate::objectives::{self, random_quadratic, DrReport, ObjectiveFunction, ProblemConstants, SmoothnessReport};
use crate::osphg::{self, derive_params, OsphgParams, RunLog, StreamEnvironment};
use crate::report::{self, fmt_sig, Summary};
use crate::rng::{SeededRng, Substream};

pub const RUN_CSV: &str = "run.csv";
pub const SUMMARY_TXT: &str = "summary.txt";
pub const BENCHMARK_CSV: &str = "benchmark.csv";
pub const BENCHMARK_TXT: &str = "benchmark.txt";
pub const SWEEP_CSV: &str = "sweep.csv";

/// Objectives, prices and domain of one experiment.
#[derive(Debug, Clone)]
pub struct Instance {
    pub objectives: Vec<ObjectiveFunction>,
    pub budget: BudgetStream,
    pub domain: FeasibleDomain,
}

impl Instance {
    pub fn fingerprint(&self) -> u64 {
        report::instance_fingerprint(&self.objectives, &self.budget)
    }
}

pub fn generate_instance(config: &ExperimentConfig) -> Result<Instance> {
    config.validate()?;
    let rng = SeededRng::new(config.seed);
    let mut objective_rng = rng.substream(Substream::Objectives);
    let (lo, hi) = config.hessian_range;
    let objectives = (0..config.horizon)
        .map(|_| random_quadratic(&mut objective_rng, config.dim, lo, hi))
        .collect::<Result<Vec<_>>>()?;
    let (plo, phi) = config.price_range;
    let budget = random_price_stream(
        &mut rng.substream(Substream::Prices),
        config.horizon,
        config.dim,
        plo,
        phi,
        config.budget(),
    )?;
    Ok(Instance {
        objectives,
        budget,
        domain: config.domain.build(config.dim)?,
    })
}

/// Vertices of the domain, when there are few enough to list.
fn domain_vertices(domain: &FeasibleDomain) -> Option<Vec<Vec<f64>>> {
    match domain {
        FeasibleDomain::Box { lower, upper } if lower.len() <= 16 => {
            let n = lower.len();
            Some(
                (0..1usize << n)
                    .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] }).collect())
                    .collect(),
            )
        }
        FeasibleDomain::ScaledSimplex { dim, radius } => {
            let mut vs = vec![vec![0.0; *dim]];
            for i in 0..*dim {
                let mut v = vec![0.0; *dim];
                v[i] = *radius;
                vs.push(v);
            }
            Some(vs)
        }
        _ => None,
    }
}

/// Upper bounds on the regularity constants of an instance, computed from
/// the closed forms of the supported families rather than by sampling:
///
/// * quadratic `β_f`: `‖∇f‖` is convex, so its maximum sits at a vertex;
/// * multilinear `β_f`: `0 ⪯ ∇F ⪯ (f({i}))ᵢ`;
/// * `F`: `f(upper) − f(0)` when `f` is certifiably monotone on a box, else `β_f R`;
/// * `G`: exact extremes of the linear `g_t` over the domain;
/// * `L`: max absolute row sum of the Hessian (bounds its spectral norm).
pub fn certified_constants(objectives: &[ObjectiveFunction], budget: &BudgetStream, domain: &FeasibleDomain) -> Result<ProblemConstants> {
    let r = domain.diameter();
    let vertices = domain_vertices(domain);
    let n = domain.dim();
    let (mut beta_f, mut f_bound, mut l) = (0.0f64, 0.0f64, 0.0f64);
    for f in objectives {
        let (bf, lf) = match f {
            ObjectiveFunction::Quadratic { .. } => {
                let sym = f.symmetric_hessian().expect("quadratic");
                let lf = (0..n)
                    .map(|i| sym[i * n..(i + 1) * n].iter().map(|v| v.abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                let bf = match &vertices {
                    Some(vs) => vs
                        .iter()
                        .map(|v| f.gradient(v).map(|g| norm(&g)))
                        .collect::<Result<Vec<_>>>()?
                        .into_iter()
                        .fold(0.0, f64::max),
                    None => {
                        let corner = norm(&f.gradient(&domain.lower())?);
                        corner + lf * r
                    }
                };
                (bf, lf)
            }
            ObjectiveFunction::MultilinearExtension { ground, table } => {
                let singles: Vec<f64> = (0..*ground).map(|i| table[1 << i] - table[0]).collect();
                let mut second = 0.0f64;
                for set in 0..table.len() {
                    for i in 0..*ground {
                        for j in (i + 1)..*ground {
                            let (bi, bj) = (1 << i, 1 << j);
                            if set & (bi | bj) == 0 {
                                let d = table[set | bi | bj] - table[set | bi] - table[set | bj] + table[set];
                                second = second.max(d.abs());
                            }
                        }
                    }
                }
                (norm(&singles), second * (*ground as f64 - 1.0).max(0.0))
            }
        };
        let range = match (f, domain) {
            (ObjectiveFunction::Quadratic { .. }, FeasibleDomain::Box { lower, upper }) => {
                let sym = f.symmetric_hessian().expect("quadratic");
                let antitone = sym.iter().all(|&v| v <= 0.0);
                let top = f.gradient(upper)?;
                if antitone && top.iter().all(|&g| g >= 0.0) {
                    f.value(upper)? - f.value(lower)?
                } else {
                    bf * r
                }
            }
            (ObjectiveFunction::MultilinearExtension { table, .. }, FeasibleDomain::Box { lower, upper })
                if lower.iter().all(|&v| v == 0.0) && upper.iter().all(|&v| v == 1.0) =>
            {
                table[table.len() - 1] - table[0]
            }
            _ => bf * r,
        };
        beta_f = beta_f.max(bf);
        f_bound = f_bound.max(range);
        l = l.max(lf);
    }

    let per_step = budget.per_step_budget();
    let mut g_bound = 0.0f64;
    for p in budget.prices() {
        let (least, most) = match domain {
            FeasibleDomain::Box { lower, upper } => (dot(p, lower), dot(p, upper)),
            FeasibleDomain::ScaledSimplex { radius, .. } => (0.0, radius * p.iter().cloned().fold(0.0, f64::max)),
        };
        g_bound = g_bound.max((most - per_step).abs()).max((least - per_step).abs());
    }
    ProblemConstants::new(r, beta_f, budget.max_price_norm(), f_bound, g_bound, l)
}

/// Certified constants scaled by the safety factor, then user overrides.
pub fn derive_constants(instance: &Instance, config: &ExperimentConfig) -> Result<ProblemConstants> {
    let c = certified_constants(&instance.objectives, &instance.budget, &instance.domain)?;
    let s = config.constants_safety;
    let o = &config.overrides;
    let mut constants = ProblemConstants::new(
        o.r.unwrap_or(c.r),
        c.beta_f * s,
        c.beta_g * s,
        o.f_bound.unwrap_or(c.f_bound * s),
        o.g_bound.unwrap_or(c.g_bound * s),
        o.l.unwrap_or(c.l * s),
    )?;
    if let Some(beta) = o.beta {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta override must be positive, got {beta}")));
        }
        constants.beta = beta;
    }
    Ok(constants)
}

pub fn resolve_params(config: &ExperimentConfig, constants: &ProblemConstants) -> Result<OsphgParams> {
    let mut params = derive_params(constants, config.horizon, config.window_length(), config.k_safety)?;
    if let Some(k) = config.oracles {
        params.oracles = k;
    }
    params.lambda_frozen = config.lambda_frozen;
    params.oga_step = config.oga_step;
    params.validate()?;
    Ok(params)
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ExperimentConfig,
    pub instance: Instance,
    pub constants: ProblemConstants,
    pub params: OsphgParams,
    pub log: RunLog,
}

impl RunOutcome {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::new();
        self.config.write_into(&mut s);
        let p = &self.params;
        s.push_f64("param.mu", p.mu);
        s.push_f64("param.delta", p.delta);
        s.push("param.K", p.oracles);
        s.push("param.W", p.window);
        s.push("param.T", p.horizon);
        s.push_f64("param.BT", self.log.total_budget);
        s.push_f64("param.oga_step", p.oracle_step());
        let c = &self.constants;
        s.push_f64("const.R", c.r);
        s.push_f64("const.beta_f", c.beta_f);
        s.push_f64("const.beta_g", c.beta_g);
        s.push_f64("const.beta", c.beta);
        s.push_f64("const.F", c.f_bound);
        s.push_f64("const.G", c.g_bound);
        s.push_f64("const.L", c.l);
        let metrics = analysis::metrics_from_benchmark_utility(&self.log, 0.0);
        let t = self.log.horizon();
        s.push_f64("result.final_lambda", self.log.final_lambda);
        s.push_f64("result.sum_f", self.log.records.iter().map(|r| r.f_value).sum::<f64>());
        s.push_f64("result.violation", metrics.violation);
        s.push_f64("result.final_run_avg_f", metrics.running_avg_f[t - 1]);
        s.push_f64("result.final_run_avg_g", metrics.running_avg_g[t - 1]);
        s.push("meta.fingerprint", format!("{:016x}", self.instance.fingerprint()));
        s
    }
}

pub fn execute_run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let instance = generate_instance(config)?;
    let constants = derive_constants(&instance, config)?;
    let params = resolve_params(config, &constants)?;
    let mut env = StreamEnvironment::new(&instance.objectives, &instance.budget)?;
    let log = osphg::run(&mut env, &instance.domain, &params)?;
    Ok(RunOutcome {
        config: config.clone(),
        instance,
        constants,
        params,
        log,
    })
}

/// Run and write `run.csv` plus `summary.txt` into `config.out`.
pub fn cli_run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let outcome = execute_run(config)?;
    std::fs::create_dir_all(&config.out)?;
    std::fs::write(config.out.join(RUN_CSV), outcome.log.to_csv())?;
    std::fs::write(config.out.join(SUMMARY_TXT), outcome.summary().to_text())?;
    Ok(outcome)
}

pub fn execute_benchmark(config: &ExperimentConfig, windows: &[usize]) -> Result<(Instance, Vec<WindowUtility>)> {
    let instance = generate_instance(config)?;
    let rows = benchmark::benchmark_utility_vs_window(
        &instance.objectives,
        &instance.budget,
        &instance.domain,
        windows,
        config.fw_steps,
    )?;
    Ok((instance, rows))
}

/// Benchmark each window and write `benchmark.csv` (plus `benchmark.txt`
/// identifying the instance) into `config.out`.
pub fn cli_benchmark(config: &ExperimentConfig, windows: &[usize]) -> Result<Vec<WindowUtility>> {
    let (instance, rows) = execute_benchmark(config, windows)?;
    std::fs::create_dir_all(&config.out)?;
    std::fs::write(config.out.join(BENCHMARK_CSV), benchmark::benchmark_csv(&rows))?;
    let mut meta = Summary::new();
    config.write_into(&mut meta);
    meta.push("meta.fingerprint", format!("{:016x}", instance.fingerprint()));
    std::fs::write(config.out.join(BENCHMARK_TXT), meta.to_text())?;
    Ok(rows)
}

/// `count` window lengths from 1 to `T`, geometrically spaced.
pub fn log_spaced_windows(horizon: usize, count: usize) -> Vec<usize> {
    if count <= 1 || horizon == 1 {
        return vec![horizon];
    }
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            let frac = i as f64 / (count - 1) as f64;
            ((horizon as f64).powf(frac).round() as usize).clamp(1, horizon)
        })
        .collect();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub horizon: usize,
    pub window: usize,
    pub oracles: usize,
    pub replicate: u64,
    pub regret: f64,
    pub violation: f64,
    /// Smallest dual-bound slack.
    pub slack41: f64,
    /// Worst relative master-inequality slack (`NaN` when not applicable).
    pub slack_master: f64,
}

/// Seed for one sweep entry: fresh per horizon and replicate.
pub fn sweep_seed(base_seed: u64, horizon: usize, replicate: u64) -> u64 {
    SeededRng::new(base_seed.wrapping_add(replicate)).mixed(horizon as u64).seed()
}

fn sweep_entry(config: &ExperimentConfig, horizon: usize, replicate: u64) -> Result<SweepRow> {
    let mut cfg = config.clone();
    cfg.horizon = horizon;
    cfg.seed = sweep_seed(config.seed, horizon, replicate);
    cfg.total_budget = config.total_budget.map(|b| b / config.horizon as f64 * horizon as f64);
    let outcome = execute_run(&cfg)?;
    let bench = benchmark::benchmark_utility_vs_window(
        &outcome.instance.objectives,
        &outcome.instance.budget,
        &outcome.instance.domain,
        &[outcome.params.window],
        cfg.fw_steps,
    )?
    .remove(0)
    .solution;
    let metrics = analysis::compute_metrics(&outcome.log, &bench)?;
    let lemma = validate_dual_bounds(&outcome.log, &outcome.params, outcome.constants.g_bound);
    let slack_master = match analysis::master_probes(&metrics, &outcome.constants, &outcome.params) {
        Ok(p) => p.worst_relative_slack(),
        Err(Error::Precondition(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    Ok(SweepRow {
        horizon,
        window: outcome.params.window,
        oracles: outcome.params.oracles,
        replicate,
        regret: metrics.regret,
        violation: metrics.violation,
        slack41: lemma.min_slack(),
        slack_master,
    })
}

/// Full run + benchmark + metrics for every `(T, replicate)`, in parallel.
pub fn execute_sweep(config: &ExperimentConfig, horizons: &[usize], replicates: u64) -> Result<(Vec<SweepRow>, ScalingFit)> {
    let mut distinct = horizons.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidArgument("need ≥ 3 horizons".into()));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let jobs: Vec<(usize, u64)> = horizons
        .iter()
        .flat_map(|&t| (0..replicates).map(move |r| (t, r)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(t, r)| sweep_entry(config, t, r))
        .collect::<Result<Vec<_>>>()?;
    let fit = analysis::scaling_exponents(&rows.iter().map(|r| (r.horizon, r.regret, r.violation)).collect::<Vec<_>>())?;
    Ok((rows, fit))
}

pub fn sweep_csv(rows: &[SweepRow], fit: &ScalingFit) -> String {
    let mut out = String::from("T,W,K,R_T,C_T,slack41,slackMaster\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.horizon,
            r.window,
            r.oracles,
            fmt_sig(r.regret),
            fmt_sig(r.violation),
            fmt_sig(r.slack41),
            fmt_sig(r.slack_master)
        );
    }
    let _ = writeln!(out, "# slope_R={}", fmt_sig(fit.slope_regret));
    let _ = writeln!(out, "# slope_C={}", fmt_sig(fit.slope_violation));
    out
}

pub fn cli_sweep(config: &ExperimentConfig, horizons: &[usize], replicates: u64) -> Result<(Vec<SweepRow>, ScalingFit)> {
    let (rows, fit) = execute_sweep(config, horizons, replicates)?;
    std::fs::create_dir_all(&config.out)?;
    std::fs::write(config.out.join(SWEEP_CSV), sweep_csv(&rows, &fit))?;
    Ok((rows, fit))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: &'static str,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub lines: Vec<CheckLine>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.verdict != Verdict::Fail)
    }

    pub fn line(&self, name: &str) -> Option<&CheckLine> {
        self.lines.iter().find(|l| l.name == name)
    }

    fn push(&mut self, name: &'static str, verdict: Verdict, detail: impl Into<String>) {
        self.lines.push(CheckLine {
            name,
            verdict,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{:<8} {:<20} {}", l.verdict.to_string(), l.name, l.detail)?;
        }
        Ok(())
    }
}

fn read_required(dir: &Path, name: &str) -> Result<(PathBuf, String)> {
    let path = dir.join(name);
    if !path.exists() {
        return Err(Error::MissingFile(path));
    }
    let text = std::fs::read_to_string(&path)?;
    Ok((path, text))
}

/// Re-check a finished run directory (`run.csv`, `summary.txt`,
/// `benchmark.csv`) with the post-hoc validators.
pub fn cli_validate(run_dir: &Path) -> Result<ValidationReport> {
    let (summary_path, summary_text) = read_required(run_dir, SUMMARY_TXT)?;
    let (run_path, run_text) = read_required(run_dir, RUN_CSV)?;
    let (bench_path, bench_text) = read_required(run_dir, BENCHMARK_CSV)?;
    let summary = Summary::parse(&summary_text, &summary_path.display().to_string())?;

    let mut params = OsphgParams::new(
        summary.require_f64("param.mu")?,
        summary.require_f64("param.delta")?,
        summary.require_usize("param.K")?,
        summary.require_usize("param.W")?,
        summary.require_usize("param.T")?,
    )?;
    params.lambda_frozen = summary.require("lambda_frozen")? == "true";
    let constants = ProblemConstants {
        r: summary.require_f64("const.R")?,
        beta_f: summary.require_f64("const.beta_f")?,
        beta_g: summary.require_f64("const.beta_g")?,
        beta: summary.require_f64("const.beta")?,
        f_bound: summary.require_f64("const.F")?,
        g_bound: summary.require_f64("const.G")?,
        l: summary.require_f64("const.L")?,
    };
    let total_budget = summary.require_f64("param.BT")?;
    let final_lambda = summary.require_f64("result.final_lambda")?;

    let mut report = ValidationReport::default();
    let log = match RunLog::parse_csv(&run_text, params, total_budget, final_lambda, &run_path.display().to_string()) {
        Ok(log) => log,
        Err(e) => {
            report.push("run.csv", Verdict::Fail, e.to_string());
            return Ok(report);
        }
    };
    if log.horizon() != params.horizon {
        report.push("run.csv", Verdict::Fail, format!("{} rows but T = {}", log.horizon(), params.horizon));
        return Ok(report);
    }
    report.push("run.csv", Verdict::Pass, format!("{} rows, running averages consistent", log.horizon()));

    let per_step = log.per_step_budget();
    match log
        .records
        .iter()
        .find(|r| (r.g_value - (r.spend - per_step)).abs() > 1e-9 * (1.0 + r.spend.abs()))
    {
        Some(r) => report.push("spend/g columns", Verdict::Fail, format!("row t={} has g ≠ spend − B_T/T", r.t)),
        None => report.push("spend/g columns", Verdict::Pass, "g = spend − B_T/T on every row"),
    }

    let metrics_no_bench = analysis::metrics_from_benchmark_utility(&log, 0.0);
    let stored = summary.require_f64("result.violation")?;
    let rel = (metrics_no_bench.violation - stored).abs() / stored.abs().max(1.0);
    report.push(
        "violation",
        if rel <= 1e-6 { Verdict::Pass } else { Verdict::Fail },
        format!("C_T from spend = {}, summary = {} (rel. diff {:.2e})", fmt_sig(metrics_no_bench.violation), fmt_sig(stored), rel),
    );

    if params.lambda_frozen {
        report.push("dual bounds", Verdict::Skipped, "λ frozen at 0");
    } else {
        let l41 = validate_dual_bounds(&log, &params, constants.g_bound);
        report.push(
            "dual bounds",
            if l41.pass { Verdict::Pass } else { Verdict::Fail },
            dual_bounds_detail(&l41),
        );
    }

    let bench_rows = benchmark::parse_benchmark_csv(&bench_text, &bench_path.display().to_string())?;
    if let (Ok((_, meta)), Some(run_fp)) = (read_required(run_dir, BENCHMARK_TXT), summary.get("meta.fingerprint")) {
        let meta = Summary::parse(&meta, BENCHMARK_TXT)?;
        if meta.get("meta.fingerprint").is_some_and(|fp| fp != run_fp) {
            report.push("benchmark", Verdict::Fail, "benchmark.csv was computed on a different instance");
            return Ok(report);
        }
    }
    let Some(&(_, bench_utility, _)) = bench_rows.iter().find(|r| r.0 == params.window) else {
        report.push("master inequality", Verdict::Skipped, format!("benchmark.csv has no row for W = {}", params.window));
        return Ok(report);
    };
    let metrics = analysis::metrics_from_benchmark_utility(&log, bench_utility);
    if params.lambda_frozen {
        report.push("master inequality", Verdict::Skipped, "λ frozen at 0; the bound is for the primal-dual run");
        return Ok(report);
    }
    match analysis::master_probes(&metrics, &constants, &params) {
        Ok(probes) => report.push(
            "master inequality",
            if probes.pass() { Verdict::Pass } else { Verdict::Fail },
            master_detail(&probes),
        ),
        Err(Error::Precondition(msg)) => report.push("master inequality", Verdict::Skipped, format!("precondition unmet; skipped ({msg})")),
        Err(e) => return Err(e),
    }
    Ok(report)
}

fn dual_bounds_detail(r: &DualBoundsReport) -> String {
    let mut s = format!(
        "lower slack {:.3e}, upper slack {:.3e}, growth slack {:.3e}",
        r.lower_slack, r.upper_slack, r.growth_slack
    );
    if let Some(t) = r.first_failure {
        let _ = write!(s, "; first violation at λ_{t}");
    }
    s
}

fn master_detail(p: &MasterProbes) -> String {
    let mut s = format!(
        "λ=0: lhs {} rhs {} slack {}",
        fmt_sig(p.at_zero.lhs),
        fmt_sig(p.at_zero.rhs),
        fmt_sig(p.at_zero.slack)
    );
    match (&p.at_violation, &p.note) {
        (Some(r), _) => {
            let _ = write!(s, "; λ={}: lhs {} rhs {} slack {}", fmt_sig(r.lambda), fmt_sig(r.lhs), fmt_sig(r.rhs), fmt_sig(r.slack));
        }
        (None, Some(note)) => {
            let _ = write!(s, "; {note}");
        }
        _ => {}
    }
    if let Some(d) = p.diagnosis() {
        let _ = write!(s, "; {d}");
    }
    s
}

/// Which function `check-function` examines.
#[derive(Debug, Clone)]
pub enum FunctionSpec {
    Quadratic { hessian: Vec<Vec<f64>>, linear: Vec<f64> },
    SetFunction(PathBuf),
    RandomQuadratic { n: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct FunctionReport {
    pub dr: DrReport,
    pub smoothness: SmoothnessReport,
}

impl fmt::Display for FunctionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "DR-submodular: {} ({} sampled pairs)",
            if self.dr.holds { "yes" } else { "NO" },
            self.dr.pairs_checked
        )?;
        if let Some(w) = &self.dr.witness {
            writeln!(f, "  witness: {w:?}")?;
        }
        writeln!(f, "monotone: {}", if self.smoothness.monotone { "yes" } else { "NO" })?;
        writeln!(f, "estimated beta_f: {}", fmt_sig(self.smoothness.estimated_beta_f))?;
        writeln!(f, "estimated L: {}", fmt_sig(self.smoothness.estimated_l))
    }
}

/// Property checks on `[0,1]ⁿ`.
pub fn cli_check_function(spec: &FunctionSpec, samples: usize, seed: u64) -> Result<FunctionReport> {
    let rng = SeededRng::new(seed);
    let f = match spec {
        FunctionSpec::Quadratic { hessian, linear } => ObjectiveFunction::quadratic_from_rows(hessian, linear.clone())?,
        FunctionSpec::SetFunction(path) => objectives::load_set_function(path)?,
        FunctionSpec::RandomQuadratic { n, seed } => {
            random_quadratic(&mut SeededRng::new(*seed).substream(Substream::Objectives), *n, -1.0, 0.0)?
        }
    };
    let domain = FeasibleDomain::unit_box(f.dim());
    let mut checks = rng.substream(Substream::Checks);
    let dr = objectives::check_dr_property(&f, &domain, samples, &mut checks)?;
    let smoothness = objectives::check_monotone_and_smooth(&f, &domain, samples, &mut checks)?;
    Ok(FunctionReport { dr, smoothness })
}
