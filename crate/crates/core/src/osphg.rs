//! Online Saddle Point Hybrid Gradient.
//!
//! Each round the player averages the outputs of `K` online-gradient-ascent
//! oracles along a Frank-Wolfe style path starting at the origin, commits to
//! the result, and only then sees `f_t` and `p_t`. Each oracle is fed the
//! gradient of the Lagrangian `f_t(x) − λ_t g_t(x) + (δμ/2)λ_t²` at its prefix
//! point, and the dual price `λ` takes a projected descent step.

use crate::budget::BudgetStream;
use crate::domain::{check_dim, dot, DecisionVector, FeasibleDomain};
use crate::error::{Error, Result};
use crate::objectives::{ObjectiveFunction, ProblemConstants};
use crate::report;

/// Tolerance for the runtime domain-membership assertions.
pub const DOMAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsphgParams {
    /// Step size μ, shared by the dual update and (by default) the oracles.
    pub mu: f64,
    /// Dual regularizer δ.
    pub delta: f64,
    /// Number of inner oracles `K`.
    pub oracles: usize,
    pub window: usize,
    pub horizon: usize,
    /// Keep λ at zero: the unconstrained meta-algorithm.
    pub lambda_frozen: bool,
    /// Oracle step size override; `None` uses μ.
    pub oga_step: Option<f64>,
}

impl OsphgParams {
    pub fn new(mu: f64, delta: f64, oracles: usize, window: usize, horizon: usize) -> Result<Self> {
        let params = OsphgParams {
            mu,
            delta,
            oracles,
            window,
            horizon,
            lambda_frozen: false,
            oga_step: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu.is_finite()) || !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "μ and δ must be positive (μ = {}, δ = {})",
                self.mu, self.delta
            )));
        }
        if self.delta * self.mu * self.mu >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "δμ² = {} must be below 1 for the dual recursion to contract",
                self.delta * self.mu * self.mu
            )));
        }
        if self.oracles == 0 {
            return Err(Error::InvalidArgument("K must be at least 1".into()));
        }
        if self.horizon == 0 || self.window == 0 || self.window > self.horizon {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= W <= T (W = {}, T = {})",
                self.window, self.horizon
            )));
        }
        if let Some(step) = self.oga_step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::InvalidArgument(format!("oracle step must be positive, got {step}")));
            }
        }
        Ok(())
    }

    /// `1 − δμ²`, the per-step decay of λ.
    pub fn contraction(&self) -> f64 {
        1.0 - self.delta * self.mu * self.mu
    }

    pub fn oracle_step(&self) -> f64 {
        self.oga_step.unwrap_or(self.mu)
    }
}

/// `μ = R/(β√(WT))`, `δ = 4β²`, `K = ⌈c_K·√(T/W)⌉`.
pub fn derive_params(constants: &ProblemConstants, horizon: usize, window: usize, k_safety: f64) -> Result<OsphgParams> {
    if horizon == 0 || window == 0 || window > horizon {
        return Err(Error::InvalidArgument(format!("need 1 <= W <= T (W = {window}, T = {horizon})")));
    }
    if !(k_safety > 0.0 && k_safety.is_finite()) {
        return Err(Error::InvalidArgument(format!("K safety factor must be positive, got {k_safety}")));
    }
    let (r, beta) = (constants.r, constants.beta);
    let wt = (window * horizon) as f64;
    if wt < 16.0 * r * r {
        log::warn!("WT = {wt} is below 16R² = {}; the regret analysis does not apply", 16.0 * r * r);
    }
    let mu = r / (beta * wt.sqrt());
    let delta = 4.0 * beta * beta;
    let ratio = (horizon as f64 / window as f64).sqrt();
    // guard against ratio·c landing a hair above an integer
    let oracles = ((k_safety * ratio) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    OsphgParams::new(mu, delta, oracles, window, horizon)
}

/// Prefix points of one round and the played point.
#[derive(Debug, Clone, PartialEq)]
pub struct Play {
    pub x: DecisionVector,
    /// `x^{(1)}, …, x^{(K)}`; `x^{(1)} = 0`.
    pub prefixes: Vec<DecisionVector>,
}

/// The `K` online-gradient-ascent oracle states.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleBank {
    iterates: Vec<DecisionVector>,
    domain: FeasibleDomain,
}

impl OracleBank {
    /// `K` oracles whose round-zero output is the origin.
    pub fn new(domain: FeasibleDomain, oracles: usize) -> Self {
        let n = domain.dim();
        OracleBank {
            iterates: vec![DecisionVector::zeros(n); oracles],
            domain,
        }
    }

    pub fn with_iterates(domain: FeasibleDomain, iterates: Vec<DecisionVector>) -> Result<Self> {
        if iterates.is_empty() {
            return Err(Error::InvalidArgument("oracle bank needs at least one oracle".into()));
        }
        for v in &iterates {
            check_dim(domain.dim(), v.dim())?;
            if !domain.contains(v, DOMAIN_TOL) {
                return Err(Error::Invariant(format!("oracle iterate {:?} outside the domain", v.coords())));
            }
        }
        Ok(OracleBank { iterates, domain })
    }

    pub fn iterates(&self) -> &[DecisionVector] {
        &self.iterates
    }

    pub fn domain(&self) -> &FeasibleDomain {
        &self.domain
    }

    /// Inner loop: `x^{(1)} = 0`, `x^{(k+1)} = x^{(k)} + v^{(k)}/K`, play `x^{(K+1)}`.
    pub fn play(&self) -> Result<Play> {
        let k = self.iterates.len() as f64;
        let n = self.domain.dim();
        let mut current = vec![0.0; n];
        let mut prefixes = Vec::with_capacity(self.iterates.len());
        for v in &self.iterates {
            prefixes.push(DecisionVector::new(current.clone()));
            for (c, vi) in current.iter_mut().zip(v.iter()) {
                *c += vi / k;
            }
        }
        if !self.domain.contains(&current, DOMAIN_TOL) {
            return Err(Error::Invariant(format!("played point {current:?} left the domain")));
        }
        Ok(Play {
            x: DecisionVector::new(current),
            prefixes,
        })
    }

    /// Projected ascent on every oracle with the primal Lagrangian gradient
    /// `∇f_t(x^{(k)}) − λ_t p_t`, all at the same (pre-update) `λ_t`.
    pub fn update(&mut self, play: &Play, objective: &ObjectiveFunction, price: &[f64], lambda: f64, step: f64) -> Result<()> {
        check_dim(self.iterates.len(), play.prefixes.len())?;
        check_dim(self.domain.dim(), price.len())?;
        let gradients = play
            .prefixes
            .iter()
            .map(|x| objective.gradient(x))
            .collect::<Result<Vec<_>>>()?;
        for (v, grad) in self.iterates.iter_mut().zip(gradients) {
            let moved: Vec<f64> = v
                .iter()
                .zip(grad.iter().zip(price))
                .map(|(vi, (gi, pi))| vi + step * (gi - lambda * pi))
                .collect();
            *v = self.domain.project(&moved)?;
        }
        Ok(())
    }
}

/// `λ_{t+1} = [(1 − δμ²)λ_t + μ g_t(x_t)]₊`.
pub fn dual_update(lambda: f64, g: f64, mu: f64, delta: f64) -> f64 {
    ((1.0 - delta * mu * mu) * lambda + mu * g).max(0.0)
}

/// Step data handed to the learner after it commits.
#[derive(Debug, Clone, Copy)]
pub struct Revealed<'a> {
    pub objective: &'a ObjectiveFunction,
    pub price: &'a [f64],
}

/// The adversary's side of the game. Round `t` data exist for the learner
/// only as the return value of `reveal`, which demands the committed point.
pub trait Environment {
    fn horizon(&self) -> usize;
    fn dim(&self) -> usize;
    fn total_budget(&self) -> f64;
    fn reveal(&mut self, t: usize, committed: &DecisionVector) -> Result<Revealed<'_>>;
    fn fingerprint(&self) -> Option<u64> {
        None
    }
}

/// Environment backed by pre-generated streams, revealed strictly in order.
pub struct StreamEnvironment<'a> {
    objectives: &'a [ObjectiveFunction],
    budget: &'a BudgetStream,
    revealed: usize,
}

impl<'a> StreamEnvironment<'a> {
    pub fn new(objectives: &'a [ObjectiveFunction], budget: &'a BudgetStream) -> Result<Self> {
        check_dim(budget.horizon(), objectives.len())?;
        for f in objectives {
            check_dim(budget.dim(), f.dim())?;
        }
        Ok(StreamEnvironment {
            objectives,
            budget,
            revealed: 0,
        })
    }
}

impl Environment for StreamEnvironment<'_> {
    fn horizon(&self) -> usize {
        self.budget.horizon()
    }

    fn dim(&self) -> usize {
        self.budget.dim()
    }

    fn total_budget(&self) -> f64 {
        self.budget.total_budget()
    }

    fn reveal(&mut self, t: usize, committed: &DecisionVector) -> Result<Revealed<'_>> {
        if t != self.revealed + 1 {
            return Err(Error::InvalidArgument(format!(
                "round {t} requested but round {} is next",
                self.revealed + 1
            )));
        }
        check_dim(self.dim(), committed.dim())?;
        self.revealed = t;
        Ok(Revealed {
            objective: &self.objectives[t - 1],
            price: self.budget.price(t)?,
        })
    }

    fn fingerprint(&self) -> Option<u64> {
        Some(report::instance_fingerprint(self.objectives, self.budget))
    }
}

/// One round of the log. `lambda` is the dual price used in round `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub lambda: f64,
    pub f_value: f64,
    pub g_value: f64,
    pub spend: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub params: OsphgParams,
    pub total_budget: f64,
    pub records: Vec<StepRecord>,
    /// Played points; empty when the log was read back from CSV.
    pub plays: Vec<DecisionVector>,
    /// `λ_{T+1}`.
    pub final_lambda: f64,
    pub fingerprint: Option<u64>,
}

impl RunLog {
    pub fn horizon(&self) -> usize {
        self.records.len()
    }

    pub fn per_step_budget(&self) -> f64 {
        self.total_budget / self.horizon() as f64
    }

    /// `λ_{t+1}` for 1-based `t`.
    pub fn next_lambda(&self, t: usize) -> f64 {
        if t < self.records.len() {
            self.records[t].lambda
        } else {
            self.final_lambda
        }
    }

    pub const CSV_HEADER: &'static str = "t,lambda,f_xt,g_xt,spend,run_avg_f,run_avg_g";

    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        let (mut sum_f, mut sum_g) = (0.0, 0.0);
        for r in &self.records {
            sum_f += r.f_value;
            sum_g += r.g_value;
            let avg_f = sum_f / r.t as f64;
            let avg_g = sum_g / r.t as f64;
            out.push_str(&r.t.to_string());
            for v in [r.lambda, r.f_value, r.g_value, r.spend, avg_f, avg_g] {
                out.push(',');
                out.push_str(&report::fmt_sig(v));
            }
            out.push('\n');
        }
        out
    }

    /// Parse the CSV written by `to_csv`. Running averages are checked
    /// against the per-step columns they summarize.
    pub fn parse_csv(text: &str, params: OsphgParams, total_budget: f64, final_lambda: f64, origin: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == Self::CSV_HEADER => {}
            other => {
                return Err(Error::parse(origin, format!("expected header `{}`, got {:?}", Self::CSV_HEADER, other)));
            }
        }
        let mut records = Vec::new();
        let (mut sum_f, mut sum_g) = (0.0, 0.0);
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 7 {
                return Err(Error::parse(origin, format!("row {}: expected 7 fields", i + 1)));
            }
            let t: usize = fields[0]
                .trim()
                .parse()
                .map_err(|e| Error::parse(origin, format!("row {}: bad t: {e}", i + 1)))?;
            if t != records.len() + 1 {
                return Err(Error::parse(origin, format!("row {}: step {t} out of sequence", i + 1)));
            }
            let nums = fields[1..]
                .iter()
                .map(|f| f.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(origin, format!("row {}: {e}", i + 1)))?;
            let record = StepRecord {
                t,
                lambda: nums[0],
                f_value: nums[1],
                g_value: nums[2],
                spend: nums[3],
            };
            sum_f += record.f_value;
            sum_g += record.g_value;
            let tol = |v: f64| 1e-9 * (1.0 + v.abs());
            if (nums[4] - sum_f / t as f64).abs() > tol(nums[4]) || (nums[5] - sum_g / t as f64).abs() > tol(nums[5]) {
                return Err(Error::parse(origin, format!("row {}: running averages inconsistent with columns", i + 1)));
            }
            records.push(record);
        }
        if records.is_empty() {
            return Err(Error::parse(origin, "no rows"));
        }
        Ok(RunLog {
            params,
            total_budget,
            records,
            plays: Vec::new(),
            final_lambda,
            fingerprint: None,
        })
    }
}

/// Run the online algorithm for `params.horizon` rounds.
pub fn run<E: Environment>(env: &mut E, domain: &FeasibleDomain, params: &OsphgParams) -> Result<RunLog> {
    params.validate()?;
    check_dim(domain.dim(), env.dim())?;
    check_dim(params.horizon, env.horizon())?;
    if !domain.contains(&vec![0.0; domain.dim()], 0.0) {
        return Err(Error::InvalidDomain("the origin must belong to the domain".into()));
    }
    let per_step_budget = env.total_budget() / env.horizon() as f64;
    let fingerprint = env.fingerprint();
    let mut bank = OracleBank::new(domain.clone(), params.oracles);
    let mut lambda = 0.0;
    let mut records = Vec::with_capacity(params.horizon);
    let mut plays = Vec::with_capacity(params.horizon);

    for t in 1..=params.horizon {
        let play = bank.play().map_err(|e| e.at_step(t))?;
        let revealed = env.reveal(t, &play.x).map_err(|e| e.at_step(t))?;
        let f_value = revealed.objective.value(&play.x).map_err(|e| e.at_step(t))?;
        let spend = dot(revealed.price, &play.x);
        let g_value = spend - per_step_budget;
        bank.update(&play, revealed.objective, revealed.price, lambda, params.oracle_step())
            .map_err(|e| e.at_step(t))?;
        records.push(StepRecord {
            t,
            lambda,
            f_value,
            g_value,
            spend,
        });
        if !params.lambda_frozen {
            lambda = dual_update(lambda, g_value, params.mu, params.delta);
        }
        if !(lambda.is_finite() && f_value.is_finite() && spend.is_finite()) {
            return Err(Error::Invariant("non-finite value in run".into()).at_step(t));
        }
        plays.push(play.x);
    }

    Ok(RunLog {
        params: *params,
        total_budget: env.total_budget(),
        records,
        plays,
        final_lambda: lambda,
        fingerprint,
    })
}
