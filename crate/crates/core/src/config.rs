//! Experiment configuration: a flat `key=value` file whose defaults reproduce
//! the reference simulation (T = 10000, n = 2, B_T = 2T, K = 100, W = √T).

use std::path::{Path, PathBuf};

use crate::domain::FeasibleDomain;
use crate::error::{Error, Result};
use crate::report::Summary;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowRule {
    /// `W = ⌈√T⌉`.
    SqrtT,
    Fixed(usize),
}

impl WindowRule {
    pub fn resolve(&self, horizon: usize) -> usize {
        match self {
            WindowRule::SqrtT => ceil_sqrt(horizon),
            WindowRule::Fixed(w) => *w,
        }
    }
}

/// Exact `⌈√n⌉` for integers.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt().ceil() as usize;
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    while r * r < n {
        r += 1;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainSpec {
    /// `[0, upper]ⁿ`.
    Box { upper: f64 },
    /// `{x ⪰ 0 : Σx ≤ radius}`.
    Simplex { radius: f64 },
}

impl DomainSpec {
    pub fn build(&self, n: usize) -> Result<FeasibleDomain> {
        match *self {
            DomainSpec::Box { upper } => FeasibleDomain::boxed(vec![upper; n]),
            DomainSpec::Simplex { radius } => FeasibleDomain::scaled_simplex(n, radius),
        }
    }

    fn to_value(self) -> String {
        match self {
            DomainSpec::Box { upper } => format!("box:{upper:?}"),
            DomainSpec::Simplex { radius } => format!("simplex:{radius:?}"),
        }
    }

    fn parse(value: &str) -> Option<Self> {
        let (kind, size) = value.split_once(':')?;
        let size: f64 = size.trim().parse().ok()?;
        match kind.trim() {
            "box" => Some(DomainSpec::Box { upper: size }),
            "simplex" => Some(DomainSpec::Simplex { radius: size }),
            _ => None,
        }
    }
}

/// User-supplied values that replace the derived problem constants.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConstantOverrides {
    pub beta: Option<f64>,
    pub l: Option<f64>,
    pub f_bound: Option<f64>,
    pub g_bound: Option<f64>,
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub horizon: usize,
    pub dim: usize,
    /// `B_T`; `None` means `2T`.
    pub total_budget: Option<f64>,
    /// `K`; `None` derives `⌈k_safety·√(T/W)⌉`.
    pub oracles: Option<usize>,
    pub fw_steps: usize,
    pub window: WindowRule,
    pub seed: u64,
    pub domain: DomainSpec,
    /// Range of the raw Hessian entries.
    pub hessian_range: (f64, f64),
    pub price_range: (f64, f64),
    pub overrides: ConstantOverrides,
    /// Multiplier applied to the derived constants.
    pub constants_safety: f64,
    pub k_safety: f64,
    pub lambda_frozen: bool,
    pub oga_step: Option<f64>,
    pub out: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            horizon: 10_000,
            dim: 2,
            total_budget: None,
            oracles: None,
            fw_steps: 100,
            window: WindowRule::SqrtT,
            seed: 1,
            domain: DomainSpec::Box { upper: 1.0 },
            hessian_range: (-1.0, 0.0),
            price_range: (2.0, 4.0),
            overrides: ConstantOverrides::default(),
            constants_safety: 1.5,
            k_safety: 10.0,
            lambda_frozen: false,
            oga_step: None,
            out: PathBuf::from("out"),
        }
    }
}

/// Summary keys under these prefixes describe results, not configuration.
const RESULT_PREFIXES: [&str; 5] = ["param.", "const.", "result.", "validate.", "meta."];

impl ExperimentConfig {
    pub fn window_length(&self) -> usize {
        self.window.resolve(self.horizon)
    }

    pub fn budget(&self) -> f64 {
        self.total_budget.unwrap_or(2.0 * self.horizon as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.horizon == 0 || self.dim == 0 {
            return bad("T and n must be positive".into());
        }
        let w = self.window_length();
        if w == 0 || w > self.horizon {
            return bad(format!("W = {w} must lie in 1..={}", self.horizon));
        }
        if self.fw_steps == 0 {
            return bad("Kfw must be positive".into());
        }
        if self.oracles == Some(0) {
            return bad("K must be positive".into());
        }
        if !(self.budget() > 0.0) {
            return bad("BT must be positive".into());
        }
        if !(self.constants_safety >= 1.0) {
            return bad(format!("constants_safety must be at least 1, got {}", self.constants_safety));
        }
        if !(self.k_safety > 0.0) {
            return bad("k_safety must be positive".into());
        }
        let (lo, hi) = self.hessian_range;
        if !(-1.0 <= lo && lo <= hi && hi <= 0.0) {
            return bad(format!("h_range [{lo}, {hi}] must lie in [-1, 0]"));
        }
        let (lo, hi) = self.price_range;
        if !(0.0 <= lo && lo <= hi) {
            return bad(format!("price_range [{lo}, {hi}] must satisfy 0 <= lo <= hi"));
        }
        self.domain.build(self.dim)?;
        Ok(())
    }

    /// Apply one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let err = |m: &str| Error::parse("config", format!("key `{key}`: {m} (got `{value}`)"));
        let float = || value.parse::<f64>().map_err(|_| err("expected a number"));
        let int = || value.parse::<usize>().map_err(|_| err("expected a nonnegative integer"));
        let pair = || -> Result<(f64, f64)> {
            let (a, b) = value.split_once(',').ok_or_else(|| err("expected `lo,hi`"))?;
            Ok((
                a.trim().parse().map_err(|_| err("expected `lo,hi`"))?,
                b.trim().parse().map_err(|_| err("expected `lo,hi`"))?,
            ))
        };
        match key {
            "T" => self.horizon = int()?,
            "n" => self.dim = int()?,
            "BT" => self.total_budget = Some(float()?),
            "K" => self.oracles = Some(int()?),
            "Kfw" => self.fw_steps = int()?,
            "W" => {
                self.window = if value == "sqrtT" {
                    WindowRule::SqrtT
                } else {
                    WindowRule::Fixed(int()?)
                }
            }
            "seed" => self.seed = value.parse().map_err(|_| err("expected a 64-bit integer"))?,
            "domain" => self.domain = DomainSpec::parse(value).ok_or_else(|| err("expected `box:<upper>` or `simplex:<radius>`"))?,
            "h_range" => self.hessian_range = pair()?,
            "price_range" => self.price_range = pair()?,
            "beta" => self.overrides.beta = Some(float()?),
            "L" => self.overrides.l = Some(float()?),
            "F" => self.overrides.f_bound = Some(float()?),
            "G" => self.overrides.g_bound = Some(float()?),
            "R" => self.overrides.r = Some(float()?),
            "constants_safety" => self.constants_safety = float()?,
            "k_safety" => self.k_safety = float()?,
            "lambda_frozen" => self.lambda_frozen = value.parse().map_err(|_| err("expected true or false"))?,
            "oga_step" => self.oga_step = Some(float()?),
            "out" => self.out = PathBuf::from(value),
            _ if RESULT_PREFIXES.iter().any(|p| key.starts_with(p)) => {}
            _ => return Err(Error::parse("config", format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parse a config (or a run summary, whose result keys are skipped)
    /// on top of the defaults.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        let summary = Summary::parse(text, origin)?;
        for (k, v) in summary.entries() {
            config.set(k, v)?;
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::parse(&std::fs::read_to_string(path)?, &path.display().to_string())
    }

    /// The effective configuration as summary entries; `parse` inverts it.
    pub fn write_into(&self, s: &mut Summary) {
        s.push("T", self.horizon);
        s.push("n", self.dim);
        if let Some(b) = self.total_budget {
            s.push_f64("BT", b);
        }
        if let Some(k) = self.oracles {
            s.push("K", k);
        }
        s.push("Kfw", self.fw_steps);
        match self.window {
            WindowRule::SqrtT => s.push("W", "sqrtT"),
            WindowRule::Fixed(w) => s.push("W", w),
        }
        s.push("seed", self.seed);
        s.push("domain", self.domain.to_value());
        s.push("h_range", format!("{:?},{:?}", self.hessian_range.0, self.hessian_range.1));
        s.push("price_range", format!("{:?},{:?}", self.price_range.0, self.price_range.1));
        let o = &self.overrides;
        for (key, v) in [("beta", o.beta), ("L", o.l), ("F", o.f_bound), ("G", o.g_bound), ("R", o.r)] {
            if let Some(v) = v {
                s.push_f64(key, v);
            }
        }
        s.push_f64("constants_safety", self.constants_safety);
        s.push_f64("k_safety", self.k_safety);
        s.push("lambda_frozen", self.lambda_frozen);
        if let Some(step) = self.oga_step {
            s.push_f64("oga_step", step);
        }
        s.push("out", self.out.display());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_simulation() {
        let c = ExperimentConfig::default();
        assert_eq!(c.horizon, 10_000);
        assert_eq!(c.dim, 2);
        assert_eq!(c.budget(), 20_000.0);
        assert_eq!(c.window_length(), 100);
        assert_eq!(c.fw_steps, 100);
        assert_eq!(c.price_range, (2.0, 4.0));
        assert_eq!(c.hessian_range, (-1.0, 0.0));
        c.validate().unwrap();
    }

    #[test]
    fn ceil_sqrt_is_exact() {
        assert_eq!(ceil_sqrt(1), 1);
        assert_eq!(ceil_sqrt(1000), 32);
        assert_eq!(ceil_sqrt(4000), 64);
        assert_eq!(ceil_sqrt(16000), 127);
        assert_eq!(ceil_sqrt(10_000), 100);
        assert_eq!(ceil_sqrt(10_001), 101);
    }

    #[test]
    fn round_trip_through_summary() {
        let mut c = ExperimentConfig::default();
        c.set("T", "500").unwrap();
        c.set("W", "17").unwrap();
        c.set("domain", "simplex:1.5").unwrap();
        c.set("beta", "8").unwrap();
        c.set("lambda_frozen", "true").unwrap();
        let mut s = Summary::new();
        c.write_into(&mut s);
        s.push_f64("param.mu", 0.25);
        let back = ExperimentConfig::parse(&s.to_text(), "inline").unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn parse_errors() {
        assert!(ExperimentConfig::parse("bogus=1\n", "inline").is_err());
        assert!(ExperimentConfig::parse("T=abc\n", "inline").is_err());
        assert!(ExperimentConfig::parse("domain=ball:1\n", "inline").is_err());
        let mut c = ExperimentConfig::default();
        c.set("W", "20000").unwrap();
        assert!(c.validate().is_err());
    }
}
