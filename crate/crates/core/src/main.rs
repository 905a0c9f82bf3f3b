use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use osphg::config::{ExperimentConfig, WindowRule};
use osphg::experiment::{self, FunctionSpec};
use osphg::report::fmt_sig;
use osphg::Result;

#[derive(Parser)]
#[command(name = "osphg", version, about = "Online DR-submodular maximization under a long-term budget")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run OSPHG and write run.csv and summary.txt.
    Run(ConfigArgs),
    /// Solve the window-feasible benchmark for one or more window lengths.
    Benchmark {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated window lengths (default: the run's W).
        #[arg(long, value_delimiter = ',')]
        windows: Vec<usize>,
        /// Use this many log-spaced windows between 1 and T instead.
        #[arg(long, conflicts_with = "windows")]
        log_spaced: Option<usize>,
    },
    /// Run + benchmark over several horizons and fit scaling exponents.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1000usize, 4000, 16000])]
        horizons: Vec<usize>,
        /// Independent instances per horizon.
        #[arg(long, default_value_t = 1)]
        replicates: u64,
    },
    /// Re-check a run directory holding run.csv, summary.txt and benchmark.csv.
    Validate {
        #[arg(default_value = "out")]
        dir: PathBuf,
    },
    /// Test a function for monotonicity and DR-submodularity on the unit box.
    CheckFunction {
        /// Hessian rows separated by `;`, entries by `,`.
        #[arg(long, requires = "linear", conflicts_with_all = ["set_function", "random"])]
        hessian: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        linear: Option<Vec<f64>>,
        /// Set-function table file with `<mask> <value>` lines.
        #[arg(long, conflicts_with = "random")]
        set_function: Option<PathBuf>,
        /// Random quadratic of this dimension.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Clone, Default)]
struct ConfigArgs {
    /// Key=value config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "T")]
    horizon: Option<usize>,
    #[arg(long = "n")]
    dim: Option<usize>,
    /// Window length, or `sqrtT`.
    #[arg(long = "W")]
    window: Option<String>,
    #[arg(long = "K")]
    oracles: Option<usize>,
    #[arg(long = "Kfw")]
    fw_steps: Option<usize>,
    #[arg(long = "BT")]
    total_budget: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep λ at 0 (no budget feedback).
    #[arg(long)]
    lambda_frozen: bool,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(t) = self.horizon {
            c.horizon = t;
        }
        if let Some(n) = self.dim {
            c.dim = n;
        }
        if let Some(w) = &self.window {
            c.set("W", w)?;
        }
        if self.oracles.is_some() {
            c.oracles = self.oracles;
        }
        if let Some(k) = self.fw_steps {
            c.fw_steps = k;
        }
        if self.total_budget.is_some() {
            c.total_budget = self.total_budget;
        }
        if let Some(s) = self.seed {
            c.seed = s;
        }
        if let Some(out) = &self.out {
            c.out = out.clone();
        }
        if self.lambda_frozen {
            c.lambda_frozen = true;
        }
        if self.beta.is_some() {
            c.overrides.beta = self.beta;
        }
        if self.l.is_some() {
            c.overrides.l = self.l;
        }
        c.validate()?;
        Ok(c)
    }
}

fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| osphg::Error::InvalidArgument(format!("bad Hessian entry `{v}`")))
                })
                .collect()
        })
        .collect()
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let outcome = experiment::cli_run(&args.resolve()?)?;
            let log = &outcome.log;
            let t = log.horizon() as f64;
            println!(
                "T={} W={} K={} mu={} | avg f={} avg g={} final lambda={}",
                outcome.params.horizon,
                outcome.params.window,
                outcome.params.oracles,
                fmt_sig(outcome.params.mu),
                fmt_sig(log.records.iter().map(|r| r.f_value).sum::<f64>() / t),
                fmt_sig(log.records.iter().map(|r| r.g_value).sum::<f64>() / t),
                fmt_sig(log.final_lambda),
            );
            println!("wrote {}", outcome.config.out.display());
        }
        Command::Benchmark { config, windows, log_spaced } => {
            let c = config.resolve()?;
            let windows = match (log_spaced, windows.is_empty()) {
                (Some(count), _) => experiment::log_spaced_windows(c.horizon, count),
                (None, true) => vec![c.window_length()],
                (None, false) => windows,
            };
            for row in experiment::cli_benchmark(&c, &windows)? {
                println!("W={} utility={}", row.window, fmt_sig(row.solution.total_utility));
            }
        }
        Command::Sweep { config, horizons, replicates } => {
            let c = config.resolve()?;
            if matches!(c.window, WindowRule::Fixed(_)) {
                log::warn!("sweep with a fixed W; scaling exponents then describe R_T and C_T at constant W");
            }
            let (rows, fit) = experiment::cli_sweep(&c, &horizons, replicates)?;
            for r in &rows {
                println!(
                    "T={} W={} K={} R_T={} C_T={}",
                    r.horizon,
                    r.window,
                    r.oracles,
                    fmt_sig(r.regret),
                    fmt_sig(r.violation)
                );
            }
            println!("slope R_T={} slope C_T={}", fmt_sig(fit.slope_regret), fmt_sig(fit.slope_violation));
        }
        Command::Validate { dir } => {
            let report = experiment::cli_validate(&dir)?;
            print!("{report}");
            return Ok(report.all_pass());
        }
        Command::CheckFunction {
            hessian,
            linear,
            set_function,
            random,
            samples,
            seed,
        } => {
            let spec = match (hessian, set_function, random) {
                (Some(h), _, _) => FunctionSpec::Quadratic {
                    hessian: parse_rows(&h)?,
                    linear: linear.unwrap_or_default(),
                },
                (None, Some(path), _) => FunctionSpec::SetFunction(path),
                (None, None, Some(n)) => FunctionSpec::RandomQuadratic { n, seed },
                (None, None, None) => {
                    return Err(osphg::Error::InvalidArgument(
                        "give one of --hessian/--linear, --set-function or --random".into(),
                    ))
                }
            };
            let report = experiment::cli_check_function(&spec, samples, seed)?;
            print!("{report}");
            return Ok(report.dr.holds && report.smoothness.monotone);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
