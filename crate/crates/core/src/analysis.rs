//! Regret and violation metrics, and post-hoc checks of the dual bounds and
//! the regret/violation master inequality on recorded runs.

use crate::benchmark::{BenchmarkSolution, APPROX_RATIO};
use crate::error::{Error, Result};
use crate::objectives::ProblemConstants;
use crate::osphg::{OsphgParams, RunLog};

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// `(1 − 1/e) Σ f_t(x*_W) − Σ f_t(x_t)`.
    pub regret: f64,
    /// `Σ g_t(x_t) = Σ ⟨p_t, x_t⟩ − B_T`.
    pub violation: f64,
    pub running_avg_f: Vec<f64>,
    pub running_avg_g: Vec<f64>,
    pub lambda_series: Vec<f64>,
}

pub fn compute_metrics(log: &RunLog, bench: &BenchmarkSolution) -> Result<RunMetrics> {
    if let (Some(run), Some(b)) = (log.fingerprint, bench.fingerprint) {
        if run != b {
            return Err(Error::StreamMismatch { run, bench: b });
        }
    }
    Ok(metrics_from_benchmark_utility(log, bench.total_utility))
}

/// Metrics against a benchmark known only by its total utility.
pub fn metrics_from_benchmark_utility(log: &RunLog, benchmark_utility: f64) -> RunMetrics {
    let (mut sum_f, mut sum_g, mut spend) = (0.0, 0.0, 0.0);
    let mut running_avg_f = Vec::with_capacity(log.horizon());
    let mut running_avg_g = Vec::with_capacity(log.horizon());
    for r in &log.records {
        sum_f += r.f_value;
        sum_g += r.g_value;
        spend += r.spend;
        running_avg_f.push(sum_f / r.t as f64);
        running_avg_g.push(sum_g / r.t as f64);
    }
    // Violation from the spend column; Σ g agrees with it up to rounding.
    let violation = spend - log.total_budget;
    RunMetrics {
        regret: APPROX_RATIO * benchmark_utility - sum_f,
        violation,
        running_avg_f,
        running_avg_g,
        lambda_series: log.records.iter().map(|r| r.lambda).collect(),
    }
}

/// Outcome of the dual sandwich check.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBoundsReport {
    pub pass: bool,
    /// `min_t (λ_{t+1} − μ Σ_s (1−δμ²)^{t−s} g_s)`.
    pub lower_slack: f64,
    /// `min_t (μ Σ_s (1−δμ²)^{t−s} |g_s| − λ_{t+1})`.
    pub upper_slack: f64,
    /// `min_t (μ t G − λ_{t+1})`.
    pub growth_slack: f64,
    /// Index `t+1` of the first `λ` that breaks a bound.
    pub first_failure: Option<usize>,
}

impl DualBoundsReport {
    pub fn min_slack(&self) -> f64 {
        self.lower_slack.min(self.upper_slack)
    }
}

pub const DUAL_BOUND_TOL: f64 = 1e-7;
pub const GROWTH_TOL: f64 = 1e-9;

/// Check `μ Σ (1−δμ²)^{t−s} g_s ≤ λ_{t+1} ≤ μ Σ (1−δμ²)^{t−s} |g_s|` and
/// `λ_{t+1} ≤ μtG` at every step, with the sums carried by recurrences.
pub fn validate_dual_bounds(log: &RunLog, params: &OsphgParams, g_bound: f64) -> DualBoundsReport {
    let decay = params.contraction();
    let (mut lower_sum, mut upper_sum) = (0.0, 0.0);
    let mut report = DualBoundsReport {
        pass: true,
        lower_slack: f64::INFINITY,
        upper_slack: f64::INFINITY,
        growth_slack: f64::INFINITY,
        first_failure: None,
    };
    if log.records.first().is_some_and(|r| r.lambda != 0.0) {
        report.pass = false;
        report.first_failure = Some(1);
    }
    for r in &log.records {
        lower_sum = decay * lower_sum + params.mu * r.g_value;
        upper_sum = decay * upper_sum + params.mu * r.g_value.abs();
        let next = log.next_lambda(r.t);
        let lower = next - lower_sum;
        let upper = upper_sum - next;
        let growth = params.mu * r.t as f64 * g_bound - next;
        report.lower_slack = report.lower_slack.min(lower);
        report.upper_slack = report.upper_slack.min(upper);
        report.growth_slack = report.growth_slack.min(growth);
        let failed = lower < -DUAL_BOUND_TOL || upper < -DUAL_BOUND_TOL || growth < -GROWTH_TOL || next < 0.0;
        if failed && report.first_failure.is_none() {
            report.first_failure = Some(r.t + 1);
        }
    }
    report.pass = report.first_failure.is_none();
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterReport {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; nonpositive when the inequality holds.
    pub slack: f64,
    pub pass: bool,
}

pub const MASTER_REL_TOL: f64 = 1e-6;

/// Check the combined regret/violation bound at one `λ ≥ 0`:
///
/// `R_T + C_T λ − (δμ/2) T λ² − λ²/μ ≤ (F+βR)(W−1) + (G/2)(G+βR) μ (W−1)(T−1)
///   + R²/μ + (G²+β²) μ T + (G²/2) μ (W−1)(T−W+1) + L R² (T−W+1) / (2K)`.
///
/// Refuses when `WT < 16R²`, where the bound is not claimed.
pub fn validate_master_inequality(
    metrics: &RunMetrics,
    constants: &ProblemConstants,
    params: &OsphgParams,
    lambda: f64,
) -> Result<MasterReport> {
    let t = params.horizon as f64;
    let w = params.window as f64;
    let ProblemConstants {
        r,
        beta,
        f_bound: f,
        g_bound: g,
        l,
        ..
    } = *constants;
    if w * t < 16.0 * r * r {
        return Err(Error::Precondition(format!(
            "WT = {} is below 16R² = {}; the inequality is not claimed",
            w * t,
            16.0 * r * r
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("probe λ must be nonnegative, got {lambda}")));
    }
    let (mu, delta, k) = (params.mu, params.delta, params.oracles as f64);
    let lhs = metrics.regret + metrics.violation * lambda - 0.5 * delta * mu * t * lambda * lambda - lambda * lambda / mu;
    let rhs = (f + beta * r) * (w - 1.0)
        + 0.5 * g * (g + beta * r) * mu * (w - 1.0) * (t - 1.0)
        + r * r / mu
        + (g * g + beta * beta) * mu * t
        + 0.5 * g * g * mu * (w - 1.0) * (t - w + 1.0)
        + l * r * r * (t - w + 1.0) / (2.0 * k);
    let slack = lhs - rhs;
    Ok(MasterReport {
        lambda,
        lhs,
        rhs,
        slack,
        pass: slack <= MASTER_REL_TOL * rhs.abs(),
    })
}

/// The two standard probes: `λ = 0` (regret bound) and, when `C_T ≥ 0`,
/// `λ = C_T/(δμT + 2/μ)` (violation bound).
#[derive(Debug, Clone, PartialEq)]
pub struct MasterProbes {
    pub at_zero: MasterReport,
    pub at_violation: Option<MasterReport>,
    pub note: Option<String>,
}

impl MasterProbes {
    pub fn pass(&self) -> bool {
        self.at_zero.pass && self.at_violation.as_ref().is_none_or(|r| r.pass)
    }

    pub fn worst_relative_slack(&self) -> f64 {
        std::iter::once(&self.at_zero)
            .chain(self.at_violation.as_ref())
            .map(|r| r.slack / r.rhs.abs().max(f64::MIN_POSITIVE))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Hint when a failure is more likely understated constants than a bug.
    pub fn diagnosis(&self) -> Option<&'static str> {
        (!self.pass()).then_some("bound violated: check that F, G, β, L and R are true upper bounds for this instance")
    }
}

pub fn master_probes(metrics: &RunMetrics, constants: &ProblemConstants, params: &OsphgParams) -> Result<MasterProbes> {
    let at_zero = validate_master_inequality(metrics, constants, params, 0.0)?;
    if metrics.violation < 0.0 {
        return Ok(MasterProbes {
            at_zero,
            at_violation: None,
            note: Some("C_T < 0: violation probe skipped".into()),
        });
    }
    let t = params.horizon as f64;
    let lambda = metrics.violation / (params.delta * params.mu * t + 2.0 / params.mu);
    Ok(MasterProbes {
        at_zero,
        at_violation: Some(validate_master_inequality(metrics, constants, params, lambda)?),
        note: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub slope_regret: f64,
    pub slope_violation: f64,
    /// Points whose value was raised to 1 before taking logs.
    pub clamped_regret: usize,
    pub clamped_violation: usize,
}

/// Least-squares slopes of `log max(R_T, 1)` and `log max(C_T, 1)` on `log T`.
pub fn scaling_exponents(points: &[(usize, f64, f64)]) -> Result<ScalingFit> {
    let mut horizons: Vec<usize> = points.iter().map(|p| p.0).collect();
    horizons.sort_unstable();
    horizons.dedup();
    if horizons.len() < 3 {
        return Err(Error::InvalidArgument("need ≥ 3 horizons".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
    let clamp = |v: f64| v.max(1.0).ln();
    let regret: Vec<f64> = points.iter().map(|p| clamp(p.1)).collect();
    let violation: Vec<f64> = points.iter().map(|p| clamp(p.2)).collect();
    Ok(ScalingFit {
        slope_regret: ls_slope(&xs, &regret),
        slope_violation: ls_slope(&xs, &violation),
        clamped_regret: points.iter().filter(|p| !(p.1 >= 1.0)).count(),
        clamped_violation: points.iter().filter(|p| !(p.2 >= 1.0)).count(),
    })
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DecisionVector;
    use crate::osphg::StepRecord;

    fn log_from(gs: &[f64], params: OsphgParams) -> RunLog {
        let mut lambda = 0.0;
        let mut records = Vec::new();
        for (i, &g) in gs.iter().enumerate() {
            records.push(StepRecord {
                t: i + 1,
                lambda,
                f_value: 1.0,
                g_value: g,
                spend: g + 1.0,
            });
            lambda = crate::osphg::dual_update(lambda, g, params.mu, params.delta);
        }
        RunLog {
            params,
            total_budget: gs.len() as f64,
            records,
            plays: vec![],
            final_lambda: lambda,
            fingerprint: None,
        }
    }

    fn params(horizon: usize) -> OsphgParams {
        OsphgParams::new(0.1, 4.0, 3, 1, horizon).unwrap()
    }

    fn bench(total: f64) -> BenchmarkSolution {
        BenchmarkSolution {
            x_star: DecisionVector::zeros(1),
            total_utility: total,
            approx_guarantee: APPROX_RATIO,
            fw_steps: 1,
            iterate_values: vec![],
            fingerprint: None,
        }
    }

    #[test]
    fn metrics_basic_algebra() {
        let log = log_from(&[0.5, -1.0, 0.25], params(3));
        let m = compute_metrics(&log, &bench(6.0)).unwrap();
        assert!((m.regret - (APPROX_RATIO * 6.0 - 3.0)).abs() < 1e-12);
        assert!((m.violation - (-0.25)).abs() < 1e-12);
        assert_eq!(m.running_avg_f, vec![1.0, 1.0, 1.0]);
        assert!((m.running_avg_g[2] + 0.25 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn fingerprint_mismatch_is_an_error() {
        let mut log = log_from(&[0.5], params(1));
        log.fingerprint = Some(1);
        let mut b = bench(1.0);
        b.fingerprint = Some(2);
        assert!(matches!(compute_metrics(&log, &b), Err(Error::StreamMismatch { .. })));
    }

    #[test]
    fn dual_bounds_pass_and_catch_corruption() {
        let gs: Vec<f64> = (0..50).map(|i| ((i * 37 % 11) as f64 - 5.0) / 3.0).collect();
        let p = params(50);
        let log = log_from(&gs, p);
        let report = validate_dual_bounds(&log, &p, 5.0 / 3.0);
        assert!(report.pass, "{report:?}");

        let mut bad = log.clone();
        bad.records[4].lambda += 1.0; // λ_5
        let report = validate_dual_bounds(&bad, &p, 5.0 / 3.0);
        assert!(!report.pass);
        assert_eq!(report.first_failure, Some(5));
        assert!(report.upper_slack < -0.5);
    }

    #[test]
    fn dual_bounds_are_tight_without_the_hinge() {
        let gs = vec![0.3, 0.0, 1.2, 0.7, 0.05];
        let p = params(5);
        let report = validate_dual_bounds(&log_from(&gs, p), &p, 1.2);
        assert!(report.pass);
        assert!(report.lower_slack.abs() < 1e-9);
    }

    #[test]
    fn master_refuses_short_horizons() {
        let log = log_from(&[0.1; 4], params(4));
        let m = metrics_from_benchmark_utility(&log, 1.0);
        let c = ProblemConstants::new(2f64.sqrt(), 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!(matches!(validate_master_inequality(&m, &c, &params(4), 0.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn violation_probe_skipped_when_under_budget() {
        let p = OsphgParams::new(0.01, 4.0, 3, 10, 100).unwrap();
        let log = log_from(&[-0.5; 100], p);
        let m = metrics_from_benchmark_utility(&log, 10.0);
        let c = ProblemConstants::new(1.0, 1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        let probes = master_probes(&m, &c, &p).unwrap();
        assert!(probes.at_violation.is_none());
        assert!(probes.note.is_some());
    }

    #[test]
    fn slope_sanity() {
        let flat = scaling_exponents(&[(1000, 50.0, 2.0), (4000, 50.0, 2.0), (16000, 50.0, 2.0)]).unwrap();
        assert!(flat.slope_regret.abs() < 1e-12);
        let linear = scaling_exponents(&[(1000, 1000.0, -3.0), (4000, 4000.0, -1.0), (16000, 16000.0, 0.5)]).unwrap();
        assert!((linear.slope_regret - 1.0).abs() < 1e-12);
        assert_eq!(linear.slope_violation, 0.0);
        assert_eq!(linear.clamped_violation, 3);
        assert!(scaling_exponents(&[(1000, 1.0, 1.0), (1000, 2.0, 1.0), (4000, 1.0, 1.0)]).is_err());
    }
}
