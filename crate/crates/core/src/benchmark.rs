//! Offline comparator `x*_W`: the best fixed decision that respects the
//! budget over every window of length `W`, approximated by Frank-Wolfe with
//! an exact LP oracle and certified on small instances by grid search.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::budget::{BudgetStream, WindowPolytope};
use crate::domain::{check_dim, DecisionVector, FeasibleDomain};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram};
use crate::objectives::{quadratic_gradient, quadratic_value, ObjectiveFunction};
use crate::report;

/// `1 − 1/e`.
pub const APPROX_RATIO: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Grid search limits.
pub const GRID_MAX_DIM: usize = 3;
pub const GRID_MAX_RESOLUTION: usize = 200;

/// `Σ_t f_t`. Quadratic streams fold into a single `(H̄, h̄)`; anything else is
/// evaluated term by term.
#[derive(Debug, Clone)]
pub enum SummedObjective<'a> {
    Quadratic { hessian: Vec<f64>, linear: Vec<f64>, terms: usize },
    Streaming(&'a [ObjectiveFunction]),
}

impl<'a> SummedObjective<'a> {
    pub fn new(objectives: &'a [ObjectiveFunction]) -> Result<Self> {
        let first = objectives
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty objective stream".into()))?;
        let n = first.dim();
        for f in objectives {
            check_dim(n, f.dim())?;
        }
        if objectives.iter().all(|f| matches!(f, ObjectiveFunction::Quadratic { .. })) {
            let mut hessian = vec![0.0; n * n];
            let mut linear = vec![0.0; n];
            for f in objectives {
                if let ObjectiveFunction::Quadratic { hessian: h, linear: l } = f {
                    hessian.iter_mut().zip(h).for_each(|(a, b)| *a += b);
                    linear.iter_mut().zip(l).for_each(|(a, b)| *a += b);
                }
            }
            Ok(SummedObjective::Quadratic {
                hessian,
                linear,
                terms: objectives.len(),
            })
        } else {
            Ok(SummedObjective::Streaming(objectives))
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SummedObjective::Quadratic { linear, .. } => linear.len(),
            SummedObjective::Streaming(fs) => fs[0].dim(),
        }
    }

    pub fn terms(&self) -> usize {
        match self {
            SummedObjective::Quadratic { terms, .. } => *terms,
            SummedObjective::Streaming(fs) => fs.len(),
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        match self {
            SummedObjective::Quadratic { hessian, linear, .. } => Ok(quadratic_value(hessian, linear, x)),
            SummedObjective::Streaming(fs) => fs.iter().map(|f| f.value(x)).sum(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        match self {
            SummedObjective::Quadratic { hessian, linear, .. } => Ok(quadratic_gradient(hessian, linear, x)),
            SummedObjective::Streaming(fs) => {
                let mut total = vec![0.0; x.len()];
                for f in fs.iter() {
                    for (acc, g) in total.iter_mut().zip(f.gradient(x)?) {
                        *acc += g;
                    }
                }
                Ok(total)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkSolution {
    pub x_star: DecisionVector,
    /// `Σ_t f_t(x_star)`.
    pub total_utility: f64,
    pub approx_guarantee: f64,
    pub fw_steps: usize,
    /// `F(x⁰), …, F(x^K)` along the Frank-Wolfe path.
    pub iterate_values: Vec<f64>,
    pub fingerprint: Option<u64>,
}

/// Frank-Wolfe with fixed step `1/K` from the origin:
/// `vᵏ = argmax_{v ∈ X_W} ⟨∇F(xᵏ), v⟩`, `xᵏ⁺¹ = xᵏ + vᵏ/K`.
pub fn frank_wolfe_variant(objective: &SummedObjective<'_>, polytope: &WindowPolytope, steps: usize) -> Result<BenchmarkSolution> {
    if steps == 0 {
        return Err(Error::InvalidArgument("Frank-Wolfe needs at least one step".into()));
    }
    check_dim(polytope.dim(), objective.dim())?;
    if !polytope.is_down_closed() {
        return Err(Error::Precondition("Frank-Wolfe guarantee requires a down-closed polytope".into()));
    }
    let n = objective.dim();
    let template = polytope.linear_program(vec![0.0; n])?;
    let mut x = vec![0.0; n];
    let mut iterate_values = Vec::with_capacity(steps + 1);
    iterate_values.push(objective.value(&x)?);
    let scale = 1.0 / steps as f64;
    for _ in 0..steps {
        let lp = LinearProgram {
            objective: objective.gradient(&x)?,
            ..template.clone()
        };
        let (vertex, _) = solve_lp(&lp)?.optimal()?;
        for (xi, vi) in x.iter_mut().zip(vertex.iter()) {
            *xi += vi * scale;
        }
        iterate_values.push(objective.value(&x)?);
    }
    if !polytope.contains(&x, 1e-8) {
        return Err(Error::Invariant(format!("Frank-Wolfe output {x:?} left the window polytope")));
    }
    let total_utility = *iterate_values.last().expect("nonempty");
    Ok(BenchmarkSolution {
        x_star: DecisionVector::new(x),
        total_utility,
        approx_guarantee: APPROX_RATIO,
        fw_steps: steps,
        iterate_values,
        fingerprint: None,
    })
}

/// Best point of the regular grid (`resolution` cells per axis over the
/// base domain's bounding box) that lies in the polytope.
pub fn grid_search_oracle(objective: &SummedObjective<'_>, polytope: &WindowPolytope, resolution: usize) -> Result<(DecisionVector, f64)> {
    let n = polytope.dim();
    check_dim(n, objective.dim())?;
    if n > GRID_MAX_DIM || resolution == 0 || resolution > GRID_MAX_RESOLUTION {
        return Err(Error::InvalidArgument(format!(
            "grid search limited to n <= {GRID_MAX_DIM} and resolution in 1..={GRID_MAX_RESOLUTION}"
        )));
    }
    let reduced = polytope.linear_program(vec![0.0; n])?;
    let (lower, upper) = (polytope.base().lower(), polytope.base().upper());
    let row_tol = 1e-12 * (1.0 + reduced.rhs.iter().fold(0.0f64, |a, b| a.max(b.abs())));
    let mut index = vec![0usize; n];
    let mut best: Option<(Vec<f64>, f64)> = None;
    loop {
        let point: Vec<f64> = (0..n)
            .map(|i| lower[i] + (upper[i] - lower[i]) * index[i] as f64 / resolution as f64)
            .collect();
        if reduced.is_feasible(&point, row_tol, 0.0) && polytope.base().contains(&point, 1e-12) {
            let value = objective.value(&point)?;
            if best.as_ref().is_none_or(|(_, b)| value > *b) {
                best = Some((point, value));
            }
        }
        // odometer increment
        let mut axis = 0;
        loop {
            if axis == n {
                let (x, value) = best.ok_or_else(|| Error::Lp("no feasible grid point".into()))?;
                return Ok((DecisionVector::new(x), value));
            }
            index[axis] += 1;
            if index[axis] <= resolution {
                break;
            }
            index[axis] = 0;
            axis += 1;
        }
    }
}

/// `β·spacing·√n`: how far the grid optimum can trail the continuous one for
/// an objective with Lipschitz constant `lipschitz`.
pub fn grid_slack(lipschitz: f64, polytope: &WindowPolytope, resolution: usize) -> f64 {
    let (lower, upper) = (polytope.base().lower(), polytope.base().upper());
    let spacing = lower
        .iter()
        .zip(&upper)
        .map(|(lo, up)| (up - lo) / resolution as f64)
        .fold(0.0, f64::max);
    lipschitz * spacing * (polytope.dim() as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowUtility {
    pub window: usize,
    pub solution: BenchmarkSolution,
}

/// Benchmark for each window length; windows are solved in parallel.
pub fn benchmark_utility_vs_window(
    objectives: &[ObjectiveFunction],
    budget: &BudgetStream,
    domain: &FeasibleDomain,
    windows: &[usize],
    steps: usize,
) -> Result<Vec<WindowUtility>> {
    check_dim(budget.horizon(), objectives.len())?;
    let summed = SummedObjective::new(objectives)?;
    let fingerprint = report::instance_fingerprint(objectives, budget);
    windows
        .par_iter()
        .map(|&window| {
            let polytope = WindowPolytope::build(budget, domain, window)?;
            let mut solution = frank_wolfe_variant(&summed, &polytope, steps)?;
            solution.fingerprint = Some(fingerprint);
            Ok(WindowUtility { window, solution })
        })
        .collect()
}

pub fn benchmark_csv(rows: &[WindowUtility]) -> String {
    let n = rows.first().map_or(0, |r| r.solution.x_star.dim());
    let mut out = String::from("W,utility");
    for i in 1..=n {
        let _ = write!(out, ",xstar_{i}");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(out, "{},{}", r.window, report::fmt_sig(r.solution.total_utility));
        for v in r.solution.x_star.iter() {
            let _ = write!(out, ",{}", report::fmt_sig(*v));
        }
        out.push('\n');
    }
    out
}

/// Rows of a `benchmark.csv`: `(W, utility, x*)`.
pub fn parse_benchmark_csv(text: &str, origin: &str) -> Result<Vec<(usize, f64, Vec<f64>)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::parse(origin, "empty file"))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.len() < 3 || columns[0] != "W" || columns[1] != "utility" {
        return Err(Error::parse(origin, format!("unexpected header `{header}`")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != columns.len() {
                return Err(Error::parse(origin, format!("row {}: wrong field count", i + 1)));
            }
            let bad = |e: &dyn std::fmt::Display| Error::parse(origin, format!("row {}: {e}", i + 1));
            let w = fields[0].parse::<usize>().map_err(|e| bad(&e))?;
            let u = fields[1].parse::<f64>().map_err(|e| bad(&e))?;
            let x = fields[2..]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| bad(&e))?;
            Ok((w, u, x))
        })
        .collect()
}
