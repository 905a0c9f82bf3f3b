//! Monotone DR-submodular utility oracles and their property checkers.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;

use crate::domain::{check_dim, distance, norm, DecisionVector, FeasibleDomain};
use crate::error::{Error, Result};

/// Largest ground set for which the multilinear extension is evaluated exactly.
pub const MAX_GROUND_SET: usize = 20;

const GRADIENT_TOL: f64 = 1e-9;
const HESSIAN_TOL: f64 = 1e-12;

/// A differentiable utility `f_t` with exact value and gradient oracles.
#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveFunction {
    /// `½ xᵀHx + hᵀx`, `H` stored row-major.
    Quadratic { hessian: Vec<f64>, linear: Vec<f64> },
    /// Multilinear extension of a set function on `ground` elements; `table[mask]`
    /// holds `f(S)` where bit `i` of `mask` marks element `i ∈ S`.
    MultilinearExtension { ground: usize, table: Vec<f64> },
}

impl ObjectiveFunction {
    /// Quadratic objective. Only shapes and finiteness are checked here; the
    /// DR and monotonicity properties are left to the checkers.
    pub fn quadratic(hessian: Vec<f64>, linear: Vec<f64>) -> Result<Self> {
        let n = linear.len();
        if n == 0 {
            return Err(Error::InvalidObjective("empty quadratic".into()));
        }
        check_dim(n * n, hessian.len())?;
        if hessian.iter().chain(&linear).any(|v| !v.is_finite()) {
            return Err(Error::InvalidObjective("non-finite coefficient".into()));
        }
        Ok(ObjectiveFunction::Quadratic { hessian, linear })
    }

    /// Quadratic from nested rows, convenient in tests and configs.
    pub fn quadratic_from_rows(rows: &[Vec<f64>], linear: Vec<f64>) -> Result<Self> {
        let n = linear.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidObjective("hessian must be square and match h".into()));
        }
        Self::quadratic(rows.concat(), linear)
    }

    /// Multilinear extension of a normalized monotone submodular set function.
    /// All three properties are verified exhaustively.
    pub fn multilinear(ground: usize, table: Vec<f64>) -> Result<Self> {
        let f = Self::multilinear_unchecked(ground, table)?;
        let table = f.set_table().expect("multilinear");
        if table[0] != 0.0 {
            return Err(Error::InvalidObjective(format!("f(∅) = {} but must be 0", table[0])));
        }
        if let Some((set, elem)) = monotonicity_violation(ground, table) {
            return Err(Error::InvalidObjective(format!(
                "set function not monotone: adding {elem} to {set:#b} decreases the value"
            )));
        }
        if let Some(w) = submodularity_violation(ground, table) {
            return Err(Error::InvalidObjective(format!(
                "set function not submodular at S={:#b}, i={}, j={} (excess {:.3e})",
                w.set, w.first, w.second, w.excess
            )));
        }
        Ok(f)
    }

    /// Multilinear extension without the set-function property checks.
    pub fn multilinear_unchecked(ground: usize, table: Vec<f64>) -> Result<Self> {
        if ground == 0 || ground > MAX_GROUND_SET {
            return Err(Error::InvalidObjective(format!(
                "ground set size {ground} outside 1..={MAX_GROUND_SET}"
            )));
        }
        check_dim(1 << ground, table.len())?;
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidObjective("non-finite set-function value".into()));
        }
        Ok(ObjectiveFunction::MultilinearExtension { ground, table })
    }

    pub fn dim(&self) -> usize {
        match self {
            ObjectiveFunction::Quadratic { linear, .. } => linear.len(),
            ObjectiveFunction::MultilinearExtension { ground, .. } => *ground,
        }
    }

    fn set_table(&self) -> Option<&[f64]> {
        match self {
            ObjectiveFunction::MultilinearExtension { table, .. } => Some(table),
            _ => None,
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        if let ObjectiveFunction::MultilinearExtension { .. } = self {
            if let Some(v) = x.iter().find(|v| !(-1e-12..=1.0 + 1e-12).contains(*v)) {
                return Err(Error::InvalidArgument(format!(
                    "multilinear extension evaluated outside [0,1]: coordinate {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(match self {
            ObjectiveFunction::Quadratic { hessian, linear } => quadratic_value(hessian, linear, x),
            ObjectiveFunction::MultilinearExtension { table, .. } => multilinear_value(table, x),
        })
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        Ok(match self {
            ObjectiveFunction::Quadratic { hessian, linear } => quadratic_gradient(hessian, linear, x),
            ObjectiveFunction::MultilinearExtension { table, .. } => {
                let mut point = x.to_vec();
                (0..x.len())
                    .map(|i| {
                        let keep = point[i];
                        point[i] = 1.0;
                        let hi = multilinear_value(table, &point);
                        point[i] = 0.0;
                        let lo = multilinear_value(table, &point);
                        point[i] = keep;
                        hi - lo
                    })
                    .collect()
            }
        })
    }

    /// Symmetric part `½(H + Hᵀ)` of a quadratic's Hessian.
    pub fn symmetric_hessian(&self) -> Option<Vec<f64>> {
        match self {
            ObjectiveFunction::Quadratic { hessian, linear } => {
                let n = linear.len();
                let mut sym = vec![0.0; n * n];
                for i in 0..n {
                    for j in 0..n {
                        sym[i * n + j] = 0.5 * (hessian[i * n + j] + hessian[j * n + i]);
                    }
                }
                Some(sym)
            }
            _ => None,
        }
    }
}

pub(crate) fn quadratic_value(hessian: &[f64], linear: &[f64], x: &[f64]) -> f64 {
    let n = linear.len();
    let mut quad = 0.0;
    for i in 0..n {
        let row = &hessian[i * n..(i + 1) * n];
        quad += x[i] * row.iter().zip(x).map(|(h, v)| h * v).sum::<f64>();
    }
    0.5 * quad + linear.iter().zip(x).map(|(h, v)| h * v).sum::<f64>()
}

pub(crate) fn quadratic_gradient(hessian: &[f64], linear: &[f64], x: &[f64]) -> Vec<f64> {
    let n = linear.len();
    (0..n)
        .map(|i| {
            let mut g = linear[i];
            for j in 0..n {
                g += 0.5 * (hessian[i * n + j] + hessian[j * n + i]) * x[j];
            }
            g
        })
        .collect()
}

/// `Σ_S f(S) Π_{i∈S} xᵢ Π_{j∉S} (1 − xⱼ)` by exact enumeration.
fn multilinear_value(table: &[f64], x: &[f64]) -> f64 {
    let mut probs = vec![0.0; table.len()];
    probs[0] = 1.0;
    for (i, &xi) in x.iter().enumerate() {
        let half = 1usize << i;
        for mask in 0..half {
            let p = probs[mask];
            probs[mask | half] = p * xi;
            probs[mask] = p * (1.0 - xi);
        }
    }
    probs.iter().zip(table).map(|(p, f)| p * f).sum()
}

/// `Some((S, i))` where `f(S ∪ {i}) < f(S)`.
fn monotonicity_violation(ground: usize, table: &[f64]) -> Option<(usize, usize)> {
    for set in 0..table.len() {
        for i in 0..ground {
            let bit = 1 << i;
            if set & bit == 0 && table[set | bit] < table[set] {
                return Some((set, i));
            }
        }
    }
    None
}

/// Witness of a failed diminishing-returns inequality
/// `f(S+i) + f(S+j) ≥ f(S+i+j) + f(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubmodularityWitness {
    pub set: usize,
    pub first: usize,
    pub second: usize,
    pub excess: f64,
}

fn submodularity_violation(ground: usize, table: &[f64]) -> Option<SubmodularityWitness> {
    for set in 0..table.len() {
        for i in 0..ground {
            let bi = 1 << i;
            if set & bi != 0 {
                continue;
            }
            for j in (i + 1)..ground {
                let bj = 1 << j;
                if set & bj != 0 {
                    continue;
                }
                let excess = table[set | bi | bj] + table[set] - table[set | bi] - table[set | bj];
                if excess > 1e-12 {
                    return Some(SubmodularityWitness {
                        set,
                        first: i,
                        second: j,
                        excess,
                    });
                }
            }
        }
    }
    None
}

/// Draw `½xᵀHx + hᵀx` with `H` uniform in `[lo, hi]`, symmetrized, and `h = −H1`,
/// which gives `∇f(x) = H(x − 1) ⪰ 0` on `[0,1]ⁿ`.
pub fn random_quadratic<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Result<ObjectiveFunction> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(-1.0 <= lo && lo <= hi && hi <= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "entry range [{lo}, {hi}] must satisfy -1 <= lo <= hi <= 0"
        )));
    }
    let raw: Vec<f64> = (0..n * n)
        .map(|_| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
        .collect();
    let mut hessian = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            hessian[i * n + j] = 0.5 * (raw[i * n + j] + raw[j * n + i]);
        }
    }
    let linear = (0..n).map(|i| -hessian[i * n..(i + 1) * n].iter().sum::<f64>()).collect();
    ObjectiveFunction::quadratic(hessian, linear)
}

/// Evidence that the DR property fails.
#[derive(Debug, Clone, PartialEq)]
pub enum DrWitness {
    /// Positive entry of the symmetric Hessian.
    HessianEntry { row: usize, col: usize, value: f64 },
    /// Set function violating diminishing returns.
    SetFunction(SubmodularityWitness),
    /// `x ⪯ y` but `∂ᵢF(y) > ∂ᵢF(x)`.
    GradientPair {
        lower: DecisionVector,
        upper: DecisionVector,
        coord: usize,
        excess: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrReport {
    pub holds: bool,
    pub witness: Option<DrWitness>,
    pub pairs_checked: usize,
}

/// Check that `∇F` is antitone. Uses an exact certificate where one exists
/// (Hessian sign, set-function submodularity), then samples ordered pairs.
pub fn check_dr_property<R: Rng + ?Sized>(
    f: &ObjectiveFunction,
    domain: &FeasibleDomain,
    samples: usize,
    rng: &mut R,
) -> Result<DrReport> {
    check_dim(f.dim(), domain.dim())?;
    let fail = |witness, pairs_checked| DrReport {
        holds: false,
        witness: Some(witness),
        pairs_checked,
    };
    match f {
        ObjectiveFunction::Quadratic { linear, .. } => {
            let n = linear.len();
            let sym = f.symmetric_hessian().expect("quadratic");
            for row in 0..n {
                for col in 0..n {
                    let value = sym[row * n + col];
                    if value > HESSIAN_TOL {
                        return Ok(fail(DrWitness::HessianEntry { row, col, value }, 0));
                    }
                }
            }
        }
        ObjectiveFunction::MultilinearExtension { ground, table } => {
            if let Some(w) = submodularity_violation(*ground, table) {
                return Ok(fail(DrWitness::SetFunction(w), 0));
            }
        }
    }
    for pair in 0..samples.max(1) {
        let (lower, upper) = ordered_pair(domain, rng);
        let g_lower = f.gradient(&lower)?;
        let g_upper = f.gradient(&upper)?;
        for coord in 0..lower.dim() {
            let excess = g_upper[coord] - g_lower[coord];
            if excess > GRADIENT_TOL {
                return Ok(fail(
                    DrWitness::GradientPair {
                        lower,
                        upper,
                        coord,
                        excess,
                    },
                    pair + 1,
                ));
            }
        }
    }
    Ok(DrReport {
        holds: true,
        witness: None,
        pairs_checked: samples.max(1),
    })
}

/// Random `x ⪯ y` with both points in the domain.
fn ordered_pair<R: Rng + ?Sized>(domain: &FeasibleDomain, rng: &mut R) -> (DecisionVector, DecisionVector) {
    let upper = domain.sample(rng);
    let base = domain.lower();
    let lower: Vec<f64> = upper
        .iter()
        .zip(&base)
        .map(|(&u, &b)| b + (u - b) * rng.gen::<f64>())
        .collect();
    (DecisionVector::new(lower), upper)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessReport {
    pub monotone: bool,
    /// Largest sampled gradient norm (a lower bound on `β_f`).
    pub estimated_beta_f: f64,
    /// Largest sampled gradient difference quotient (a lower bound on `L`).
    pub estimated_l: f64,
}

pub fn check_monotone_and_smooth<R: Rng + ?Sized>(
    f: &ObjectiveFunction,
    domain: &FeasibleDomain,
    samples: usize,
    rng: &mut R,
) -> Result<SmoothnessReport> {
    check_dim(f.dim(), domain.dim())?;
    let mut report = SmoothnessReport {
        monotone: true,
        estimated_beta_f: 0.0,
        estimated_l: 0.0,
    };
    // Corners carry the extremes for the families used here.
    let mut points = vec![
        DecisionVector::new(domain.lower()),
        domain.project(&domain.upper())?,
    ];
    for _ in 0..samples.max(1) {
        points.push(domain.sample(rng));
    }
    let grads = points.iter().map(|p| f.gradient(p)).collect::<Result<Vec<_>>>()?;
    for g in &grads {
        if g.iter().any(|&v| v < -GRADIENT_TOL) {
            report.monotone = false;
        }
        report.estimated_beta_f = report.estimated_beta_f.max(norm(g));
    }
    for pair in points.windows(2).zip(grads.windows(2)) {
        let (p, g) = pair;
        let dx = distance(&p[0], &p[1]);
        if dx > 1e-12 {
            report.estimated_l = report.estimated_l.max(distance(&g[0], &g[1]) / dx);
        }
    }
    Ok(report)
}

/// Regularity constants of a problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConstants {
    /// Diameter bound `R` of the domain.
    pub r: f64,
    pub beta_f: f64,
    pub beta_g: f64,
    /// `max(β_f, β_g)`.
    pub beta: f64,
    /// Utility range bound `F`.
    pub f_bound: f64,
    /// Constraint range bound `G`.
    pub g_bound: f64,
    /// Smoothness `L`.
    pub l: f64,
}

impl ProblemConstants {
    pub fn new(r: f64, beta_f: f64, beta_g: f64, f_bound: f64, g_bound: f64, l: f64) -> Result<Self> {
        let all = [r, beta_f, beta_g, f_bound, g_bound, l];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(format!("constants must be finite and nonnegative: {all:?}")));
        }
        let beta = beta_f.max(beta_g);
        if r <= 0.0 || beta <= 0.0 {
            return Err(Error::InvalidArgument("R and β must be positive".into()));
        }
        Ok(ProblemConstants {
            r,
            beta_f,
            beta_g,
            beta,
            f_bound,
            g_bound,
            l,
        })
    }

    /// Relations between the constants that a consistent instance satisfies.
    /// Returns a description of each one that fails.
    pub fn inconsistencies(&self, per_step_budget: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.f_bound > self.beta_f * self.r * (1.0 + 1e-12) {
            out.push(format!("F = {} exceeds β_f·R = {}", self.f_bound, self.beta_f * self.r));
        }
        let g_cap = (self.beta_g * self.r - per_step_budget).max(per_step_budget);
        if self.g_bound > g_cap * (1.0 + 1e-12) {
            out.push(format!("G = {} exceeds max(β_g·R − B_T/T, B_T/T) = {g_cap}", self.g_bound));
        }
        out
    }
}

/// Load a set function from `<bitmask> <value>` lines and wrap its multilinear
/// extension. Every subset of the inferred ground set must be listed.
pub fn load_set_function(path: &Path) -> Result<ObjectiveFunction> {
    let text = std::fs::read_to_string(path)?;
    parse_set_function(&text, &path.display().to_string())
}

pub fn parse_set_function(text: &str, origin: &str) -> Result<ObjectiveFunction> {
    let mut entries = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(mask), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(origin, format!("line {}: expected `<bitmask> <value>`", lineno + 1)));
        };
        let mask: usize = mask
            .parse()
            .map_err(|e| Error::parse(origin, format!("line {}: bad bitmask: {e}", lineno + 1)))?;
        let value: f64 = value
            .parse()
            .map_err(|e| Error::parse(origin, format!("line {}: bad value: {e}", lineno + 1)))?;
        if entries.insert(mask, value).is_some() {
            return Err(Error::parse(origin, format!("line {}: duplicate subset {mask}", lineno + 1)));
        }
    }
    let max_mask = *entries
        .keys()
        .next_back()
        .ok_or_else(|| Error::parse(origin, "no subsets listed"))?;
    let ground = (usize::BITS - max_mask.leading_zeros()).max(1) as usize;
    if ground > MAX_GROUND_SET {
        return Err(Error::parse(origin, format!("ground set of size {ground} exceeds {MAX_GROUND_SET}")));
    }
    let mut table = Vec::with_capacity(1 << ground);
    for mask in 0..(1usize << ground) {
        match entries.get(&mask) {
            Some(&v) => table.push(v),
            None => return Err(Error::parse(origin, format!("subset {mask} missing"))),
        }
    }
    ObjectiveFunction::multilinear(ground, table)
}
