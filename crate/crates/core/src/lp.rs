//! Dense linear programming: a bounded-variable primal simplex and a
//! brute-force vertex enumerator used to cross-check it.
//!
//! Problems have the form `max cᵀx` subject to `lo ⪯ x ⪯ up` and `Ax ⪯ b`,
//! with every bound finite. Each row gets a slack `sᵢ ≥ 0`; rows whose slack
//! would start negative get an artificial variable that phase one drives to
//! zero. Pivoting follows Bland's rule (smallest eligible index enters,
//! smallest index leaves among ratio ties), which keeps the solver
//! deterministic and free of cycling.

use crate::domain::{check_dim, dot, DecisionVector};
use crate::error::{Error, Result};

const COST_EPS: f64 = 1e-10;
const PIVOT_EPS: f64 = 1e-11;
const FEAS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: DecisionVector, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Result<(DecisionVector, f64)> {
        match self {
            LpOutcome::Optimal { x, value } => Ok((x, value)),
            LpOutcome::Infeasible => Err(Error::Lp("infeasible".into())),
            LpOutcome::Unbounded => Err(Error::Lp("unbounded".into())),
        }
    }
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        let lp = LinearProgram {
            objective,
            lower,
            upper,
            rows,
            rhs,
        };
        lp.validate()?;
        Ok(lp)
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        check_dim(n, self.lower.len())?;
        check_dim(n, self.upper.len())?;
        check_dim(self.rows.len(), self.rhs.len())?;
        for row in &self.rows {
            check_dim(n, row.len())?;
        }
        for (j, (&lo, &up)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !lo.is_finite() || !up.is_finite() {
                return Err(Error::InvalidArgument(format!("bound of variable {j} is not finite")));
            }
            if lo > up {
                return Err(Error::InvalidArgument(format!("variable {j} has lower bound above upper bound")));
            }
        }
        let entries = self.objective.iter().chain(&self.rhs).chain(self.rows.iter().flatten());
        if entries.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite LP coefficient".into()));
        }
        Ok(())
    }

    /// Drop rows implied by another row. Valid only when `lower ⪰ 0`: then
    /// `aᵢ ⪯ aⱼ` and `bᵢ ≥ bⱼ` make row `i` redundant. Exact duplicates are
    /// collapsed to their first occurrence. Surviving rows keep their order.
    pub fn without_dominated_rows(&self) -> LinearProgram {
        if self.lower.iter().any(|&v| v < 0.0) {
            return self.clone();
        }
        let keep = non_dominated_rows(&self.rows, &self.rhs);
        LinearProgram {
            objective: self.objective.clone(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            rhs: keep.iter().map(|&i| self.rhs[i]).collect(),
        }
    }

    pub fn is_feasible(&self, x: &[f64], row_tol: f64, bound_tol: f64) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&v, (&lo, &up))| v >= lo - bound_tol && v <= up + bound_tol)
            && self.rows.iter().zip(&self.rhs).all(|(a, &b)| dot(a, x) <= b + row_tol)
    }
}

/// Indices of rows not implied by another row (assuming `x ⪰ 0`), in input order.
pub(crate) fn non_dominated_rows(rows: &[Vec<f64>], rhs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let sums: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    // A dominating row has a rhs no larger and a coordinate sum no smaller,
    // so it always precedes the rows it dominates in this order.
    order.sort_by(|&i, &j| {
        rhs[i]
            .total_cmp(&rhs[j])
            .then(sums[j].total_cmp(&sums[i]))
            .then(i.cmp(&j))
    });
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let dominated = kept
            .iter()
            .any(|&j| rhs[j] <= rhs[i] && rows[j].iter().zip(&rows[i]).all(|(aj, ai)| aj >= ai));
        if !dominated {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
}

/// Tableau for one solve. Columns are `[structural | slack | artificial]`;
/// `tab` holds `B⁻¹[A I −E]` row-major and `beta` holds `B⁻¹b`.
struct Tableau {
    m: usize,
    cols: usize,
    tab: Vec<f64>,
    beta: Vec<f64>,
    lo: Vec<f64>,
    up: Vec<f64>,
    val: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    pivots: usize,
    pivot_cap: usize,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> (Self, Vec<usize>) {
        let n = lp.dim();
        let m = lp.rows.len();
        let residual: Vec<f64> = lp
            .rows
            .iter()
            .zip(&lp.rhs)
            .map(|(a, &b)| b - dot(a, &lp.lower))
            .collect();
        let artificial_rows: Vec<usize> = (0..m).filter(|&i| residual[i] < 0.0).collect();
        let cols = n + m + artificial_rows.len();

        let mut lo = lp.lower.clone();
        let mut up = lp.upper.clone();
        lo.extend(std::iter::repeat_n(0.0, m + artificial_rows.len()));
        up.extend(std::iter::repeat_n(f64::INFINITY, m + artificial_rows.len()));
        let mut val = lo.clone();
        let mut state = vec![VarState::AtLower; cols];
        let mut tab = vec![0.0; m * cols];
        let mut beta = lp.rhs.clone();
        let mut basis = vec![0; m];

        let mut next_artificial = n + m;
        for i in 0..m {
            let row = &mut tab[i * cols..(i + 1) * cols];
            row[..n].copy_from_slice(&lp.rows[i]);
            row[n + i] = 1.0;
            if residual[i] < 0.0 {
                // basis column of the artificial is −eᵢ, so negate the row
                row[next_artificial] = -1.0;
                for v in row.iter_mut() {
                    *v = -*v;
                }
                beta[i] = -beta[i];
                basis[i] = next_artificial;
                next_artificial += 1;
            } else {
                basis[i] = n + i;
            }
            state[basis[i]] = VarState::Basic;
        }
        let pivot_cap = 10 * (m + cols) * (m + cols);
        let mut t = Tableau {
            m,
            cols,
            tab,
            beta,
            lo,
            up,
            val: std::mem::take(&mut val),
            state,
            basis,
            pivots: 0,
            pivot_cap: pivot_cap.max(100),
        };
        t.refresh_basic_values();
        (t, artificial_rows)
    }

    /// `x_B = B⁻¹b − Σ_{j ∉ B} (B⁻¹aⱼ) xⱼ`.
    fn refresh_basic_values(&mut self) {
        for i in 0..self.m {
            let row = &self.tab[i * self.cols..(i + 1) * self.cols];
            let mut v = self.beta[i];
            for (j, &a) in row.iter().enumerate() {
                if self.state[j] != VarState::Basic && a != 0.0 {
                    v -= a * self.val[j];
                }
            }
            self.val[self.basis[i]] = v;
        }
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut d = cost[j];
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                d -= cb * self.tab[i * self.cols + j];
            }
        }
        d
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let p = self.tab[r * cols + j];
        for v in &mut self.tab[r * cols..(r + 1) * cols] {
            *v /= p;
        }
        self.beta[r] /= p;
        let pivot_row: Vec<f64> = self.tab[r * cols..(r + 1) * cols].to_vec();
        let pivot_beta = self.beta[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let factor = self.tab[i * cols + j];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.tab[i * cols..(i + 1) * cols];
            for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            row[j] = 0.0;
            self.beta[i] -= factor * pivot_beta;
        }
    }

    /// Primal simplex on `max costᵀx` from the current basic feasible point.
    fn optimize(&mut self, cost: &[f64]) -> Result<PhaseEnd> {
        loop {
            self.pivots += 1;
            if self.pivots > self.pivot_cap {
                return Err(Error::Lp(format!(
                    "no convergence after {} pivots; numerical failure",
                    self.pivot_cap
                )));
            }
            let entering = (0..self.cols).find_map(|j| match self.state[j] {
                VarState::AtLower if self.up[j] > self.lo[j] => {
                    let d = self.reduced_cost(cost, j);
                    (d > COST_EPS).then_some((j, 1.0))
                }
                VarState::AtUpper => {
                    let d = self.reduced_cost(cost, j);
                    (d < -COST_EPS).then_some((j, -1.0))
                }
                _ => None,
            });
            let Some((j, dir)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };

            // Ratio test. Candidate `None` is the entering variable's own bound flip.
            let mut step = self.up[j] - self.lo[j];
            let mut leaving: Option<(usize, VarState)> = None;
            let mut leaving_var = j;
            for i in 0..self.m {
                let rate = -self.tab[i * self.cols + j] * dir;
                let b = self.basis[i];
                let (limit, bound) = if rate < -PIVOT_EPS {
                    ((self.val[b] - self.lo[b]) / -rate, VarState::AtLower)
                } else if rate > PIVOT_EPS && self.up[b].is_finite() {
                    ((self.up[b] - self.val[b]) / rate, VarState::AtUpper)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                if limit < step || (limit == step && b < leaving_var) {
                    step = limit;
                    leaving = Some((i, bound));
                    leaving_var = b;
                }
            }
            if !step.is_finite() {
                return Ok(PhaseEnd::Unbounded);
            }

            match leaving {
                None => {
                    self.state[j] = if dir > 0.0 {
                        VarState::AtUpper
                    } else {
                        VarState::AtLower
                    };
                    self.val[j] = if dir > 0.0 { self.up[j] } else { self.lo[j] };
                }
                Some((r, bound)) => {
                    let out = self.basis[r];
                    self.val[j] += dir * step;
                    self.state[out] = bound;
                    self.val[out] = match bound {
                        VarState::AtUpper => self.up[out],
                        _ => self.lo[out],
                    };
                    self.pivot(r, j);
                    self.basis[r] = j;
                    self.state[j] = VarState::Basic;
                }
            }
            self.refresh_basic_values();
        }
    }
}

/// Solve `max cᵀx` over the bounded polyhedron. A returned maximizer is a
/// vertex; infeasibility is reported, not raised.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.dim();
    let (mut tableau, artificial_rows) = Tableau::new(lp);

    if !artificial_rows.is_empty() {
        let mut phase_one = vec![0.0; tableau.cols];
        for c in &mut phase_one[n + lp.rows.len()..] {
            *c = -1.0;
        }
        tableau.optimize(&phase_one)?;
        let infeasibility: f64 = tableau.val[n + lp.rows.len()..].iter().sum();
        let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |acc, b| acc.max(b.abs()));
        if infeasibility > FEAS_EPS * scale {
            return Ok(LpOutcome::Infeasible);
        }
        // Pin artificials at zero for phase two.
        for j in n + lp.rows.len()..tableau.cols {
            tableau.up[j] = 0.0;
            if tableau.state[j] != VarState::Basic {
                tableau.state[j] = VarState::AtLower;
                tableau.val[j] = 0.0;
            }
        }
        tableau.refresh_basic_values();
    }

    let mut cost = vec![0.0; tableau.cols];
    cost[..n].copy_from_slice(&lp.objective);
    if let PhaseEnd::Unbounded = tableau.optimize(&cost)? {
        return Ok(LpOutcome::Unbounded);
    }

    let x: Vec<f64> = (0..n)
        .map(|j| tableau.val[j].clamp(lp.lower[j], lp.upper[j]))
        .collect();
    let scale = 1.0 + lp.rhs.iter().fold(0.0f64, |acc, b| acc.max(b.abs()));
    if !lp.is_feasible(&x, 1e-8 * scale, 0.0) {
        return Err(Error::Lp("simplex terminated at an infeasible point; numerical failure".into()));
    }
    let value = dot(&lp.objective, &x);
    Ok(LpOutcome::Optimal {
        x: DecisionVector::new(x),
        value,
    })
}

/// Largest problem `enumerate_vertices` accepts.
pub const VERTEX_ENUMERATION_MAX_DIM: usize = 4;
pub const VERTEX_ENUMERATION_MAX_CONSTRAINTS: usize = 24;

/// All vertices of the feasible polytope, found by solving every `n`-subset of
/// constraints as equalities and keeping the feasible solutions. Exponential;
/// meant as a test oracle for tiny problems.
pub fn enumerate_vertices(lp: &LinearProgram) -> Result<Vec<DecisionVector>> {
    lp.validate()?;
    let n = lp.dim();
    let mut constraints: Vec<(Vec<f64>, f64)> = Vec::new();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        constraints.push((e.clone(), lp.upper[j]));
        e[j] = -1.0;
        constraints.push((e, -lp.lower[j]));
    }
    constraints.extend(lp.rows.iter().cloned().zip(lp.rhs.iter().copied()));
    if n == 0 || n > VERTEX_ENUMERATION_MAX_DIM || constraints.len() > VERTEX_ENUMERATION_MAX_CONSTRAINTS {
        return Err(Error::InvalidArgument(format!(
            "vertex enumeration limited to n <= {VERTEX_ENUMERATION_MAX_DIM} and <= {VERTEX_ENUMERATION_MAX_CONSTRAINTS} constraints (got n = {n}, {} constraints)",
            constraints.len()
        )));
    }

    let mut vertices: Vec<DecisionVector> = Vec::new();
    let mut subset: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = subset.iter().map(|&k| constraints[k].0.clone()).collect();
        let b: Vec<f64> = subset.iter().map(|&k| constraints[k].1).collect();
        if let Some(x) = solve_square(a, b) {
            if lp.is_feasible(&x, FEAS_EPS, FEAS_EPS)
                && !vertices.iter().any(|v| v.iter().zip(&x).all(|(p, q)| (p - q).abs() <= FEAS_EPS))
            {
                vertices.push(DecisionVector::new(x));
            }
        }
        if !next_combination(&mut subset, constraints.len()) {
            break;
        }
    }
    Ok(vertices)
}

fn next_combination(subset: &mut [usize], total: usize) -> bool {
    let k = subset.len();
    for i in (0..k).rev() {
        if subset[i] < total - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` if (nearly) singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_box_lp(c: Vec<f64>, rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> LinearProgram {
        let n = c.len();
        LinearProgram::new(c, vec![0.0; n], vec![1.0; n], rows, rhs).unwrap()
    }

    #[test]
    fn degenerate_face_breaks_ties_by_index() {
        let lp = unit_box_lp(vec![1.0, 1.0], vec![vec![1.0, 1.0]], vec![1.0]);
        let (x, value) = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(value, 1.0);
        assert_eq!(x.coords(), &[1.0, 0.0]);
    }

    #[test]
    fn box_only() {
        let lp = unit_box_lp(vec![2.0, 1.0], vec![], vec![]);
        let (x, value) = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(x.coords(), &[1.0, 1.0]);
        assert_eq!(value, 3.0);
    }

    #[test]
    fn window_polytope_example() {
        let lp = unit_box_lp(vec![1.0, 1.0], vec![vec![5.0, 5.0], vec![5.0, 7.0]], vec![4.0, 4.0]);
        let (x, value) = solve_lp(&lp).unwrap().optimal().unwrap();
        assert!((value - 0.8).abs() < 1e-12);
        assert!((x[0] + x[1] - 0.8).abs() < 1e-12);
        let best = enumerate_vertices(&lp)
            .unwrap()
            .iter()
            .map(|v| dot(&lp.objective, v))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best - 0.8).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_phase_one() {
        // x₁ ≥ 0.5 and x₁ ≤ 0.2
        let lp = unit_box_lp(vec![1.0], vec![vec![-1.0], vec![1.0]], vec![-0.5, 0.2]);
        assert_eq!(solve_lp(&lp).unwrap(), LpOutcome::Infeasible);
        // x₁ + x₂ ≥ 1.5 is feasible; maximize −x₁ gives x₁ = 0.5
        let lp = unit_box_lp(vec![-1.0, 0.0], vec![vec![-1.0, -1.0]], vec![-1.5]);
        let (x, value) = solve_lp(&lp).unwrap().optimal().unwrap();
        assert!((value + 0.5).abs() < 1e-12);
        assert!((x[0] - 0.5).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonzero_lower_bounds() {
        let lp = LinearProgram::new(vec![-1.0, 1.0], vec![-2.0, 1.0], vec![3.0, 4.0], vec![vec![1.0, 1.0]], vec![2.0]).unwrap();
        let (x, value) = solve_lp(&lp).unwrap().optimal().unwrap();
        assert_eq!(x.coords(), &[-2.0, 4.0]);
        assert_eq!(value, 6.0);
    }

    #[test]
    fn dimension_errors() {
        assert!(LinearProgram::new(vec![1.0], vec![0.0, 0.0], vec![1.0], vec![], vec![]).is_err());
        assert!(LinearProgram::new(vec![1.0], vec![0.0], vec![1.0], vec![vec![1.0, 2.0]], vec![1.0]).is_err());
        assert!(LinearProgram::new(vec![1.0], vec![0.0], vec![f64::INFINITY], vec![], vec![]).is_err());
    }

    #[test]
    fn vertex_enumeration_examples() {
        let square = unit_box_lp(vec![0.0, 0.0], vec![], vec![]);
        assert_eq!(enumerate_vertices(&square).unwrap().len(), 4);

        let triangle = unit_box_lp(vec![0.0, 0.0], vec![vec![1.0, 1.0]], vec![1.0]);
        let mut v: Vec<Vec<f64>> = enumerate_vertices(&triangle).unwrap().into_iter().map(|v| v.into_inner()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(v, vec![vec![0.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);

        let too_big = LinearProgram::new(vec![0.0; 5], vec![0.0; 5], vec![1.0; 5], vec![], vec![]).unwrap();
        assert!(enumerate_vertices(&too_big).is_err());
    }

    #[test]
    fn dominated_rows_are_dropped() {
        let lp = unit_box_lp(
            vec![1.0, 1.0],
            vec![vec![1.0, 1.0], vec![2.0, 2.0], vec![2.0, 2.0], vec![1.0, 3.0], vec![0.5, 0.5]],
            vec![4.0, 4.0, 4.0, 4.0, 1.0],
        );
        let reduced = lp.without_dominated_rows();
        assert_eq!(reduced.rows, vec![vec![2.0, 2.0], vec![1.0, 3.0], vec![0.5, 0.5]]);
        assert_eq!(reduced.rhs, vec![4.0, 4.0, 1.0]);
    }
}
