//! Linear budget streams `g_t(x) = ⟨p_t, x⟩ − B_T/T` and the window-feasible
//! polytope built from them.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::domain::{check_dim, dot, FeasibleDomain};
use crate::error::{Error, Result};
use crate::lp::{non_dominated_rows, LinearProgram};

/// Price vectors `p_1 … p_T` and the total budget `B_T`.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetStream {
    prices: Vec<Vec<f64>>,
    total_budget: f64,
}

impl BudgetStream {
    pub fn new(prices: Vec<Vec<f64>>, total_budget: f64) -> Result<Self> {
        let Some(first) = prices.first() else {
            return Err(Error::InvalidArgument("budget stream needs at least one step".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidArgument("price vectors must be nonempty".into()));
        }
        for (t, p) in prices.iter().enumerate() {
            check_dim(n, p.len())?;
            if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "price vector at step {} must be finite and nonnegative",
                    t + 1
                )));
            }
        }
        if !(total_budget > 0.0 && total_budget.is_finite()) {
            return Err(Error::InvalidArgument(format!("total budget must be positive, got {total_budget}")));
        }
        Ok(BudgetStream { prices, total_budget })
    }

    pub fn horizon(&self) -> usize {
        self.prices.len()
    }

    pub fn dim(&self) -> usize {
        self.prices[0].len()
    }

    pub fn total_budget(&self) -> f64 {
        self.total_budget
    }

    pub fn per_step_budget(&self) -> f64 {
        self.total_budget / self.horizon() as f64
    }

    pub fn prices(&self) -> &[Vec<f64>] {
        &self.prices
    }

    /// Price vector of step `t` (1-based).
    pub fn price(&self, t: usize) -> Result<&[f64]> {
        if t == 0 || t > self.horizon() {
            return Err(Error::StepOutOfRange {
                index: t,
                horizon: self.horizon(),
            });
        }
        Ok(&self.prices[t - 1])
    }

    /// `⟨p_t, x⟩ − B_T/T` for 1-based `t`.
    pub fn g_eval(&self, t: usize, x: &[f64]) -> Result<f64> {
        let p = self.price(t)?;
        check_dim(p.len(), x.len())?;
        Ok(dot(p, x) - self.per_step_budget())
    }

    /// `max_t ‖p_t‖`, the exact Lipschitz constant of the constraint family.
    pub fn max_price_norm(&self) -> f64 {
        self.prices.iter().map(|p| dot(p, p).sqrt()).fold(0.0, f64::max)
    }

    /// Read prices from CSV with header `t,p1,...,pn`.
    pub fn load_csv(path: &Path, total_budget: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_csv(&text, total_budget, &path.display().to_string())
    }

    pub fn parse_csv(text: &str, total_budget: f64, origin: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::parse(origin, "empty price file"))?;
        let columns: Vec<&str> = header.split(',').map(str::trim).collect();
        let n = columns.len().saturating_sub(1);
        let expected: Vec<String> = std::iter::once("t".to_string())
            .chain((1..=n).map(|i| format!("p{i}")))
            .collect();
        if n == 0 || columns != expected {
            return Err(Error::parse(origin, format!("header must be `t,p1,...,pn`, got `{header}`")));
        }
        let mut prices = Vec::new();
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != n + 1 {
                return Err(Error::parse(origin, format!("row {}: expected {} fields", row + 1, n + 1)));
            }
            let t: usize = fields[0]
                .parse()
                .map_err(|e| Error::parse(origin, format!("row {}: bad step index: {e}", row + 1)))?;
            if t != row + 1 {
                return Err(Error::parse(origin, format!("row {}: step index {t} out of sequence", row + 1)));
            }
            let p = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::parse(origin, format!("row {}: bad price: {e}", row + 1)))?;
            prices.push(p);
        }
        Self::new(prices, total_budget)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 1..=self.dim() {
            let _ = write!(out, ",p{i}");
        }
        out.push('\n');
        for (t, p) in self.prices.iter().enumerate() {
            let _ = write!(out, "{}", t + 1);
            for v in p {
                let _ = write!(out, ",{v:?}");
            }
            out.push('\n');
        }
        out
    }
}

/// `T` price vectors with i.i.d. uniform entries in `[lo, hi]`.
pub fn random_price_stream<R: Rng + ?Sized>(
    rng: &mut R,
    horizon: usize,
    n: usize,
    lo: f64,
    hi: f64,
    total_budget: f64,
) -> Result<BudgetStream> {
    if !(0.0 <= lo && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("price range [{lo}, {hi}] must satisfy 0 <= lo <= hi")));
    }
    if horizon == 0 || n == 0 {
        return Err(Error::InvalidArgument("horizon and dimension must be positive".into()));
    }
    let prices = (0..horizon)
        .map(|_| {
            (0..n)
                .map(|_| if hi > lo { rng.gen_range(lo..=hi) } else { lo })
                .collect()
        })
        .collect();
    BudgetStream::new(prices, total_budget)
}

/// `X_W = {x ∈ X : Σ_{τ=t}^{t+W−1} g_τ(x) ≤ 0 for every full window}`,
/// stored as `Ax ⪯ b` with one row per window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowPolytope {
    base: FeasibleDomain,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    window: usize,
}

impl WindowPolytope {
    pub fn build(stream: &BudgetStream, base: &FeasibleDomain, window: usize) -> Result<Self> {
        let horizon = stream.horizon();
        if window == 0 || window > horizon {
            return Err(Error::InvalidArgument(format!("window length {window} outside 1..={horizon}")));
        }
        check_dim(base.dim(), stream.dim())?;
        let n = stream.dim();
        let prices = stream.prices();
        let mut running = vec![0.0; n];
        for p in &prices[..window] {
            for (acc, v) in running.iter_mut().zip(p) {
                *acc += v;
            }
        }
        let mut rows = Vec::with_capacity(horizon - window + 1);
        rows.push(running.clone());
        for t in 1..=(horizon - window) {
            // slide: add p_{t+W}, drop p_t (0-based t+W−1 and t−1)
            let (incoming, outgoing) = (&prices[t + window - 1], &prices[t - 1]);
            for i in 0..n {
                running[i] += incoming[i] - outgoing[i];
            }
            rows.push(running.clone());
        }
        let rhs = vec![window as f64 * stream.per_step_budget(); rows.len()];
        Ok(WindowPolytope {
            base: base.clone(),
            rows,
            rhs,
            window,
        })
    }

    /// Polytope `{x ∈ base : rows·x ≤ rhs}` from explicit data.
    pub fn from_rows(base: FeasibleDomain, rows: Vec<Vec<f64>>, rhs: Vec<f64>, window: usize) -> Result<Self> {
        check_dim(rows.len(), rhs.len())?;
        for row in &rows {
            check_dim(base.dim(), row.len())?;
        }
        Ok(WindowPolytope { base, rows, rhs, window })
    }

    pub fn base(&self) -> &FeasibleDomain {
        &self.base
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.base.contains(x, tol) && self.rows.iter().zip(&self.rhs).all(|(a, &b)| dot(a, x) <= b + tol)
    }

    /// Down-closed with least point 0: nonnegative rows and rhs over a
    /// down-closed base.
    pub fn is_down_closed(&self) -> bool {
        self.base.is_down_closed()
            && self.rhs.iter().all(|&b| b >= 0.0)
            && self.rows.iter().flatten().all(|&a| a >= 0.0)
    }

    /// Linear maximization over the polytope with redundant window rows
    /// removed. The base domain contributes its bounds (and the simplex cap).
    pub fn linear_program(&self, objective: Vec<f64>) -> Result<LinearProgram> {
        check_dim(self.dim(), objective.len())?;
        let keep = non_dominated_rows(&self.rows, &self.rhs);
        let mut rows: Vec<Vec<f64>> = keep.iter().map(|&i| self.rows[i].clone()).collect();
        let mut rhs: Vec<f64> = keep.iter().map(|&i| self.rhs[i]).collect();
        if let FeasibleDomain::ScaledSimplex { dim, radius } = &self.base {
            rows.push(vec![1.0; *dim]);
            rhs.push(*radius);
        }
        LinearProgram::new(objective, self.base.lower(), self.base.upper(), rows, rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example_stream() -> BudgetStream {
        // B_T/T = 2 with T = 3
        BudgetStream::new(vec![vec![2.0, 2.0], vec![3.0, 3.0], vec![2.0, 4.0]], 6.0).unwrap()
    }

    #[test]
    fn g_eval_examples() {
        let s = BudgetStream::new(vec![vec![2.0, 4.0], vec![3.0, 3.0], vec![2.0, 2.0]], 6.0).unwrap();
        assert_eq!(s.g_eval(1, &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(s.g_eval(2, &[0.0, 0.0]).unwrap(), -2.0);
        assert_eq!(s.g_eval(3, &[1.0, 1.0]).unwrap(), 2.0);
        assert!(matches!(s.g_eval(0, &[0.0, 0.0]), Err(Error::StepOutOfRange { .. })));
        assert!(matches!(s.g_eval(4, &[0.0, 0.0]), Err(Error::StepOutOfRange { .. })));
    }

    #[test]
    fn window_rows_by_running_sum() {
        let s = example_stream();
        let base = FeasibleDomain::unit_box(2);
        let w2 = WindowPolytope::build(&s, &base, 2).unwrap();
        assert_eq!(w2.rows(), &[vec![5.0, 5.0], vec![5.0, 7.0]]);
        assert_eq!(w2.rhs(), &[4.0, 4.0]);

        let w1 = WindowPolytope::build(&s, &base, 1).unwrap();
        assert_eq!(w1.rows(), s.prices());
        assert_eq!(w1.rhs(), &[2.0, 2.0, 2.0]);

        let wt = WindowPolytope::build(&s, &base, 3).unwrap();
        assert_eq!(wt.rows(), &[vec![7.0, 9.0]]);
        assert_eq!(wt.rhs(), &[6.0]);

        assert!(WindowPolytope::build(&s, &base, 0).is_err());
        assert!(WindowPolytope::build(&s, &base, 4).is_err());
    }

    #[test]
    fn random_stream_contract() {
        let mut a = ChaCha8Rng::seed_from_u64(11);
        let mut b = ChaCha8Rng::seed_from_u64(11);
        let s1 = random_price_stream(&mut a, 2000, 2, 2.0, 4.0, 4000.0).unwrap();
        let s2 = random_price_stream(&mut b, 2000, 2, 2.0, 4.0, 4000.0).unwrap();
        assert_eq!(s1, s2);
        let entries: Vec<f64> = s1.prices().iter().flatten().copied().collect();
        assert!(entries.iter().all(|&v| (2.0..=4.0).contains(&v)));
        // uniform[2,4]: σ = 2/√12; mean of 4000 draws within 3σ/√4000 of 3
        let mean = entries.iter().sum::<f64>() / entries.len() as f64;
        let sigma = 2.0 / 12f64.sqrt();
        assert!((mean - 3.0).abs() < 3.0 * sigma / (entries.len() as f64).sqrt());

        let constant = random_price_stream(&mut a, 5, 3, 2.5, 2.5, 10.0).unwrap();
        assert!(constant.prices().iter().all(|p| p == &vec![2.5; 3]));
        assert!(random_price_stream(&mut a, 5, 3, -1.0, 2.0, 10.0).is_err());
        assert!(random_price_stream(&mut a, 5, 3, 3.0, 2.0, 10.0).is_err());
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let s = example_stream();
        let parsed = BudgetStream::parse_csv(&s.to_csv(), 6.0, "inline").unwrap();
        assert_eq!(parsed, s);
        assert!(BudgetStream::parse_csv("t,q1\n1,2\n", 1.0, "inline").is_err());
        assert!(BudgetStream::parse_csv("t,p1\n2,2\n", 1.0, "inline").is_err());
        assert!(BudgetStream::parse_csv("t,p1\n1,-2\n", 1.0, "inline").is_err());
    }

    #[test]
    fn construction_rejects_negative_prices_and_budget() {
        assert!(BudgetStream::new(vec![vec![-1.0]], 1.0).is_err());
        assert!(BudgetStream::new(vec![vec![1.0]], 0.0).is_err());
        assert!(BudgetStream::new(vec![], 1.0).is_err());
    }
}
