//! Feasible-set geometry: decision vectors, box and scaled-simplex domains.

use std::ops::{Deref, Index};

use rand::Rng;

use crate::error::{Error, Result};

/// A point in ℝⁿ, normally the investment vector chosen at one step.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(coords: Vec<f64>) -> Self {
        DecisionVector(coords)
    }

    pub fn zeros(n: usize) -> Self {
        DecisionVector(vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for DecisionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for DecisionVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<Vec<f64>> for DecisionVector {
    fn from(v: Vec<f64>) -> Self {
        DecisionVector(v)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Compact convex set the online player chooses from.
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleDomain {
    /// `{x : lower ⪯ x ⪯ upper}`.
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// `{x ⪰ 0 : Σ xᵢ ≤ radius}`.
    ScaledSimplex { dim: usize, radius: f64 },
}

impl FeasibleDomain {
    /// The unit box `[0, 1]ⁿ`.
    pub fn unit_box(n: usize) -> Self {
        FeasibleDomain::Box {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    /// Box with lower bound 0 and the given upper corner.
    pub fn boxed(upper: Vec<f64>) -> Result<Self> {
        let lower = vec![0.0; upper.len()];
        Self::with_bounds(lower, upper, false)
    }

    /// Box with explicit bounds. Nonzero lower bounds are rejected unless
    /// `allow_nonzero_lower` is set, since the algorithm starts every inner
    /// loop at the origin.
    pub fn with_bounds(lower: Vec<f64>, upper: Vec<f64>, allow_nonzero_lower: bool) -> Result<Self> {
        check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        for (i, (&lo, &up)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !up.is_finite() {
                return Err(Error::InvalidDomain(format!("bound {i} is not finite")));
            }
            if lo < 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "lower bound {i} is {lo}; the domain must lie in the nonnegative orthant"
                )));
            }
            if lo > 0.0 && !allow_nonzero_lower {
                return Err(Error::InvalidDomain(format!(
                    "lower bound {i} is {lo}; the origin must be feasible"
                )));
            }
            if up < lo {
                return Err(Error::InvalidDomain(format!("upper bound {i} below lower bound")));
            }
        }
        Ok(FeasibleDomain::Box { lower, upper })
    }

    pub fn scaled_simplex(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("simplex radius must be positive, got {radius}")));
        }
        Ok(FeasibleDomain::ScaledSimplex { dim, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleDomain::Box { lower, .. } => lower.len(),
            FeasibleDomain::ScaledSimplex { dim, .. } => *dim,
        }
    }

    /// Componentwise lower bounds of the bounding box.
    pub fn lower(&self) -> Vec<f64> {
        match self {
            FeasibleDomain::Box { lower, .. } => lower.clone(),
            FeasibleDomain::ScaledSimplex { dim, .. } => vec![0.0; *dim],
        }
    }

    /// Componentwise upper bounds of the bounding box.
    pub fn upper(&self) -> Vec<f64> {
        match self {
            FeasibleDomain::Box { upper, .. } => upper.clone(),
            FeasibleDomain::ScaledSimplex { dim, radius } => vec![*radius; *dim],
        }
    }

    /// Exact Euclidean diameter.
    pub fn diameter(&self) -> f64 {
        match self {
            FeasibleDomain::Box { lower, upper } => distance(lower, upper),
            FeasibleDomain::ScaledSimplex { dim, radius } => {
                if *dim == 1 {
                    *radius
                } else {
                    std::f64::consts::SQRT_2 * radius
                }
            }
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            FeasibleDomain::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(&v, (&lo, &up))| v >= lo - tol && v <= up + tol),
            FeasibleDomain::ScaledSimplex { radius, .. } => {
                x.iter().all(|&v| v >= -tol) && x.iter().sum::<f64>() <= radius + tol
            }
        }
    }

    /// Euclidean projection `argmin_{x ∈ X} ‖x − y‖`.
    pub fn project(&self, y: &[f64]) -> Result<DecisionVector> {
        check_dim(self.dim(), y.len())?;
        let out = match self {
            FeasibleDomain::Box { lower, upper } => y
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(&v, (&lo, &up))| v.clamp(lo, up))
                .collect(),
            FeasibleDomain::ScaledSimplex { radius, .. } => project_capped_simplex(y, *radius),
        };
        Ok(DecisionVector(out))
    }

    /// Uniform-ish random point of the domain (uniform on boxes).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DecisionVector {
        match self {
            FeasibleDomain::Box { lower, upper } => DecisionVector(
                lower
                    .iter()
                    .zip(upper)
                    .map(|(&lo, &up)| if up > lo { rng.gen_range(lo..=up) } else { lo })
                    .collect(),
            ),
            FeasibleDomain::ScaledSimplex { dim, radius } => {
                // Uniform on the solid simplex: sorted uniforms, then gaps.
                let mut cuts: Vec<f64> = (0..*dim).map(|_| rng.gen::<f64>()).collect();
                cuts.sort_by(f64::total_cmp);
                let mut prev = 0.0;
                let coords = cuts
                    .iter()
                    .map(|&c| {
                        let gap = (c - prev) * radius;
                        prev = c;
                        gap
                    })
                    .collect();
                DecisionVector(coords)
            }
        }
    }

    /// Whether the domain is down-closed with the origin as its least point.
    pub fn is_down_closed(&self) -> bool {
        match self {
            FeasibleDomain::Box { lower, .. } => lower.iter().all(|&v| v == 0.0),
            FeasibleDomain::ScaledSimplex { .. } => true,
        }
    }
}

/// Projection onto `{x ⪰ 0 : Σ xᵢ ≤ radius}` by sort-and-threshold.
fn project_capped_simplex(y: &[f64], radius: f64) -> Vec<f64> {
    let clamped: Vec<f64> = y.iter().map(|&v| v.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= radius {
        return clamped;
    }
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - radius) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        } else {
            break;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn box_projection_clamps() {
        let d = FeasibleDomain::unit_box(2);
        assert_eq!(d.project(&[1.5, -0.2]).unwrap().coords(), &[1.0, 0.0]);
        assert_eq!(d.project(&[0.3, 0.7]).unwrap().coords(), &[0.3, 0.7]);
    }

    #[test]
    fn simplex_projection_splits_symmetrically() {
        let d = FeasibleDomain::scaled_simplex(2, 1.0).unwrap();
        assert_eq!(d.project(&[1.0, 1.0]).unwrap().coords(), &[0.5, 0.5]);
        // below the cap: only negatives are clipped
        assert_eq!(d.project(&[0.2, -3.0]).unwrap().coords(), &[0.2, 0.0]);
    }

    #[test]
    fn diameters() {
        assert!((FeasibleDomain::unit_box(2).diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert!((FeasibleDomain::unit_box(10).diameter() - 10f64.sqrt()).abs() < 1e-15);
        let s = FeasibleDomain::scaled_simplex(3, 2.0).unwrap();
        assert!((s.diameter() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let d = FeasibleDomain::unit_box(2);
        assert!(matches!(
            d.project(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn construction_guards_the_origin() {
        assert!(FeasibleDomain::with_bounds(vec![0.5, 0.0], vec![1.0, 1.0], false).is_err());
        assert!(FeasibleDomain::with_bounds(vec![0.5, 0.0], vec![1.0, 1.0], true).is_ok());
        assert!(FeasibleDomain::with_bounds(vec![-1.0, 0.0], vec![1.0, 1.0], true).is_err());
        assert!(FeasibleDomain::scaled_simplex(2, 0.0).is_err());
    }

    fn domains() -> impl Strategy<Value = FeasibleDomain> {
        prop_oneof![
            prop::collection::vec(0.1f64..3.0, 1..6).prop_map(|u| FeasibleDomain::boxed(u).unwrap()),
            (1usize..6, 0.1f64..3.0).prop_map(|(n, r)| FeasibleDomain::scaled_simplex(n, r).unwrap()),
        ]
    }

    fn domain_with_points() -> impl Strategy<Value = (FeasibleDomain, Vec<f64>, Vec<f64>)> {
        domains().prop_flat_map(|d| {
            let n = d.dim();
            (
                Just(d),
                prop::collection::vec(-5.0f64..5.0, n),
                prop::collection::vec(-5.0f64..5.0, n),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn projection_is_nonexpansive((d, a, b) in domain_with_points()) {
            let pa = d.project(&a).unwrap();
            let pb = d.project(&b).unwrap();
            prop_assert!(distance(&pa, &pb) <= distance(&a, &b) + 1e-10);
        }

        #[test]
        fn projection_is_feasible_and_optimal((d, y, z) in domain_with_points()) {
            let p = d.project(&y).unwrap();
            prop_assert!(d.contains(&p, 1e-12));
            // project z to get an arbitrary feasible competitor
            let feasible = d.project(&z).unwrap();
            prop_assert!(distance(&p, &y) <= distance(&feasible, &y) + 1e-10);
        }

        #[test]
        fn projection_is_idempotent((d, y, _z) in domain_with_points()) {
            let once = d.project(&y).unwrap();
            let twice = d.project(&once).unwrap();
            match d {
                FeasibleDomain::Box { .. } => prop_assert_eq!(once, twice),
                FeasibleDomain::ScaledSimplex { .. } => prop_assert!(distance(&once, &twice) <= 1e-12),
            }
        }
    }
}
