use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use osphg::benchmark::{grid_search_oracle, SummedObjective};
use osphg::budget::{random_price_stream, BudgetStream, WindowPolytope};
use osphg::domain::FeasibleDomain;
use osphg::objectives::random_quadratic;

fn stream(seed: u64, horizon: usize) -> BudgetStream {
    random_price_stream(&mut ChaCha8Rng::seed_from_u64(seed), horizon, 2, 2.0, 4.0, 2.0 * horizon as f64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn window_polytope_is_down_closed(
        seed in 0u64..50,
        window in 1usize..=12,
        x in prop::collection::vec(0.0f64..=1.0, 2),
        shrink in prop::collection::vec(0.0f64..=1.0, 2),
    ) {
        let polytope = WindowPolytope::build(&stream(seed, 12), &FeasibleDomain::unit_box(2), window).unwrap();
        let scale = polytope
            .rows()
            .iter()
            .zip(polytope.rhs())
            .map(|(row, b)| b / (row[0] * x[0] + row[1] * x[1]).max(f64::MIN_POSITIVE))
            .fold(1.0f64, f64::min);
        let x: Vec<f64> = x.iter().map(|v| v * scale).collect();
        prop_assert!(polytope.contains(&x, 1e-12));
        let y: Vec<f64> = x.iter().zip(&shrink).map(|(a, s)| a * s).collect();
        prop_assert!(polytope.contains(&y, 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rows_are_window_sums_of_the_constraints(
        seed in 0u64..50,
        window in 1usize..=20,
        start in 1usize..=20,
        x in prop::collection::vec(0.0f64..=1.0, 2),
    ) {
        let budget = stream(seed, 20);
        prop_assume!(start + window - 1 <= 20);
        let polytope = WindowPolytope::build(&budget, &FeasibleDomain::unit_box(2), window).unwrap();
        let row = &polytope.rows()[start - 1];
        let lhs = row[0] * x[0] + row[1] * x[1] - polytope.rhs()[start - 1];
        let direct: f64 = (start..start + window).map(|t| budget.g_eval(t, &x).unwrap()).sum();
        prop_assert!((lhs - direct).abs() <= 1e-9);
    }

    #[test]
    fn origin_is_always_feasible(seed in 0u64..50, window in 1usize..=20) {
        let polytope = WindowPolytope::build(&stream(seed, 20), &FeasibleDomain::unit_box(2), window).unwrap();
        prop_assert!(polytope.contains(&[0.0, 0.0], 0.0));
    }

    #[test]
    fn doubling_an_aligned_window_relaxes_the_polytope(
        seed in 0u64..50,
        window in 1usize..=5,
        x in prop::collection::vec(0.0f64..=1.0, 2),
    ) {
        let budget = stream(seed, 20);
        let small = WindowPolytope::build(&budget, &FeasibleDomain::unit_box(2), window).unwrap();
        let large = WindowPolytope::build(&budget, &FeasibleDomain::unit_box(2), 2 * window).unwrap();
        if small.contains(&x, 0.0) {
            prop_assert!(large.contains(&x, 1e-12));
        }
    }
}

#[test]
fn single_step_windows_give_the_smallest_grid_optimum() {
    let budget = stream(11, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let objectives: Vec<_> = (0..30).map(|_| random_quadratic(&mut rng, 2, -1.0, 0.0).unwrap()).collect();
    let summed = SummedObjective::new(&objectives).unwrap();
    let domain = FeasibleDomain::unit_box(2);
    let value = |w| grid_search_oracle(&summed, &WindowPolytope::build(&budget, &domain, w).unwrap(), 100).unwrap().1;
    let base = value(1);
    for w in [2, 3, 7, 15, 30] {
        assert!(base <= value(w) + 1e-12, "W={w}");
    }
}
