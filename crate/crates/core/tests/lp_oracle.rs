use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use osphg::lp::{enumerate_vertices, solve_lp, LinearProgram, LpOutcome};

fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(0..=6);
    LinearProgram::new(
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        vec![0.0; n],
        (0..n).map(|_| rng.gen_range(0.2..2.0)).collect(),
        (0..m).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect(),
        (0..m).map(|_| rng.gen_range(-0.3..1.5)).collect(),
    )
    .unwrap()
}

fn objective_value(lp: &LinearProgram, x: &[f64]) -> f64 {
    lp.objective.iter().zip(x).map(|(c, v)| c * v).sum()
}

#[test]
fn simplex_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..200 {
        let lp = random_lp(&mut rng);
        let best = enumerate_vertices(&lp)
            .unwrap()
            .iter()
            .map(|v| objective_value(&lp, v))
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
        match (solve_lp(&lp).unwrap(), best) {
            (LpOutcome::Optimal { x, value }, Some(best)) => {
                assert!((value - best).abs() <= 1e-7, "LP {i}: {value} vs {best}");
                assert!(lp.is_feasible(&x, 1e-8, 1e-12), "LP {i}: {x:?}");
            }
            (LpOutcome::Infeasible, None) => {}
            (outcome, best) => panic!("LP {i}: simplex {outcome:?}, enumeration {best:?}"),
        }
    }
}

#[test]
fn budget_polytope_matches_enumeration_for_random_objectives() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let c = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let lp = LinearProgram::new(c, vec![0.0; 2], vec![1.0; 2], vec![vec![5.0, 5.0], vec![5.0, 7.0]], vec![4.0, 4.0]).unwrap();
        let best = enumerate_vertices(&lp).unwrap().iter().map(|v| objective_value(&lp, v)).fold(f64::NEG_INFINITY, f64::max);
        let (_, value) = solve_lp(&lp).unwrap().optimal().unwrap();
        assert!((value - best).abs() <= 1e-12);
    }
}

proptest! {
    #[test]
    fn repeated_solves_are_bit_identical(seed in any::<u64>()) {
        let lp = random_lp(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
