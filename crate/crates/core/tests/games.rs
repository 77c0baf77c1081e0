use proptest::prelude::*;

use dense_equilibria::games::{is_equilibrium, library, phi, solve_nash, Multistrategy, NPersonGame};
use dense_equilibria::geometry::Point;

fn distribution(n: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(0.01..1.0f64, n).prop_map(|w| {
        let s: f64 = w.iter().sum();
        Point::new(w.into_iter().map(|v| v / s).collect()).unwrap()
    })
}

fn profile(actions: &'static [usize]) -> impl Strategy<Value = Multistrategy> {
    actions
        .iter()
        .map(|&a| distribution(a))
        .collect::<Vec<_>>()
        .prop_map(Multistrategy::new)
}

fn games() -> Vec<NPersonGame> {
    vec![library::matching_pennies(), library::prisoners_dilemma()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_vanishes_on_the_diagonal(x in profile(&[2, 2])) {
        for g in games() {
            prop_assert!(phi(&g, &x, &x).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_splits_by_player(x in profile(&[2, 2]), y in profile(&[2, 2])) {
        for g in games() {
            let parts: f64 = (0..2).map(|i| g.loss(i, &x) - g.loss(i, &x.replace(i, &y.blocks[i]))).sum();
            let single: f64 = (0..2)
                .map(|i| phi(&g, &x, &x.replace(i, &y.blocks[i])))
                .sum();
            prop_assert!((phi(&g, &x, &y) - parts).abs() < 1e-12);
            prop_assert!((phi(&g, &x, &y) - single).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_scales_with_losses(x in profile(&[2, 2]), y in profile(&[2, 2]), c in 0.1..10.0f64) {
        for g in games() {
            let s = g.scaled(c);
            prop_assert!((phi(&s, &x, &y) - c * phi(&g, &x, &y)).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_sum_gap_is_nonnegative(x in profile(&[3, 3])) {
        let g = library::rock_paper_scissors();
        let grids = g.grids(&[0.25]).unwrap();
        let snapped = Multistrategy::new(
            x.blocks.iter().zip(&grids).map(|(b, gr)| gr.points[gr.nearest(b).unwrap()].clone()).collect(),
        );
        let check = is_equilibrium(&g, &snapped, &grids, 0.0);
        prop_assert!(check.value >= 0.0);
        let total: f64 = (0..2).map(|i| g.loss(i, &snapped)).sum();
        prop_assert!(total.abs() < 1e-12);
    }
}

#[test]
fn scaling_keeps_the_equilibrium() {
    let g = library::matching_pennies();
    let a = solve_nash(&g, &[0.1], 1e-9, 100).unwrap();
    let b = solve_nash(&g.scaled(7.0), &[0.1], 1e-9, 100).unwrap();
    assert_eq!(a.profile, b.profile);
    assert!((b.v - 7.0 * a.v).abs() < 1e-12);
}

#[test]
fn rock_paper_scissors_uniform() {
    let g = library::rock_paper_scissors();
    let r = solve_nash(&g, &[1.0 / 3.0], 1e-9, 100).unwrap();
    assert!(r.certified);
    for b in &r.profile.blocks {
        for c in b.iter() {
            assert!((c - 1.0 / 3.0).abs() < 1e-12);
        }
    }
}
