use proptest::prelude::*;

use dense_equilibria::bifunction::{library, ProblemKind};
use dense_equilibria::dense_sets::{check_self_segment_dense, DenseSubset, SsdParams};
use dense_equilibria::geometry::{Point, Polytope, Region};
use dense_equilibria::rng;
use dense_equilibria::solver::{solve_compact, EquilibriumProblem, SolveConfig, SolveStatus};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rational_samples_are_members(q in 1u32..200, seed in any::<u64>()) {
        let square: Region = Polytope::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap().into();
        let d = DenseSubset::rational_grid(square, q).unwrap();
        let mut r = rng(seed);
        for _ in 0..20 {
            let p = d.sample(&mut r).unwrap();
            prop_assert!(d.member(&p));
        }
    }

    /// `|y|^2 - |x|^2 >= 0` for all `y` singles out the grid point of least
    /// norm, which is the origin whenever the box holds it on its lattice.
    #[test]
    fn potential_gap_solves_at_the_origin(a in 1u32..5, b in 1u32..5) {
        let (a, b) = (a as f64 * 0.25, b as f64 * 0.25);
        let k: Region = Polytope::boxed(&[-a, -b], &[b, a]).unwrap().into();
        let p = EquilibriumProblem::new(k.clone(), DenseSubset::full(k.clone()), library::sq_norm_gap(k), ProblemKind::StrongGeq)
            .unwrap();
        let r = solve_compact(&p, &SolveConfig::with_res(0.25)).unwrap();
        match r.status {
            SolveStatus::Found { x0, residual, .. } => {
                prop_assert_eq!(x0, Point::zeros(2));
                prop_assert!(residual >= -1e-12);
            }
            s => prop_assert!(false, "{:?}", s),
        }
    }
}

#[test]
fn segment_checks_replay_under_a_seed() {
    let square: Region = Polytope::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap().into();
    let d = DenseSubset::rational_grid(square, 50).unwrap();
    let params = SsdParams {
        pairs: 10,
        seed: 42,
        ..SsdParams::default()
    };
    assert_eq!(check_self_segment_dense(&d, params).unwrap(), check_self_segment_dense(&d, params).unwrap());
}
