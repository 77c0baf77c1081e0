use proptest::prelude::*;

use dense_equilibria::bifunction::{ProblemKind, Shape};
use dense_equilibria::interval::{contains_zero, minkowski_combination, ExtInterval};
use dense_equilibria::validators::convexity_forms;

fn interval() -> impl Strategy<Value = ExtInterval> {
    (-5.0..5.0f64, 0.0..3.0f64, 0u8..10).prop_map(|(a, w, k)| match k {
        0 => ExtInterval::at_least(a),
        1 => ExtInterval::at_most(a),
        2 => ExtInterval::point(a),
        _ => ExtInterval::new(a, a + w).unwrap(),
    })
}

const KINDS: [ProblemKind; 6] = [
    ProblemKind::StrongGeq,
    ProblemKind::StrongLeq,
    ProblemKind::WeakPlus,
    ProblemKind::WeakMinus,
    ProblemKind::ScalarGeq,
    ProblemKind::ScalarLeq,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn convexity_forms_agree(a in interval(), b in interval(), c in interval(), at in interval(), w in (0.0..1.0f64, 0.0..1.0f64)) {
        let s = 1.0 + w.0 + w.1;
        let weights = [1.0 / s, w.0 / s, w.1 / s];
        for shape in [Shape::Convex, Shape::Concave] {
            let f = convexity_forms(&[a, b, c], &weights, &at, shape, 1e-9).unwrap();
            prop_assert_eq!(f.inclusion, f.endpoint);
        }
    }

    #[test]
    fn minkowski_is_endpointwise(a in interval(), b in interval(), t in 0.0..=1.0f64) {
        let m = minkowski_combination(&[a, b], &[t, 1.0 - t]).unwrap();
        let expect = |x: f64, y: f64| {
            let parts = [(t, x), (1.0 - t, y)];
            parts.iter().filter(|(w, _)| *w > 0.0).map(|(w, v)| w * v).sum::<f64>()
        };
        let lo = expect(a.lo(), b.lo());
        let hi = expect(a.hi(), b.hi());
        prop_assert!(m.lo() == lo || (m.lo() - lo).abs() < 1e-9);
        prop_assert!(m.hi() == hi || (m.hi() - hi).abs() < 1e-9);
    }

    #[test]
    fn point_intervals_are_the_scalar_case(v in -5.0..5.0f64) {
        let i = ExtInterval::point(v);
        prop_assert_eq!(ProblemKind::StrongGeq.holds(&i, 0.0), ProblemKind::ScalarGeq.holds(&i, 0.0));
        prop_assert_eq!(ProblemKind::WeakPlus.holds(&i, 0.0), ProblemKind::ScalarGeq.holds(&i, 0.0));
        prop_assert_eq!(ProblemKind::StrongLeq.holds(&i, 0.0), ProblemKind::ScalarLeq.holds(&i, 0.0));
    }

    #[test]
    fn strong_implies_weak(i in interval()) {
        if ProblemKind::StrongGeq.holds(&i, 0.0) {
            prop_assert!(ProblemKind::WeakPlus.holds(&i, 0.0));
        }
        if ProblemKind::StrongLeq.holds(&i, 0.0) {
            prop_assert!(ProblemKind::WeakMinus.holds(&i, 0.0));
        }
    }

    #[test]
    fn margins_decide_predicates(i in interval(), tol in 0.0..0.1f64) {
        for k in KINDS {
            if k.is_scalar() && !i.is_degenerate() {
                continue;
            }
            prop_assert_eq!(k.holds(&i, tol), k.margin(&i) >= -tol);
        }
    }

    #[test]
    fn containing_zero_meets_both_half_lines(i in interval()) {
        if contains_zero(&i, 0.0) {
            prop_assert!(ProblemKind::WeakPlus.holds(&i, 0.0) && ProblemKind::WeakMinus.holds(&i, 0.0));
        }
    }
}
