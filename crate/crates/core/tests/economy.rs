use proptest::prelude::*;

use dense_equilibria::bifunction::ProblemKind;
use dense_equilibria::dense_sets::DenseSubset;
use dense_equilibria::economy::{library, sigma, solve_dgn, ExcessDemand};
use dense_equilibria::geometry::{make_grid, Point};
use dense_equilibria::Tolerances;

fn price(n: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(0.0..1.0f64, n).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-6).then(|| Point::new(w.into_iter().map(|v| v / s).collect()).unwrap())
    })
}

fn skew(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |v| {
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                a[i][j] = v[i * n + j];
                a[j][i] = -v[i * n + j];
            }
        }
        a
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// For a singleton `C(x) = {c}`, `σ(c, y) ≥ 0` on every simplex vertex
    /// iff `c ≥ 0` coordinatewise.
    #[test]
    fn singleton_support_matches_coordinates(c in prop::collection::vec(-2.0..2.0f64, 3), x in price(3)) {
        let e = library::constant(Point::new(c.clone()).unwrap());
        let m = make_grid(&e.simplex(), 0.25, &Tolerances::default()).unwrap();
        let all_nonneg = m.iter().all(|y| sigma(&e, &x, y).unwrap() >= 0.0);
        prop_assert_eq!(all_nonneg, c.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn walras_gives_the_diagonal(a in skew(3), x in price(3)) {
        let e = library::skew_linear(a).unwrap();
        let walras = sigma(&e, &x, &x).unwrap();
        prop_assert!(walras.abs() < 1e-12);
        let f = e.bifunction();
        prop_assert!(ProblemKind::WeakPlus.holds(&f.eval(&x, &x), 1e-12));
    }

    #[test]
    fn sigma_is_positively_homogeneous(a in skew(2), x in price(2), y in price(2), t in 0.0..5.0f64) {
        let e = library::skew_linear(a).unwrap();
        let lhs = sigma(&e, &x, &y.scale(t)).unwrap();
        prop_assert!((lhs - t * sigma(&e, &x, &y).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn zero_economy_is_solved_anywhere() {
    let e = library::zero(3);
    let r = solve_dgn(&e, &DenseSubset::full(e.simplex()), 0.25, 1e-9).unwrap();
    assert!(r.is_found());
    assert_eq!(r.z, Some(Point::zeros(3)));
}

#[test]
fn dense_walras_on_rational_prices() {
    let a = vec![vec![0.0, 1.0], vec![-1.0, 0.0]];
    let e = library::dense_walras(a, 4).unwrap();
    let on = Point::new(vec![0.25, 0.75]).unwrap();
    assert!(sigma(&e, &on, &on).unwrap().abs() < 1e-9);
    let off = Point::new(vec![0.3, 0.7]).unwrap();
    assert!(sigma(&e, &off, &off).unwrap() < -1e-3);
}

#[test]
fn custom_economy_rejects_wrong_dimension() {
    let e = ExcessDemand::new("bad", 2, |_| vec![Point::zeros(3)]);
    assert!(e.values(&Point::new(vec![0.5, 0.5]).unwrap()).is_err());
}
