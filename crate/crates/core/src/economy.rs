//! Exchange economies on the price simplex `Mⁿ`.
//!
//! An excess-demand correspondence `C : Mⁿ ⇉ ℝⁿ` with polytope values is
//! turned into the weak problem `F(x, y) = (−∞, σ(C(x), y)]`. A solution
//! `x₀` has `σ(C(x₀), y) ≥ 0` on `Mⁿ`, which by positive homogeneity holds
//! on all of ℝⁿ₊, and a point `z ∈ C(x₀) ∩ ℝⁿ₊` is then extracted by a
//! small linear program. Values are polytopes, so `C(x₀) − ℝⁿ₊` is closed
//! and convex without further assumptions.
//!
//! Only upper hemicontinuity regarding `D` is validated, not the classical
//! closed-graph condition; instances that fail the classical hypotheses can
//! pass here.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifunction::{Bifunction, Claims, DiagonalKind, Hypothesis, ProblemKind, Side};
use crate::dense_sets::DenseSubset;
use crate::error::{Error, Result};
use crate::geometry::lp::{LinearProgram, LpOutcome};
use crate::geometry::{hull_membership, make_grid, support_function, Grid, Point, Region, SimplexM};
use crate::interval::ExtInterval;
use crate::solver::{solve_compact, EquilibriumProblem, SolveConfig, SolveStatus};
use crate::validators::{scalar_semicontinuity, Scale, Status, ValidationVerdict, Witness};

const LP_TOL: f64 = 1e-9;

type Values = dyn Fn(&Point) -> Vec<Point> + Send + Sync;

/// `x ↦ C(x) = co(vertices)`.
#[derive(Clone)]
pub struct ExcessDemand {
    n: usize,
    label: String,
    values: Arc<Values>,
}

impl ExcessDemand {
    pub fn new<F>(label: impl Into<String>, n: usize, values: F) -> Self
    where
        F: Fn(&Point) -> Vec<Point> + Send + Sync + 'static,
    {
        Self {
            n,
            label: label.into(),
            values: Arc::new(values),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Vertices of `C(x)`; errors if empty, non-finite or of wrong dimension.
    pub fn values(&self, x: &Point) -> Result<Vec<Point>> {
        let v = (self.values)(x);
        if v.is_empty() {
            return Err(Error::Empty("excess demand value"));
        }
        for p in &v {
            if p.dim() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    got: p.dim(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(v)
    }

    pub fn simplex(&self) -> Region {
        Region::Simplex(SimplexM::new(self.n).expect("n ≥ 1"))
    }

    /// `F(x, y) = (−∞, σ(C(x), y)]` on `Mⁿ`, claiming the weak-problem
    /// hypotheses.
    pub fn bifunction(&self) -> Bifunction {
        let c = self.clone();
        let claims = Claims::new(
            &[Hypothesis::UscInX, Hypothesis::UscInY, Hypothesis::ConcaveInY],
            &[DiagonalKind::MeetsPlus],
        );
        Bifunction::interval(format!("sigma-{}", self.label), self.simplex(), claims, move |x, y| {
            ExtInterval::at_most(sigma(&c, x, y).unwrap_or(f64::MIN))
        })
    }
}

impl fmt::Debug for ExcessDemand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExcessDemand")
            .field("n", &self.n)
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// `σ(C(x), y) = sup_{z ∈ C(x)} ⟨z, y⟩`.
pub fn sigma(c: &ExcessDemand, x: &Point, y: &Point) -> Result<f64> {
    support_function(&c.values(x)?, y)
}

/// `σ(C(x), x) ≥ −tol` at every `D` member of `d_grid`.
pub fn check_walras_on_d(c: &ExcessDemand, d: &DenseSubset, d_grid: &[Point], tol: f64) -> Result<ValidationVerdict> {
    let members: Vec<&Point> = d_grid.iter().filter(|x| d.member(x)).collect();
    let scale = format!("at {} points of {}, tol {tol:e}", members.len(), d.label());
    let values: Vec<f64> = members
        .par_iter()
        .map(|x| sigma(c, x, x))
        .collect::<Result<_>>()?;
    let condition = "walras law on D";
    for (x, s) in members.iter().zip(&values) {
        if *s < -tol {
            return Ok(ValidationVerdict::new(condition, Status::Fail, scale)
                .with_detail(format!("σ(C(x), x) = {s} at x = {x}"))
                .with_witness(Witness {
                    points: vec![(*x).clone()],
                    weights: Vec::new(),
                    values: vec![ExtInterval::point(*s)],
                    violation: -s,
                }));
        }
    }
    let status = if members.is_empty() {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ValidationVerdict::new(condition, status, scale).with_detail(format!("min σ(C(x), x) = {min}")))
}

/// For each `y` in `d_grid`, `x ↦ σ(C(x), y)` upper semicontinuous over the
/// `Mⁿ` grid.
pub fn check_upper_hemi_on_d(c: &ExcessDemand, d_grid: &[Point], m_grid: &Grid, scale: &Scale) -> Result<ValidationVerdict> {
    let points = &m_grid.points;
    let hulls: Vec<Vec<Point>> = points.par_iter().map(|x| c.values(x)).collect::<Result<_>>()?;
    let centers: Vec<usize> = (0..points.len()).collect();
    let parts = d_grid
        .iter()
        .map(|y| {
            let values: Vec<f64> = hulls
                .iter()
                .map(|h| support_function(h, y))
                .collect::<Result<_>>()?;
            let condition = format!("σ(C(·), y) upper semicontinuous at y = {y}");
            Ok(scalar_semicontinuity(&condition, points, &centers, &values, Side::Upper, scale))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidationVerdict::combine("upper hemicontinuity regarding D", parts))
}

/// A point of `co(vertices)` minimizing total negativity: `min Σ sᵢ` over
/// `z ∈ co(V)`, `z + s ≥ 0`, `s ≥ 0`. Returns `(z, max slack)`.
pub fn extract_nonnegative(vertices: &[Point]) -> Option<(Point, f64)> {
    let k = vertices.len();
    let n = vertices.first()?.dim();
    // Variables: w (k), s (n), t (n) with Σ_j w_j v_j + s − t = 0.
    let nv = k + 2 * n;
    let mut lp = LinearProgram::new(nv);
    let mut row = vec![0.0; nv];
    row[..k].iter_mut().for_each(|w| *w = 1.0);
    lp.add_eq(row, 1.0);
    for i in 0..n {
        let mut row = vec![0.0; nv];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v[i];
        }
        row[k + i] = 1.0;
        row[k + n + i] = -1.0;
        lp.add_eq(row, 0.0);
    }
    for i in 0..n {
        lp.cost[k + i] = 1.0;
    }
    let LpOutcome::Optimal { x, .. } = lp.solve(LP_TOL) else {
        return None;
    };
    let z: Vec<f64> = (0..n)
        .map(|i| vertices.iter().zip(&x[..k]).map(|(v, w)| w * v[i]).sum())
        .collect();
    let max_slack = x[k..k + n].iter().copied().fold(0.0, f64::max);
    Some((Point::from_vec(z), max_slack))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgnReport {
    pub label: String,
    pub status: String,
    /// The solution, or the best candidate when none was found.
    pub x0: Point,
    /// `min_y σ(C(x₀), y)` over the `Mⁿ` grid.
    pub sigma_residual: f64,
    /// Equilibrium excess demand in `C(x₀)`.
    pub z: Option<Point>,
    /// `−max slack` of the extraction program.
    pub z_negativity: Option<f64>,
    pub walras: ValidationVerdict,
    pub hypotheses: Vec<ValidationVerdict>,
    pub note: Option<String>,
}

impl DgnReport {
    pub fn is_found(&self) -> bool {
        self.status == "Found"
    }
}

/// Solves the weak problem on the `Mⁿ` grid and extracts `z ∈ C(x₀) ∩ ℝⁿ₊`.
pub fn solve_dgn(c: &ExcessDemand, d: &DenseSubset, m_res: f64, tol: f64) -> Result<DgnReport> {
    let m = c.simplex();
    if d.parent() != &m {
        return Err(Error::Config(format!("{} is not described over the price simplex", d.label())));
    }
    let cfg = SolveConfig {
        tol,
        ..SolveConfig::with_res(m_res)
    };
    let m_grid = make_grid(&m, m_res, &cfg.tolerances)?;
    for x in &m_grid.points {
        c.values(x)?;
    }
    let walras = check_walras_on_d(c, d, &m_grid.points, tol)?;
    let p = EquilibriumProblem::new(m, d.clone(), c.bifunction(), ProblemKind::WeakPlus)?;
    let report = solve_compact(&p, &cfg)?;
    let x0 = report.status.point().clone();
    let hull = c.values(&x0)?;
    let sigma_residual = m_grid
        .points
        .iter()
        .map(|y| support_function(&hull, y))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let (z, z_negativity, note) = match &report.status {
        SolveStatus::Found { .. } => match extract_nonnegative(&hull) {
            Some((z, slack)) => {
                let note = (slack > tol + LP_TOL)
                    .then(|| format!("extracted demand has negativity {slack}; the grid is too coarse"));
                (Some(z), Some(-slack), note)
            }
            None => (None, None, Some("extraction program infeasible; the grid is too coarse".into())),
        },
        _ => (None, None, None),
    };
    if let Some(z) = &z {
        debug_assert!(hull_membership(z, &hull, 1e-9).unwrap_or(false));
    }
    Ok(DgnReport {
        label: c.label.clone(),
        status: report.status.name().to_string(),
        x0,
        sigma_residual,
        z,
        z_negativity,
        walras,
        hypotheses: report.hypotheses,
        note,
    })
}

/// Built-in economies.
pub mod library {
    use super::*;

    /// `C(x) = {Ax}`; Walras' law holds everywhere when `A` is skew.
    pub fn skew_linear(a: Vec<Vec<f64>>) -> Result<ExcessDemand> {
        let n = a.len();
        if n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: "must be square and nonempty".into(),
            });
        }
        Ok(ExcessDemand::new("skew-linear", n, move |x| vec![mat_vec(&a, x)]))
    }

    /// The rotation `[[0, 1], [−1, 0]]`.
    pub fn rotation() -> ExcessDemand {
        skew_linear(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).expect("square")
    }

    /// `C(x) = {Ax − δ(x)·x}` with `δ(x) = Σ |sin(π L xᵢ)|`, `L = lcm(1..q)`.
    ///
    /// `δ` vanishes exactly when every `L xᵢ` is an integer, so Walras' law
    /// holds on the rational grid with denominators up to `q` and fails at
    /// points off it.
    pub fn dense_walras(a: Vec<Vec<f64>>, q: u32) -> Result<ExcessDemand> {
        let base = skew_linear(a)?;
        let l = (1..=q.max(1) as u64).fold(1u64, |acc, b| acc / gcd(acc, b) * b) as f64;
        let n = base.n;
        Ok(ExcessDemand::new(format!("dense-walras(q={q})"), n, move |x| {
            let delta: f64 = x.iter().map(|c| (std::f64::consts::PI * l * c).sin().abs()).sum();
            let ax = (base.values)(x).remove(0);
            vec![ax.sub(&x.scale(delta))]
        }))
    }

    /// `C(x) = {c}`.
    pub fn constant(c: Point) -> ExcessDemand {
        constant_polytope("constant", vec![c])
    }

    pub fn constant_polytope(label: &str, vertices: Vec<Point>) -> ExcessDemand {
        let n = vertices.first().map_or(0, |v| v.dim());
        ExcessDemand::new(label, n, move |_| vertices.clone())
    }

    pub fn zero(n: usize) -> ExcessDemand {
        constant_polytope("zero", vec![Point::zeros(n)])
    }

    /// Two goods: `{0}` for `x₁ ≤ 1/2`, `co{0, (1, 1)}` beyond. Not upper
    /// hemicontinuous at `x₁ = 1/2`.
    pub fn jump() -> ExcessDemand {
        ExcessDemand::new("jump", 2, |x| {
            if x[0] <= 0.5 + 1e-12 {
                vec![Point::zeros(2)]
            } else {
                vec![Point::zeros(2), Point::from_vec(vec![1.0, 1.0])]
            }
        })
    }

    fn mat_vec(a: &[Vec<f64>], x: &Point) -> Point {
        Point::from_vec(a.iter().map(|r| r.iter().zip(x.iter()).map(|(u, v)| u * v).sum()).collect())
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;
    use crate::Tolerances;

    #[test]
    fn sigma_examples() {
        let c = library::rotation();
        assert_eq!(sigma(&c, &pt![0, 1], &pt![1, 0]).unwrap(), 1.0);
        assert_eq!(sigma(&c, &pt![0.3, 0.7], &pt![0, 0]).unwrap(), 0.0);
        let sq = library::constant_polytope("square", vec![pt![0, 0], pt![1, 0], pt![0, 1], pt![1, 1]]);
        assert_eq!(sigma(&sq, &pt![0.5, 0.5], &pt![1, 1]).unwrap(), 2.0);
        let empty = ExcessDemand::new("empty", 2, |_| Vec::new());
        assert!(sigma(&empty, &pt![1, 0], &pt![1, 0]).is_err());
    }

    #[test]
    fn walras_examples() {
        let m = Region::Simplex(SimplexM::new(2).unwrap());
        let d = DenseSubset::full(m.clone());
        let grid = make_grid(&m, 0.1, &Tolerances::default()).unwrap();
        let ok = check_walras_on_d(&library::rotation(), &d, &grid.points, 1e-9).unwrap();
        assert!(ok.is_pass());
        let neg = ExcessDemand::new("minus", 2, |x| vec![x.scale(-1.0)]);
        assert!(check_walras_on_d(&neg, &d, &grid.points, 1e-9).unwrap().is_fail());
        assert!(check_walras_on_d(&library::zero(2), &d, &grid.points, 1e-9).unwrap().is_pass());
    }

    #[test]
    fn hemicontinuity_examples() {
        let m = Region::Simplex(SimplexM::new(2).unwrap());
        let tol = Tolerances::default();
        let grid = make_grid(&m, 0.05, &tol).unwrap();
        let scale = Scale::for_grid(0.05, &tol);
        let ys = vec![pt![1, 0], pt![0.5, 0.5], pt![0, 1]];
        assert!(check_upper_hemi_on_d(&library::rotation(), &ys, &grid, &scale).unwrap().is_pass());
        assert!(check_upper_hemi_on_d(&library::jump(), &ys, &grid, &scale).unwrap().is_fail());
        let sq = library::constant_polytope("square", vec![pt![0, 0], pt![1, 1]]);
        assert!(check_upper_hemi_on_d(&sq, &ys, &grid, &scale).unwrap().is_pass());
    }

    #[test]
    fn rotation_equilibrium() {
        let c = library::rotation();
        let d = DenseSubset::full(c.simplex());
        let r = solve_dgn(&c, &d, 0.05, 1e-6).unwrap();
        assert!(r.is_found());
        assert_eq!(r.x0, pt![0, 1]);
        let z = r.z.unwrap();
        assert!(z.dist(&pt![1, 0]) < 1e-12);
        assert_eq!(r.z_negativity, Some(0.0));
        assert!(r.walras.is_pass());
    }

    #[test]
    fn negative_constant_has_no_equilibrium() {
        let c = library::constant(pt![-1, -1]);
        let d = DenseSubset::full(c.simplex());
        let r = solve_dgn(&c, &d, 0.1, 1e-6).unwrap();
        assert_eq!(r.status, "NoSolutionOnGrid");
        assert!(r.walras.is_fail());
        assert!((r.sigma_residual + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_economy_any_point() {
        let c = library::zero(3);
        let r = solve_dgn(&c, &DenseSubset::full(c.simplex()), 0.25, 1e-6).unwrap();
        assert!(r.is_found());
        assert_eq!(r.z, Some(Point::zeros(3)));
    }

    #[test]
    fn dense_walras_holds_only_on_rationals() {
        let c = library::dense_walras(vec![vec![0.0, 1.0], vec![-1.0, 0.0]], 4).unwrap();
        let d = DenseSubset::rational_grid(c.simplex(), 4).unwrap();
        let grid = make_grid(&c.simplex(), 0.05, &Tolerances::default()).unwrap();
        assert!(check_walras_on_d(&c, &d, &grid.points, 1e-9).unwrap().is_pass());
        let x = pt![std::f64::consts::FRAC_1_SQRT_2, 1.0 - std::f64::consts::FRAC_1_SQRT_2];
        assert!(sigma(&c, &x, &x).unwrap() < -1e-3);
    }

    #[test]
    fn extraction_minimizes_negativity() {
        let (z, slack) = extract_nonnegative(&[pt![-1, 2], pt![2, -1]]).unwrap();
        assert!(slack < 1e-9);
        assert!(z.iter().all(|c| *c >= -1e-9));
        let (_, slack) = extract_nonnegative(&[pt![-1, -1]]).unwrap();
        assert!((slack - 1.0).abs() < 1e-9);
    }
}
