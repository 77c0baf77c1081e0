//! Sampling validators for the structural hypotheses: set-valued convexity
//! and concavity in `y`, semicontinuity in `x` and `y`, and diagonal
//! conditions.
//!
//! For interval values, set-valued lower semicontinuity reduces to `lo` upper
//! and `hi` lower semicontinuous; upper semicontinuity to the mirror image.
//! Grid comparisons use a Lipschitz slack `tol + L·‖Δ‖`, so every verdict is
//! "at scale" and labeled with the grid, `L` and `tol` it used.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifunction::{Bifunction, DiagonalKind, Shape, Side};
use crate::dense_sets::DenseSubset;
use crate::error::Result;
use crate::geometry::{convex_combination, Grid, Point};
use crate::interval::{minkowski_combination, ExtInterval};
use crate::{rng, Rng, Tolerances};

const TUPLE_BUDGET: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub points: Vec<Point>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub weights: Vec<f64>,
    pub values: Vec<ExtInterval>,
    /// Amount by which the inequality is violated (positive).
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationVerdict {
    pub condition: String,
    pub status: Status,
    pub scale: String,
    pub detail: String,
    pub witness: Option<Witness>,
}

impl ValidationVerdict {
    pub fn new(condition: impl Into<String>, status: Status, scale: impl Into<String>) -> Self {
        Self {
            condition: condition.into(),
            status,
            scale: scale.into(),
            detail: String::new(),
            witness: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn renamed(mut self, condition: impl Into<String>) -> Self {
        self.condition = condition.into();
        self
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    /// Folds several verdicts for the same condition: the first failure wins,
    /// then any pass, else inconclusive.
    pub fn combine(condition: &str, parts: Vec<ValidationVerdict>) -> ValidationVerdict {
        let scale = parts.first().map(|v| v.scale.clone()).unwrap_or_default();
        if let Some(f) = parts.iter().find(|v| v.is_fail()) {
            return f.clone().renamed(condition);
        }
        let passes = parts.iter().filter(|v| v.is_pass()).count();
        let status = if passes > 0 {
            Status::Pass
        } else {
            Status::Inconclusive
        };
        ValidationVerdict::new(condition, status, scale)
            .with_detail(format!("{passes}/{} sub-checks passed", parts.len()))
    }
}

/// Outcome of comparing `Σλᵢ F(yᵢ)` with `F(Σλᵢyᵢ)` in both forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvexityForms {
    /// Minkowski inclusion (`⊆` for convex, `⊇` for concave).
    pub inclusion: bool,
    /// Endpoint form: `lo` convex and `hi` concave (reversed for concave).
    pub endpoint: bool,
}

/// Evaluates both forms of set-valued convexity (or concavity) on one tuple.
/// `values[i] = F(yᵢ)`, `at = F(Σλᵢyᵢ)`.
pub fn convexity_forms(
    values: &[ExtInterval],
    weights: &[f64],
    at: &ExtInterval,
    shape: Shape,
    tol: f64,
) -> Result<ConvexityForms> {
    let comb = minkowski_combination(values, weights)?;
    let (mut lo_sum, mut hi_sum) = (0.0, 0.0);
    for (v, &w) in values.iter().zip(weights) {
        if w > 0.0 {
            lo_sum += w * v.lo();
            hi_sum += w * v.hi();
        }
    }
    Ok(match shape {
        Shape::Convex => ConvexityForms {
            inclusion: comb.is_subset_of(at, tol),
            endpoint: at.lo() <= lo_sum + tol && hi_sum <= at.hi() + tol,
        },
        Shape::Concave => ConvexityForms {
            inclusion: at.is_subset_of(&comb, tol),
            endpoint: lo_sum <= at.lo() + tol && at.hi() <= hi_sum + tol,
        },
    })
}

/// Scalar convexity `φ(Σλy) ≤ Σλφ(y)` (reversed for concave).
pub fn scalar_shape_holds(values: &[f64], weights: &[f64], at: f64, shape: Shape, tol: f64) -> bool {
    let sum: f64 = values
        .iter()
        .zip(weights)
        .filter(|(_, w)| **w > 0.0)
        .map(|(v, w)| v * w)
        .sum();
    match shape {
        Shape::Convex => at <= sum + tol,
        Shape::Concave => sum <= at + tol,
    }
}

/// Draws `k` members of `D` and small-denominator weights whose combination
/// is again a member. `None` after the resampling budget.
pub fn sample_tuple(d: &DenseSubset, k: usize, rng: &mut Rng) -> Option<(Vec<Point>, Vec<f64>, Point)> {
    for _ in 0..TUPLE_BUDGET {
        let ys: Vec<Point> = (0..k).map(|_| d.sample(rng)).collect::<Result<_>>().ok()?;
        let a: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
        let total: u32 = a.iter().sum();
        let w: Vec<f64> = a.iter().map(|&ai| ai as f64 / total as f64).collect();
        let c = convex_combination(&ys, &w).ok()?;
        if d.member(&c) {
            return Some((ys, w, c));
        }
    }
    None
}

fn shape_name(shape: Shape) -> &'static str {
    match shape {
        Shape::Convex => "convex",
        Shape::Concave => "concave",
    }
}

/// `y ↦ F(x, y)` is convex (or concave) on `D`, sampled on `trials` tuples
/// with `k ∈ {2, 3}`. Scalar bifunctions are tested as real functions.
pub fn check_shape_in_y(
    f: &Bifunction,
    x: &Point,
    d: &DenseSubset,
    shape: Shape,
    trials: usize,
    seed: u64,
) -> ValidationVerdict {
    const TOL: f64 = 1e-9;
    let condition = format!("{} in y on D", shape_name(shape));
    let scale = format!("at scale ({trials} tuples, tol {TOL:e}, seed {seed})");
    let mut r = rng(seed);
    let mut feasible = 0;
    let mut disagreements = 0;
    let mut failure: Option<Witness> = None;
    for t in 0..trials.max(1) {
        let k = 2 + t % 2;
        let Some((ys, w, c)) = sample_tuple(d, k, &mut r) else {
            continue;
        };
        feasible += 1;
        let vals: Vec<ExtInterval> = ys.iter().map(|y| f.eval(x, y)).collect();
        let at = f.eval(x, &c);
        let ok = if f.is_scalar() {
            let v: Vec<f64> = vals.iter().map(|i| i.lo()).collect();
            scalar_shape_holds(&v, &w, at.lo(), shape, TOL)
        } else {
            let forms = convexity_forms(&vals, &w, &at, shape, TOL)
                .expect("sampled weights are feasible");
            if forms.inclusion != forms.endpoint {
                disagreements += 1;
            }
            forms.inclusion
        };
        if !ok && failure.is_none() {
            let comb = minkowski_combination(&vals, &w).expect("feasible weights");
            // f64::max drops the NaN of an ∞ − ∞ term.
            let violation = match shape {
                Shape::Convex => (at.lo() - comb.lo()).max(comb.hi() - at.hi()),
                Shape::Concave => (comb.lo() - at.lo()).max(at.hi() - comb.hi()),
            };
            let mut points = ys.clone();
            points.push(c.clone());
            let mut values = vals.clone();
            values.push(at);
            failure = Some(Witness {
                points,
                weights: w.clone(),
                values,
                violation,
            });
        }
    }
    let detail = format!("{feasible}/{} feasible tuples, {disagreements} form disagreements", trials.max(1));
    match (failure, feasible) {
        (Some(w), _) => ValidationVerdict::new(condition, Status::Fail, scale)
            .with_detail(detail)
            .with_witness(w),
        (None, 0) => ValidationVerdict::new(condition, Status::Inconclusive, scale)
            .with_detail(format!("{detail}; no sampled combination landed in D")),
        (None, _) => ValidationVerdict::new(condition, Status::Pass, scale).with_detail(detail),
    }
}

pub fn check_convex_in_y(
    f: &Bifunction,
    x: &Point,
    d: &DenseSubset,
    trials: usize,
    seed: u64,
) -> ValidationVerdict {
    check_shape_in_y(f, x, d, Shape::Convex, trials, seed)
}

pub fn check_concave_in_y(
    f: &Bifunction,
    x: &Point,
    d: &DenseSubset,
    trials: usize,
    seed: u64,
) -> ValidationVerdict {
    check_shape_in_y(f, x, d, Shape::Concave, trials, seed)
}

/// Neighborhood radius, tolerance and Lipschitz modulus for grid
/// semicontinuity checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub resolution: f64,
    pub radius: f64,
    pub tol: f64,
    pub lipschitz: f64,
}

impl Scale {
    /// Radius `2·resolution`; `tol` and `L` from the tolerances.
    pub fn for_grid(resolution: f64, tol: &Tolerances) -> Self {
        Self {
            resolution,
            radius: 2.0 * resolution,
            tol: tol.membership,
            lipschitz: tol.lipschitz,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "at scale (grid {}, radius {}, L {}, tol {:e})",
            self.resolution, self.radius, self.lipschitz, self.tol
        )
    }
}

/// Worst `(center, neighbor, violation)` over neighbor pairs within the
/// radius; ties go to the smallest index pair.
fn worst_pair<V>(points: &[Point], centers: &[usize], radius: f64, violation: V) -> Option<(usize, usize, f64)>
where
    V: Fn(usize, usize, f64) -> Option<f64> + Sync,
{
    let per_center: Vec<Option<(usize, usize, f64)>> = centers
        .par_iter()
        .map(|&i| {
            let mut best: Option<(usize, usize, f64)> = None;
            for (j, q) in points.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = points[i].dist(q);
                if d > radius {
                    continue;
                }
                if let Some(v) = violation(i, j, d) {
                    if best.is_none_or(|b| v > b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
            best
        })
        .collect();
    per_center
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(usize, usize, f64)>, c| match acc {
            Some(a) if a.2 >= c.2 => Some(a),
            _ => Some(c),
        })
}

fn has_neighbors(points: &[Point], centers: &[usize], radius: f64) -> bool {
    centers.iter().any(|&i| {
        points
            .iter()
            .enumerate()
            .any(|(j, q)| j != i && points[i].dist(q) <= radius)
    })
}

/// Interval semicontinuity at the `centers` of `points`, reading `values[i]`.
pub fn interval_semicontinuity(
    condition: &str,
    points: &[Point],
    centers: &[usize],
    values: &[ExtInterval],
    side: Side,
    scale: &Scale,
) -> ValidationVerdict {
    let viol = |i: usize, j: usize, d: f64| -> Option<f64> {
        let slack = scale.tol + scale.lipschitz * d;
        let (a, b) = (values[i], values[j]);
        let mut worst: Option<f64> = None;
        let mut note = |v: f64| worst = Some(worst.map_or(v, |w: f64| w.max(v)));
        match side {
            Side::Lower => {
                if !(b.lo() <= a.lo() + slack) {
                    note(b.lo() - (a.lo() + slack));
                }
                if !(b.hi() >= a.hi() - slack) {
                    note((a.hi() - slack) - b.hi());
                }
            }
            Side::Upper => {
                if !(b.lo() >= a.lo() - slack) {
                    note((a.lo() - slack) - b.lo());
                }
                if !(b.hi() <= a.hi() + slack) {
                    note(b.hi() - (a.hi() + slack));
                }
            }
        }
        worst
    };
    finish_semicontinuity(condition, points, centers, scale, worst_pair(points, centers, scale.radius, viol), |i| values[i])
}

/// Real-function semicontinuity at the `centers` of `points`.
pub fn scalar_semicontinuity(
    condition: &str,
    points: &[Point],
    centers: &[usize],
    values: &[f64],
    side: Side,
    scale: &Scale,
) -> ValidationVerdict {
    let viol = |i: usize, j: usize, d: f64| -> Option<f64> {
        let slack = scale.tol + scale.lipschitz * d;
        let (a, b) = (values[i], values[j]);
        match side {
            Side::Lower => (b < a - slack).then_some((a - slack) - b),
            Side::Upper => (b > a + slack).then_some(b - (a + slack)),
        }
    };
    finish_semicontinuity(condition, points, centers, scale, worst_pair(points, centers, scale.radius, viol), |i| {
        ExtInterval::point(values[i])
    })
}

fn finish_semicontinuity(
    condition: &str,
    points: &[Point],
    centers: &[usize],
    scale: &Scale,
    worst: Option<(usize, usize, f64)>,
    value: impl Fn(usize) -> ExtInterval,
) -> ValidationVerdict {
    if let Some((i, j, v)) = worst {
        return ValidationVerdict::new(condition, Status::Fail, scale.label())
            .with_detail(format!("worst pair {} -> {}", points[i], points[j]))
            .with_witness(Witness {
                points: vec![points[i].clone(), points[j].clone()],
                weights: Vec::new(),
                values: vec![value(i), value(j)],
                violation: v,
            });
    }
    if centers.is_empty() {
        return ValidationVerdict::new(condition, Status::Pass, scale.label())
            .with_detail("vacuous: no points to check");
    }
    if !has_neighbors(points, centers, scale.radius) {
        return ValidationVerdict::new(condition, Status::Inconclusive, scale.label())
            .with_detail("no grid neighbors within the radius");
    }
    ValidationVerdict::new(condition, Status::Pass, scale.label())
        .with_detail(format!("{} centers checked", centers.len()))
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Lower => "lsc",
        Side::Upper => "usc",
    }
}

/// `x ↦ F(x, y)` semicontinuous on the grid. With `scalar = true` the
/// values are read as a real function (`lo`).
pub fn check_semicontinuity_in_x(
    f: &Bifunction,
    y: &Point,
    grid: &Grid,
    side: Side,
    scalar: bool,
    scale: &Scale,
) -> ValidationVerdict {
    let points = &grid.points;
    let values: Vec<ExtInterval> = points.par_iter().map(|x| f.eval(x, y)).collect();
    let centers: Vec<usize> = (0..points.len()).collect();
    let condition = format!("{} in x at y = {y}", side_name(side));
    if scalar {
        let v: Vec<f64> = values.iter().map(|i| i.lo()).collect();
        scalar_semicontinuity(&condition, points, &centers, &v, side, scale)
    } else {
        interval_semicontinuity(&condition, points, &centers, &values, side, scale)
    }
}

pub fn check_lsc_in_x(f: &Bifunction, y: &Point, k_grid: &Grid, scale: &Scale) -> ValidationVerdict {
    check_semicontinuity_in_x(f, y, k_grid, Side::Lower, false, scale)
}

pub fn check_usc_in_x(f: &Bifunction, y: &Point, k_grid: &Grid, scale: &Scale) -> ValidationVerdict {
    check_semicontinuity_in_x(f, y, k_grid, Side::Upper, false, scale)
}

/// `y ↦ F(x, y)` semicontinuous at the grid points listed in `at`
/// (typically the `K∖D` points), compared against all grid neighbors.
pub fn check_semicontinuity_in_y(
    f: &Bifunction,
    x: &Point,
    grid: &Grid,
    at: &[usize],
    side: Side,
    scalar: bool,
    scale: &Scale,
) -> ValidationVerdict {
    let points = &grid.points;
    let values: Vec<ExtInterval> = points.par_iter().map(|y| f.eval(x, y)).collect();
    let condition = format!("{} in y on K\\D at x = {x}", side_name(side));
    if scalar {
        let v: Vec<f64> = values.iter().map(|i| i.lo()).collect();
        scalar_semicontinuity(&condition, points, at, &v, side, scale)
    } else {
        interval_semicontinuity(&condition, points, at, &values, side, scale)
    }
}

/// `F(x, x)` satisfies the diagonal predicate at every point.
pub fn check_diagonal(f: &Bifunction, d_points: &[Point], kind: DiagonalKind, tol: f64) -> ValidationVerdict {
    let condition = kind.name();
    let scale = format!("at {} points, tol {tol:e}", d_points.len());
    let values: Vec<ExtInterval> = d_points.par_iter().map(|x| f.eval(x, x)).collect();
    for (x, v) in d_points.iter().zip(&values) {
        if !kind.holds(v, tol) {
            let violation = match kind {
                DiagonalKind::GeqZero => -v.lo(),
                DiagonalKind::LeqZero => v.hi(),
                DiagonalKind::MeetsPlus => -v.hi(),
                DiagonalKind::MeetsMinus => v.lo(),
                DiagonalKind::ContainsZero => v.lo().max(-v.hi()),
            };
            return ValidationVerdict::new(condition, Status::Fail, scale)
                .with_detail(format!("F({x}, {x}) = {v}"))
                .with_witness(Witness {
                    points: vec![x.clone()],
                    weights: Vec::new(),
                    values: vec![*v],
                    violation,
                });
        }
    }
    ValidationVerdict::new(condition, Status::Pass, scale)
}
