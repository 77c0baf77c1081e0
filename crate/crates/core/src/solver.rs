//! Certified grid search for equilibria on compact domains.
//!
//! The solver maximizes the worst-case margin `min_{y ∈ D-grid} m(x, y)` over
//! the grid, then re-checks the winner against every grid point of `K`
//! (the extension step from `D` to `K`). A negative verdict carries, for each
//! candidate `x`, a violating `y`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifunction::{library, Bifunction, ProblemKind, Shape};
use crate::config::{ACCEPT_TOL, CERT_TOL, DEFAULT_SEED};
use crate::dense_sets::DenseSubset;
use crate::error::{Error, Result};
use crate::geometry::{make_grid, Grid, Point, Region};
use crate::kkm::{build_g_sets, check_kkm_covering, finite_intersection, KkmReport};
use crate::validators::{
    check_diagonal, check_semicontinuity_in_x, check_semicontinuity_in_y, check_shape_in_y,
    Scale, Status, ValidationVerdict,
};
use crate::{rng, Tolerances};

const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EquilibriumProblem {
    k: Region,
    d: DenseSubset,
    f: Bifunction,
    kind: ProblemKind,
}

impl EquilibriumProblem {
    /// Checks that `D ⊆ K` is described over `K` and that `F` claims the
    /// hypotheses `kind` needs.
    pub fn new(k: Region, d: DenseSubset, f: Bifunction, kind: ProblemKind) -> Result<Self> {
        if d.parent() != &k {
            return Err(Error::Config(format!(
                "subset {} is not described over the problem domain",
                d.label()
            )));
        }
        if f.domain().dim() != k.dim() {
            return Err(Error::DimensionMismatch {
                expected: k.dim(),
                got: f.domain().dim(),
            });
        }
        let missing: Vec<String> = kind
            .required()
            .iter()
            .filter(|h| !f.claims().has(**h))
            .map(|h| format!("{h:?}"))
            .chain(
                (!f.claims().has_diagonal(kind.diagonal()))
                    .then(|| format!("{:?}", kind.diagonal())),
            )
            .collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!(
                "{} does not claim {} needed by {kind:?}",
                f.label(),
                missing.join(", ")
            )));
        }
        Ok(Self { k, d, f, kind })
    }

    pub fn k(&self) -> &Region {
        &self.k
    }

    pub fn d(&self) -> &DenseSubset {
        &self.d
    }

    pub fn f(&self) -> &Bifunction {
        &self.f
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub k_res: f64,
    pub d_res: f64,
    /// Acceptance tolerance on margins.
    pub tol: f64,
    /// Tolerance for diagonal and certificate checks.
    pub cert_tol: f64,
    pub seed: u64,
    /// Extra `D`-sampler points added to the `D`-grid (unused for `D = K`).
    pub d_samples: usize,
    /// Tuples per convexity check.
    pub trials: usize,
    pub validate: bool,
    pub tolerances: Tolerances,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            k_res: 0.25,
            d_res: 0.25,
            tol: ACCEPT_TOL,
            cert_tol: CERT_TOL,
            seed: DEFAULT_SEED,
            d_samples: 64,
            trials: 200,
            validate: true,
            tolerances: Tolerances::default(),
        }
    }
}

impl SolveConfig {
    pub fn with_res(res: f64) -> Self {
        Self {
            k_res: res,
            d_res: res,
            ..Self::default()
        }
    }
}

/// The `K`-grid, augmented by `D`-grid and `D`-sampler points.
#[derive(Debug, Clone)]
pub struct ProblemGrids {
    pub k_grid: Grid,
    /// Lexicographically sorted union of `K`-grid and `D` points.
    pub all: Grid,
    /// Indices into `all` of the `D` points.
    pub d_idx: Vec<usize>,
    /// Indices into `k_grid` of points outside `D`.
    pub outside_d: Vec<usize>,
}

impl ProblemGrids {
    pub fn d_points(&self) -> Vec<Point> {
        self.d_idx.iter().map(|&i| self.all.points[i].clone()).collect()
    }
}

pub fn build_grids(p: &EquilibriumProblem, cfg: &SolveConfig) -> Result<ProblemGrids> {
    let k_grid = make_grid(&p.k, cfg.k_res, &cfg.tolerances)?;
    let mut d_cands: Vec<Point> = if p.d.is_full() {
        k_grid.points.clone()
    } else {
        let base = if cfg.d_res == cfg.k_res {
            k_grid.points.clone()
        } else {
            make_grid(&p.k, cfg.d_res, &cfg.tolerances)?.points
        };
        let mut v: Vec<Point> = base.into_iter().filter(|x| p.d.member(x)).collect();
        let mut r = rng(cfg.seed);
        for _ in 0..cfg.d_samples {
            v.push(p.d.sample(&mut r)?);
        }
        v
    };
    if d_cands.is_empty() {
        return Err(Error::Empty("D-grid"));
    }
    d_cands.sort_by(|a, b| a.lex_cmp(b));
    d_cands.dedup_by(|a, b| a.dist_inf(b) <= SNAP_TOL);

    let extras: Vec<Point> = d_cands
        .iter()
        .filter(|x| k_grid.find(x, SNAP_TOL).is_none())
        .cloned()
        .collect();
    let mut points = k_grid.points.clone();
    points.extend(extras);
    points.sort_by(|a, b| a.lex_cmp(b));
    let all = Grid {
        points,
        resolution: cfg.k_res,
        source: format!("{} plus D points", k_grid.source),
    };
    let mut d_idx: Vec<usize> = d_cands
        .iter()
        .map(|x| all.find(x, SNAP_TOL).expect("D point was merged"))
        .collect();
    d_idx.sort_unstable();
    d_idx.dedup();
    let outside_d = (0..k_grid.len())
        .filter(|&i| !p.d.member(&k_grid.points[i]))
        .collect();
    Ok(ProblemGrids {
        k_grid,
        all,
        d_idx,
        outside_d,
    })
}

fn pick_evenly<T: Copy>(items: &[T], m: usize) -> Vec<T> {
    if items.len() <= m {
        return items.to_vec();
    }
    (0..m)
        .map(|i| items[i * (items.len() - 1) / (m - 1).max(1)])
        .collect()
}

/// Runs the four hypothesis validators `kind` needs. Never blocks solving.
pub fn validate_hypotheses(
    p: &EquilibriumProblem,
    cfg: &SolveConfig,
    grids: &ProblemGrids,
) -> Vec<ValidationVerdict> {
    let scale = Scale::for_grid(cfg.k_res, &cfg.tolerances);
    let side = p.kind.semicontinuity();
    let scalar = p.kind.is_scalar();
    let all = &grids.all.points;
    let side_name = match side {
        crate::bifunction::Side::Lower => "lower",
        crate::bifunction::Side::Upper => "upper",
    };

    let in_x: Vec<ValidationVerdict> = pick_evenly(&grids.d_idx, 6)
        .into_iter()
        .map(|j| check_semicontinuity_in_x(&p.f, &all[j], &grids.k_grid, side, scalar, &scale))
        .collect();
    let in_x = ValidationVerdict::combine(
        &format!("{side_name} semicontinuous in x on K, for y in D"),
        in_x,
    );

    let in_y_name = format!("{side_name} semicontinuous in y on K\\D, for x in K");
    let in_y = if grids.outside_d.is_empty() {
        ValidationVerdict::new(in_y_name, Status::Pass, scale.label())
            .with_detail("vacuous: every K-grid point is in D")
    } else {
        let xs: Vec<usize> = (0..grids.k_grid.len()).collect();
        let parts = pick_evenly(&xs, 6)
            .into_iter()
            .map(|i| {
                check_semicontinuity_in_y(
                    &p.f,
                    &grids.k_grid.points[i],
                    &grids.k_grid,
                    &grids.outside_d,
                    side,
                    scalar,
                    &scale,
                )
            })
            .collect();
        let v = ValidationVerdict::combine(&in_y_name, parts);
        let detail = format!(
            "{}; checked only at the {} K-grid points outside D",
            v.detail,
            grids.outside_d.len()
        );
        v.with_detail(detail)
    };

    let shape = p.kind.shape();
    let shape_name = match shape {
        Shape::Convex => "convex",
        Shape::Concave => "concave",
    };
    let xs = pick_evenly(&grids.d_idx, 4);
    let parts: Vec<ValidationVerdict> = xs
        .iter()
        .enumerate()
        .map(|(i, &j)| check_shape_in_y(&p.f, &all[j], &p.d, shape, cfg.trials, cfg.seed + i as u64))
        .collect();
    let shape_cond = format!("{shape_name} in y on D, for x in D");
    let mut shape_v = ValidationVerdict::combine(&shape_cond, parts);
    if shape_v.status == Status::Inconclusive {
        // Convexity on K implies convexity on any subset D.
        let full = DenseSubset::full(p.k.clone());
        let parts = xs
            .iter()
            .enumerate()
            .map(|(i, &j)| check_shape_in_y(&p.f, &all[j], &full, shape, cfg.trials, cfg.seed + i as u64))
            .collect();
        let on_k = ValidationVerdict::combine(&shape_cond, parts);
        shape_v = match on_k.status {
            Status::Pass => ValidationVerdict::new(&shape_cond, Status::Pass, on_k.scale)
                .with_detail("no sampled combination landed in D; pass via K ⊇ D"),
            _ => on_k.with_detail("no sampled combination landed in D; checked on K instead"),
        };
    }

    let diag = check_diagonal(&p.f, &grids.d_points(), p.kind.diagonal(), cfg.cert_tol)
        .renamed(format!("{} for x in D", p.kind.diagonal().name()));

    vec![in_x, in_y, shape_v, diag]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub x: Point,
    pub y: Point,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum SolveStatus {
    Found {
        x0: Point,
        /// Minimum margin of `x0` over every grid point of `K`.
        residual: f64,
        /// Minimum margin of `x0` over the `D`-grid.
        d_margin: f64,
    },
    NoSolutionOnGrid {
        /// Best-effort candidate (maximal `D`-margin).
        best: Point,
        residual: f64,
        /// A single `y` minimizing `max_x m(x, y)`, when it violates for every `x`.
        universal_witness: Option<Point>,
        witness_map: Vec<WitnessEntry>,
    },
    ExtensionFailed {
        x0: Point,
        d_margin: f64,
        /// The grid point of `K` where the conclusion fails.
        y: Point,
        residual: f64,
    },
}

impl SolveStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SolveStatus::Found { .. } => "Found",
            SolveStatus::NoSolutionOnGrid { .. } => "NoSolutionOnGrid",
            SolveStatus::ExtensionFailed { .. } => "ExtensionFailed",
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SolveStatus::Found { .. })
    }

    pub fn point(&self) -> &Point {
        match self {
            SolveStatus::Found { x0, .. } | SolveStatus::ExtensionFailed { x0, .. } => x0,
            SolveStatus::NoSolutionOnGrid { best, .. } => best,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            SolveStatus::Found { residual, .. }
            | SolveStatus::NoSolutionOnGrid { residual, .. }
            | SolveStatus::ExtensionFailed { residual, .. } => *residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub k_res: f64,
    pub d_res: f64,
    pub k_points: usize,
    pub d_points: usize,
    pub total_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub label: String,
    pub kind: ProblemKind,
    pub status: SolveStatus,
    pub hypotheses: Vec<ValidationVerdict>,
    pub grids: GridSummary,
    pub extension_checked: bool,
}

impl SolveReport {
    pub fn hypotheses_pass(&self) -> bool {
        self.hypotheses.iter().all(|v| v.is_pass())
    }
}

/// `min_{y ∈ ys} m(x, y)` and the first minimizing index.
fn min_margin(p: &EquilibriumProblem, x: &Point, all: &[Point], ys: impl Iterator<Item = usize>) -> (f64, usize) {
    let mut best = (f64::INFINITY, usize::MAX);
    for j in ys {
        let m = p.f.margin(p.kind, x, &all[j]);
        if m < best.0 || best.1 == usize::MAX {
            best = (m, j);
        }
    }
    best
}

pub fn solve_compact(p: &EquilibriumProblem, cfg: &SolveConfig) -> Result<SolveReport> {
    let grids = build_grids(p, cfg)?;
    solve_on_grids(p, cfg, &grids)
}

pub fn solve_on_grids(p: &EquilibriumProblem, cfg: &SolveConfig, grids: &ProblemGrids) -> Result<SolveReport> {
    let hypotheses = if cfg.validate {
        validate_hypotheses(p, cfg, grids)
    } else {
        Vec::new()
    };
    let all = &grids.all.points;
    let margins: Vec<(f64, usize)> = all
        .par_iter()
        .map(|x| min_margin(p, x, all, grids.d_idx.iter().copied()))
        .collect();
    // Lexicographic tie-break: points are sorted, keep the first maximum.
    let mut x0 = 0;
    for (i, m) in margins.iter().enumerate() {
        if m.0 > margins[x0].0 {
            x0 = i;
        }
    }
    let d_margin = margins[x0].0;
    let summary = GridSummary {
        k_res: cfg.k_res,
        d_res: cfg.d_res,
        k_points: grids.k_grid.len(),
        d_points: grids.d_idx.len(),
        total_points: all.len(),
    };
    let (status, extension_checked) = if d_margin >= -cfg.tol {
        let (residual, y) = min_margin(p, &all[x0], all, 0..all.len());
        let status = if residual >= -cfg.tol {
            SolveStatus::Found {
                x0: all[x0].clone(),
                residual,
                d_margin,
            }
        } else {
            SolveStatus::ExtensionFailed {
                x0: all[x0].clone(),
                d_margin,
                y: all[y].clone(),
                residual,
            }
        };
        (status, true)
    } else {
        (no_solution(p, cfg, all, &margins, x0), false)
    };
    Ok(SolveReport {
        label: p.f.label().to_string(),
        kind: p.kind,
        status,
        hypotheses,
        grids: summary,
        extension_checked,
    })
}

fn no_solution(
    p: &EquilibriumProblem,
    cfg: &SolveConfig,
    all: &[Point],
    d_margins: &[(f64, usize)],
    best: usize,
) -> SolveStatus {
    // Column maxima of the full margin matrix: y minimizing max_x m(x, y).
    let col_max: Vec<f64> = all
        .par_iter()
        .map(|y| {
            all.iter()
                .map(|x| p.f.margin(p.kind, x, y))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let mut ystar = 0;
    for (j, m) in col_max.iter().enumerate() {
        if *m < col_max[ystar] {
            ystar = j;
        }
    }
    let universal = (col_max[ystar] < -cfg.tol).then_some(ystar);
    let witness_map = all
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let (y, margin) = match universal {
                Some(j) => (j, p.f.margin(p.kind, x, &all[j])),
                None => {
                    let (m, j) = min_margin(p, x, all, 0..all.len());
                    let (dm, dj) = d_margins[i];
                    if dm < m { (dj, dm) } else { (j, m) }
                }
            };
            WitnessEntry {
                x: x.clone(),
                y: all[y].clone(),
                margin,
            }
        })
        .collect();
    SolveStatus::NoSolutionOnGrid {
        best: all[best].clone(),
        residual: d_margins[best].0,
        universal_witness: universal.map(|j| all[j].clone()),
        witness_map,
    }
}

/// G-sets over the augmented grid anchored at the `D` points, a covering
/// check and the finite intersection.
pub fn kkm_certificate(p: &EquilibriumProblem, cfg: &SolveConfig, samples: usize) -> Result<(ProblemGrids, KkmReport)> {
    let grids = build_grids(p, cfg)?;
    let d_points = grids.d_points();
    let g = build_g_sets(&p.f, p.kind, &grids.all.points, &d_points, cfg.tol);
    let covering = check_kkm_covering(&g, &p.f, p.kind, &grids.all.points, &p.d, samples, cfg.seed, cfg.tol);
    let intersection = finite_intersection(&g, &p.f, p.kind, &grids.all.points);
    Ok((grids, KkmReport::new(covering, intersection)))
}

/// The three instances built on `⟨x, y⟩ − 1` over the unit `n`-ball with `D`
/// the unit sphere: `[φ, +∞)` strong, `(−∞, φ]` weak, and `φ` scalar.
pub fn counterexample_problems(n: usize) -> Result<Vec<EquilibriumProblem>> {
    let ball: Region = crate::geometry::Ball::unit(n).into();
    let d = DenseSubset::sphere_in_ball(n);
    Ok(vec![
        EquilibriumProblem::new(ball.clone(), d.clone(), library::inner_upper(n), ProblemKind::StrongGeq)?,
        EquilibriumProblem::new(ball.clone(), d.clone(), library::inner_lower(n), ProblemKind::WeakPlus)?,
        EquilibriumProblem::new(ball, d, library::inner_scalar(n), ProblemKind::ScalarGeq)?,
    ])
}

pub fn counterexample_suite(n: usize, res: f64) -> Result<Vec<SolveReport>> {
    let cfg = SolveConfig::with_res(res);
    counterexample_problems(n)?
        .iter()
        .map(|p| solve_compact(p, &cfg))
        .collect()
}
