//! n-person games in normal form and the Nikaido-Isoda function
//!
//! `φ(x, y) = Σᵢ (fⁱ(xⁱ, x̂ⁱ) − fⁱ(yⁱ, x̂ⁱ))`.
//!
//! `x₀` is a non-cooperative equilibrium iff `φ(x₀, y) ≤ 0` for all `y`, so
//! Nash equilibria are the solutions of the scalar `≤` problem for `φ`.
//! `V(x) = max_y φ(x, y)` splits into per-player best-response gaps, which
//! is how it is evaluated over product grids.
//!
//! Finite games enter as loss tensors and are played in mixed strategies on
//! simplices. Continuous games take any loss evaluator over boxes.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifunction::{Bifunction, Claims, DiagonalKind, ProblemKind, Shape, Side};
use crate::dense_sets::DenseSubset;
use crate::error::{Error, Result};
use crate::geometry::{make_grid, Grid, Point, Polytope, Region, SimplexM};
use crate::solver::{validate_hypotheses, EquilibriumProblem, SolveConfig};
use crate::validators::{sample_tuple, scalar_semicontinuity, scalar_shape_holds, Scale, Status, ValidationVerdict, Witness};
use crate::interval::ExtInterval;
use crate::{rng, Tolerances};

const MEMBER_TOL: f64 = 1e-9;
const ANCHORS: usize = 4;

/// One strategy per player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multistrategy {
    pub blocks: Vec<Point>,
}

impl Multistrategy {
    pub fn new(blocks: Vec<Point>) -> Self {
        Self { blocks }
    }

    pub fn players(&self) -> usize {
        self.blocks.len()
    }

    /// `(yⁱ, x̂ⁱ)`: this profile with player `i`'s block replaced.
    pub fn replace(&self, i: usize, yi: &Point) -> Multistrategy {
        let mut blocks = self.blocks.clone();
        blocks[i] = yi.clone();
        Self { blocks }
    }

    /// `x̂ⁱ`, the blocks of every other player.
    pub fn others(&self, i: usize) -> Vec<Point> {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, b)| b.clone())
            .collect()
    }

    /// Reassembles a profile from `yⁱ` and `x̂ⁱ`.
    pub fn splice(i: usize, yi: &Point, others: &[Point]) -> Multistrategy {
        let mut blocks = others.to_vec();
        blocks.insert(i, yi.clone());
        Self { blocks }
    }

    pub fn flatten(&self) -> Point {
        Point::from_vec(self.blocks.iter().flat_map(|b| b.iter().copied()).collect())
    }
}

impl fmt::Display for Multistrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "]")
    }
}

type Loss = dyn Fn(usize, &Multistrategy) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct NPersonGame {
    label: String,
    sets: Vec<Region>,
    dense: Vec<DenseSubset>,
    loss: Arc<Loss>,
}

impl NPersonGame {
    /// `loss(i, x)` is `fⁱ(x)`; it must be finite on `E`.
    pub fn new<F>(label: impl Into<String>, sets: Vec<Region>, dense: Vec<DenseSubset>, loss: F) -> Result<Self>
    where
        F: Fn(usize, &Multistrategy) -> f64 + Send + Sync + 'static,
    {
        if sets.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "players",
                reason: format!("need at least two players, got {}", sets.len()),
            });
        }
        if dense.len() != sets.len() {
            return Err(Error::DimensionMismatch {
                expected: sets.len(),
                got: dense.len(),
            });
        }
        if let Some(i) = (0..sets.len()).find(|&i| dense[i].parent() != &sets[i]) {
            return Err(Error::Config(format!("subset of player {i} is not described over its strategy set")));
        }
        Ok(Self {
            label: label.into(),
            sets,
            dense,
            loss: Arc::new(loss),
        })
    }

    /// Mixed extension of a finite game. `losses[i]` lists player `i`'s loss
    /// at every pure profile in row-major order (player 0 slowest).
    pub fn finite(label: impl Into<String>, actions: Vec<usize>, losses: Vec<Vec<f64>>) -> Result<Self> {
        let profiles: usize = actions.iter().product();
        if losses.len() != actions.len() || losses.iter().any(|l| l.len() != profiles) {
            return Err(Error::InvalidParameter {
                name: "losses",
                reason: format!("need {} tables of {profiles} entries", actions.len()),
            });
        }
        if losses.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let sets: Vec<Region> = actions
            .iter()
            .map(|&a| SimplexM::new(a).map(Region::Simplex))
            .collect::<Result<_>>()?;
        let dense = sets.iter().cloned().map(DenseSubset::full).collect();
        let acts = actions.clone();
        Self::new(label, sets, dense, move |i, x| expected_loss(&acts, &losses[i], x))
    }

    /// Continuous game on boxes `∏ [loᵢ, hiᵢ]`.
    pub fn on_boxes<F>(label: impl Into<String>, boxes: Vec<(Vec<f64>, Vec<f64>)>, loss: F) -> Result<Self>
    where
        F: Fn(usize, &Multistrategy) -> f64 + Send + Sync + 'static,
    {
        let sets: Vec<Region> = boxes
            .iter()
            .map(|(lo, hi)| Polytope::boxed(lo, hi).map(Region::Polytope))
            .collect::<Result<_>>()?;
        let dense = sets.iter().cloned().map(DenseSubset::full).collect();
        Self::new(label, sets, dense, loss)
    }

    pub fn with_dense(mut self, dense: Vec<DenseSubset>) -> Result<Self> {
        let loss = self.loss.clone();
        self = Self::new(self.label, self.sets, dense, move |i, x| loss(i, x))?;
        Ok(self)
    }

    /// Same game with every loss multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let loss = self.loss.clone();
        Self {
            label: format!("{}*{factor}", self.label),
            sets: self.sets.clone(),
            dense: self.dense.clone(),
            loss: Arc::new(move |i, x| factor * loss(i, x)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn players(&self) -> usize {
        self.sets.len()
    }

    pub fn strategy_sets(&self) -> &[Region] {
        &self.sets
    }

    pub fn dense_subsets(&self) -> &[DenseSubset] {
        &self.dense
    }

    pub fn loss(&self, i: usize, x: &Multistrategy) -> f64 {
        (self.loss)(i, x)
    }

    /// `E = ∏ Eⁱ`.
    pub fn product_set(&self) -> Region {
        Region::Product(self.sets.clone())
    }

    pub fn product_dense(&self) -> Result<DenseSubset> {
        DenseSubset::product(self.dense.clone())
    }

    pub fn check(&self, x: &Multistrategy) -> Result<()> {
        if x.players() != self.players() {
            return Err(Error::DimensionMismatch {
                expected: self.players(),
                got: x.players(),
            });
        }
        for (i, (b, s)) in x.blocks.iter().zip(&self.sets).enumerate() {
            if !s.contains(b, MEMBER_TOL) {
                return Err(Error::InvalidParameter {
                    name: "multistrategy",
                    reason: format!("block {i} = {b} is outside the strategy set"),
                });
            }
        }
        Ok(())
    }

    /// Splits a point of `E` into blocks.
    pub fn unflatten(&self, p: &Point) -> Multistrategy {
        Multistrategy::new(self.product_set().split(p))
    }

    pub fn grids(&self, res: &[f64]) -> Result<Vec<Grid>> {
        let tol = Tolerances::default();
        self.sets
            .iter()
            .enumerate()
            .map(|(i, s)| make_grid(s, resolution(res, i), &tol))
            .collect()
    }

    /// `φ` as a scalar bifunction on `E`, claiming what the `≤` problem needs.
    pub fn nikaido_isoda(&self) -> Bifunction {
        let g = self.clone();
        let kind = ProblemKind::ScalarLeq;
        let claims = Claims::new(&kind.required(), &[DiagonalKind::LeqZero, DiagonalKind::ContainsZero]);
        Bifunction::scalar(format!("phi-{}", self.label), self.product_set(), claims, move |x, y| {
            phi(&g, &g.unflatten(x), &g.unflatten(y))
        })
    }
}

impl fmt::Debug for NPersonGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NPersonGame")
            .field("label", &self.label)
            .field("sets", &self.sets)
            .field("dense", &self.dense)
            .finish_non_exhaustive()
    }
}

fn resolution(res: &[f64], i: usize) -> f64 {
    res.get(i).or(res.last()).copied().unwrap_or(0.05)
}

fn expected_loss(actions: &[usize], table: &[f64], x: &Multistrategy) -> f64 {
    let mut total = 0.0;
    let mut idx = vec![0usize; actions.len()];
    for &entry in table {
        let w: f64 = idx.iter().enumerate().map(|(j, &a)| x.blocks[j][a]).product();
        total += w * entry;
        for j in (0..actions.len()).rev() {
            idx[j] += 1;
            if idx[j] < actions[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    total
}

/// `φ(x, y) = Σᵢ (fⁱ(xⁱ, x̂ⁱ) − fⁱ(yⁱ, x̂ⁱ))`.
pub fn phi(g: &NPersonGame, x: &Multistrategy, y: &Multistrategy) -> f64 {
    (0..g.players())
        .map(|i| g.loss(i, x) - g.loss(i, &x.replace(i, &y.blocks[i])))
        .sum()
}

/// Player `i`'s best grid response to `x̂ⁱ` (first minimizer) and its gain
/// `fⁱ(x) − min_g fⁱ(g, x̂ⁱ)`.
pub fn best_response(g: &NPersonGame, x: &Multistrategy, i: usize, grid: &Grid) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, p) in grid.points.iter().enumerate() {
        let v = g.loss(i, &x.replace(i, p));
        if v < best.1 {
            best = (k, v);
        }
    }
    (best.0, g.loss(i, x) - best.1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumCheck {
    pub holds: bool,
    /// `max_y φ(x₀, y)` over the product grid.
    pub value: f64,
    pub worst_y: Multistrategy,
}

/// `max_y φ(x₀, y) ≤ tol` over the product of the per-player grids.
pub fn is_equilibrium(g: &NPersonGame, x0: &Multistrategy, grids: &[Grid], tol: f64) -> EquilibriumCheck {
    let (value, worst) = v_value(g, x0, grids);
    EquilibriumCheck {
        holds: value <= tol,
        value,
        worst_y: Multistrategy::new(worst.iter().zip(grids).map(|(&k, gr)| gr.points[k].clone()).collect()),
    }
}

/// `V(x)` and the maximizing grid indices.
fn v_value(g: &NPersonGame, x: &Multistrategy, grids: &[Grid]) -> (f64, Vec<usize>) {
    let mut total = 0.0;
    let mut arg = Vec::with_capacity(grids.len());
    for (i, grid) in grids.iter().enumerate() {
        let (k, gain) = best_response(g, x, i, grid);
        total += gain;
        arg.push(k);
    }
    (total, arg)
}

fn profile(grids: &[Grid], idx: &[usize]) -> Multistrategy {
    Multistrategy::new(idx.iter().zip(grids).map(|(&k, g)| g.points[k].clone()).collect())
}

/// `V` at every profile of the product grid, returning the first minimizer
/// in row-major order.
pub fn exhaustive_argmin(g: &NPersonGame, grids: &[Grid]) -> (Multistrategy, f64) {
    let sizes: Vec<usize> = grids.iter().map(Grid::len).collect();
    let total: usize = sizes.iter().product();
    let values: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|flat| v_value(g, &profile(grids, &unrank(flat, &sizes)), grids).0)
        .collect();
    let mut best = 0;
    for (k, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = k;
        }
    }
    (profile(grids, &unrank(best, &sizes)), values[best])
}

fn unrank(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; sizes.len()];
    for j in (0..sizes.len()).rev() {
        idx[j] = flat % sizes[j];
        flat /= sizes[j];
    }
    idx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NashReport {
    pub label: String,
    pub profile: Multistrategy,
    /// `V(profile)`.
    pub v: f64,
    pub certified: bool,
    pub worst_y: Multistrategy,
    pub rounds: usize,
    pub restarts: usize,
    pub resolutions: Vec<f64>,
}

/// Starts from the grid points nearest each barycenter.
pub fn solve_nash(g: &NPersonGame, res: &[f64], tol: f64, max_rounds: usize) -> Result<NashReport> {
    let grids = g.grids(res)?;
    let start: Vec<usize> = grids
        .iter()
        .zip(&g.sets)
        .map(|(gr, s)| gr.nearest(&s.center()).unwrap_or(0))
        .collect();
    search(g, &grids, start, tol, max_rounds)
}

/// As [`solve_nash`], starting from the grid profile nearest `start`.
pub fn solve_nash_from(
    g: &NPersonGame,
    res: &[f64],
    tol: f64,
    max_rounds: usize,
    start: &Multistrategy,
) -> Result<NashReport> {
    g.check(start)?;
    let grids = g.grids(res)?;
    let idx = grids
        .iter()
        .zip(&start.blocks)
        .map(|(gr, b)| gr.nearest(b).unwrap_or(0))
        .collect();
    search(g, &grids, idx, tol, max_rounds)
}

/// Round-robin best responses until `V ≤ tol`. A revisited profile means
/// the dynamics cycle; the search then restarts from the best profile seen
/// and switches to block-coordinate descent on `V`.
fn search(
    g: &NPersonGame,
    grids: &[Grid],
    mut idx: Vec<usize>,
    tol: f64,
    max_rounds: usize,
) -> Result<NashReport> {
    let v_at = |idx: &[usize]| v_value(g, &profile(grids, idx), grids).0;
    let mut best = (v_at(&idx), idx.clone());
    let mut visited: HashSet<Vec<usize>> = HashSet::new();
    let mut descent = false;
    let mut rounds = 0;
    let mut restarts = 0;
    while rounds < max_rounds && best.0 > tol {
        rounds += 1;
        if !descent {
            if !visited.insert(idx.clone()) {
                idx = best.1.clone();
                descent = true;
                restarts += 1;
                continue;
            }
            for i in 0..grids.len() {
                idx[i] = best_response(g, &profile(grids, &idx), i, &grids[i]).0;
            }
        } else {
            let mut improved = false;
            for i in 0..grids.len() {
                let cur = v_at(&idx);
                let vals: Vec<f64> = (0..grids[i].len())
                    .into_par_iter()
                    .map(|k| {
                        let mut t = idx.clone();
                        t[i] = k;
                        v_at(&t)
                    })
                    .collect();
                let mut arg = idx[i];
                for (k, v) in vals.iter().enumerate() {
                    if *v < vals[arg] {
                        arg = k;
                    }
                }
                if vals[arg] < cur {
                    idx[i] = arg;
                    improved = true;
                }
            }
            if !improved {
                let v = v_at(&idx);
                if v < best.0 {
                    best = (v, idx.clone());
                }
                break;
            }
        }
        let v = v_at(&idx);
        if v < best.0 {
            best = (v, idx.clone());
        }
    }
    let x = profile(grids, &best.1);
    let check = is_equilibrium(g, &x, grids, tol);
    Ok(NashReport {
        label: g.label.clone(),
        profile: x,
        v: check.value,
        certified: check.holds,
        worst_y: check.worst_y,
        rounds,
        restarts,
        resolutions: grids.iter().map(|gr| gr.resolution).collect(),
    })
}

fn vacuous(condition: String, scale: &str) -> ValidationVerdict {
    ValidationVerdict::new(condition, Status::Pass, scale).with_detail("vacuous: single-point grid")
}

/// Per-player checks of the game hypotheses, then the scalar `≤` problem
/// hypotheses for `φ` on `D = ∏ Dⁱ`.
///
/// Player `i`: `fⁱ` lower semicontinuous on `E`; `x̂ⁱ ↦ fⁱ(yⁱ, x̂ⁱ)` upper
/// semicontinuous; `yⁱ ↦ fⁱ(yⁱ, x̂ⁱ)` upper semicontinuous on `Eⁱ∖Dⁱ`; and
/// `yⁱ ↦ fⁱ(yⁱ, x̂ⁱ)` convex on `Dⁱ` for `x̂ⁱ ∈ D̂ⁱ = ∏_{j≠i} Dʲ`.
pub fn validate_nash_hypotheses(g: &NPersonGame, res: &[f64], tol: f64, seed: u64) -> Result<Vec<ValidationVerdict>> {
    let grids = g.grids(res)?;
    let coarse = (0..g.players()).map(|i| resolution(res, i)).fold(0.0, f64::max);
    let tols = Tolerances::default();
    let scale = Scale {
        tol: tol.max(tols.membership),
        ..Scale::for_grid(coarse, &tols)
    };
    let label = scale.label();
    let n = g.players();
    let e_grid = make_grid(&g.product_set(), coarse, &tols)?;
    let all_centers: Vec<usize> = (0..e_grid.len()).collect();
    let e_profiles: Vec<Multistrategy> = e_grid.points.iter().map(|p| g.unflatten(p)).collect();
    let mut out = Vec::new();
    for i in 0..n {
        let name = |c: &str| format!("player {i}: {c}");
        let others_sets: Vec<Region> = (0..n).filter(|&j| j != i).map(|j| g.sets[j].clone()).collect();
        let others_region = Region::Product(others_sets);
        let others_grid = make_grid(&others_region, coarse, &tols)?;
        let others: Vec<Vec<Point>> = others_grid.points.iter().map(|p| others_region.split(p)).collect();
        let own = &grids[i];
        let d_own: Vec<usize> = (0..own.len()).filter(|&k| g.dense[i].member(&own.points[k])).collect();
        let d_others: Vec<usize> = (0..others.len())
            .filter(|&k| (0..n).filter(|&j| j != i).zip(&others[k]).all(|(j, b)| g.dense[j].member(b)))
            .collect();

        if e_grid.len() == 1 {
            for c in ["loss lower semicontinuous on E", "loss upper semicontinuous in others", "loss upper semicontinuous in own strategy off D", "loss convex in own strategy on D"] {
                out.push(vacuous(name(c), &label));
            }
            continue;
        }

        let values: Vec<f64> = e_profiles.par_iter().map(|x| g.loss(i, x)).collect();
        out.push(
            scalar_semicontinuity("lsc", &e_grid.points, &all_centers, &values, Side::Lower, &scale)
                .renamed(name("loss lower semicontinuous on E")),
        );

        let anchors = spread(&d_own, ANCHORS);
        let parts: Vec<ValidationVerdict> = anchors
            .iter()
            .map(|&k| {
                let yi = &own.points[k];
                let vals: Vec<f64> = others.iter().map(|o| g.loss(i, &Multistrategy::splice(i, yi, o))).collect();
                let centers: Vec<usize> = (0..others.len()).collect();
                scalar_semicontinuity("usc", &others_grid.points, &centers, &vals, Side::Upper, &scale)
            })
            .collect();
        out.push(if others_grid.len() == 1 {
            vacuous(name("loss upper semicontinuous in others"), &label)
        } else {
            ValidationVerdict::combine(&name("loss upper semicontinuous in others"), parts)
        });

        let outside: Vec<usize> = (0..own.len()).filter(|k| !d_own.contains(k)).collect();
        let parts: Vec<ValidationVerdict> = spread(&d_others, ANCHORS)
            .iter()
            .map(|&k| {
                let vals: Vec<f64> = own
                    .points
                    .iter()
                    .map(|p| g.loss(i, &Multistrategy::splice(i, p, &others[k])))
                    .collect();
                scalar_semicontinuity("usc", &own.points, &outside, &vals, Side::Upper, &scale)
            })
            .collect();
        out.push(ValidationVerdict::combine(&name("loss upper semicontinuous in own strategy off D"), parts));

        out.push(own_convexity(g, i, 200, seed.wrapping_add(i as u64)).renamed(name("loss convex in own strategy on D")));
    }
    if e_grid.len() > 1 {
        let cfg = SolveConfig {
            k_res: coarse,
            d_res: coarse,
            tol,
            seed,
            ..SolveConfig::default()
        };
        let p = EquilibriumProblem::new(g.product_set(), g.product_dense()?, g.nikaido_isoda(), ProblemKind::ScalarLeq)?;
        let grids = crate::solver::build_grids(&p, &cfg)?;
        for v in validate_hypotheses(&p, &cfg, &grids) {
            let c = format!("phi: {}", v.condition);
            out.push(v.renamed(c));
        }
    }
    Ok(out)
}

/// Up to `k` entries of `idx`, evenly spaced and including both ends.
fn spread(idx: &[usize], k: usize) -> Vec<usize> {
    if idx.len() <= k {
        return idx.to_vec();
    }
    let mut out: Vec<usize> = (0..k).map(|t| idx[t * (idx.len() - 1) / (k - 1)]).collect();
    out.dedup();
    out
}

fn own_convexity(g: &NPersonGame, i: usize, trials: usize, seed: u64) -> ValidationVerdict {
    const TOL: f64 = 1e-9;
    let scale = format!("at scale ({trials} tuples, tol {TOL:e}, seed {seed})");
    let mut r = rng(seed);
    let mut feasible = 0;
    for t in 0..trials {
        let Some((ys, w, c)) = sample_tuple(&g.dense[i], 2 + t % 2, &mut r) else {
            continue;
        };
        let Ok(others) = (0..g.players())
            .filter(|&j| j != i)
            .map(|j| g.dense[j].sample(&mut r))
            .collect::<Result<Vec<_>>>()
        else {
            continue;
        };
        feasible += 1;
        let vals: Vec<f64> = ys.iter().map(|y| g.loss(i, &Multistrategy::splice(i, y, &others))).collect();
        let at = g.loss(i, &Multistrategy::splice(i, &c, &others));
        if !scalar_shape_holds(&vals, &w, at, Shape::Convex, TOL) {
            let sum: f64 = vals.iter().zip(&w).map(|(v, w)| v * w).sum();
            let mut points = ys;
            points.push(c);
            let mut values: Vec<ExtInterval> = vals.into_iter().map(ExtInterval::point).collect();
            values.push(ExtInterval::point(at));
            return ValidationVerdict::new("convex", Status::Fail, scale)
                .with_detail(format!("combination value {at} exceeds weighted sum {sum}"))
                .with_witness(Witness {
                    points,
                    weights: w,
                    values,
                    violation: at - sum,
                });
        }
    }
    let status = if feasible > 0 { Status::Pass } else { Status::Inconclusive };
    ValidationVerdict::new("convex", status, scale).with_detail(format!("{feasible}/{trials} feasible tuples"))
}

/// Built-in games. Losses are negated payoffs.
pub mod library {
    use super::*;

    /// Player 0 wants to match, player 1 to mismatch. Actions: heads, tails.
    pub fn matching_pennies() -> NPersonGame {
        let p0 = vec![-1.0, 1.0, 1.0, -1.0];
        let p1 = p0.iter().map(|v| -v).collect();
        NPersonGame::finite("matching-pennies", vec![2, 2], vec![p0, p1]).expect("2x2 tables")
    }

    /// Payoffs (3,3) both cooperate, (0,5)/(5,0) one defects, (1,1) both
    /// defect. Actions: cooperate, defect.
    pub fn prisoners_dilemma() -> NPersonGame {
        let p0 = vec![-3.0, 0.0, -5.0, -1.0];
        let p1 = vec![-3.0, -5.0, 0.0, -1.0];
        NPersonGame::finite("prisoners-dilemma", vec![2, 2], vec![p0, p1]).expect("2x2 tables")
    }

    /// One action per player.
    pub fn singleton() -> NPersonGame {
        NPersonGame::finite("singleton", vec![1, 1], vec![vec![0.0], vec![0.0]]).expect("1x1 tables")
    }

    /// Zero-sum rock-paper-scissors.
    pub fn rock_paper_scissors() -> NPersonGame {
        let pay = [[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]];
        let p0: Vec<f64> = pay.iter().flatten().map(|v| -v).collect();
        let p1: Vec<f64> = pay.iter().flatten().copied().collect();
        NPersonGame::finite("rock-paper-scissors", vec![3, 3], vec![p0, p1]).expect("3x3 tables")
    }

    /// Two players on `[0, 1]` with `f⁰ = −|y⁰ − ½| + y⁰y¹`, `f¹ = (y¹ − y⁰)²`.
    /// Player 0's loss has a concave kink at ½.
    pub fn concave_kink() -> NPersonGame {
        NPersonGame::on_boxes("concave-kink", vec![(vec![0.0], vec![1.0]); 2], |i, x| {
            let (a, b) = (x.blocks[0][0], x.blocks[1][0]);
            match i {
                0 => -(a - 0.5).abs() + a * b,
                _ => (b - a).powi(2),
            }
        })
        .expect("unit boxes")
    }

    /// Two players on `[0, 1]`, `fⁱ = (yⁱ − 0.4·y^{1−i} − 0.3)²`; the unique
    /// equilibrium is `(½, ½)`.
    pub fn quadratic_duopoly() -> NPersonGame {
        NPersonGame::on_boxes("quadratic", vec![(vec![0.0], vec![1.0]); 2], |i, x| {
            let (own, other) = (x.blocks[i][0], x.blocks[1 - i][0]);
            (own - 0.4 * other - 0.3).powi(2)
        })
        .expect("unit boxes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    fn ms(blocks: &[Point]) -> Multistrategy {
        Multistrategy::new(blocks.to_vec())
    }

    #[test]
    fn phi_examples() {
        let g = library::matching_pennies();
        let u = ms(&[pt![0.5, 0.5], pt![0.5, 0.5]]);
        assert_eq!(phi(&g, &u, &u), 0.0);
        for y in [ms(&[pt![1, 0], pt![0, 1]]), ms(&[pt![0.3, 0.7], pt![0.9, 0.1]])] {
            assert!(phi(&g, &u, &y).abs() < 1e-15);
        }
        let pd = library::prisoners_dilemma();
        let cc = ms(&[pt![1, 0], pt![1, 0]]);
        let dd = ms(&[pt![0, 1], pt![0, 1]]);
        assert_eq!(phi(&pd, &cc, &dd), 4.0);
    }

    #[test]
    fn equilibrium_examples() {
        let g = library::matching_pennies();
        let grids = g.grids(&[0.1]).unwrap();
        let u = ms(&[pt![0.5, 0.5], pt![0.5, 0.5]]);
        assert!(is_equilibrium(&g, &u, &grids, 1e-9).holds);
        let hh = ms(&[pt![1, 0], pt![1, 0]]);
        let c = is_equilibrium(&g, &hh, &grids, 1e-9);
        assert!(!c.holds);
        assert_eq!(c.value, 2.0);
        assert_eq!(c.worst_y.blocks[1], pt![0, 1]);
        let s = library::singleton();
        let one = ms(&[pt![1], pt![1]]);
        assert!(is_equilibrium(&s, &one, &s.grids(&[0.1]).unwrap(), 1e-9).holds);
    }

    #[test]
    fn matching_pennies_from_pure_start() {
        let g = library::matching_pennies();
        let start = ms(&[pt![1, 0], pt![1, 0]]);
        let r = solve_nash_from(&g, &[0.05], 1e-6, 200, &start).unwrap();
        assert!(r.certified, "{r:?}");
        assert!(r.restarts >= 1);
        for b in &r.profile.blocks {
            assert!(b.dist_inf(&pt![0.5, 0.5]) <= 0.05 + 1e-12);
        }
    }

    #[test]
    fn prisoners_dilemma_defects() {
        let r = solve_nash(&library::prisoners_dilemma(), &[0.05], 1e-6, 100).unwrap();
        assert_eq!(r.profile, ms(&[pt![0, 1], pt![0, 1]]));
        assert_eq!(r.v, 0.0);
    }

    #[test]
    fn singleton_game() {
        let g = library::singleton();
        let r = solve_nash(&g, &[0.05], 1e-6, 10).unwrap();
        assert_eq!(r.v, 0.0);
        let v = validate_nash_hypotheses(&g, &[0.05], 1e-9, 1).unwrap();
        assert!(v.iter().all(|v| v.is_pass()));
    }

    #[test]
    fn bilinear_hypotheses_pass() {
        let v = validate_nash_hypotheses(&library::matching_pennies(), &[0.1], 1e-9, 3).unwrap();
        for x in &v {
            assert!(x.is_pass(), "{x:?}");
        }
    }

    #[test]
    fn concave_kink_fails_convexity() {
        let v = validate_nash_hypotheses(&library::concave_kink(), &[0.1], 1e-9, 3).unwrap();
        let c = v.iter().find(|v| v.condition == "player 0: loss convex in own strategy on D").unwrap();
        assert!(c.is_fail());
        assert!(c.witness.as_ref().unwrap().violation > 0.0);
    }

    #[test]
    fn exhaustive_oracle_agrees() {
        let g = library::quadratic_duopoly();
        let grids = g.grids(&[0.05]).unwrap();
        let (x, v) = exhaustive_argmin(&g, &grids);
        let r = solve_nash(&g, &[0.05], 1e-6, 100).unwrap();
        assert!(v < 1e-12);
        assert_eq!(x, r.profile, "{v} {r:?}");
    }
}
