//! Subsets `D ⊆ K` and one-sided sampling validators for denseness, self
//! segment-denseness, and the hull-closure property
//! `cl(co{u₁,…,uₙ} ∩ U) = co{u₁,…,uₙ}`.
//!
//! A pass is evidence at the sampled scale (`eps`, budgets, seed). A failure
//! carries a witness that replays under the same parameters. Denseness is
//! not decidable from finitely many samples and nothing here claims to
//! decide it.

use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::config::DEFAULT_SEED;
use crate::error::{Error, Result};
use crate::geometry::{
    hull_grid, hull_membership, make_grid, relative_interior_margin, Grid, Point, Polytope,
    Region,
};
use crate::{rng, Rng, Tolerances};

const MEMBER_TOL: f64 = 1e-9;
const RATIONAL_TOL: f64 = 1e-12;
const SAMPLER_ATTEMPTS: usize = 10_000;
const SEGMENT_BUDGET: usize = 1_000;
const HULL_POINT_BUDGET: usize = 10_000;

/// Built-in families of subsets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DenseKind {
    /// `D = K`.
    Full,
    /// Points whose coordinates are all fractions `a/b` with `b ≤ q`. A
    /// finite-precision stand-in for `ℚⁿ ∩ K`.
    RationalGrid { max_denominator: u32 },
    /// `K` minus the relative interior of a polytope.
    Punctured { removed: Polytope },
    /// The boundary sphere of a ball parent.
    ///
    /// In infinite dimension (weak topology) the unit sphere is dense in the
    /// closed unit ball. In ℝⁿ it is not: `check_dense` fails at the center,
    /// which is at distance one from the sphere. The family is kept because it
    /// drives the counterexample instances, where only the algebra of
    /// `⟨x, y⟩ − 1` at `y = 0` matters.
    SphereInBall,
    /// `∏ Dⁱ` over a product parent; membership is componentwise.
    Product { factors: Vec<DenseSubset> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSubset {
    parent: Region,
    kind: DenseKind,
    label: String,
}

impl DenseSubset {
    pub fn new(parent: Region, kind: DenseKind) -> Result<Self> {
        let label = match &kind {
            DenseKind::Full => "full".to_string(),
            DenseKind::RationalGrid { max_denominator } => {
                if *max_denominator < 1 {
                    return Err(Error::InvalidParameter {
                        name: "max_denominator",
                        reason: "q must be at least 1".into(),
                    });
                }
                format!("rational-grid(q={max_denominator})")
            }
            DenseKind::Punctured { removed } => {
                if removed.dim() != parent.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: parent.dim(),
                        got: removed.dim(),
                    });
                }
                if let Some(v) = removed
                    .vertices()
                    .iter()
                    .find(|v| !parent.contains(v, MEMBER_TOL))
                {
                    return Err(Error::InvalidParameter {
                        name: "removed",
                        reason: format!("vertex {v} lies outside the parent set"),
                    });
                }
                "punctured".to_string()
            }
            DenseKind::SphereInBall => {
                if !matches!(parent, Region::Ball(_)) {
                    return Err(Error::InvalidParameter {
                        name: "parent",
                        reason: "sphere-in-ball needs a ball parent".into(),
                    });
                }
                "sphere-in-ball".to_string()
            }
            DenseKind::Product { factors } => {
                let Region::Product(parents) = &parent else {
                    return Err(Error::InvalidParameter {
                        name: "parent",
                        reason: "a product subset needs a product parent".into(),
                    });
                };
                if parents.len() != factors.len()
                    || parents.iter().zip(factors).any(|(p, f)| f.parent() != p)
                {
                    return Err(Error::InvalidParameter {
                        name: "factors",
                        reason: "factor parents must match the product factors".into(),
                    });
                }
                let labels: Vec<&str> = factors.iter().map(|f| f.label()).collect();
                format!("product({})", labels.join(" x "))
            }
        };
        Ok(Self {
            parent,
            kind,
            label,
        })
    }

    pub fn full(parent: Region) -> Self {
        Self::new(parent, DenseKind::Full).expect("full subset is always valid")
    }

    pub fn rational_grid(parent: Region, q: u32) -> Result<Self> {
        Self::new(parent, DenseKind::RationalGrid { max_denominator: q })
    }

    pub fn punctured(parent: Region, removed: Polytope) -> Result<Self> {
        Self::new(parent, DenseKind::Punctured { removed })
    }

    pub fn sphere_in_ball(n: usize) -> Self {
        Self::new(crate::geometry::Ball::unit(n).into(), DenseKind::SphereInBall)
            .expect("unit ball parent")
    }

    pub fn parent(&self) -> &Region {
        &self.parent
    }

    pub fn kind(&self) -> &DenseKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_full(&self) -> bool {
        match &self.kind {
            DenseKind::Full => true,
            DenseKind::Product { factors } => factors.iter().all(DenseSubset::is_full),
            _ => false,
        }
    }

    /// `∏ factors` over the product of their parents.
    pub fn product(factors: Vec<DenseSubset>) -> Result<Self> {
        let parent = Region::Product(factors.iter().map(|f| f.parent().clone()).collect());
        Self::new(parent, DenseKind::Product { factors })
    }

    /// Re-parents the descriptor (used when a coercive solver truncates `K`).
    pub fn with_parent(&self, parent: Region) -> Result<Self> {
        Self::new(parent, self.kind.clone())
    }

    pub fn member(&self, p: &Point) -> bool {
        if !self.parent.contains(p, MEMBER_TOL) {
            return false;
        }
        match &self.kind {
            DenseKind::Full => true,
            DenseKind::RationalGrid { max_denominator } => p
                .iter()
                .all(|&c| is_small_fraction(c, *max_denominator)),
            DenseKind::Punctured { removed } => !in_open_removed(p, removed),
            DenseKind::SphereInBall => match &self.parent {
                Region::Ball(b) => (p.dist(&b.center) - b.radius).abs() <= MEMBER_TOL,
                _ => false,
            },
            DenseKind::Product { factors } => self
                .parent
                .split(p)
                .iter()
                .zip(factors)
                .all(|(b, f)| f.member(b)),
        }
    }

    /// Draws a member point.
    ///
    /// `RationalGrid` draws coordinates with small denominators
    /// (`b ≤ ⌊q^{1/4}⌋`), so that segments and hulls spanned by sampled
    /// members still carry many members of denominator `≤ q`.
    pub fn sample(&self, rng: &mut Rng) -> Result<Point> {
        for _ in 0..SAMPLER_ATTEMPTS {
            let p = match &self.kind {
                DenseKind::SphereInBall => {
                    let Region::Ball(b) = &self.parent else {
                        unreachable!()
                    };
                    let dir = gaussian_direction(b.dim(), rng);
                    dir.scale(b.radius).add(&b.center)
                }
                DenseKind::RationalGrid { max_denominator } => {
                    let base = self.parent.sample(rng)?;
                    let coarse = coarse_denominator(*max_denominator);
                    let c = base
                        .iter()
                        .map(|&x| {
                            let b = rng.gen_range(1..=coarse) as f64;
                            (x * b).round() / b
                        })
                        .collect();
                    Point::from_vec(c)
                }
                DenseKind::Product { factors } => {
                    let mut c = Vec::with_capacity(self.parent.dim());
                    for f in factors {
                        c.extend(f.sample(rng)?.into_vec());
                    }
                    Point::from_vec(c)
                }
                _ => self.parent.sample(rng)?,
            };
            if self.member(&p) {
                return Ok(p);
            }
        }
        Err(Error::SamplerExhausted {
            attempts: SAMPLER_ATTEMPTS,
            context: format!("sampling {}", self.label),
        })
    }

    /// A member close to `center`, if the family has a natural projection.
    /// `spread = 0` asks for the projection itself.
    pub fn propose_near(&self, center: &Point, spread: f64, rng: &mut Rng) -> Option<Point> {
        let jittered = if spread > 0.0 {
            Point::from_vec(
                center
                    .iter()
                    .map(|c| c + rng.gen_range(-spread..=spread))
                    .collect(),
            )
        } else {
            center.clone()
        };
        let p = match &self.kind {
            DenseKind::Full | DenseKind::Punctured { .. } => jittered,
            DenseKind::RationalGrid { max_denominator } => {
                let q = *max_denominator as f64;
                Point::from_vec(jittered.iter().map(|c| (c * q).round() / q).collect())
            }
            DenseKind::SphereInBall => {
                let Region::Ball(b) = &self.parent else {
                    unreachable!()
                };
                let d = jittered.sub(&b.center);
                let n = d.norm();
                let dir = if n > 1e-12 {
                    d.scale(1.0 / n)
                } else {
                    gaussian_direction(b.dim(), rng)
                };
                dir.scale(b.radius).add(&b.center)
            }
            DenseKind::Product { factors } => {
                let mut c = Vec::with_capacity(self.parent.dim());
                for (b, f) in self.parent.split(center).iter().zip(factors) {
                    c.extend(f.propose_near(b, spread, rng)?.into_vec());
                }
                Point::from_vec(c)
            }
        };
        self.member(&p).then_some(p)
    }
}

fn coarse_denominator(q: u32) -> u32 {
    ((q as f64).powf(0.25).floor() as u32).max(1)
}

/// `c` is within 1e-12 of some `a/b` with `1 ≤ b ≤ q`.
pub(crate) fn is_small_fraction(c: f64, q: u32) -> bool {
    (1..=q).any(|b| {
        let b = b as f64;
        (c - (c * b).round() / b).abs() <= RATIONAL_TOL
    })
}

fn in_open_removed(p: &Point, removed: &Polytope) -> bool {
    matches!(
        relative_interior_margin(p, removed.vertices(), 1e-10),
        Some(m) if m > MEMBER_TOL
    )
}

fn gaussian_direction(n: usize, rng: &mut Rng) -> Point {
    loop {
        let c: Vec<f64> = (0..n)
            .map(|_| {
                // Box-Muller
                let u1: f64 = 1.0 - rng.gen::<f64>();
                let u2: f64 = rng.gen();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let p = Point::from_vec(c);
        let norm = p.norm();
        if norm > 1e-9 {
            return p.scale(1.0 / norm);
        }
    }
}

/// Spatial hash over sampled points for radius queries.
struct CellIndex {
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
    points: Vec<Point>,
}

impl CellIndex {
    fn new(cell: f64) -> Self {
        Self {
            cell,
            cells: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn key(&self, p: &Point) -> Vec<i64> {
        p.iter().map(|c| (c / self.cell).floor() as i64).collect()
    }

    fn insert(&mut self, p: Point) {
        let k = self.key(&p);
        self.cells.entry(k).or_default().push(self.points.len());
        self.points.push(p);
    }

    /// Distance to the nearest stored point within one cell ring, if any.
    fn nearest_within(&self, p: &Point) -> Option<f64> {
        let k = self.key(p);
        let n = k.len();
        let mut best: Option<f64> = None;
        let mut offset = vec![-1i64; n];
        loop {
            let key: Vec<i64> = k.iter().zip(&offset).map(|(a, b)| a + b).collect();
            if let Some(ids) = self.cells.get(&key) {
                for &i in ids {
                    let d = self.points[i].dist(p);
                    if best.is_none_or(|b| d < b) {
                        best = Some(d);
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                offset[i] += 1;
                if offset[i] <= 1 {
                    break;
                }
                offset[i] = -1;
                i += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseReport {
    pub dense_ok: bool,
    /// Grid point farthest from the sampled members (first in grid order on ties).
    pub worst_point: Option<Point>,
    pub worst_distance: f64,
    pub samples_used: usize,
}

/// `U` is `eps`-dense over `grid`: every grid point has a sampled member
/// within `eps`. The sample budget is `max(10⁴, 100·|grid|)` members, one
/// local proposal per grid point and random draws for the rest.
pub fn check_dense(u: &DenseSubset, grid: &Grid, eps: f64, seed: u64) -> Result<DenseReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: "must be positive".into(),
        });
    }
    let budget = 10_000usize.max(100 * grid.len());
    let mut rng = rng(seed);
    let mut index = CellIndex::new(eps);
    let mut used = 0;
    for g in grid.iter() {
        if let Some(p) = u.propose_near(g, 0.0, &mut rng) {
            index.insert(p);
        }
        used += 1;
    }
    while used < budget {
        index.insert(u.sample(&mut rng)?);
        used += 1;
    }
    let nearest: Vec<f64> = {
        use rayon::prelude::*;
        grid.points
            .par_iter()
            .map(|g| match index.nearest_within(g) {
                Some(d) if d <= eps => d,
                // Outside the cell ring: exact distance for the report.
                _ => index
                    .points
                    .iter()
                    .map(|u| u.dist(g))
                    .fold(f64::INFINITY, f64::min),
            })
            .collect()
    };
    let mut worst: Option<(Point, f64)> = None;
    let mut ok = true;
    for (g, &d) in grid.iter().zip(&nearest) {
        if d > eps {
            ok = false;
        }
        if worst.as_ref().is_none_or(|(_, w)| d > *w) {
            worst = Some((g.clone(), d));
        }
    }
    let (worst_point, worst_distance) = match worst {
        Some((p, d)) => (Some(p), d),
        None => (None, 0.0),
    };
    Ok(DenseReport {
        dense_ok: ok,
        worst_point,
        worst_distance,
        samples_used: used,
    })
}

/// A segment `[x, y]` together with the first run of subdivision parameters
/// with no member of `[x, y] ∩ U` within `eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentWitness {
    pub x: Point,
    pub y: Point,
    /// Uncovered parameter range `[t_lo, t_hi]` (as subdivision parameters).
    pub t_lo: f64,
    pub t_hi: f64,
    pub per_segment: usize,
    pub eps: f64,
}

impl SegmentWitness {
    pub fn point_lo(&self) -> Point {
        self.x.lerp(&self.y, self.t_lo)
    }

    pub fn point_hi(&self) -> Point {
        self.x.lerp(&self.y, self.t_hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsdCheckReport {
    pub dense_ok: bool,
    pub segment_ok: bool,
    pub witness: Option<SegmentWitness>,
    pub samples_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsdParams {
    pub pairs: usize,
    pub per_segment: usize,
    pub eps: f64,
    pub seed: u64,
}

impl Default for SsdParams {
    fn default() -> Self {
        Self {
            pairs: 50,
            per_segment: 20,
            eps: 0.05,
            seed: DEFAULT_SEED,
        }
    }
}

/// Outcome of searching one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentScan {
    /// Subdivision parameters with no member within `eps`.
    pub uncovered: Vec<f64>,
    pub trials: usize,
}

impl SegmentScan {
    fn first_run(&self, per_segment: usize) -> Option<(f64, f64)> {
        let first = *self.uncovered.first()?;
        let h = 1.0 / (per_segment - 1) as f64;
        let mut hi = first;
        for &t in &self.uncovered[1..] {
            if (t - hi - h).abs() < 1e-9 {
                hi = t;
            } else {
                break;
            }
        }
        Some((first, hi))
    }
}

/// Candidate parameters approximating `s`: `s` itself, then `k/m` around
/// `s·m` for growing `m`.
fn parameter_candidates(s: f64, budget: usize) -> impl Iterator<Item = f64> {
    let direct = std::iter::once(s);
    let rationals = (1..).flat_map(move |m: u64| {
        let mf = m as f64;
        let k = (s * mf).round();
        [k, k - 1.0, k + 1.0]
            .into_iter()
            .map(move |kk| kk / mf)
            .filter(|t| (0.0..=1.0).contains(t))
    });
    direct.chain(rationals).take(budget)
}

/// Scans `[x, y]` at `per_segment` equispaced parameters, searching member
/// parameters near each with a total budget of 10³ trials.
pub fn scan_segment(
    u: &DenseSubset,
    x: &Point,
    y: &Point,
    per_segment: usize,
    eps: f64,
) -> SegmentScan {
    let len = x.dist(y);
    let per_point = (SEGMENT_BUDGET / per_segment).max(1);
    let mut uncovered = Vec::new();
    let mut trials = 0;
    for j in 0..per_segment {
        let s = j as f64 / (per_segment - 1) as f64;
        let mut found = false;
        for t in parameter_candidates(s, per_point) {
            trials += 1;
            if (t - s).abs() * len > eps {
                continue;
            }
            if u.member(&x.lerp(y, t)) {
                found = true;
                break;
            }
        }
        if !found {
            uncovered.push(s);
        }
    }
    SegmentScan { uncovered, trials }
}

fn check_params(per_segment: usize, pairs: usize) -> Result<()> {
    if per_segment < 2 {
        return Err(Error::InvalidParameter {
            name: "per_segment",
            reason: "need at least 2 subdivision points".into(),
        });
    }
    if pairs < 1 {
        return Err(Error::InvalidParameter {
            name: "pairs",
            reason: "need at least one pair".into(),
        });
    }
    Ok(())
}

/// Resolution used for the denseness half of the report: `eps/2`, coarsened
/// to `diam/16` on large parents.
fn dense_resolution(parent: &Region, eps: f64) -> f64 {
    let (lo, hi) = parent.bounding_box();
    let diam = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| (h - l) * (h - l))
        .sum::<f64>()
        .sqrt();
    (eps / 2.0).max(diam / 16.0)
}

/// Samples `pairs` member pairs and checks that `[x, y] ∩ U` is `eps`-dense
/// in every `[x, y]`. The witness is the lexicographically smallest failing
/// pair.
pub fn check_self_segment_dense(u: &DenseSubset, params: SsdParams) -> Result<SsdCheckReport> {
    check_params(params.per_segment, params.pairs)?;
    let mut r = rng(params.seed);
    let mut pairs = Vec::with_capacity(params.pairs);
    for _ in 0..params.pairs {
        let x = u.sample(&mut r)?;
        let y = u.sample(&mut r)?;
        pairs.push((x, y));
    }
    segment_report(u, &pairs, params)
}

/// Same check on caller-supplied pairs.
pub fn check_self_segment_dense_pairs(
    u: &DenseSubset,
    pairs: &[(Point, Point)],
    params: SsdParams,
) -> Result<SsdCheckReport> {
    check_params(params.per_segment, pairs.len())?;
    for (x, y) in pairs {
        for p in [x, y] {
            if !u.member(p) {
                return Err(Error::InvalidParameter {
                    name: "pairs",
                    reason: format!("{p} is not a member of {}", u.label()),
                });
            }
        }
    }
    segment_report(u, pairs, params)
}

fn segment_report(
    u: &DenseSubset,
    pairs: &[(Point, Point)],
    params: SsdParams,
) -> Result<SsdCheckReport> {
    use rayon::prelude::*;
    let scans: Vec<SegmentScan> = pairs
        .par_iter()
        .map(|(x, y)| scan_segment(u, x, y, params.per_segment, params.eps))
        .collect();
    let mut samples_used = 2 * pairs.len();
    let mut witness: Option<SegmentWitness> = None;
    for ((x, y), scan) in pairs.iter().zip(&scans) {
        samples_used += scan.trials;
        if let Some((t_lo, t_hi)) = scan.first_run(params.per_segment) {
            let w = SegmentWitness {
                x: x.clone(),
                y: y.clone(),
                t_lo,
                t_hi,
                per_segment: params.per_segment,
                eps: params.eps,
            };
            let smaller = witness
                .as_ref()
                .is_none_or(|cur| w.x.lex_cmp(&cur.x).then(w.y.lex_cmp(&cur.y)).is_lt());
            if smaller {
                witness = Some(w);
            }
        }
    }
    let grid = make_grid(
        u.parent(),
        dense_resolution(u.parent(), params.eps),
        &Tolerances::default(),
    )?;
    let dense = check_dense(u, &grid, params.eps, params.seed)?;
    Ok(SsdCheckReport {
        dense_ok: dense.dense_ok,
        segment_ok: witness.is_none(),
        witness,
        samples_used: samples_used + dense.samples_used,
    })
}

/// Re-runs the segment scan recorded in a witness. Returns the uncovered
/// parameter run, which equals the witness run when the failure replays.
pub fn replay_segment_witness(u: &DenseSubset, w: &SegmentWitness) -> Option<(f64, f64)> {
    scan_segment(u, &w.x, &w.y, w.per_segment, w.eps).first_run(w.per_segment)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullClosureReport {
    pub ok: bool,
    pub grid_points: usize,
    /// First hull grid point with no member of `co{uᵢ} ∩ U` within `eps`.
    pub uncovered: Option<Point>,
    pub trials: usize,
}

/// Checks `cl(co{u₁,…,uₙ} ∩ U) = co{u₁,…,uₙ}` at scale: every point of a
/// barycentric grid of the hull at `grid_res` has a member of `U` lying in
/// the hull within `eps`.
pub fn check_hull_closure(
    u: &DenseSubset,
    hull_points: &[Point],
    grid_res: f64,
    eps: f64,
    seed: u64,
) -> Result<HullClosureReport> {
    if !(2..=6).contains(&hull_points.len()) {
        return Err(Error::InvalidParameter {
            name: "hull_points",
            reason: format!("need between 2 and 6 points, got {}", hull_points.len()),
        });
    }
    if let Some(p) = hull_points.iter().find(|p| !u.member(p)) {
        return Err(Error::InvalidParameter {
            name: "hull_points",
            reason: format!("{p} is not a member of {}", u.label()),
        });
    }
    let grid = hull_grid(hull_points, grid_res, Tolerances::default().grid_cap)?;
    let mut r = rng(seed);
    let mut trials = 0;
    for (p, bary) in &grid {
        let (found, used) = hull_member_near(u, hull_points, p, bary, eps, &mut r);
        trials += used;
        if !found {
            return Ok(HullClosureReport {
                ok: false,
                grid_points: grid.len(),
                uncovered: Some(p.clone()),
                trials,
            });
        }
    }
    Ok(HullClosureReport {
        ok: true,
        grid_points: grid.len(),
        uncovered: None,
        trials,
    })
}

/// Boolean form of [`check_hull_closure`].
pub fn hull_closure_holds(
    u: &DenseSubset,
    hull_points: &[Point],
    grid_res: f64,
    eps: f64,
) -> Result<bool> {
    Ok(check_hull_closure(u, hull_points, grid_res, eps, DEFAULT_SEED)?.ok)
}

fn hull_member_near(
    u: &DenseSubset,
    hull: &[Point],
    p: &Point,
    bary: &[f64],
    eps: f64,
    rng: &mut Rng,
) -> (bool, usize) {
    let mut trials = 1;
    if u.member(p) {
        return (true, trials);
    }
    // Rational barycentric weights: candidates lie in the hull by construction.
    for m in 1..=400u64 {
        trials += 1;
        let w = round_weights(bary, m);
        let mut c = vec![0.0; p.dim()];
        for (v, wi) in hull.iter().zip(&w) {
            for (ci, vi) in c.iter_mut().zip(v.iter()) {
                *ci += wi * vi;
            }
        }
        let cand = Point::from_vec(c);
        if cand.dist(p) <= eps && u.member(&cand) {
            return (true, trials);
        }
    }
    while trials < HULL_POINT_BUDGET {
        trials += 1;
        let Some(cand) = u.propose_near(p, eps / 2.0, rng) else {
            continue;
        };
        if cand.dist(p) <= eps && hull_membership(&cand, hull, MEMBER_TOL).unwrap_or(false) {
            return (true, trials);
        }
    }
    (false, trials)
}

/// Largest-remainder rounding of `w` to multiples of `1/m` summing to one.
fn round_weights(w: &[f64], m: u64) -> Vec<f64> {
    let mf = m as f64;
    let mut ks: Vec<u64> = w.iter().map(|x| (x * mf).floor().max(0.0) as u64).collect();
    let mut rem: Vec<(usize, f64)> = w
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x * mf - ks[i] as f64))
        .collect();
    rem.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut missing = m.saturating_sub(ks.iter().sum());
    for (i, _) in rem {
        if missing == 0 {
            break;
        }
        ks[i] += 1;
        missing -= 1;
    }
    ks.into_iter().map(|k| k as f64 / mf).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, Polytope, SimplexM};
    use crate::pt;

    fn unit_square() -> Region {
        Polytope::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap().into()
    }

    pub(crate) fn punctured_ball() -> DenseSubset {
        let removed =
            Polytope::new(vec![pt![-1, 0, 0], pt![0, -1, 0], pt![1, 0, 0], pt![0, 1, 0]]).unwrap();
        DenseSubset::punctured(Ball::unit(3).into(), removed).unwrap()
    }

    #[test]
    fn rational_membership() {
        let d = DenseSubset::rational_grid(unit_square(), 10).unwrap();
        assert!(d.member(&pt![0.3, 0.7]));
        assert!(!d.member(&pt![0.3, std::f64::consts::FRAC_1_SQRT_2]));
        assert!(!d.member(&pt![1.3, 0.5]));
        assert!(!DenseSubset::rational_grid(unit_square(), 10)
            .unwrap()
            .member(&pt![1.0 / 11.0, 0.5]));
    }

    #[test]
    fn punctured_membership() {
        let d = punctured_ball();
        assert!(!d.member(&pt![0, 0, 0]));
        assert!(d.member(&pt![0.6, 0.6, 0]));
        assert!(d.member(&pt![0.5, 0.5, 0]));
        assert!(d.member(&pt![0, 0, 0.1]));
    }

    #[test]
    fn full_membership_is_parent_membership() {
        let d = DenseSubset::full(SimplexM::new(2).unwrap().into());
        assert!(d.member(&pt![0.25, 0.75]));
        assert!(!d.member(&pt![0.25, 0.5]));
    }

    #[test]
    fn constructor_errors() {
        assert!(DenseSubset::rational_grid(unit_square(), 0).is_err());
        let outside = Polytope::new(vec![pt![0.5, 0.5], pt![1.5, 0.5]]).unwrap();
        assert!(DenseSubset::punctured(unit_square(), outside).is_err());
        assert!(DenseSubset::new(unit_square(), DenseKind::SphereInBall).is_err());
    }

    #[test]
    fn samples_are_members() {
        let mut r = rng(7);
        for d in [
            DenseSubset::rational_grid(unit_square(), 1000).unwrap(),
            punctured_ball(),
            DenseSubset::sphere_in_ball(3),
            DenseSubset::full(SimplexM::new(3).unwrap().into()),
        ] {
            for _ in 0..50 {
                let p = d.sample(&mut r).unwrap();
                assert!(d.member(&p), "{} produced {p}", d.label());
                assert!(d.parent().contains(&p, 1e-9));
            }
        }
    }

    #[test]
    fn rational_grid_is_dense_at_scale() {
        // Nearest a/100 is within 1/200 per coordinate, far below eps = 0.02.
        let d = DenseSubset::rational_grid(unit_square(), 100).unwrap();
        let grid = make_grid(d.parent(), 0.1, &Tolerances::default()).unwrap();
        assert!(check_dense(&d, &grid, 0.02, DEFAULT_SEED).unwrap().dense_ok);
    }

    #[test]
    fn full_is_dense() {
        let d = DenseSubset::full(unit_square());
        let grid = make_grid(d.parent(), 0.2, &Tolerances::default()).unwrap();
        assert!(check_dense(&d, &grid, 1e-6, 1).unwrap().dense_ok);
    }

    #[test]
    fn sphere_is_not_dense_in_finite_dimension() {
        let d = DenseSubset::sphere_in_ball(3);
        let grid = make_grid(d.parent(), 0.2, &Tolerances::default()).unwrap();
        let r = check_dense(&d, &grid, 0.1, DEFAULT_SEED).unwrap();
        assert!(!r.dense_ok);
        assert_eq!(r.worst_point, Some(pt![0, 0, 0]));
        assert!((r.worst_distance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rational_grid_segments() {
        let d = DenseSubset::rational_grid(unit_square(), 1000).unwrap();
        let rep = check_self_segment_dense(&d, SsdParams::default()).unwrap();
        assert!(rep.segment_ok, "{:?}", rep.witness);
        assert!(rep.dense_ok);
    }

    #[test]
    fn punctured_pair_fails_and_replays() {
        let d = punctured_ball();
        let pair = (pt![0.6, 0.6, 0], pt![-0.6, -0.6, 0]);
        let rep = check_self_segment_dense_pairs(&d, &[pair], SsdParams::default()).unwrap();
        assert!(!rep.segment_ok);
        let w = rep.witness.unwrap();
        assert!(w.t_lo < 0.5 && w.t_hi > 0.5, "{w:?}");
        assert_eq!(replay_segment_witness(&d, &w), Some((w.t_lo, w.t_hi)));
    }

    #[test]
    fn full_segments_pass() {
        let d = DenseSubset::full(Ball::unit(2).into());
        for seed in 0..5 {
            let rep = check_self_segment_dense(
                &d,
                SsdParams {
                    seed,
                    ..SsdParams::default()
                },
            )
            .unwrap();
            assert!(rep.segment_ok && rep.dense_ok);
        }
    }

    #[test]
    fn hull_closure_examples() {
        let d = DenseSubset::rational_grid(unit_square(), 1000).unwrap();
        let hull = [pt![0.2, 0.25], pt![0.8, 0.4], pt![0.5, 1]];
        assert!(hull_closure_holds(&d, &hull, 0.1, 0.05).unwrap());

        let p = punctured_ball();
        let pair = [pt![0.6, 0.6, 0], pt![-0.6, -0.6, 0]];
        let rep = check_hull_closure(&p, &pair, 0.1, 0.05, DEFAULT_SEED).unwrap();
        assert!(!rep.ok);

        let f = DenseSubset::full(unit_square());
        assert!(hull_closure_holds(&f, &[pt![0, 0], pt![1, 1], pt![1, 0]], 0.1, 0.01).unwrap());
    }

    #[test]
    fn hull_closure_rejects_non_members() {
        let p = punctured_ball();
        assert!(hull_closure_holds(&p, &[pt![0, 0, 0], pt![0.6, 0.6, 0]], 0.1, 0.05).is_err());
    }

    #[test]
    fn weight_rounding() {
        let w = round_weights(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 4);
        assert_eq!(w.iter().sum::<f64>(), 1.0);
        assert_eq!(w, vec![0.5, 0.25, 0.25]);
    }
}
