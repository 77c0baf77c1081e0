//! Convex sets: V-polytopes, the price simplex, Euclidean balls, products,
//! and unbounded sets given by a base polytope plus recession directions.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::lp::{LinearProgram, LpOutcome};
use super::point::{dot, lex_cmp, Point};
use crate::error::{Error, Result};
use crate::Rng;

/// Convex hull of a finite vertex list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polytope {
    vertices: Vec<Point>,
}

impl Polytope {
    /// Deduplicates vertices (tolerance 1e-12) and stores them in
    /// lexicographic order.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        Self::with_dedup(vertices, 1e-12)
    }

    pub fn with_dedup(mut vertices: Vec<Point>, dedup: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Empty("polytope vertices"));
        }
        let dim = vertices[0].dim();
        for v in &vertices {
            v.check_dim(dim)?;
        }
        vertices.sort_by(|a, b| a.lex_cmp(b));
        let mut kept: Vec<Point> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !kept.iter().any(|k| k.dist_inf(&v) <= dedup) {
                kept.push(v);
            }
        }
        Ok(Self { vertices: kept })
    }

    /// The axis-aligned box `∏ [lo_i, hi_i]`.
    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidParameter {
                name: "box bounds",
                reason: "bounds must be nonempty and of equal length".into(),
            });
        }
        let n = lo.len();
        let mut vertices = Vec::with_capacity(1 << n);
        for mask in 0..(1usize << n) {
            let c = (0..n)
                .map(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] })
                .collect();
            vertices.push(Point::new(c)?);
        }
        Self::new(vertices)
    }

    /// `[-1, 1]ⁿ` scaled by `half_width`.
    pub fn cube(n: usize, half_width: f64) -> Result<Self> {
        Self::boxed(&vec![-half_width; n], &vec![half_width; n])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    pub fn barycenter(&self) -> Point {
        let w = 1.0 / self.vertices.len() as f64;
        let mut c = vec![0.0; self.dim()];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v.iter()) {
                *ci += w * vi;
            }
        }
        Point::from_vec(c)
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        hull_membership(p, &self.vertices, tol).unwrap_or(false)
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        bbox(&self.vertices)
    }
}

/// The price simplex `Mⁿ = { x ∈ ℝⁿ₊ : Σ xᵢ = 1 }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexM {
    pub n: usize,
}

impl SimplexM {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "simplex needs at least one coordinate".into(),
            });
        }
        Ok(Self { n })
    }

    /// Membership with the fixed 1e-12 tolerance used for price vectors.
    pub fn contains(&self, p: &Point) -> bool {
        self.contains_tol(p, 1e-12)
    }

    pub fn contains_tol(&self, p: &Point, tol: f64) -> bool {
        p.dim() == self.n
            && p.iter().all(|&c| c >= -tol)
            && (p.iter().sum::<f64>() - 1.0).abs() <= tol
    }

    pub fn vertices(&self) -> Vec<Point> {
        (0..self.n)
            .map(|i| {
                let mut c = vec![0.0; self.n];
                c[i] = 1.0;
                Point::from_vec(c)
            })
            .collect()
    }

    pub fn barycenter(&self) -> Point {
        Point::from_vec(vec![1.0 / self.n as f64; self.n])
    }
}

/// Closed Euclidean ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter {
                name: "radius",
                reason: format!("must be positive and finite, got {radius}"),
            });
        }
        Ok(Self { center, radius })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            center: Point::zeros(n),
            radius: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        p.dim() == self.dim() && p.dist(&self.center) <= self.radius + tol
    }
}

/// Closed convex set `co(base) + cone(directions)`, possibly unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecessionSet {
    pub base: Polytope,
    pub directions: Vec<Point>,
}

impl RecessionSet {
    pub fn new(base: Polytope, directions: Vec<Point>) -> Result<Self> {
        let dim = base.dim();
        for d in &directions {
            d.check_dim(dim)?;
        }
        let directions = directions.into_iter().filter(|d| d.norm() > 0.0).collect();
        Ok(Self { base, directions })
    }

    /// The nonnegative orthant ℝⁿ₊.
    pub fn orthant(n: usize) -> Self {
        let base = Polytope::new(vec![Point::zeros(n)]).expect("origin");
        let directions = (0..n)
            .map(|i| {
                let mut c = vec![0.0; n];
                c[i] = 1.0;
                Point::from_vec(c)
            })
            .collect();
        Self { base, directions }
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn is_bounded(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        matches!(
            min_residual_inf(p, self.base.vertices(), &self.directions, tol),
            Some((r, _)) if r <= tol
        )
    }

    /// Points `b + Σ μⱼ dⱼ` with `b` a random base combination.
    pub fn sample_with_scale(&self, scale: f64, rng: &mut Rng) -> Point {
        let mut p = dirichlet_combination(self.base.vertices(), rng);
        for d in &self.directions {
            let mu = rng.gen::<f64>() * scale;
            p = p.add(&d.scale(mu));
        }
        p
    }
}

/// Any bounded region a grid, sampler or dense subset can live on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Polytope(Polytope),
    Simplex(SimplexM),
    Ball(Ball),
    /// `K ∩ B̄(0, radius)` for a possibly unbounded `K`.
    Truncated { set: RecessionSet, radius: f64 },
    /// Cartesian product; coordinates are concatenated in factor order.
    Product(Vec<Region>),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Polytope(p) => p.dim(),
            Region::Simplex(s) => s.n,
            Region::Ball(b) => b.dim(),
            Region::Truncated { set, .. } => set.dim(),
            Region::Product(fs) => fs.iter().map(Region::dim).sum(),
        }
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        if p.dim() != self.dim() {
            return false;
        }
        match self {
            Region::Polytope(poly) => {
                let (lo, hi) = poly.bounding_box();
                in_box(p, &lo, &hi, tol) && poly.contains(p, tol)
            }
            Region::Simplex(s) => s.contains_tol(p, tol),
            Region::Ball(b) => b.contains(p, tol),
            Region::Truncated { set, radius } => p.norm() <= radius + tol && set.contains(p, tol),
            Region::Product(fs) => self
                .split(p)
                .iter()
                .zip(fs)
                .all(|(block, f)| f.contains(block, tol)),
        }
    }

    /// Splits a product point into factor blocks (a single block otherwise).
    pub fn split(&self, p: &Point) -> Vec<Point> {
        match self {
            Region::Product(fs) => {
                let mut out = Vec::with_capacity(fs.len());
                let mut at = 0;
                for f in fs {
                    let d = f.dim();
                    out.push(Point::from_vec(p.coords()[at..at + d].to_vec()));
                    at += d;
                }
                out
            }
            _ => vec![p.clone()],
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Region::Polytope(p) => p.bounding_box(),
            Region::Simplex(s) => (vec![0.0; s.n], vec![1.0; s.n]),
            Region::Ball(b) => (
                b.center.iter().map(|c| c - b.radius).collect(),
                b.center.iter().map(|c| c + b.radius).collect(),
            ),
            Region::Truncated { set, radius } => {
                let (blo, bhi) = set.base.bounding_box();
                let n = set.dim();
                let mut lo = vec![-radius; n];
                let mut hi = vec![*radius; n];
                for i in 0..n {
                    if set.directions.iter().all(|d| d[i] >= 0.0) {
                        lo[i] = blo[i].max(-radius);
                    }
                    if set.directions.iter().all(|d| d[i] <= 0.0) {
                        hi[i] = bhi[i].min(*radius);
                    }
                }
                (lo, hi)
            }
            Region::Product(fs) => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for f in fs {
                    let (l, h) = f.bounding_box();
                    lo.extend(l);
                    hi.extend(h);
                }
                (lo, hi)
            }
        }
    }

    /// A point guaranteed to be in the region.
    pub fn center(&self) -> Point {
        match self {
            Region::Polytope(p) => p.barycenter(),
            Region::Simplex(s) => s.barycenter(),
            Region::Ball(b) => b.center.clone(),
            Region::Truncated { set, radius } => {
                let c = set.base.barycenter();
                let n = c.norm();
                if n <= *radius {
                    c
                } else {
                    // Radial shrink is only valid when the origin lies in K; fall
                    // back to the nearest base vertex otherwise.
                    set.base
                        .vertices()
                        .iter()
                        .min_by(|a, b| a.norm().total_cmp(&b.norm()))
                        .cloned()
                        .unwrap_or(c)
                }
            }
            Region::Product(fs) => {
                Point::from_vec(fs.iter().flat_map(|f| f.center().into_vec()).collect())
            }
        }
    }

    /// Draws a random point of the region (uniform for balls and simplices,
    /// Dirichlet vertex weights for polytopes).
    pub fn sample(&self, rng: &mut Rng) -> Result<Point> {
        match self {
            Region::Polytope(p) => Ok(dirichlet_combination(p.vertices(), rng)),
            Region::Simplex(s) => Ok(dirichlet_combination(&s.vertices(), rng)),
            Region::Ball(b) => {
                let n = b.dim();
                for _ in 0..10_000 {
                    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    if dot(&c, &c) <= 1.0 {
                        let p = Point::from_vec(c).scale(b.radius).add(&b.center);
                        return Ok(p);
                    }
                }
                Err(Error::SamplerExhausted {
                    attempts: 10_000,
                    context: "ball rejection".into(),
                })
            }
            Region::Truncated { set, radius } => {
                for _ in 0..10_000 {
                    let p = set.sample_with_scale(*radius, rng);
                    if p.norm() <= *radius {
                        return Ok(p);
                    }
                }
                Err(Error::SamplerExhausted {
                    attempts: 10_000,
                    context: "truncated recession set".into(),
                })
            }
            Region::Product(fs) => {
                let mut c = Vec::with_capacity(self.dim());
                for f in fs {
                    c.extend(f.sample(rng)?.into_vec());
                }
                Ok(Point::from_vec(c))
            }
        }
    }
}

impl From<Polytope> for Region {
    fn from(p: Polytope) -> Self {
        Region::Polytope(p)
    }
}

impl From<SimplexM> for Region {
    fn from(s: SimplexM) -> Self {
        Region::Simplex(s)
    }
}

impl From<Ball> for Region {
    fn from(b: Ball) -> Self {
        Region::Ball(b)
    }
}

pub(crate) fn dirichlet_combination(vertices: &[Point], rng: &mut Rng) -> Point {
    let w: Vec<f64> = vertices
        .iter()
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let s: f64 = w.iter().sum();
    let mut c = vec![0.0; vertices[0].dim()];
    for (v, wi) in vertices.iter().zip(&w) {
        for (ci, vi) in c.iter_mut().zip(v.iter()) {
            *ci += wi / s * vi;
        }
    }
    Point::from_vec(c)
}

fn bbox(points: &[Point]) -> (Vec<f64>, Vec<f64>) {
    let n = points[0].dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for p in points {
        for i in 0..n {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    (lo, hi)
}

fn in_box(p: &Point, lo: &[f64], hi: &[f64], tol: f64) -> bool {
    p.iter()
        .zip(lo.iter().zip(hi))
        .all(|(c, (l, h))| *c >= l - tol && *c <= h + tol)
}

/// Minimizes `‖Σ λᵢ vᵢ + Σ μⱼ dⱼ − p‖∞` over `λ ≥ 0, Σλ = 1, μ ≥ 0`.
///
/// Returns the optimal residual and the weights `(λ, μ)` concatenated.
pub(crate) fn min_residual_inf(
    p: &Point,
    vertices: &[Point],
    rays: &[Point],
    lp_tol: f64,
) -> Option<(f64, Vec<f64>)> {
    let n = p.dim();
    let m = vertices.len();
    let r = rays.len();
    // Variables: λ (m), μ (r), t, s⁺ (n), s⁻ (n).
    let nv = m + r + 1 + 2 * n;
    let t_col = m + r;
    let mut lp = LinearProgram::new(nv);
    lp.cost[t_col] = 1.0;
    for k in 0..n {
        // Σλv + Σμd − t + s⁺ = p
        let mut row = vec![0.0; nv];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = v[k];
        }
        for (j, d) in rays.iter().enumerate() {
            row[m + j] = d[k];
        }
        row[t_col] = -1.0;
        row[t_col + 1 + k] = 1.0;
        lp.add_eq(row, p[k]);
        // −Σλv − Σμd − t + s⁻ = −p
        let mut row = vec![0.0; nv];
        for (j, v) in vertices.iter().enumerate() {
            row[j] = -v[k];
        }
        for (j, d) in rays.iter().enumerate() {
            row[m + j] = -d[k];
        }
        row[t_col] = -1.0;
        row[t_col + 1 + n + k] = 1.0;
        lp.add_eq(row, -p[k]);
    }
    let mut row = vec![0.0; nv];
    row[..m].iter_mut().for_each(|v| *v = 1.0);
    lp.add_eq(row, 1.0);
    match lp.solve(lp_tol) {
        LpOutcome::Optimal { x, objective } => Some((objective, x[..m + r].to_vec())),
        _ => None,
    }
}

/// Decides `p ∈ co(vertices)` up to an ∞-norm residual of `tol` with a
/// phase-1 feasibility program.
pub fn hull_membership(p: &Point, vertices: &[Point], tol: f64) -> Result<bool> {
    Ok(hull_weights(p, vertices, tol)?.is_some())
}

/// Convex weights reproducing `p` within `tol`, if any exist.
pub fn hull_weights(p: &Point, vertices: &[Point], tol: f64) -> Result<Option<Vec<f64>>> {
    if vertices.is_empty() {
        return Err(Error::Empty("hull vertices"));
    }
    for v in vertices {
        v.check_dim(p.dim())?;
    }
    if vertices.len() == 1 {
        return Ok((p.dist_inf(&vertices[0]) <= tol).then(|| vec![1.0]));
    }
    Ok(match min_residual_inf(p, vertices, &[], tol.min(1e-9)) {
        Some((r, w)) if r <= tol => Some(w),
        _ => None,
    })
}

/// Largest `δ` such that `p = Σ λᵢ vᵢ` with every `λᵢ ≥ δ`; positive exactly
/// on the relative interior of the hull. `None` when `p` is outside the hull.
pub fn relative_interior_margin(p: &Point, vertices: &[Point], tol: f64) -> Option<f64> {
    let n = p.dim();
    let m = vertices.len();
    // λᵢ = δ + νᵢ with ν ≥ 0. Variables: δ, ν (m).
    let nv = 1 + m;
    let mut lp = LinearProgram::new(nv);
    lp.cost[0] = -1.0;
    for k in 0..n {
        let mut row = vec![0.0; nv];
        row[0] = vertices.iter().map(|v| v[k]).sum();
        for (j, v) in vertices.iter().enumerate() {
            row[1 + j] = v[k];
        }
        lp.add_eq(row, p[k]);
    }
    let mut row = vec![1.0; nv];
    row[0] = m as f64;
    lp.add_eq(row, 1.0);
    match lp.solve(tol) {
        LpOutcome::Optimal { objective, .. } => Some(-objective),
        _ => None,
    }
}

/// `σ(co V, y) = max_v ⟨v, y⟩`.
pub fn support_function(vertices: &[Point], y: &Point) -> Result<f64> {
    let first = vertices.first().ok_or(Error::Empty("support vertices"))?;
    first.check_dim(y.dim())?;
    let mut best = f64::NEG_INFINITY;
    for v in vertices {
        v.check_dim(y.dim())?;
        best = best.max(v.dot(y));
    }
    Ok(best)
}

/// Lexicographically smallest vertex attaining the support function.
pub fn support_point<'a>(vertices: &'a [Point], y: &Point) -> Option<&'a Point> {
    let sigma = support_function(vertices, y).ok()?;
    vertices
        .iter()
        .filter(|v| v.dot(y) == sigma)
        .min_by(|a, b| lex_cmp(a, b))
}
