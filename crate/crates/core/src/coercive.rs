//! Equilibrium problems on closed, possibly unbounded convex sets.
//!
//! `K` is a [`RecessionSet`]: a base polytope plus finitely many recession
//! directions. The solver truncates `K` to `K₀ = K ∩ B̄(0, r₁)`, solves there
//! with [`solve_compact`], then certifies the conclusion at points of `K`
//! outside the truncation. For each outer `y` it places
//! `c = λz₀ + (1 − λ)y` on the sphere `‖c‖ = r₁` and uses convexity of the
//! margin in `y`:
//!
//! `m(x₀, y) ≥ (m(x₀, c) − λ·m(x₀, z₀)) / (1 − λ)`.
//!
//! The margin of every problem kind is convex in `y` under that kind's shape
//! hypothesis, so one inequality serves all six kinds.
//!
//! Weak compactness of closed balls in reflexive spaces is what the
//! coercivity conditions rely on. In ℝⁿ weak and norm topologies coincide,
//! so all validators here are the norm-topology ones.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifunction::{Bifunction, ProblemKind};
use crate::dense_sets::{DenseKind, DenseSubset};
use crate::error::{Error, Result};
use crate::geometry::{make_grid, Point, RecessionSet, Region};
use crate::interval::{contains_zero, leq_zero, ExtInterval};
use crate::rng;
use crate::solver::{solve_compact, EquilibriumProblem, SolveConfig, SolveReport, SolveStatus};
use crate::validators::{Status, ValidationVerdict, Witness};

const MEMBER_TOL: f64 = 1e-9;
const REJECTION_FACTOR: usize = 100;

/// Which coercivity condition is supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoercivityMode {
    /// A compact `K₀ = B̄(0, r)` holding `y₀` with `m(x, y₀) < 0` outside it.
    CompactSet,
    /// `y₀ ∈ D`, `‖y₀‖ ≤ r`, and `m(x, y₀) < 0` for all `‖x‖ > r`.
    RadiusWitness,
    /// For all `‖x‖ > r` some `y₀ ∈ K` with `‖y₀‖ < ‖x‖` has `m(x, y₀) ≤ 0`.
    ShrinkingWitness,
    /// For all `‖x‖ ≤ r`, `{0} ⊆ F(x, y₀)` with `y₀ ∈ D`, `‖y₀‖ < r`.
    ZeroWitness,
    /// For all `‖x‖ ≤ r`, `F(x, y₀) ≤ 0`.
    LeqWitness,
    /// For all `‖x‖ ≤ r`, `φ(x, y₀) = 0`.
    ScalarZeroWitness,
}

impl CoercivityMode {
    pub const ALL: [CoercivityMode; 6] = [
        CoercivityMode::CompactSet,
        CoercivityMode::RadiusWitness,
        CoercivityMode::ShrinkingWitness,
        CoercivityMode::ZeroWitness,
        CoercivityMode::LeqWitness,
        CoercivityMode::ScalarZeroWitness,
    ];

    /// Whether the condition quantifies over `‖x‖ ≤ r` rather than `‖x‖ > r`.
    pub fn is_inner(self) -> bool {
        matches!(
            self,
            CoercivityMode::ZeroWitness | CoercivityMode::LeqWitness | CoercivityMode::ScalarZeroWitness
        )
    }

    pub fn needs_y0(self) -> bool {
        self != CoercivityMode::ShrinkingWitness
    }

    /// The hypothesis set the mode pairs with.
    pub fn hypothesis_set(self) -> &'static str {
        match self {
            CoercivityMode::CompactSet | CoercivityMode::RadiusWitness => {
                "compact-domain hypotheses, shape in y on D"
            }
            CoercivityMode::ShrinkingWitness => "shape in y on all of K, {0} in F(x, x)",
            CoercivityMode::ZeroWitness | CoercivityMode::LeqWitness | CoercivityMode::ScalarZeroWitness => {
                "shape in y on D, diagonal on D"
            }
        }
    }

    /// The mode's condition on `F(x, y₀)`.
    pub fn holds(self, kind: ProblemKind, v: &ExtInterval, tol: f64) -> bool {
        match self {
            CoercivityMode::CompactSet | CoercivityMode::RadiusWitness => kind.margin(v) < 0.0,
            CoercivityMode::ShrinkingWitness => kind.margin(v) <= tol,
            CoercivityMode::ZeroWitness | CoercivityMode::ScalarZeroWitness => contains_zero(v, tol),
            CoercivityMode::LeqWitness => leq_zero(v, tol),
        }
    }
}

fn default_probes() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivitySpec {
    pub mode: CoercivityMode,
    pub r: f64,
    #[serde(default)]
    pub y0: Option<Point>,
    /// Truncation radius, strictly larger than `r`.
    pub r1: f64,
    /// Recession-direction probes used by the extension certificate.
    #[serde(default = "default_probes")]
    pub probes: usize,
}

impl CoercivitySpec {
    pub fn new(mode: CoercivityMode, r: f64, y0: Option<Point>, r1: f64) -> Result<Self> {
        let spec = Self {
            mode,
            r,
            y0,
            r1,
            probes: default_probes(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if !(self.r > 0.0) || !self.r.is_finite() {
            return bad("r", format!("must be positive, got {}", self.r));
        }
        if !(self.r1 > self.r) || !self.r1.is_finite() {
            return bad("r1", format!("must exceed r = {}, got {}", self.r, self.r1));
        }
        match &self.y0 {
            None if self.mode.needs_y0() => bad("y0", format!("{:?} needs a witness point", self.mode)),
            Some(y0) if y0.norm() > self.r + MEMBER_TOL => {
                bad("y0", format!("‖y0‖ = {} exceeds r = {}", y0.norm(), self.r))
            }
            Some(y0) if self.mode.is_inner() && y0.norm() >= self.r => {
                bad("y0", format!("{:?} needs ‖y0‖ < r", self.mode))
            }
            _ => Ok(()),
        }
    }

    pub fn with_r1(&self, r1: f64) -> Result<Self> {
        let spec = Self { r1, ..self.clone() };
        spec.validate()?;
        Ok(spec)
    }
}

/// An equilibrium problem over a closed convex `K = co(base) + cone(dirs)`.
#[derive(Debug, Clone)]
pub struct NoncompactProblem {
    k: RecessionSet,
    d: DenseKind,
    f: Bifunction,
    kind: ProblemKind,
}

impl NoncompactProblem {
    pub fn new(k: RecessionSet, d: DenseKind, f: Bifunction, kind: ProblemKind) -> Result<Self> {
        let p = Self { k, d, f, kind };
        p.truncate(1.0)?;
        Ok(p)
    }

    pub fn k(&self) -> &RecessionSet {
        &self.k
    }

    pub fn d_kind(&self) -> &DenseKind {
        &self.d
    }

    pub fn f(&self) -> &Bifunction {
        &self.f
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// `D` described over the truncation `K ∩ B̄(0, radius)`.
    pub fn d_at(&self, radius: f64) -> Result<DenseSubset> {
        DenseSubset::new(self.region_at(radius), self.d.clone())
    }

    fn region_at(&self, radius: f64) -> Region {
        if self.k.is_bounded() {
            Region::Polytope(self.k.base.clone())
        } else {
            Region::Truncated {
                set: self.k.clone(),
                radius,
            }
        }
    }

    /// The compact problem on `K ∩ B̄(0, radius)`, or on `K` itself when `K`
    /// is bounded.
    pub fn truncate(&self, radius: f64) -> Result<EquilibriumProblem> {
        let region = self.region_at(radius);
        EquilibriumProblem::new(
            region.clone(),
            self.d_at(radius)?,
            self.f.with_domain(region),
            self.kind,
        )
    }
}

/// Coercivity condition of `spec` checked at sampled points of `K`.
///
/// Outer modes sample `‖x‖ > r` by rejection from base plus recession
/// combinations; inner modes sample `K ∩ B̄(0, r)`. `ShrinkingWitness`
/// searches `y₀` among shrunken copies of `x` and a lattice of
/// `K ∩ B̄(0, ‖x‖)`.
pub fn check_coercivity(
    f: &Bifunction,
    k: &RecessionSet,
    d: &DenseSubset,
    kind: ProblemKind,
    spec: &CoercivitySpec,
    outer_samples: usize,
    seed: u64,
) -> Result<ValidationVerdict> {
    spec.validate()?;
    let condition = format!("{:?} coercivity", spec.mode);
    let scale = format!("r={}, samples={outer_samples}, seed={seed}", spec.r);
    if spec.mode == CoercivityMode::ScalarZeroWitness && !f.is_scalar() {
        return Err(Error::InvalidParameter {
            name: "mode",
            reason: "scalar-zero witness needs a scalar bifunction".into(),
        });
    }
    if let Some(y0) = &spec.y0 {
        y0.check_dim(k.dim())?;
        if !d.member(y0) {
            return Ok(ValidationVerdict::new(condition, Status::Fail, scale)
                .with_detail(format!("y0 = {y0} is not a member of D")));
        }
    }
    let base_radius = k
        .base
        .vertices()
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    if !spec.mode.is_inner() && k.is_bounded() && base_radius <= spec.r {
        return Ok(ValidationVerdict::new(condition, Status::Pass, scale)
            .with_detail("vacuous: K is bounded and lies in the closed r-ball"));
    }

    let mut g = rng(seed);
    let mut xs = Vec::with_capacity(outer_samples);
    let budget = REJECTION_FACTOR * outer_samples.max(1);
    let inner = Region::Truncated {
        set: k.clone(),
        radius: spec.r,
    };
    for _ in 0..budget {
        if xs.len() == outer_samples {
            break;
        }
        let x = if spec.mode.is_inner() {
            inner.sample(&mut g)?
        } else {
            let scale = 4.0 * spec.r.max(base_radius);
            let x = k.sample_with_scale(g.gen::<f64>() * scale, &mut g);
            if x.norm() <= spec.r {
                continue;
            }
            x
        };
        xs.push(x);
    }
    if xs.len() < outer_samples {
        return Err(Error::SamplerExhausted {
            attempts: budget,
            context: format!("{:?} coercivity samples", spec.mode),
        });
    }

    let tol = crate::config::CERT_TOL;
    let results: Vec<Option<(Point, ExtInterval)>> = xs
        .par_iter()
        .map(|x| match (&spec.y0, spec.mode) {
            (_, CoercivityMode::ShrinkingWitness) => {
                shrinking_witness(f, k, kind, x, spec.y0.as_ref(), tol)
                    .map_or_else(|| Some((x.clone(), f.eval(x, x))), |_| None)
            }
            (Some(y0), mode) => {
                let v = f.eval(x, y0);
                (!mode.holds(kind, &v, tol)).then(|| (x.clone(), v))
            }
            (None, _) => unreachable!("validated above"),
        })
        .collect();
    let failures = results.iter().filter(|r| r.is_some()).count();
    let verdict = match results.into_iter().flatten().next() {
        None => ValidationVerdict::new(condition, Status::Pass, scale)
            .with_detail(format!("{outer_samples} sampled points satisfy the condition")),
        Some((x, v)) => {
            let mut points = vec![x];
            points.extend(spec.y0.clone());
            ValidationVerdict::new(condition, Status::Fail, scale)
                .with_detail(format!("{failures} of {outer_samples} sampled points violate the condition"))
                .with_witness(Witness {
                    points,
                    weights: Vec::new(),
                    violation: kind.margin(&v),
                    values: vec![v],
                })
        }
    };
    Ok(verdict)
}

/// First `y₀ ∈ K` with `‖y₀‖ < ‖x‖` and `m(x, y₀) ≤ tol`.
fn shrinking_witness(
    f: &Bifunction,
    k: &RecessionSet,
    kind: ProblemKind,
    x: &Point,
    hint: Option<&Point>,
    tol: f64,
) -> Option<Point> {
    let nx = x.norm();
    let ok = |y: &Point| y.norm() < nx && kind.margin(&f.eval(x, y)) <= tol;
    if let Some(y) = hint.filter(|y| ok(y)) {
        return Some(y.clone());
    }
    let b = k.base.barycenter();
    for t in [0.0, 0.25, 0.5, 0.75, 0.875] {
        let y = b.lerp(x, t);
        if k.contains(&y, MEMBER_TOL) && ok(&y) {
            return Some(y);
        }
    }
    let region = Region::Truncated {
        set: k.clone(),
        radius: nx,
    };
    let grid = make_grid(&region, nx / 4.0, &crate::Tolerances::default()).ok()?;
    grid.points.into_iter().find(|y| ok(y))
}

/// One outer point `y` and its shell combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateLine {
    pub y: Point,
    pub lambda: f64,
    /// `λz₀ + (1 − λ)y`, on the sphere of radius `r₁`.
    pub combination: Point,
    /// `m(x₀, combination)`.
    pub margin: f64,
    /// Lower bound on `m(x₀, y)` implied by convexity of the margin.
    pub implied: f64,
    /// `m(x₀, y)` evaluated directly.
    pub direct: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCertificate {
    pub mode: CoercivityMode,
    pub hypothesis_set: String,
    pub z0: Option<Point>,
    /// `m(x₀, z₀)`.
    pub z0_margin: f64,
    pub r1: f64,
    pub tol: f64,
    pub lines: Vec<CertificateLine>,
}

impl ExtensionCertificate {
    fn empty(spec: &CoercivitySpec, tol: f64) -> Self {
        Self {
            mode: spec.mode,
            hypothesis_set: spec.mode.hypothesis_set().to_string(),
            z0: None,
            z0_margin: f64::NAN,
            r1: spec.r1,
            tol,
            lines: Vec::new(),
        }
    }

    pub fn all_ok(&self) -> bool {
        self.lines.iter().all(|l| l.ok)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoncompactReport {
    pub report: SolveReport,
    pub certificate: ExtensionCertificate,
    /// `None` when `K` is bounded and the compact solver ran alone.
    pub coercivity: Option<ValidationVerdict>,
}

/// `λ` with `‖λz₀ + (1 − λ)y‖ = r₁`, for `‖z₀‖ < r₁ < ‖y‖`.
pub fn shell_lambda(z0: &Point, y: &Point, r1: f64) -> f64 {
    let d = y.sub(z0);
    let a = d.dot(&d);
    let b = z0.dot(&d);
    let c = z0.dot(z0) - r1 * r1;
    let mu = (-b + (b * b - a * c).sqrt()) / a;
    1.0 - mu
}

pub fn shell_point(z0: &Point, y: &Point, lambda: f64) -> Point {
    z0.lerp(y, 1.0 - lambda)
}

fn implied_bound(margin_c: f64, z0_margin: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        margin_c
    } else {
        (margin_c - lambda * z0_margin) / (1.0 - lambda)
    }
}

fn line_ok(margin_c: f64, implied: f64, lambda: f64, tol: f64) -> bool {
    margin_c >= -tol && implied >= -tol / (1.0 - lambda)
}

/// Recomputes a line from `(y, λ, z₀)`. Returns whether the stored
/// combination, margin and implied bound agree to `1e-12`.
pub fn recheck_line(
    f: &Bifunction,
    kind: ProblemKind,
    x0: &Point,
    cert: &ExtensionCertificate,
    line: &CertificateLine,
) -> bool {
    let Some(z0) = &cert.z0 else {
        return false;
    };
    let c = shell_point(z0, &line.y, line.lambda);
    let m = f.margin(kind, x0, &c);
    let implied = implied_bound(m, cert.z0_margin, line.lambda);
    let close = |a: f64, b: f64| a == b || (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
    c.dist_inf(&line.combination) <= 1e-12
        && close(m, line.margin)
        && close(implied, line.implied)
        && (c.norm() - cert.r1).abs() <= 1e-9
        && line_ok(m, implied, line.lambda, cert.tol) == line.ok
}

/// Outer points of `K`: the lattice of `K ∩ B̄(0, 3r₁)` beyond `r₁`, then
/// recession probes at radii `r₁·2^{1..4}`.
fn outer_points(k: &RecessionSet, spec: &CoercivitySpec, cfg: &SolveConfig) -> Result<Vec<Point>> {
    let shell = Region::Truncated {
        set: k.clone(),
        radius: 3.0 * spec.r1,
    };
    let mut out: Vec<Point> = make_grid(&shell, cfg.k_res, &cfg.tolerances)?
        .points
        .into_iter()
        .filter(|y| y.norm() > spec.r1 + MEMBER_TOL)
        .collect();
    let mut g = rng(cfg.seed);
    let b = k.base.barycenter();
    for i in 0..spec.probes {
        let mut dir = Point::zeros(k.dim());
        for d in &k.directions {
            dir = dir.add(&d.scale(g.gen::<f64>()));
        }
        let n = dir.norm();
        if n == 0.0 {
            continue;
        }
        let radius = spec.r1 * f64::powi(2.0, 1 + (i % 4) as i32);
        let y = b.add(&dir.scale(radius / n));
        if y.norm() > spec.r1 + MEMBER_TOL {
            out.push(y);
        }
    }
    Ok(out)
}

fn probe_order(a: &Point, b: &Point) -> std::cmp::Ordering {
    let da = a.scale(1.0 / a.norm());
    let db = b.scale(1.0 / b.norm());
    da.lex_cmp(&db).then(a.norm().total_cmp(&b.norm()))
}

/// Solves on `K ∩ B̄(0, r₁)` and certifies the conclusion at outer points.
///
/// Bounded `K` delegates to [`solve_compact`] with an empty certificate.
/// A failed `z₀` condition or certificate line turns `Found` into
/// `ExtensionFailed`.
pub fn solve_noncompact(p: &NoncompactProblem, spec: &CoercivitySpec, cfg: &SolveConfig) -> Result<NoncompactReport> {
    spec.validate()?;
    let tol = cfg.tol;
    if p.k.is_bounded() {
        let report = solve_compact(&p.truncate(spec.r1)?, cfg)?;
        return Ok(NoncompactReport {
            report,
            certificate: ExtensionCertificate::empty(spec, tol),
            coercivity: None,
        });
    }
    let coercivity = check_coercivity(&p.f, &p.k, &p.d_at(spec.r1)?, p.kind, spec, 64, cfg.seed)?;
    let truncated = p.truncate(spec.r1)?;
    let mut report = solve_compact(&truncated, cfg)?;
    let mut certificate = ExtensionCertificate::empty(spec, tol);
    let SolveStatus::Found { x0, residual, d_margin } = report.status.clone() else {
        return Ok(NoncompactReport {
            report,
            certificate,
            coercivity: Some(coercivity),
        });
    };

    let z0 = match select_z0(p, spec, &x0, tol) {
        Ok(z0) => z0,
        Err((y, violation)) => {
            report.status = SolveStatus::ExtensionFailed {
                x0,
                d_margin,
                y,
                residual: violation,
            };
            return Ok(NoncompactReport {
                report,
                certificate,
                coercivity: Some(coercivity),
            });
        }
    };
    let z0_margin = p.f.margin(p.kind, &x0, &z0);
    let mut ys = outer_points(&p.k, spec, cfg)?;
    ys.sort_by(probe_order);
    let lines: Vec<CertificateLine> = ys
        .into_par_iter()
        .map(|y| {
            let lambda = shell_lambda(&z0, &y, spec.r1);
            let combination = shell_point(&z0, &y, lambda);
            let margin = p.f.margin(p.kind, &x0, &combination);
            let implied = implied_bound(margin, z0_margin, lambda);
            let direct = p.f.margin(p.kind, &x0, &y);
            CertificateLine {
                ok: line_ok(margin, implied, lambda, tol),
                y,
                lambda,
                combination,
                margin,
                implied,
                direct,
            }
        })
        .collect();
    certificate.z0 = Some(z0);
    certificate.z0_margin = z0_margin;
    certificate.lines = lines;
    if let Some(bad) = certificate.lines.iter().find(|l| !l.ok) {
        report.status = SolveStatus::ExtensionFailed {
            x0,
            d_margin,
            y: bad.y.clone(),
            residual: bad.implied.min(residual),
        };
    }
    Ok(NoncompactReport {
        report,
        certificate,
        coercivity: Some(coercivity),
    })
}

/// `z₀` with `‖z₀‖ < r₁` for the shell argument. On failure returns the
/// offending point and its margin.
fn select_z0(p: &NoncompactProblem, spec: &CoercivitySpec, x0: &Point, tol: f64) -> std::result::Result<Point, (Point, f64)> {
    let inner = x0.norm() < spec.r1 - MEMBER_TOL;
    match spec.mode {
        CoercivityMode::CompactSet | CoercivityMode::RadiusWitness => Ok(if inner {
            x0.clone()
        } else {
            spec.y0.clone().expect("validated")
        }),
        CoercivityMode::ShrinkingWitness => {
            if inner {
                return Ok(x0.clone());
            }
            shrinking_witness(&p.f, &p.k, p.kind, x0, spec.y0.as_ref(), tol)
                .ok_or_else(|| (x0.clone(), p.f.margin(p.kind, x0, x0)))
        }
        mode => {
            let y0 = spec.y0.clone().expect("validated");
            let v = p.f.eval(x0, &y0);
            if mode.holds(p.kind, &v, tol) {
                Ok(y0)
            } else {
                let violation = match mode {
                    CoercivityMode::LeqWitness => -v.hi(),
                    _ if v.lo() > 0.0 => -v.lo(),
                    _ => v.hi(),
                };
                Err((y0, violation))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifunction::library;
    use crate::pt;

    fn orthant_problem(kind: ProblemKind) -> NoncompactProblem {
        let k = RecessionSet::orthant(2);
        let f = if kind.is_scalar() {
            library::sq_norm_gap_scalar(Region::Truncated { set: k.clone(), radius: 1.0 })
        } else {
            library::sq_norm_gap(Region::Truncated { set: k.clone(), radius: 1.0 })
        };
        NoncompactProblem::new(k, DenseKind::Full, f, kind).unwrap()
    }

    #[test]
    fn zero_witness_found_at_origin() {
        let p = orthant_problem(ProblemKind::StrongGeq);
        let spec = CoercivitySpec::new(CoercivityMode::ZeroWitness, 1.0, Some(pt![0, 0]), 2.0).unwrap();
        let out = solve_noncompact(&p, &spec, &SolveConfig::with_res(0.25)).unwrap();
        assert!(out.report.status.is_found(), "{:?}", out.report.status);
        assert_eq!(out.report.status.point(), &pt![0, 0]);
        let cert = &out.certificate;
        assert!(!cert.lines.is_empty());
        assert!(cert.all_ok());
        for l in &cert.lines {
            assert!(recheck_line(p.f(), p.kind(), &pt![0, 0], cert, l));
            assert!((l.combination.norm() - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn misplaced_witness_fails_extension() {
        let p = orthant_problem(ProblemKind::StrongGeq);
        let spec = CoercivitySpec::new(CoercivityMode::ZeroWitness, 1.0, Some(pt![0.5, 0.5]), 2.0).unwrap();
        let out = solve_noncompact(&p, &spec, &SolveConfig::with_res(0.25)).unwrap();
        match &out.report.status {
            SolveStatus::ExtensionFailed { y, residual, .. } => {
                assert_eq!(y, &pt![0.5, 0.5]);
                assert!((residual + 0.5).abs() < 1e-12);
            }
            s => panic!("unexpected {s:?}"),
        }
    }

    #[test]
    fn compact_set_coercivity() {
        let k = RecessionSet::orthant(2);
        let d = DenseSubset::full(Region::Truncated { set: k.clone(), radius: 2.0 });
        let spec = CoercivitySpec::new(CoercivityMode::CompactSet, 1.0, Some(pt![0, 0]), 2.0).unwrap();
        let f = library::sq_norm_gap(d.parent().clone());
        let v = check_coercivity(&f, &k, &d, ProblemKind::StrongGeq, &spec, 64, 1).unwrap();
        assert!(v.is_pass(), "{v:?}");
        let phi = library::sq_norm_gap_scalar(d.parent().clone());
        let v = check_coercivity(&phi, &k, &d, ProblemKind::ScalarGeq, &spec, 64, 1).unwrap();
        assert!(v.is_pass(), "{v:?}");
        let c = library::constant(d.parent().clone(), ExtInterval::point(1.0));
        let v = check_coercivity(&c, &k, &d, ProblemKind::StrongGeq, &spec, 64, 1).unwrap();
        assert!(v.is_fail());
    }

    #[test]
    fn shell_lambda_hits_sphere() {
        let z0 = pt![0.1, 0.2];
        for y in [pt![3, 0], pt![5, 7], pt![0, 2.5]] {
            let l = shell_lambda(&z0, &y, 2.0);
            assert!((0.0..1.0).contains(&l));
            assert!((shell_point(&z0, &y, l).norm() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(CoercivitySpec::new(CoercivityMode::ZeroWitness, 1.0, None, 2.0).is_err());
        assert!(CoercivitySpec::new(CoercivityMode::ZeroWitness, 1.0, Some(pt![0, 0]), 1.0).is_err());
        assert!(CoercivitySpec::new(CoercivityMode::ZeroWitness, 1.0, Some(pt![1, 0]), 2.0).is_err());
        assert!(CoercivitySpec::new(CoercivityMode::ShrinkingWitness, 1.0, None, 2.0).is_ok());
    }
}
