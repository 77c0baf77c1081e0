//! Interval-valued bifunctions `F : K × K ⇉ ℝ`, the six problem kinds and
//! their signed margins.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{Ball, Point, Region};
use crate::interval::{self, ExtInterval};

/// A structural hypothesis a bifunction may claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    LscInX,
    UscInX,
    LscInY,
    UscInY,
    ConvexInY,
    ConcaveInY,
}

/// Predicate imposed on the diagonal `F(x, x)` for `x ∈ D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalKind {
    GeqZero,
    LeqZero,
    MeetsPlus,
    MeetsMinus,
    ContainsZero,
}

impl DiagonalKind {
    pub fn holds(self, i: &ExtInterval, tol: f64) -> bool {
        match self {
            DiagonalKind::GeqZero => interval::geq_zero(i, tol),
            DiagonalKind::LeqZero => interval::leq_zero(i, tol),
            DiagonalKind::MeetsPlus => interval::meets_plus(i, tol),
            DiagonalKind::MeetsMinus => interval::meets_minus(i, tol),
            DiagonalKind::ContainsZero => interval::contains_zero(i, tol),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DiagonalKind::GeqZero => "F(x,x) >= 0",
            DiagonalKind::LeqZero => "F(x,x) <= 0",
            DiagonalKind::MeetsPlus => "F(x,x) meets R+",
            DiagonalKind::MeetsMinus => "F(x,x) meets R-",
            DiagonalKind::ContainsZero => "0 in F(x,x)",
        }
    }
}

/// Hypotheses a bifunction purports to satisfy. Validators test them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claims {
    pub hypotheses: Vec<Hypothesis>,
    pub diagonal: Vec<DiagonalKind>,
}

impl Claims {
    pub fn new(hypotheses: &[Hypothesis], diagonal: &[DiagonalKind]) -> Self {
        let mut h = hypotheses.to_vec();
        h.sort();
        h.dedup();
        let mut d = diagonal.to_vec();
        d.sort();
        d.dedup();
        Self {
            hypotheses: h,
            diagonal: d,
        }
    }

    /// Everything; used for constants.
    pub fn all() -> Self {
        use DiagonalKind::*;
        use Hypothesis::*;
        Self::new(
            &[LscInX, UscInX, LscInY, UscInY, ConvexInY, ConcaveInY],
            &[GeqZero, LeqZero, MeetsPlus, MeetsMinus, ContainsZero],
        )
    }

    pub fn has(&self, h: Hypothesis) -> bool {
        self.hypotheses.contains(&h)
    }

    pub fn has_diagonal(&self, d: DiagonalKind) -> bool {
        self.diagonal.contains(&d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Convex,
    Concave,
}

/// The six equilibrium problems.
///
/// | kind | find `x₀` with, for all `y ∈ K` | margin |
/// |---|---|---|
/// | `StrongGeq` | `F(x₀,y) ⊆ [0,∞)` | `lo` |
/// | `StrongLeq` | `F(x₀,y) ⊆ (−∞,0]` | `−hi` |
/// | `WeakPlus` | `F(x₀,y) ∩ ℝ₊ ≠ ∅` | `hi` |
/// | `WeakMinus` | `F(x₀,y) ∩ ℝ₋ ≠ ∅` | `−lo` |
/// | `ScalarGeq` | `φ(x₀,y) ≥ 0` | `φ` |
/// | `ScalarLeq` | `φ(x₀,y) ≤ 0` | `−φ` |
///
/// The predicate holds iff the margin is `≥ −tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    StrongGeq,
    StrongLeq,
    WeakPlus,
    WeakMinus,
    ScalarGeq,
    ScalarLeq,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::StrongGeq,
        ProblemKind::StrongLeq,
        ProblemKind::WeakPlus,
        ProblemKind::WeakMinus,
        ProblemKind::ScalarGeq,
        ProblemKind::ScalarLeq,
    ];

    pub fn margin(self, i: &ExtInterval) -> f64 {
        match self {
            ProblemKind::StrongGeq | ProblemKind::ScalarGeq => i.lo(),
            ProblemKind::StrongLeq => -i.hi(),
            ProblemKind::WeakPlus => i.hi(),
            ProblemKind::WeakMinus => -i.lo(),
            ProblemKind::ScalarLeq => -i.hi(),
        }
    }

    pub fn holds(self, i: &ExtInterval, tol: f64) -> bool {
        self.margin(i) >= -tol
    }

    pub fn is_scalar(self) -> bool {
        matches!(self, ProblemKind::ScalarGeq | ProblemKind::ScalarLeq)
    }

    pub fn diagonal(self) -> DiagonalKind {
        match self {
            ProblemKind::StrongGeq | ProblemKind::ScalarGeq => DiagonalKind::GeqZero,
            ProblemKind::StrongLeq | ProblemKind::ScalarLeq => DiagonalKind::LeqZero,
            ProblemKind::WeakPlus => DiagonalKind::MeetsPlus,
            ProblemKind::WeakMinus => DiagonalKind::MeetsMinus,
        }
    }

    /// Semicontinuity required in `x` (for `y ∈ D`) and in `y` (on `K∖D`).
    pub fn semicontinuity(self) -> Side {
        match self {
            ProblemKind::StrongGeq | ProblemKind::StrongLeq | ProblemKind::ScalarLeq => {
                Side::Lower
            }
            ProblemKind::WeakPlus | ProblemKind::WeakMinus | ProblemKind::ScalarGeq => Side::Upper,
        }
    }

    /// Convexity required of `y ↦ F(x, y)` on `D`.
    pub fn shape(self) -> Shape {
        match self {
            ProblemKind::StrongGeq | ProblemKind::StrongLeq | ProblemKind::ScalarGeq => {
                Shape::Convex
            }
            ProblemKind::WeakPlus | ProblemKind::WeakMinus | ProblemKind::ScalarLeq => {
                Shape::Concave
            }
        }
    }

    pub fn required(self) -> [Hypothesis; 3] {
        let (x, y) = match self.semicontinuity() {
            Side::Lower => (Hypothesis::LscInX, Hypothesis::LscInY),
            Side::Upper => (Hypothesis::UscInX, Hypothesis::UscInY),
        };
        let s = match self.shape() {
            Shape::Convex => Hypothesis::ConvexInY,
            Shape::Concave => Hypothesis::ConcaveInY,
        };
        [x, y, s]
    }

    pub fn conclusion(self) -> &'static str {
        match self {
            ProblemKind::StrongGeq => "F(x0,y) >= 0 for all y in K",
            ProblemKind::StrongLeq => "F(x0,y) <= 0 for all y in K",
            ProblemKind::WeakPlus => "F(x0,y) meets R+ for all y in K",
            ProblemKind::WeakMinus => "F(x0,y) meets R- for all y in K",
            ProblemKind::ScalarGeq => "phi(x0,y) >= 0 for all y in K",
            ProblemKind::ScalarLeq => "phi(x0,y) <= 0 for all y in K",
        }
    }
}

pub type IntervalFn = dyn Fn(&Point, &Point) -> ExtInterval + Send + Sync;
pub type ScalarFn = dyn Fn(&Point, &Point) -> f64 + Send + Sync;

#[derive(Clone)]
enum Eval {
    Interval(Arc<IntervalFn>),
    Scalar(Arc<ScalarFn>),
}

/// An evaluator `(x, y) ↦ F(x, y)` over `domain × domain` with declared claims.
///
/// Scalar bifunctions are the degenerate case `lo = hi = φ`; their convexity
/// and semicontinuity claims are read as claims about the real function `φ`.
#[derive(Clone)]
pub struct Bifunction {
    label: String,
    domain: Region,
    claims: Claims,
    eval: Eval,
}

impl Bifunction {
    pub fn interval<F>(label: impl Into<String>, domain: Region, claims: Claims, f: F) -> Self
    where
        F: Fn(&Point, &Point) -> ExtInterval + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            domain,
            claims,
            eval: Eval::Interval(Arc::new(f)),
        }
    }

    /// `f` must return finite values.
    pub fn scalar<F>(label: impl Into<String>, domain: Region, claims: Claims, f: F) -> Self
    where
        F: Fn(&Point, &Point) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            domain,
            claims,
            eval: Eval::Scalar(Arc::new(f)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> &Region {
        &self.domain
    }

    pub fn claims(&self) -> &Claims {
        &self.claims
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self.eval, Eval::Scalar(_))
    }

    pub fn eval(&self, x: &Point, y: &Point) -> ExtInterval {
        match &self.eval {
            Eval::Interval(f) => f(x, y),
            Eval::Scalar(f) => {
                let v = f(x, y);
                assert!(v.is_finite(), "{}: non-finite value at ({x}, {y})", self.label);
                ExtInterval::point(v)
            }
        }
    }

    /// Scalar reading: `φ(x, y)` for scalar bifunctions, `lo` otherwise.
    pub fn value(&self, x: &Point, y: &Point) -> f64 {
        match &self.eval {
            Eval::Scalar(f) => f(x, y),
            Eval::Interval(f) => f(x, y).lo(),
        }
    }

    pub fn margin(&self, kind: ProblemKind, x: &Point, y: &Point) -> f64 {
        kind.margin(&self.eval(x, y))
    }

    /// Same evaluator on a different domain (e.g. a truncation).
    pub fn with_domain(&self, domain: Region) -> Self {
        Self {
            domain,
            ..self.clone()
        }
    }

    pub fn with_claims(&self, claims: Claims) -> Self {
        Self {
            claims,
            ..self.clone()
        }
    }
}

impl fmt::Debug for Bifunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bifunction")
            .field("label", &self.label)
            .field("scalar", &self.is_scalar())
            .field("claims", &self.claims)
            .finish_non_exhaustive()
    }
}

/// Ready-made bifunctions.
pub mod library {
    use super::*;
    use DiagonalKind::*;
    use Hypothesis::*;

    fn ball(n: usize) -> Region {
        Ball::unit(n).into()
    }

    /// `F₁(x,y) = [⟨x,y⟩ − 1, +∞)` on the unit ball of ℝⁿ.
    pub fn inner_upper(n: usize) -> Bifunction {
        Bifunction::interval(
            "F1 = [<x,y> - 1, +inf)",
            ball(n),
            Claims::new(&[LscInX, LscInY, ConvexInY], &[GeqZero]),
            |x, y| ExtInterval::at_least(x.dot(y) - 1.0),
        )
    }

    /// `F₂(x,y) = (−∞, ⟨x,y⟩ − 1]` on the unit ball of ℝⁿ.
    pub fn inner_lower(n: usize) -> Bifunction {
        Bifunction::interval(
            "F2 = (-inf, <x,y> - 1]",
            ball(n),
            Claims::new(&[UscInX, UscInY, ConcaveInY], &[MeetsPlus]),
            |x, y| ExtInterval::at_most(x.dot(y) - 1.0),
        )
    }

    /// `φ(x,y) = ⟨x,y⟩ − 1` on the unit ball of ℝⁿ.
    pub fn inner_scalar(n: usize) -> Bifunction {
        Bifunction::scalar(
            "phi = <x,y> - 1",
            ball(n),
            Claims::new(&[UscInX, UscInY, ConvexInY], &[GeqZero]),
            |x, y| x.dot(y) - 1.0,
        )
    }

    pub fn sq_norm(p: &Point) -> f64 {
        p.dot(p)
    }

    /// `F(x,y) = [g(y) − g(x), +∞)`.
    pub fn potential_gap<G>(label: &str, domain: Region, g: G) -> Bifunction
    where
        G: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        Bifunction::interval(
            label,
            domain,
            Claims::new(&[LscInX, LscInY, ConvexInY], &[GeqZero, MeetsPlus]),
            move |x, y| ExtInterval::at_least(g(y) - g(x)),
        )
    }

    /// `F(x,y) = [‖y‖² − ‖x‖², +∞)`.
    pub fn sq_norm_gap(domain: Region) -> Bifunction {
        potential_gap("[|y|^2 - |x|^2, +inf)", domain, sq_norm)
    }

    /// `φ(x,y) = ‖y‖² − ‖x‖²`.
    pub fn sq_norm_gap_scalar(domain: Region) -> Bifunction {
        Bifunction::scalar(
            "|y|^2 - |x|^2",
            domain,
            Claims::new(&[UscInX, UscInY, ConvexInY], &[GeqZero]),
            |x, y| sq_norm(y) - sq_norm(x),
        )
    }

    /// `F(x,y) = [g(y) − g(x), g(y) − g(x) + 1]` with `g = ‖·‖²`.
    pub fn sq_norm_band(domain: Region) -> Bifunction {
        Bifunction::interval(
            "[|y|^2 - |x|^2, |y|^2 - |x|^2 + 1]",
            domain,
            Claims::new(&[LscInX, UscInX, LscInY, UscInY], &[GeqZero, MeetsPlus]),
            |x, y| {
                let d = sq_norm(y) - sq_norm(x);
                ExtInterval::new(d, d + 1.0).expect("finite band")
            },
        )
    }

    pub fn constant(domain: Region, value: ExtInterval) -> Bifunction {
        Bifunction::interval(format!("constant {value}"), domain, Claims::all(), move |_, _| {
            value
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pt;

    #[test]
    fn margins_follow_the_table() {
        let i = ExtInterval::new(-2.0, 3.0).unwrap();
        assert_eq!(ProblemKind::StrongGeq.margin(&i), -2.0);
        assert_eq!(ProblemKind::StrongLeq.margin(&i), -3.0);
        assert_eq!(ProblemKind::WeakPlus.margin(&i), 3.0);
        assert_eq!(ProblemKind::WeakMinus.margin(&i), 2.0);
        let p = ExtInterval::point(0.5);
        assert_eq!(ProblemKind::ScalarGeq.margin(&p), 0.5);
        assert_eq!(ProblemKind::ScalarLeq.margin(&p), -0.5);
    }

    #[test]
    fn margin_agrees_with_predicates() {
        let samples = [
            ExtInterval::new(-1.0, 2.0).unwrap(),
            ExtInterval::at_least(0.0),
            ExtInterval::at_most(-1.0),
            ExtInterval::point(0.0),
            ExtInterval::whole_line(),
        ];
        for i in &samples {
            assert_eq!(
                ProblemKind::StrongGeq.holds(i, 0.0),
                interval::geq_zero(i, 0.0)
            );
            assert_eq!(
                ProblemKind::StrongLeq.holds(i, 0.0),
                interval::leq_zero(i, 0.0)
            );
            assert_eq!(
                ProblemKind::WeakPlus.holds(i, 0.0),
                interval::meets_plus(i, 0.0)
            );
            assert_eq!(
                ProblemKind::WeakMinus.holds(i, 0.0),
                interval::meets_minus(i, 0.0)
            );
        }
    }

    #[test]
    fn counterexample_values_at_origin() {
        let y = pt![0, 0, 0];
        for x in [pt![0, 0, 0], pt![1, 0, 0], pt![0.6, 0.8, 0]] {
            assert_eq!(library::inner_upper(3).eval(&x, &y), ExtInterval::at_least(-1.0));
            assert_eq!(library::inner_lower(3).eval(&x, &y), ExtInterval::at_most(-1.0));
            assert_eq!(library::inner_scalar(3).value(&x, &y), -1.0);
        }
    }

    #[test]
    fn required_hypotheses_match_library_claims() {
        let pairs = [
            (library::inner_upper(2), ProblemKind::StrongGeq),
            (library::inner_lower(2), ProblemKind::WeakPlus),
            (library::inner_scalar(2), ProblemKind::ScalarGeq),
        ];
        for (f, k) in pairs {
            assert!(k.required().iter().all(|h| f.claims().has(*h)), "{f:?}");
            assert!(f.claims().has_diagonal(k.diagonal()));
        }
    }
}
