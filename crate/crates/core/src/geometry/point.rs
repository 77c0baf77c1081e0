use std::cmp::Ordering;
use std::fmt;
use std::ops::{Deref, Index};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝⁿ with finite coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("point coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    /// Builds a point from coordinates the caller knows are finite.
    pub(crate) fn from_vec(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Point) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn dist_inf(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, t: f64) -> Point {
        Point(self.0.iter().map(|a| a * t).collect())
    }

    /// `self + t·(other − self)`.
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        )
    }

    /// Lexicographic order on coordinates; the tie-break used everywhere a
    /// "first" element is selected.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        lex_cmp(&self.0, &other.0)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Point::new(v)
    }
}

/// Shorthand for literal points in tests and built-ins. Panics on empty or
/// non-finite input.
#[macro_export]
macro_rules! pt {
    ($($x:expr),+ $(,)?) => {
        $crate::geometry::Point::new(vec![$(($x) as f64),+]).expect("literal point")
    };
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Rounds away representation noise from lattice coordinates (`-1 + 3·0.1`
/// becomes `-0.7`) and normalizes negative zero.
pub(crate) fn snap_coord(c: f64) -> f64 {
    let s = (c * 1e12).round() / 1e12;
    s + 0.0
}

/// Weighted combination Σ λᵢ xᵢ.
///
/// Weights must be nonnegative (down to −`tol`) and sum to one within `tol`.
pub fn convex_combination(points: &[Point], weights: &[f64]) -> Result<Point> {
    convex_combination_tol(points, weights, 1e-12)
}

pub fn convex_combination_tol(points: &[Point], weights: &[f64], tol: f64) -> Result<Point> {
    if points.is_empty() {
        return Err(Error::Empty("convex combination points"));
    }
    if points.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    let dim = points[0].dim();
    for p in points {
        p.check_dim(dim)?;
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < -tol) {
        return Err(Error::InvalidWeights(format!("negative weight {w}")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > tol {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    let mut out = vec![0.0; dim];
    for (p, &w) in points.iter().zip(weights) {
        for (o, c) in out.iter_mut().zip(p.iter()) {
            *o += w * c;
        }
    }
    Ok(Point(out))
}
