//! Closed intervals with extended-real endpoints.
//!
//! These are exactly the closed convex subsets of ℝ, so they are the values
//! of every set-valued map into ℝ handled here. Infinite endpoints are the
//! IEEE infinities; `lo` may be `-∞` and `hi` may be `+∞`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtInterval {
    #[serde(with = "ext_real")]
    lo: f64,
    #[serde(with = "ext_real")]
    hi: f64,
}

impl ExtInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi
        {
            return Err(Error::InvalidParameter {
                name: "interval",
                reason: format!("[{lo}, {hi}] is not a nonempty closed interval"),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn point(v: f64) -> Self {
        Self::new(v, v).expect("finite point interval")
    }

    /// `[lo, +∞)`
    pub fn at_least(lo: f64) -> Self {
        Self::new(lo, f64::INFINITY).expect("half line")
    }

    /// `(-∞, hi]`
    pub fn at_most(hi: f64) -> Self {
        Self::new(f64::NEG_INFINITY, hi).expect("half line")
    }

    pub fn whole_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    /// `self ⊆ other` up to `tol` on each finite endpoint.
    pub fn is_subset_of(&self, other: &ExtInterval, tol: f64) -> bool {
        other.lo <= self.lo + tol && self.hi <= other.hi + tol
    }

    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lo <= v + tol && v <= self.hi + tol
    }
}

impl fmt::Debug for ExtInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open_lo = self.lo == f64::NEG_INFINITY;
        let open_hi = self.hi == f64::INFINITY;
        write!(
            f,
            "{}{}, {}{}",
            if open_lo { "(" } else { "[" },
            if open_lo { "-inf".to_string() } else { self.lo.to_string() },
            if open_hi { "+inf".to_string() } else { self.hi.to_string() },
            if open_hi { ")" } else { "]" },
        )
    }
}

impl fmt::Display for ExtInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// `I ≥ 0`: every element is nonnegative.
pub fn geq_zero(i: &ExtInterval, tol: f64) -> bool {
    i.lo >= -tol
}

/// `I ≤ 0`: every element is nonpositive.
pub fn leq_zero(i: &ExtInterval, tol: f64) -> bool {
    i.hi <= tol
}

/// `I ∩ ℝ₊ ≠ ∅`.
pub fn meets_plus(i: &ExtInterval, tol: f64) -> bool {
    i.hi >= -tol
}

/// `I ∩ ℝ₋ ≠ ∅`.
pub fn meets_minus(i: &ExtInterval, tol: f64) -> bool {
    i.lo <= tol
}

/// `{0} ⊆ I`.
pub fn contains_zero(i: &ExtInterval, tol: f64) -> bool {
    i.lo <= tol && i.hi >= -tol
}

/// Weighted Minkowski combination `Σ λᵢ Iᵢ` in extended arithmetic.
///
/// Zero-weight terms are dropped, so `0·∞` never arises; `t·(±∞) = ±∞` for
/// `t > 0`. Weights must be nonnegative and sum to one within 1e-12.
pub fn minkowski_combination(intervals: &[ExtInterval], weights: &[f64]) -> Result<ExtInterval> {
    if intervals.is_empty() || intervals.len() != weights.len() {
        return Err(Error::InvalidWeights(format!(
            "{} intervals but {} weights",
            intervals.len(),
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::InvalidWeights(format!("negative weight {w}")));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
    }
    let mut lo = 0.0;
    let mut hi = 0.0;
    for (i, &w) in intervals.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        lo += w * i.lo;
        hi += w * i.hi;
    }
    // lo has no +∞ terms and hi no -∞ terms, so neither sum can be NaN.
    Ok(ExtInterval { lo, hi })
}

/// Serde adapter writing infinities as the strings `"-inf"` / `"+inf"`.
mod ext_real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("+inf")
        } else if *v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "+inf" | "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                other => Err(serde::de::Error::custom(format!("bad extended real {other}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INF: f64 = f64::INFINITY;

    #[test]
    fn invariants() {
        assert!(ExtInterval::new(1.0, 0.0).is_err());
        assert!(ExtInterval::new(INF, INF).is_err());
        assert!(ExtInterval::new(-INF, -INF).is_err());
        assert!(ExtInterval::new(f64::NAN, 0.0).is_err());
        assert!(ExtInterval::new(-INF, INF).is_ok());
    }

    #[test]
    fn sign_predicates() {
        assert!(geq_zero(&ExtInterval::at_least(0.0), 1e-9));
        assert!(!geq_zero(&ExtInterval::at_least(-1.0), 1e-9));
        assert!(geq_zero(&ExtInterval::point(0.0), 0.0));
        assert!(!meets_plus(&ExtInterval::at_most(-1.0), 1e-9));
        assert!(meets_minus(&ExtInterval::new(-1.0, 5.0).unwrap(), 0.0));
        assert!(leq_zero(&ExtInterval::at_most(0.0), 0.0));
        assert!(contains_zero(&ExtInterval::new(0.0, 1.0).unwrap(), 0.0));
        assert!(!contains_zero(&ExtInterval::at_least(0.5), 1e-9));
    }

    #[test]
    fn minkowski_examples() {
        let a = ExtInterval::new(0.0, 1.0).unwrap();
        let b = ExtInterval::new(2.0, 3.0).unwrap();
        assert_eq!(
            minkowski_combination(&[a, b], &[0.5, 0.5]).unwrap(),
            ExtInterval::new(1.0, 2.0).unwrap()
        );
        assert_eq!(minkowski_combination(&[a], &[1.0]).unwrap(), a);
    }

    #[test]
    fn minkowski_half_lines() {
        // λ[a,∞) + (1−λ)[b,∞) = [λa + (1−λ)b, ∞)
        let (a, b, l) = (-2.0, 3.0, 0.25);
        let r = minkowski_combination(
            &[ExtInterval::at_least(a), ExtInterval::at_least(b)],
            &[l, 1.0 - l],
        )
        .unwrap();
        assert_eq!(r.lo(), l * a + (1.0 - l) * b);
        assert_eq!(r.hi(), INF);
    }

    #[test]
    fn zero_weight_infinite_term_dropped() {
        let r = minkowski_combination(
            &[ExtInterval::at_most(1.0), ExtInterval::new(2.0, 3.0).unwrap()],
            &[0.0, 1.0],
        )
        .unwrap();
        assert_eq!(r, ExtInterval::new(2.0, 3.0).unwrap());
    }
}
