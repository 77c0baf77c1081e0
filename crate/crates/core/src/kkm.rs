//! The KKM map `G(y) = {x ∈ K : F(x, y) ⊵ 0}` on grids, a sampled check of
//! the covering property `co{y₁,…,yₖ} ∩ D ⊆ ⋃ G(yᵢ)`, and the common point
//! of all `G(y)` that Ky Fan's lemma promises.
//!
//! The lemma's compactness hypothesis (one `G(y₀)` compact) is automatic at
//! desk scale: every `G(y)` is a finite index set.

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bifunction::{Bifunction, ProblemKind};
use crate::dense_sets::DenseSubset;
use crate::geometry::{convex_combination, Point};
use crate::rng;
use crate::validators::Status;

const COMBINATION_BUDGET: usize = 100;

/// `G(y)` as strictly increasing indices into the `K` point list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GSet {
    pub y: Point,
    pub members: Vec<usize>,
}

impl GSet {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// One `G(y)` per point of `d_points`.
pub fn build_g_sets(
    f: &Bifunction,
    kind: ProblemKind,
    k_points: &[Point],
    d_points: &[Point],
    tol: f64,
) -> Vec<GSet> {
    d_points
        .par_iter()
        .map(|y| GSet {
            y: y.clone(),
            members: k_points
                .iter()
                .enumerate()
                .filter(|(_, x)| kind.holds(&f.eval(x, y), tol))
                .map(|(i, _)| i)
                .collect(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringWitness {
    pub hull: Vec<Point>,
    pub weights: Vec<f64>,
    pub combination: Point,
    pub nearest_grid_point: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub status: Status,
    pub witness: Option<CoveringWitness>,
    pub feasible: usize,
    pub samples: usize,
}

/// Samples subsets `{y₁,…,yₖ}` (`k ≤ 4`) of the `G`-set anchors and rational
/// weights whose combination lies in `D`. The combination is covered if its
/// nearest `K` point belongs to some `G(yᵢ)`, or if the predicate holds
/// directly at the combination for some `i`.
#[allow(clippy::too_many_arguments)]
pub fn check_kkm_covering(
    g_sets: &[GSet],
    f: &Bifunction,
    kind: ProblemKind,
    k_points: &[Point],
    d: &DenseSubset,
    samples: usize,
    seed: u64,
    tol: f64,
) -> CoveringReport {
    let mut r = rng(seed);
    let mut feasible = 0;
    if g_sets.is_empty() || k_points.is_empty() {
        return CoveringReport {
            status: Status::Inconclusive,
            witness: None,
            feasible,
            samples,
        };
    }
    let ids: Vec<usize> = (0..g_sets.len()).collect();
    for s in 0..samples {
        let k = (1 + s % 4).min(g_sets.len());
        let mut found = None;
        for _ in 0..COMBINATION_BUDGET {
            let chosen: Vec<usize> = ids.choose_multiple(&mut r, k).copied().collect();
            let a: Vec<u32> = (0..k).map(|_| r.gen_range(1..=3)).collect();
            let total: u32 = a.iter().sum();
            let w: Vec<f64> = a.iter().map(|&ai| ai as f64 / total as f64).collect();
            let hull: Vec<Point> = chosen.iter().map(|&i| g_sets[i].y.clone()).collect();
            let c = convex_combination(&hull, &w).expect("anchors share a dimension");
            if d.member(&c) {
                found = Some((chosen, w, hull, c));
                break;
            }
        }
        let Some((chosen, w, hull, c)) = found else {
            continue;
        };
        feasible += 1;
        let nearest = nearest_index(k_points, &c);
        let covered = chosen.iter().any(|&i| g_sets[i].contains(nearest))
            || chosen.iter().any(|&i| kind.holds(&f.eval(&c, &g_sets[i].y), tol));
        if !covered {
            return CoveringReport {
                status: Status::Fail,
                witness: Some(CoveringWitness {
                    hull,
                    weights: w,
                    combination: c,
                    nearest_grid_point: k_points[nearest].clone(),
                }),
                feasible,
                samples,
            };
        }
    }
    CoveringReport {
        status: if feasible > 0 {
            Status::Pass
        } else {
            Status::Inconclusive
        },
        witness: None,
        feasible,
        samples,
    }
}

fn nearest_index(points: &[Point], p: &Point) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, q) in points.iter().enumerate() {
        let d = q.dist(p);
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub point: Option<Point>,
    pub index: Option<usize>,
    /// Minimum margin of `point` over all `G`-set anchors.
    pub residual: f64,
    pub size: usize,
    /// Anchor whose `G(y)` first emptied the running intersection.
    pub emptied_by: Option<Point>,
    #[serde(skip)]
    pub members: Vec<usize>,
}

/// Sorted-merge intersection of all `G`-sets, folded smallest set first
/// (ties in anchor order), so an empty `G(y)` is reported as the emptying
/// anchor.
pub fn finite_intersection(
    g_sets: &[GSet],
    f: &Bifunction,
    kind: ProblemKind,
    k_points: &[Point],
) -> IntersectionReport {
    let mut order: Vec<&GSet> = g_sets.iter().collect();
    order.sort_by_key(|g| g.members.len());
    let Some(first) = order.first().copied() else {
        return IntersectionReport {
            point: None,
            index: None,
            residual: f64::NEG_INFINITY,
            size: 0,
            emptied_by: None,
            members: Vec::new(),
        };
    };
    let mut acc = first.members.clone();
    let mut emptied_by = acc.is_empty().then(|| first.y.clone());
    for g in &order[1..] {
        if acc.is_empty() {
            break;
        }
        acc = merge_intersect(&acc, &g.members);
        if acc.is_empty() {
            emptied_by = Some(g.y.clone());
        }
    }
    // Grid order is lexicographic, so the smallest index is the first point.
    let index = acc.first().copied();
    let residual = match index {
        Some(i) => g_sets
            .iter()
            .map(|g| kind.margin(&f.eval(&k_points[i], &g.y)))
            .fold(f64::INFINITY, f64::min),
        None => f64::NEG_INFINITY,
    };
    IntersectionReport {
        point: index.map(|i| k_points[i].clone()),
        index,
        residual,
        size: acc.len(),
        emptied_by,
        members: acc,
    }
}

fn merge_intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KkmReport {
    pub covering_ok: bool,
    pub covering: CoveringReport,
    pub intersection: IntersectionReport,
}

impl KkmReport {
    pub fn new(covering: CoveringReport, intersection: IntersectionReport) -> Self {
        Self {
            covering_ok: covering.status == Status::Pass,
            covering,
            intersection,
        }
    }

    pub fn intersection_point(&self) -> Option<&Point> {
        self.intersection.point.as_ref()
    }

    pub fn intersection_contains(&self, i: usize) -> bool {
        self.intersection.members.binary_search(&i).is_ok()
    }
}
