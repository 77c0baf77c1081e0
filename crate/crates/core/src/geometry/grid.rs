use serde::{Deserialize, Serialize};

use super::point::{snap_coord, Point};
use super::sets::{Region, SimplexM};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// A finite, lexicographically ordered discretization of a set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub points: Vec<Point>,
    /// Target spacing requested by the caller.
    pub resolution: f64,
    /// Human-readable description of the generating rule.
    pub source: String,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Index of a point within `tol` (∞-norm), if present.
    pub fn find(&self, p: &Point, tol: f64) -> Option<usize> {
        // Points are sorted; binary search on the first coordinate narrows the scan.
        let lo = self.points.partition_point(|q| q[0] < p[0] - tol);
        self.points[lo..]
            .iter()
            .take_while(|q| q[0] <= p[0] + tol)
            .position(|q| q.dist_inf(p) <= tol)
            .map(|i| lo + i)
    }

    /// Index of the nearest grid point (Euclidean; ties go to the lower index).
    pub fn nearest(&self, p: &Point) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, q) in self.points.iter().enumerate() {
            let d = q.dist(p);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Lattice points of `region` at spacing `resolution`, or composition points
/// `k/m` (with `m = ⌈1/resolution⌉`) for simplices. Products are gridded
/// factor-wise. The result is never empty.
pub fn make_grid(region: &Region, resolution: f64, tol: &Tolerances) -> Result<Grid> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::InvalidParameter {
            name: "resolution",
            reason: format!("must be positive, got {resolution}"),
        });
    }
    let (points, source) = match region {
        Region::Simplex(s) => (
            simplex_points(*s, resolution, tol.grid_cap)?,
            format!("compositions of m={} into {} parts", steps(resolution), s.n),
        ),
        Region::Product(factors) => {
            let mut acc: Vec<Vec<f64>> = vec![Vec::new()];
            for f in factors {
                let g = make_grid(f, resolution, tol)?;
                let count = acc.len().saturating_mul(g.len());
                if count > tol.grid_cap {
                    return Err(Error::GridTooFine {
                        count,
                        cap: tol.grid_cap,
                    });
                }
                let mut next = Vec::with_capacity(count);
                for prefix in &acc {
                    for q in &g.points {
                        let mut c = prefix.clone();
                        c.extend_from_slice(q);
                        next.push(c);
                    }
                }
                acc = next;
            }
            (
                acc.into_iter().map(Point::from_vec).collect(),
                format!("product of {} factor grids", factors.len()),
            )
        }
        _ => (
            lattice_points(region, resolution, tol)?,
            format!("axis lattice, spacing {resolution}"),
        ),
    };
    let mut points = points;
    if points.is_empty() {
        points.push(region.center());
    }
    points.sort_by(|a, b| a.lex_cmp(b));
    Ok(Grid {
        points,
        resolution,
        source,
    })
}

fn steps(resolution: f64) -> usize {
    ((1.0 / resolution) - 1e-9).ceil().max(1.0) as usize
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return usize::MAX;
        }
    }
    acc as usize
}

fn simplex_points(s: SimplexM, resolution: f64, cap: usize) -> Result<Vec<Point>> {
    let m = steps(resolution);
    let count = binomial(m + s.n - 1, s.n - 1);
    if count > cap {
        return Err(Error::GridTooFine { count, cap });
    }
    let mut out = Vec::with_capacity(count);
    let mut parts = vec![0usize; s.n];
    compositions(&mut parts, 0, m, m, &mut out);
    Ok(out)
}

fn compositions(parts: &mut [usize], at: usize, left: usize, m: usize, out: &mut Vec<Point>) {
    if at == parts.len() - 1 {
        parts[at] = left;
        out.push(Point::from_vec(
            parts.iter().map(|&k| k as f64 / m as f64).collect(),
        ));
        return;
    }
    for k in 0..=left {
        parts[at] = k;
        compositions(parts, at + 1, left - k, m, out);
    }
}

fn lattice_points(region: &Region, resolution: f64, tol: &Tolerances) -> Result<Vec<Point>> {
    let (lo, hi) = region.bounding_box();
    let counts: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(l, h)| ((h - l) / resolution + 1e-9).floor().max(0.0) as usize + 1)
        .collect();
    let total = counts
        .iter()
        .try_fold(1usize, |acc, &c| acc.checked_mul(c))
        .unwrap_or(usize::MAX);
    if total > tol.grid_cap {
        return Err(Error::GridTooFine {
            count: total,
            cap: tol.grid_cap,
        });
    }
    let n = lo.len();
    let mut idx = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        let c: Vec<f64> = (0..n)
            .map(|i| snap_coord(lo[i] + idx[i] as f64 * resolution))
            .collect();
        let p = Point::from_vec(c);
        if region.contains(&p, tol.membership) {
            out.push(p);
        }
        // Odometer with the last coordinate fastest keeps lexicographic order.
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            idx[i] += 1;
            if idx[i] < counts[i] {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Barycentric grid of `co(vertices)`: the points `Σ (kᵢ/m) vᵢ` with
/// `m = ⌈diam / resolution⌉`, deduplicated and lexicographically sorted.
pub fn hull_grid(vertices: &[Point], resolution: f64, cap: usize) -> Result<Vec<(Point, Vec<f64>)>> {
    if vertices.is_empty() {
        return Err(Error::Empty("hull vertices"));
    }
    let mut diam: f64 = 0.0;
    for a in vertices {
        for b in vertices {
            diam = diam.max(a.dist(b));
        }
    }
    let m = ((diam / resolution) - 1e-9).ceil().max(1.0) as usize;
    let count = binomial(m + vertices.len() - 1, vertices.len() - 1);
    if count > cap {
        return Err(Error::GridTooFine { count, cap });
    }
    let s = SimplexM::new(vertices.len())?;
    let bary = simplex_points(s, 1.0 / m as f64, cap)?;
    let mut out: Vec<(Point, Vec<f64>)> = bary
        .into_iter()
        .map(|w| {
            let mut c = vec![0.0; vertices[0].dim()];
            for (v, wi) in vertices.iter().zip(w.iter()) {
                for (ci, vi) in c.iter_mut().zip(v.iter()) {
                    *ci += wi * vi;
                }
            }
            (Point::from_vec(c), w.into_vec())
        })
        .collect();
    out.sort_by(|a, b| a.0.lex_cmp(&b.0));
    out.dedup_by(|a, b| a.0.dist_inf(&b.0) <= 1e-12);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, Polytope};
    use crate::pt;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn simplex_two_half() {
        let g = make_grid(&SimplexM::new(2).unwrap().into(), 0.5, &tol()).unwrap();
        assert_eq!(g.points, vec![pt![0, 1], pt![0.5, 0.5], pt![1, 0]]);
    }

    #[test]
    fn unit_interval_quarter() {
        let r: Region = Polytope::boxed(&[0.0], &[1.0]).unwrap().into();
        let g = make_grid(&r, 0.25, &tol()).unwrap();
        assert_eq!(
            g.points,
            vec![pt![0], pt![0.25], pt![0.5], pt![0.75], pt![1]]
        );
    }

    #[test]
    fn simplex_three_half_has_six_points() {
        // Compositions of 2 into 3 parts: (0,0,2) (0,1,1) (0,2,0) (1,0,1) (1,1,0) (2,0,0).
        let g = make_grid(&SimplexM::new(3).unwrap().into(), 0.5, &tol()).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.points[0], pt![0, 0, 1]);
        assert_eq!(g.points[5], pt![1, 0, 0]);
    }

    #[test]
    fn lattice_is_lex_sorted_and_clean() {
        let r: Region = Polytope::cube(2, 1.0).unwrap().into();
        let g = make_grid(&r, 0.1, &tol()).unwrap();
        assert_eq!(g.len(), 441);
        assert!(g.points.windows(2).all(|w| w[0].lex_cmp(&w[1]).is_lt()));
        assert!(g.find(&pt![0, 0], 1e-12).is_some());
        assert!(g.find(&pt![-0.7, 0.3], 1e-15).is_some());
    }

    #[test]
    fn ball_grid_members() {
        let g = make_grid(&Ball::unit(3).into(), 0.25, &tol()).unwrap();
        assert!(g.iter().all(|p| p.norm() <= 1.0 + 1e-9));
        assert!(g.find(&pt![0, 0, 0], 1e-12).is_some());
        assert!(g.find(&pt![1, 0, 0], 1e-12).is_some());
    }

    #[test]
    fn too_fine_is_reported() {
        let r: Region = Polytope::cube(3, 1.0).unwrap().into();
        let t = Tolerances {
            grid_cap: 1000,
            ..tol()
        };
        assert!(matches!(
            make_grid(&r, 0.01, &t),
            Err(Error::GridTooFine { .. })
        ));
    }

    #[test]
    fn never_empty() {
        let r: Region = Polytope::new(vec![pt![0.3, 0.3], pt![0.31, 0.32]])
            .unwrap()
            .into();
        let g = make_grid(&r, 0.5, &tol()).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn hull_grid_of_segment() {
        let h = hull_grid(&[pt![0, 0], pt![1, 0]], 0.25, 1000).unwrap();
        assert_eq!(h.len(), 5);
        assert_eq!(h[2].0, pt![0.5, 0]);
    }
}
