//! Small dense linear programs in standard form.
//!
//! `minimize cᵀx subject to A x = b, x ≥ 0`, solved by the two-phase tableau
//! simplex with Bland's rule. Sized for the handful-of-vertices programs the
//! crate needs (hull membership, recession-cone membership, demand
//! extraction); there is no sparse storage and no refactorization.

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Constraint rows, each of length `num_vars`.
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub cost: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    /// Phase 1 could not drive the artificial sum below the tolerance.
    Infeasible { phase1_objective: f64 },
    Unbounded,
    /// Pivot budget exhausted (should not happen with Bland's rule).
    IterationLimit,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            rows: Vec::new(),
            rhs: Vec::new(),
            cost: vec![0.0; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        debug_assert_eq!(row.len(), self.num_vars());
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn solve(&self, feasibility_tol: f64) -> LpOutcome {
        Tableau::build(self).solve(&self.cost, feasibility_tol)
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// m rows of n + m + 1 entries; the last column is the right-hand side.
    t: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.num_vars();
        let width = n + m + 1;
        let mut t = Vec::with_capacity(m);
        for (i, (row, &b)) in lp.rows.iter().zip(&lp.rhs).enumerate() {
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            let mut r = vec![0.0; width];
            for (dst, &a) in r.iter_mut().zip(row) {
                *dst = sign * a;
            }
            r[n + i] = 1.0;
            r[width - 1] = sign * b;
            t.push(r);
        }
        // Phase-1 reduced costs: artificial costs are one, every artificial is basic.
        let mut obj = vec![0.0; width];
        for r in &t {
            for j in 0..n {
                obj[j] -= r[j];
            }
            obj[width - 1] -= r[width - 1];
        }
        Self {
            m,
            n,
            t,
            obj,
            basis: (n..n + m).collect(),
        }
    }

    fn rhs_col(&self) -> usize {
        self.n + self.m
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[col] = 0.0;
        }
        self.basis[row] = col;
    }

    /// Runs simplex iterations over columns `0..allowed`. Returns `false` if
    /// the objective is unbounded below.
    fn iterate(&mut self, allowed: usize) -> Option<bool> {
        let rc = self.rhs_col();
        for _ in 0..MAX_PIVOTS {
            let Some(col) = (0..allowed).find(|&j| self.obj[j] < -1e-11) else {
                return Some(true);
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.t[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.t[i][rc] / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                None => return Some(false),
                Some((row, _)) => self.pivot(row, col),
            }
        }
        None
    }

    fn solve(mut self, cost: &[f64], tol: f64) -> LpOutcome {
        let rc = self.rhs_col();
        match self.iterate(self.n) {
            None => return LpOutcome::IterationLimit,
            Some(false) => unreachable!("phase 1 objective is bounded below by zero"),
            Some(true) => {}
        }
        let phase1 = -self.obj[rc];
        if phase1 > tol {
            return LpOutcome::Infeasible {
                phase1_objective: phase1,
            };
        }
        // Drive remaining artificials out of the basis where possible.
        for row in 0..self.m {
            if self.basis[row] >= self.n {
                if let Some(col) = (0..self.n).find(|&j| self.t[row][j].abs() > 1e-9) {
                    self.pivot(row, col);
                }
            }
        }
        // Phase-2 reduced costs.
        let width = rc + 1;
        let mut obj = vec![0.0; width];
        obj[..self.n].copy_from_slice(cost);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = if b < self.n { cost[b] } else { 0.0 };
            if cb != 0.0 {
                for j in 0..width {
                    obj[j] -= cb * self.t[i][j];
                }
            }
        }
        self.obj = obj;
        match self.iterate(self.n) {
            None => LpOutcome::IterationLimit,
            Some(false) => LpOutcome::Unbounded,
            Some(true) => {
                let mut x = vec![0.0; self.n];
                for (i, &b) in self.basis.iter().enumerate() {
                    if b < self.n {
                        x[b] = self.t[i][rc].max(0.0);
                    }
                }
                let objective = cost.iter().zip(&x).map(|(c, v)| c * v).sum();
                LpOutcome::Optimal { x, objective }
            }
        }
    }
}
