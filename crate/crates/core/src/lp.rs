//! Dense two-phase simplex solver.
//!
//! Problems are taken in standard form
//!
//! ```text
//! minimize    cᵀx
//! subject to  A x = b,  x ≥ 0
//! ```
//!
//! Pivoting follows Bland's rule (lowest eligible index enters, ties in the
//! ratio test go to the lowest basic index), so the method terminates on
//! degenerate problems. Every call builds its own tableau; the solver keeps no
//! state between calls.

use thiserror::Error;

/// Reduced costs above `-PIVOT_EPS` are treated as non-negative, and pivot
/// elements below it as zero.
const PIVOT_EPS: f64 = 1e-11;

/// Phase-one objective threshold (scaled by the largest |bᵢ|) under which the
/// problem counts as feasible.
const FEAS_EPS: f64 = 1e-9;

const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
    #[error("malformed linear program: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

/// Equality-constrained LP in standard form. `a` is row-major with
/// `rows × cols` entries.
#[derive(Debug, Clone)]
pub struct StandardLp {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl StandardLp {
    pub fn new(cols: usize) -> Self {
        Self {
            rows: 0,
            cols,
            a: Vec::new(),
            b: Vec::new(),
            c: vec![0.0; cols],
        }
    }

    /// Appends the constraint `row · x = rhs`.
    pub fn push_eq(&mut self, row: &[f64], rhs: f64) {
        assert_eq!(row.len(), self.cols, "constraint width mismatch");
        self.a.extend_from_slice(row);
        self.b.push(rhs);
        self.rows += 1;
    }

    pub fn set_objective(&mut self, c: &[f64]) {
        assert_eq!(c.len(), self.cols, "objective width mismatch");
        self.c.copy_from_slice(c);
    }

    pub fn minimize(&self) -> Result<LpSolution, LpError> {
        if self.a.len() != self.rows * self.cols || self.b.len() != self.rows {
            return Err(LpError::Malformed("dimension mismatch".into()));
        }
        if self.a.iter().chain(&self.b).chain(&self.c).any(|v| !v.is_finite()) {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        Tableau::new(self).solve()
    }

    /// Phase one only: `Ok(Some(x))` with a feasible point, `Ok(None)` when
    /// the constraint set is empty.
    pub fn feasible_point(&self) -> Result<Option<Vec<f64>>, LpError> {
        let mut zero = self.clone();
        zero.c = vec![0.0; self.cols];
        match zero.minimize() {
            Ok(sol) => Ok(Some(sol.x)),
            Err(LpError::Infeasible) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

struct Tableau {
    m: usize,
    n: usize,
    /// Number of columns per row: n structural + m artificial + rhs.
    width: usize,
    t: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    scale: f64,
}

impl Tableau {
    fn new(lp: &StandardLp) -> Self {
        let (m, n) = (lp.rows, lp.cols);
        let width = n + m + 1;
        let mut t = vec![0.0; m * width];
        for i in 0..m {
            let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
            let row = &mut t[i * width..(i + 1) * width];
            for j in 0..n {
                row[j] = sign * lp.a[i * n + j];
            }
            row[n + i] = 1.0;
            row[width - 1] = sign * lp.b[i];
        }
        let scale = lp.b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        Self {
            m,
            n,
            width,
            t,
            basis: (n..n + m).collect(),
            cost: lp.c.clone(),
            scale,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.width - 1)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        let pivot_row: Vec<f64> = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                let row = &mut self.t[i * w..(i + 1) * w];
                for (x, &pv) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations for the cost vector `costs` (indexed over all
    /// non-rhs columns), allowing only columns `< allowed` to enter.
    fn iterate(&mut self, costs: &[f64], allowed: usize) -> Result<(), LpError> {
        for _ in 0..MAX_PIVOTS {
            // reduced cost d_j = c_j - c_B B⁻¹ A_j, computed from the tableau
            let mut entering = None;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = costs[j];
                for i in 0..self.m {
                    d -= costs[self.basis[i]] * self.at(i, j);
                }
                if d < -PIVOT_EPS {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return Ok(()) };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - 1e-12
                                || (ratio <= best + 1e-12 && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Err(LpError::Unbounded),
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Err(LpError::IterationLimit(MAX_PIVOTS))
    }

    fn solve(mut self) -> Result<LpSolution, LpError> {
        let (m, n) = (self.m, self.n);
        let mut phase1 = vec![0.0; n + m];
        phase1[n..].iter_mut().for_each(|c| *c = 1.0);
        self.iterate(&phase1, n + m)?;

        let infeas: f64 = (0..m)
            .filter(|&i| self.basis[i] >= n)
            .map(|i| self.rhs(i))
            .sum();
        if infeas > FEAS_EPS * self.scale {
            return Err(LpError::Infeasible);
        }

        // Drive artificial variables out of the basis; rows where that is
        // impossible are linearly dependent and get dropped.
        let mut i = 0;
        while i < self.m {
            if self.basis[i] >= n {
                match (0..n).find(|&j| self.at(i, j).abs() > 1e-9) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.remove_row(i);
                        continue;
                    }
                }
            }
            i += 1;
        }

        let mut phase2 = vec![0.0; n + m];
        phase2[..n].copy_from_slice(&self.cost);
        self.iterate(&phase2, n)?;

        let mut x = vec![0.0; n];
        for i in 0..self.m {
            let j = self.basis[i];
            if j < n {
                x[j] = self.rhs(i).max(0.0);
            }
        }
        let objective = x.iter().zip(&self.cost).map(|(a, b)| a * b).sum();
        Ok(LpSolution { x, objective })
    }

    fn remove_row(&mut self, r: usize) {
        let w = self.width;
        self.t.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.m -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(rows: &[&[f64]], b: &[f64], c: &[f64]) -> StandardLp {
        let mut p = StandardLp::new(c.len());
        for (r, &rhs) in rows.iter().zip(b) {
            p.push_eq(r, rhs);
        }
        p.set_objective(c);
        p
    }

    #[test]
    fn small_optimum() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6  (slacks s1, s2)
        let p = lp(
            &[&[1.0, 2.0, 1.0, 0.0], &[3.0, 1.0, 0.0, 1.0]],
            &[4.0, 6.0],
            &[-1.0, -1.0, 0.0, 0.0],
        );
        let sol = p.minimize().unwrap();
        assert!((sol.objective + 2.8).abs() < 1e-12);
        assert!((sol.x[0] - 1.6).abs() < 1e-12);
        assert!((sol.x[1] - 1.2).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let p = lp(&[&[1.0, 1.0], &[1.0, 1.0]], &[1.0, 2.0], &[0.0, 0.0]);
        assert_eq!(p.minimize().unwrap_err(), LpError::Infeasible);
        let p = lp(&[&[1.0, -1.0]], &[0.0], &[-1.0, 0.0]);
        assert_eq!(p.minimize().unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn negative_rhs_and_redundant_rows() {
        let p = lp(
            &[&[-1.0, -1.0], &[-2.0, -2.0], &[1.0, -1.0]],
            &[-2.0, -4.0, 0.0],
            &[1.0, 3.0],
        );
        let sol = p.minimize().unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-12 && (sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective - 4.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic Beale cycling example; Bland's rule must terminate.
        let p = lp(
            &[
                &[0.25, -60.0, -0.04, 9.0, 1.0, 0.0, 0.0],
                &[0.5, -90.0, -0.02, 3.0, 0.0, 1.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            ],
            &[0.0, 0.0, 1.0],
            &[-0.75, 150.0, -0.02, 6.0, 0.0, 0.0, 0.0],
        );
        let sol = p.minimize().unwrap();
        assert!((sol.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn feasible_point_reports_empty_sets() {
        let p = lp(&[&[1.0, 1.0]], &[-1.0], &[0.0, 0.0]);
        assert!(p.feasible_point().unwrap().is_none());
        let p = lp(&[&[1.0, 1.0]], &[1.0], &[0.0, 0.0]);
        let x = p.feasible_point().unwrap().unwrap();
        assert!((x[0] + x[1] - 1.0).abs() < 1e-12);
    }
}
