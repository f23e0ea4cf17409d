//! Phase-1 revised simplex for `A x = b, x ≥ 0`.
//!
//! Every row gets an artificial column with unit cost; rows with `b_i = 0` get two
//! (`+e_i` and `-e_i`), so the phase-1 dual is box-constrained: `|u_i| ≤ 1` on those rows
//! and `u_i ≤ 1` on the others. At the optimum the dual `u` satisfies `Aᵀu ≤ 0` and
//! `bᵀu` equals the phase-1 objective, which makes `-u` a Farkas vector whenever the
//! objective is positive.
//!
//! The basis matrix is inverted from the original data at every iteration. The problems
//! solved here have at most a few dozen rows, so this costs little and keeps primal and
//! dual values free of accumulated tableau error. Pivots that would make the basis
//! numerically singular are skipped.
//!
//! The leaving row comes from a Harris ratio test preferring large pivots. If a basis
//! repeats, the solver switches to Bland's smallest-index rule for the leaving row as
//! well, and on further repeats relaxes the reduced-cost tolerance.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimplexOptions {
    /// Reduced costs above `-cost_tol` count as nonnegative.
    pub cost_tol: f64,
    /// Ceiling for `cost_tol`, which is raised tenfold when a basis repeats under
    /// Bland's rule.
    pub max_cost_tol: f64,
    /// Smallest direction component accepted in the ratio test, relative to the
    /// largest component.
    pub pivot_tol: f64,
    /// Primal slack allowed in the ratio test.
    pub primal_tol: f64,
    pub max_iterations: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            cost_tol: 1e-9,
            max_cost_tol: 1e-7,
            pivot_tol: 1e-9,
            primal_tol: 1e-12,
            max_iterations: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOneSolution {
    /// Sum of artificial variables at the optimum.
    pub objective: f64,
    /// Values of the structural variables.
    pub x: Vec<f64>,
    /// Optimal dual vector, one entry per row of the original (unflipped) system.
    pub duals: Vec<f64>,
    pub iterations: usize,
    /// Basic variable per row; indices `>= ncols(A)` are artificials.
    pub basis: Vec<usize>,
}

/// Bases whose 1-norm condition number exceeds this are treated as singular.
const MAX_CONDITION: f64 = 1e13;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.lp_norm(1)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy)]
enum Column {
    Structural(usize),
    Artificial { row: usize, sign: f64 },
}

struct Problem<'a> {
    a: &'a DMatrix<f64>,
    b: DVector<f64>,
    columns: Vec<Column>,
}

impl Problem<'_> {
    fn column(&self, j: usize) -> DVector<f64> {
        match self.columns[j] {
            Column::Structural(k) => self.a.column(k).into_owned(),
            Column::Artificial { row, sign } => {
                let mut e = DVector::zeros(self.a.nrows());
                e[row] = sign;
                e
            }
        }
    }

    fn cost(&self, j: usize) -> f64 {
        match self.columns[j] {
            Column::Structural(_) => 0.0,
            Column::Artificial { .. } => 1.0,
        }
    }

    /// Inverse of the basis matrix, or `None` when it is numerically singular.
    fn invert(&self, basis: &[usize]) -> Option<DMatrix<f64>> {
        let bm = self.basis_matrix(basis);
        let inv = bm.clone().try_inverse()?;
        let cond = norm1(&bm) * norm1(&inv);
        (cond.is_finite() && cond < MAX_CONDITION).then_some(inv)
    }

    fn basis_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let m = self.a.nrows();
        let mut bm = DMatrix::zeros(m, m);
        for (i, &j) in basis.iter().enumerate() {
            bm.set_column(i, &self.column(j));
        }
        bm
    }
}

/// Minimizes the total infeasibility of `A x = b, x ≥ 0`.
pub fn phase_one(a: &DMatrix<f64>, b: &[f64], opts: &SimplexOptions) -> Result<PhaseOneSolution> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            actual: b.len(),
        });
    }
    // flip rows so that b >= 0
    let signs: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let mut flipped = a.clone();
    for (i, &s) in signs.iter().enumerate() {
        if s < 0.0 {
            flipped.row_mut(i).neg_mut();
        }
    }
    // unit column scale, so that reduced-cost and pivot tolerances are relative;
    // the dual constraints only change by positive factors, the duals not at all
    let col_scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = flipped.column(j).amax();
            if s > 0.0 { 1.0 / s } else { 1.0 }
        })
        .collect();
    for (j, &s) in col_scale.iter().enumerate() {
        flipped.column_mut(j).scale_mut(s);
    }
    let rhs = DVector::from_iterator(m, b.iter().zip(&signs).map(|(v, s)| v * s));

    let mut columns: Vec<Column> = (0..n).map(Column::Structural).collect();
    let mut basis = Vec::with_capacity(m);
    for i in 0..m {
        basis.push(columns.len());
        columns.push(Column::Artificial { row: i, sign: 1.0 });
    }
    for i in 0..m {
        if rhs[i] == 0.0 {
            columns.push(Column::Artificial { row: i, sign: -1.0 });
        }
    }
    let problem = Problem {
        a: &flipped,
        b: rhs,
        columns,
    };
    let total = problem.columns.len();

    let mut iterations = 0;
    let mut cost_tol = opts.cost_tol;
    let mut visited = HashSet::new();
    let mut bland = false;
    let mut banned = vec![false; total];
    let mut inv = problem
        .invert(&basis)
        .ok_or_else(|| Error::Solver("singular starting basis".into()))?;
    loop {
        let x_b = &inv * &problem.b;
        let c_b = DVector::from_iterator(m, basis.iter().map(|&j| problem.cost(j)));
        let u = inv.tr_mul(&c_b);

        let mut in_basis = vec![false; total];
        for &j in &basis {
            in_basis[j] = true;
        }
        // Bland: lowest-index column with negative reduced cost enters
        let entering = (0..total).find(|&j| {
            !in_basis[j] && !banned[j] && problem.cost(j) - u.dot(&problem.column(j)) < -cost_tol
        });

        let Some(entering) = entering else {
            let mut x = vec![0.0; n];
            for (i, &j) in basis.iter().enumerate() {
                if let Column::Structural(k) = problem.columns[j] {
                    x[k] = x_b[i] * col_scale[k];
                }
            }
            let objective = basis
                .iter()
                .zip(x_b.iter())
                .map(|(&j, &v)| problem.cost(j) * v)
                .sum();
            let duals = u.iter().zip(&signs).map(|(v, s)| v * s).collect();
            return Ok(PhaseOneSolution {
                objective,
                x,
                duals,
                iterations,
                basis,
            });
        };

        if iterations >= opts.max_iterations {
            return Err(Error::Solver(format!(
                "simplex did not terminate within {} iterations",
                opts.max_iterations
            )));
        }
        iterations += 1;

        let w = &inv * problem.column(entering);
        let pivot_floor = opts.pivot_tol * w.amax().max(1.0);
        // Harris two-pass ratio test: bound the step with a small primal slack, then pick
        // among the rows that reach it, by largest pivot or, once a basis has repeated,
        // by Bland's smallest basic index
        let eligible: Vec<usize> = (0..m).filter(|&i| w[i] > pivot_floor).collect();
        // phase 1 is bounded below, so some component must be positive
        if eligible.is_empty() {
            return Err(Error::Solver("unbounded phase-1 direction".into()));
        }
        let step = eligible
            .iter()
            .map(|&i| (x_b[i].max(0.0) + opts.primal_tol) / w[i])
            .fold(f64::INFINITY, f64::min);
        let ties = eligible
            .into_iter()
            .filter(|&i| x_b[i].max(0.0) / w[i] <= step);
        let row = if bland {
            ties.min_by_key(|&i| basis[i])
        } else {
            ties.max_by(|&i, &k| w[i].total_cmp(&w[k]).then(basis[k].cmp(&basis[i])))
        }
        .expect("the minimizing row passes the filter");
        let mut next = basis.clone();
        next[row] = entering;
        let Some(next_inv) = problem.invert(&next) else {
            // the pivot was numerical noise; keep the basis and try another column
            banned[entering] = true;
            continue;
        };
        basis = next;
        inv = next_inv;
        banned.fill(false);
        let mut key = basis.clone();
        key.sort_unstable();
        if !visited.insert(key) {
            if !bland {
                bland = true;
                visited.clear();
            } else if cost_tol < opts.max_cost_tol {
                // under Bland's rule a repeat means pivots on reduced costs at noise level
                cost_tol *= 10.0;
                visited.clear();
            } else {
                return Err(Error::Solver("simplex is cycling".into()));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasible_system_reaches_zero() {
        // x1 + x2 = 1, x1 - x2 = 0
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let sol = phase_one(&a, &[1.0, 0.0], &SimplexOptions::default()).unwrap();
        assert!(sol.objective.abs() < 1e-14);
        assert!((sol.x[0] - 0.5).abs() < 1e-14);
        assert!((sol.x[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn infeasible_system_yields_farkas_dual() {
        // x1 + x2 = 1 and x1 + 2 x2 = 0 have no nonnegative solution
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
        let b = [1.0, 0.0];
        let sol = phase_one(&a, &b, &SimplexOptions::default()).unwrap();
        assert!(sol.objective > 0.1);
        let u = DVector::from_vec(sol.duals.clone());
        let atu = a.transpose() * &u;
        assert!(atu.iter().all(|&v| v <= 1e-12));
        let btu: f64 = b.iter().zip(&sol.duals).map(|(x, y)| x * y).sum();
        assert!((btu - sol.objective).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // -x1 = -2
        let a = DMatrix::from_row_slice(1, 1, &[-1.0]);
        let sol = phase_one(&a, &[-2.0], &SimplexOptions::default()).unwrap();
        assert!(sol.objective.abs() < 1e-14);
        assert!((sol.x[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_redundant_rows() {
        // duplicated zero-rhs rows exercise the degenerate path
        let a = DMatrix::from_row_slice(
            4,
            3,
            &[1.0, -1.0, 0.0, 1.0, -1.0, 0.0, 0.0, 1.0, -1.0, 1.0, 1.0, 1.0],
        );
        let sol = phase_one(&a, &[0.0, 0.0, 0.0, 1.0], &SimplexOptions::default()).unwrap();
        assert!(sol.objective.abs() < 1e-14);
        for v in &sol.x {
            assert!((v - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn length_mismatch() {
        let a = DMatrix::from_row_slice(1, 1, &[1.0]);
        assert!(phase_one(&a, &[1.0, 2.0], &SimplexOptions::default()).is_err());
    }
}
