//! Exact sparse linear systems over the rationals.
//!
//! Gauss-Jordan elimination with a sparsest-row pivot choice. Everything is
//! exact `BigRational` arithmetic, so the outcome is either a solution (free
//! variables pinned to zero) or an inconsistent row, which doubles as an
//! infeasibility certificate for the ansatz solvers.

use std::collections::BTreeMap;

use num::{BigRational, Zero};

#[derive(Clone, Debug)]
struct Row {
    coeffs: BTreeMap<usize, BigRational>,
    rhs: BigRational,
}

/// A system of sparse rational equations in `n_cols` unknowns.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    rows: Vec<Row>,
    n_cols: usize,
}

/// Result of an exact solve.
#[derive(Clone, Debug)]
pub enum SolveOutcome {
    Solution(Vec<BigRational>),
    Infeasible(InfeasibleInfo),
}

/// Witness of inconsistency: after elimination, equation `row_index` reduced
/// to `0 = residual` with `residual != 0`.
#[derive(Clone, Debug)]
pub struct InfeasibleInfo {
    pub rank: usize,
    pub rows: usize,
    pub cols: usize,
    pub row_index: usize,
    pub residual: BigRational,
}

impl LinearSystem {
    pub fn new(n_cols: usize) -> LinearSystem {
        LinearSystem {
            rows: Vec::new(),
            n_cols,
        }
    }

    pub fn add_row(&mut self, coeffs: BTreeMap<usize, BigRational>, rhs: BigRational) {
        debug_assert!(coeffs.keys().all(|&c| c < self.n_cols));
        let coeffs: BTreeMap<usize, BigRational> =
            coeffs.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        self.rows.push(Row { coeffs, rhs });
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.n_cols
    }

    pub fn solve(mut self) -> SolveOutcome {
        let n_rows = self.rows.len();
        let mut used = vec![false; n_rows];
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (col, row)

        loop {
            // sparsest unused row with any coefficient left
            let mut best: Option<(usize, usize)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if used[r] || row.coeffs.is_empty() {
                    continue;
                }
                let nnz = row.coeffs.len();
                if best.map_or(true, |(bn, _)| nnz < bn) {
                    best = Some((nnz, r));
                }
            }
            let Some((_, r)) = best else { break };
            used[r] = true;
            let col = *self.rows[r].coeffs.keys().next().expect("nonempty row");
            pivots.push((col, r));

            let pivot_coeff = self.rows[r].coeffs[&col].clone();
            for v in self.rows[r].coeffs.values_mut() {
                *v = &*v / &pivot_coeff;
            }
            self.rows[r].rhs = &self.rows[r].rhs / &pivot_coeff;

            let pivot_row = self.rows[r].clone();
            for (r2, row) in self.rows.iter_mut().enumerate() {
                if r2 == r {
                    continue;
                }
                let Some(factor) = row.coeffs.get(&col).cloned() else {
                    continue;
                };
                for (c, v) in &pivot_row.coeffs {
                    let delta = &factor * v;
                    match row.coeffs.get_mut(c) {
                        Some(existing) => {
                            *existing = &*existing - &delta;
                            if existing.is_zero() {
                                row.coeffs.remove(c);
                            }
                        }
                        None => {
                            row.coeffs.insert(*c, -delta);
                        }
                    }
                }
                row.rhs = &row.rhs - &(&factor * &pivot_row.rhs);
            }
        }

        for (r, row) in self.rows.iter().enumerate() {
            if row.coeffs.is_empty() && !row.rhs.is_zero() {
                return SolveOutcome::Infeasible(InfeasibleInfo {
                    rank: pivots.len(),
                    rows: n_rows,
                    cols: self.n_cols,
                    row_index: r,
                    residual: row.rhs.clone(),
                });
            }
        }

        let mut solution = vec![BigRational::zero(); self.n_cols];
        for (col, r) in pivots {
            // free variables are zero, so the pivot value is just the rhs
            solution[col] = self.rows[r].rhs.clone();
        }
        SolveOutcome::Solution(solution)
    }
}
