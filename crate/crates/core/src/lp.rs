//! Dense two-phase simplex with Bland's pivoting rule.
//!
//! Sized for the small programs that back ℓ∞ projections and V-polytope
//! membership (tens of variables and rows). Pivoting is deterministic.

use std::fmt;

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-10;
const MAX_ITERATIONS: usize = 50_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpError::Infeasible => f.write_str("infeasible"),
            LpError::Unbounded => f.write_str("unbounded"),
            LpError::IterationLimit => f.write_str("iteration limit reached"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<f64>,
    sense: Sense,
    rhs: f64,
}

/// `min` or `max` of `c·x` subject to linear rows; variables are `>= 0`
/// unless marked free.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    n_vars: usize,
    maximize: bool,
    objective: Vec<f64>,
    free: Vec<bool>,
    rows: Vec<Row>,
}

impl LinearProgram {
    pub fn minimize(n_vars: usize) -> Self {
        LinearProgram {
            n_vars,
            maximize: false,
            objective: vec![0.0; n_vars],
            free: vec![false; n_vars],
            rows: Vec::new(),
        }
    }

    pub fn maximize(n_vars: usize) -> Self {
        LinearProgram { maximize: true, ..Self::minimize(n_vars) }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective_coeff(&mut self, j: usize, c: f64) {
        self.objective[j] = c;
    }

    pub fn set_free(&mut self, j: usize) {
        self.free[j] = true;
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: Sense, rhs: f64) {
        assert_eq!(coeffs.len(), self.n_vars, "row width mismatch");
        self.rows.push(Row { coeffs, sense, rhs });
    }

    /// Sparse convenience: `(index, coefficient)` pairs.
    pub fn add_sparse_row(&mut self, entries: &[(usize, f64)], sense: Sense, rhs: f64) {
        let mut coeffs = vec![0.0; self.n_vars];
        for &(j, c) in entries {
            coeffs[j] += c;
        }
        self.add_row(coeffs, sense, rhs);
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        // column layout: split free vars, then slacks/surpluses, then artificials
        let mut col_of = Vec::with_capacity(self.n_vars);
        let mut n_struct = 0;
        for &is_free in &self.free {
            let plus = n_struct;
            n_struct += 1;
            let minus = if is_free {
                n_struct += 1;
                Some(n_struct - 1)
            } else {
                None
            };
            col_of.push((plus, minus));
        }
        let m = self.rows.len();
        let n_slack = self.rows.iter().filter(|r| r.sense != Sense::Eq).count();
        let mut normalized: Vec<(Vec<f64>, Sense, f64)> = Vec::with_capacity(m);
        for row in &self.rows {
            let mut coeffs = vec![0.0; n_struct];
            for (j, &c) in row.coeffs.iter().enumerate() {
                let (p, mi) = col_of[j];
                coeffs[p] += c;
                if let Some(mi) = mi {
                    coeffs[mi] -= c;
                }
            }
            let (coeffs, sense, rhs) = if row.rhs < 0.0 {
                let flipped = match row.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                (coeffs.into_iter().map(|c| -c).collect(), flipped, -row.rhs)
            } else {
                (coeffs, row.sense, row.rhs)
            };
            normalized.push((coeffs, sense, rhs));
        }
        let n_art = normalized.iter().filter(|r| r.1 != Sense::Le).count();
        let width = n_struct + n_slack + n_art;
        let art_start = n_struct + n_slack;

        let mut tab = vec![vec![0.0; width + 1]; m];
        let mut basis = vec![0usize; m];
        let mut slack = n_struct;
        let mut art = art_start;
        for (i, (coeffs, sense, rhs)) in normalized.iter().enumerate() {
            tab[i][..n_struct].copy_from_slice(coeffs);
            tab[i][width] = *rhs;
            match sense {
                Sense::Le => {
                    tab[i][slack] = 1.0;
                    basis[i] = slack;
                    slack += 1;
                }
                Sense::Ge => {
                    tab[i][slack] = -1.0;
                    slack += 1;
                    tab[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
                Sense::Eq => {
                    tab[i][art] = 1.0;
                    basis[i] = art;
                    art += 1;
                }
            }
        }

        let mut iterations = 0usize;
        if n_art > 0 {
            let mut phase1 = vec![0.0; width];
            for c in phase1.iter_mut().skip(art_start) {
                *c = 1.0;
            }
            run_simplex(&mut tab, &mut basis, &phase1, width, &mut iterations)
                .map_err(|e| if e == LpError::Unbounded { LpError::Infeasible } else { e })?;
            let scale = 1.0 + normalized.iter().map(|r| r.2.abs()).fold(0.0, f64::max);
            let infeas: f64 = basis
                .iter()
                .enumerate()
                .filter(|(_, &b)| b >= art_start)
                .map(|(i, _)| tab[i][width])
                .sum();
            if infeas > 1e-8 * scale {
                return Err(LpError::Infeasible);
            }
            // drive remaining artificials out of the basis where possible
            for i in 0..m {
                if basis[i] >= art_start {
                    if let Some(j) = (0..art_start).find(|&j| tab[i][j].abs() > 1e-9) {
                        pivot(&mut tab, &mut basis, i, j, width);
                    }
                }
            }
        }

        let mut cost = vec![0.0; width];
        let sign = if self.maximize { -1.0 } else { 1.0 };
        for (j, &(p, mi)) in col_of.iter().enumerate() {
            cost[p] = sign * self.objective[j];
            if let Some(mi) = mi {
                cost[mi] = -sign * self.objective[j];
            }
        }
        // artificial columns may never re-enter
        for row in tab.iter_mut() {
            for c in row.iter_mut().take(width).skip(art_start) {
                *c = 0.0;
            }
        }
        run_simplex(&mut tab, &mut basis, &cost, art_start, &mut iterations)?;

        let mut values = vec![0.0; width];
        for (i, &b) in basis.iter().enumerate() {
            values[b] = tab[i][width];
        }
        let x: Vec<f64> = col_of
            .iter()
            .map(|&(p, mi)| values[p] - mi.map_or(0.0, |mi| values[mi]))
            .collect();
        let objective = self.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpSolution { objective, x })
    }
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], r: usize, c: usize, width: usize) {
    let p = tab[r][c];
    for v in tab[r].iter_mut() {
        *v /= p;
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let f = row[c];
        if f != 0.0 {
            for j in 0..=width {
                row[j] -= f * pivot_row[j];
            }
            row[c] = 0.0;
        }
    }
    basis[r] = c;
}

/// Minimizes `cost` over columns `< n_enter` using Bland's rule.
fn run_simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    n_enter: usize,
    iterations: &mut usize,
) -> Result<(), LpError> {
    let width = cost.len();
    loop {
        *iterations += 1;
        if *iterations > MAX_ITERATIONS {
            return Err(LpError::IterationLimit);
        }
        let entering = (0..n_enter).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let reduced = cost[j] - basis.iter().enumerate().map(|(i, &b)| cost[b] * tab[i][j]).sum::<f64>();
            reduced < -COST_EPS
        });
        let Some(j) = entering else {
            return Ok(());
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..tab.len() {
            let a = tab[i][j];
            if a > PIVOT_EPS {
                let ratio = tab[i][width] / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && basis[i] < basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
        }
        let Some((r, _)) = leave else {
            return Err(LpError::Unbounded);
        };
        pivot(tab, basis, r, j, width);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::maximize(2);
        lp.set_objective_coeff(0, 3.0);
        lp.set_objective_coeff(1, 5.0);
        lp.add_row(vec![1.0, 0.0], Sense::Le, 4.0);
        lp.add_row(vec![0.0, 2.0], Sense::Le, 12.0);
        lp.add_row(vec![3.0, 2.0], Sense::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn free_variables_and_equalities() {
        // min t s.t. -t <= 3 - y <= t, -1 <= y <= 1  -> t = 2
        let mut lp = LinearProgram::minimize(2);
        lp.set_objective_coeff(0, 1.0);
        lp.set_free(1);
        lp.add_row(vec![1.0, -1.0], Sense::Ge, -3.0);
        lp.add_row(vec![1.0, 1.0], Sense::Ge, 3.0);
        lp.add_row(vec![0.0, 1.0], Sense::Le, 1.0);
        lp.add_row(vec![0.0, 1.0], Sense::Ge, -1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);

        let mut eq = LinearProgram::minimize(2);
        eq.set_objective_coeff(0, 1.0);
        eq.set_objective_coeff(1, 1.0);
        eq.add_row(vec![1.0, 2.0], Sense::Eq, 4.0);
        let s = eq.solve().unwrap();
        assert!((s.objective - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::minimize(1);
        lp.add_row(vec![1.0], Sense::Le, 1.0);
        lp.add_row(vec![1.0], Sense::Ge, 2.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Infeasible);

        let mut lp = LinearProgram::maximize(1);
        lp.set_objective_coeff(0, 1.0);
        lp.add_row(vec![1.0], Sense::Ge, 0.0);
        assert_eq!(lp.solve().unwrap_err(), LpError::Unbounded);
    }

    #[test]
    fn degenerate_redundant_equalities() {
        let mut lp = LinearProgram::minimize(2);
        lp.set_objective_coeff(0, 1.0);
        lp.add_row(vec![1.0, 1.0], Sense::Eq, 1.0);
        lp.add_row(vec![2.0, 2.0], Sense::Eq, 2.0);
        let s = lp.solve().unwrap();
        assert!(s.objective.abs() < 1e-9);
        assert!((s.x[1] - 1.0).abs() < 1e-9);
    }
}
