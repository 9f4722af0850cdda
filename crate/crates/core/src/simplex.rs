//! Dense two-phase simplex with Bland's rule.
//!
//! Maximizes `c . x` over `x >= 0` subject to rows `a_i . x <= b_i` or
//! `a_i . x >= b_i`. Sized for the systems this workspace generates (at most
//! a few hundred variables and rows); Bland's entering/leaving rule makes
//! every solve deterministic and cycle-free, and degenerate ties break
//! toward the lowest variable index so witnesses are reproducible.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Feasibility and reduced-cost tolerance.
pub const LP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Outcome of one solve; `witness` holds the structural variables only.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    pub value: f64,
    pub witness: Vec<f64>,
}

struct Tableau {
    /// rows x (cols + 1); last column is the rhs.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.a[row][col];
        let width = self.cols + 1;
        for j in 0..width {
            self.a[row][j] /= piv;
        }
        for r in 0..self.a.len() {
            if r == row {
                continue;
            }
            let factor = self.a[r][col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..width {
                self.a[r][j] -= factor * self.a[row][j];
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule: entering column is the lowest-index improving one,
    /// leaving row is the min-ratio row, ties broken by lowest basis index.
    fn run(&mut self, obj: &mut Vec<f64>, allowed_cols: usize) -> Result<LpStatus> {
        loop {
            let mut entering = None;
            for j in 0..allowed_cols {
                if obj[j] > LP_TOLERANCE {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(LpStatus::Optimal);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for r in 0..self.a.len() {
                let coef = self.a[r][col];
                if coef > LP_TOLERANCE {
                    let ratio = self.a[r][self.cols] / coef;
                    let better = match leaving {
                        None => true,
                        Some((best_r, best_ratio)) => {
                            ratio < best_ratio - LP_TOLERANCE
                                || (ratio < best_ratio + LP_TOLERANCE
                                    && self.basis[r] < self.basis[best_r])
                        }
                    };
                    if better {
                        leaving = Some((r, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Ok(LpStatus::Unbounded);
            };
            self.pivot(row, col);
            // Keep the objective row reduced against the new basis column.
            let factor = obj[col];
            if factor != 0.0 {
                let width = self.cols + 1;
                for j in 0..width {
                    obj[j] -= factor * self.a[row][j];
                }
            }
        }
    }
}

/// Maximizes `objective . x` subject to `rows` and `x >= 0`.
pub fn maximize(objective: &[f64], rows: &[LpRow]) -> Result<LpOutcome> {
    let n = objective.len();
    for row in rows {
        if row.coeffs.len() != n {
            return Err(Error::Argument(String::from(
                "constraint arity does not match objective",
            )));
        }
        if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Argument(String::from("constraints must be finite")));
        }
    }
    if objective.iter().any(|c| !c.is_finite()) {
        return Err(Error::Argument(String::from("objective must be finite")));
    }

    let m = rows.len();
    // Column layout: structural 0..n, slack/surplus n..n+m, artificials after.
    let mut needs_artificial = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        // Normalize to nonnegative rhs to decide whether the slack column
        // can serve as the initial basis entry.
        let flip = row.rhs < 0.0;
        let sense = match (row.sense, flip) {
            (Sense::Le, false) | (Sense::Ge, true) => Sense::Le,
            (Sense::Ge, false) | (Sense::Le, true) => Sense::Ge,
        };
        if sense == Sense::Ge {
            needs_artificial.push(i);
        }
    }
    let n_art = needs_artificial.len();
    let cols = n + m + n_art;

    let mut a = vec![vec![0.0; cols + 1]; m];
    let mut basis = vec![0usize; m];
    let mut art_of_row = vec![usize::MAX; m];
    let mut next_art = n + m;
    for (i, row) in rows.iter().enumerate() {
        let flip = row.rhs < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        for j in 0..n {
            a[i][j] = sign * row.coeffs[j];
        }
        a[i][cols] = sign * row.rhs;
        let sense = match (row.sense, flip) {
            (Sense::Le, false) | (Sense::Ge, true) => Sense::Le,
            (Sense::Ge, false) | (Sense::Le, true) => Sense::Ge,
        };
        match sense {
            Sense::Le => {
                a[i][n + i] = 1.0;
                basis[i] = n + i;
            }
            Sense::Ge => {
                a[i][n + i] = -1.0;
                a[i][next_art] = 1.0;
                basis[i] = next_art;
                art_of_row[i] = next_art;
                next_art += 1;
            }
        }
    }

    let mut tab = Tableau { a, basis, cols };

    // Phase 1: drive the artificial variables to zero.
    if n_art > 0 {
        let mut obj = vec![0.0; cols + 1];
        for i in 0..m {
            if art_of_row[i] != usize::MAX {
                // maximize -(sum of artificials): add each artificial row
                // into the objective so reduced costs start consistent.
                for j in 0..=cols {
                    obj[j] += tab.a[i][j];
                }
            }
        }
        for &art in &art_of_row {
            if art != usize::MAX {
                obj[art] = 0.0;
            }
        }
        tab.run(&mut obj, cols)?;
        let infeas = obj[cols];
        if infeas > 1e-7 {
            return Ok(LpOutcome {
                status: LpStatus::Infeasible,
                value: f64::NAN,
                witness: Vec::new(),
            });
        }
        // Pivot any artificial still sitting (degenerately) in the basis out.
        for r in 0..m {
            if tab.basis[r] >= n + m {
                let col = (0..n + m).find(|&j| tab.a[r][j].abs() > LP_TOLERANCE);
                if let Some(col) = col {
                    tab.pivot(r, col);
                }
            }
        }
    }

    // Phase 2: the real objective, artificial columns frozen.
    let mut obj = vec![0.0; cols + 1];
    obj[..n].copy_from_slice(objective);
    for r in 0..m {
        let b = tab.basis[r];
        if b < n && objective[b] != 0.0 {
            let factor = objective[b];
            for j in 0..=cols {
                obj[j] -= factor * tab.a[r][j];
            }
        }
    }
    let status = tab.run(&mut obj, n + m)?;
    if status == LpStatus::Unbounded {
        return Ok(LpOutcome {
            status,
            value: f64::INFINITY,
            witness: Vec::new(),
        });
    }

    let mut witness = vec![0.0; n];
    for r in 0..m {
        if tab.basis[r] < n {
            witness[tab.basis[r]] = tab.a[r][cols];
        }
    }
    let value = witness.iter().zip(objective).map(|(x, c)| x * c).sum();
    Ok(LpOutcome {
        status: LpStatus::Optimal,
        value,
        witness,
    })
}
