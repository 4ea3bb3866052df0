//! Small dense linear programs in standard form:
//!
//! ```text
//! minimize c'x  subject to  A x = b,  x >= 0
//! ```
//!
//! Two independent solvers: exhaustive enumeration of basic solutions, which
//! is exact up to round-off and practical for a dozen or so columns, and a
//! two-phase tableau simplex for anything larger.

use itertools::Itertools;
use thiserror::Error;

use crate::numeric;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("constraint matrix is {rows}x{cols} but b has {b} and c has {c} entries")]
    Dimension {
        rows: usize,
        cols: usize,
        b: usize,
        c: usize,
    },
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpTolerances {
    /// Largest constraint residual accepted as feasible.
    pub feasibility: f64,
    /// Pivots smaller than this are treated as zero.
    pub pivot: f64,
    /// Reduced costs above `-optimality` count as non-improving.
    pub optimality: f64,
}

impl Default for LpTolerances {
    fn default() -> Self {
        Self {
            feasibility: 1e-9,
            pivot: 1e-11,
            optimality: 1e-12,
        }
    }
}

/// `minimize c'x  s.t.  A x = b, x >= 0` with `A` stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl StandardLp {
    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }

    fn check(&self) -> Result<(), LpError> {
        let cols = self.cols();
        if self.b.len() != self.rows() || self.a.iter().any(|r| r.len() != cols) {
            return Err(LpError::Dimension {
                rows: self.rows(),
                cols: self.a.first().map_or(0, Vec::len),
                b: self.b.len(),
                c: cols,
            });
        }
        Ok(())
    }

    pub fn max_residual(&self, x: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| (numeric::dot(row, x) - bi).abs())
            .fold(0.0, f64::max)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        numeric::dot(&self.c, x)
    }
}

/// Solve a square system by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot falls below `pivot_tol` times the largest
/// entry of the matrix.
pub(crate) fn solve_square(
    mut m: Vec<Vec<f64>>,
    mut rhs: Vec<f64>,
    pivot_tol: f64,
) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, m[r][col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        if mag <= pivot_tol * scale {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[r][k] -= f * m[col][k];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let tail = numeric::sum((r + 1..n).map(|k| m[r][k] * x[k]));
        x[r] = (rhs[r] - tail) / m[r][r];
    }
    Some(x)
}

/// Row-reduce `[A | b]` and return a maximal set of independent rows, or
/// `None` if the system is inconsistent.
fn independent_rows(lp: &StandardLp, tol: &LpTolerances) -> Option<Vec<usize>> {
    let cols = lp.cols();
    let mut work: Vec<(usize, Vec<f64>, f64)> =
        lp.a.iter()
            .zip(&lp.b)
            .enumerate()
            .map(|(i, (r, b))| (i, r.clone(), *b))
            .collect();
    let scale =
        lp.a.iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
            .max(f64::MIN_POSITIVE);
    let mut keep = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == work.len() {
            break;
        }
        let (piv, mag) = (next..work.len())
            .map(|r| (r, work[r].1[col].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty range");
        if mag <= tol.pivot * scale {
            continue;
        }
        work.swap(next, piv);
        let (head, tail) = work.split_at_mut(next + 1);
        let pivot_row = &head[next];
        for row in tail.iter_mut() {
            let f = row.1[col] / pivot_row.1[col];
            if f != 0.0 {
                for k in col..cols {
                    row.1[k] -= f * pivot_row.1[k];
                }
                row.2 -= f * pivot_row.2;
            }
        }
        keep.push(work[next].0);
        next += 1;
    }
    // Rows left over reduce to 0 = rhs.
    if work[next..].iter().any(|r| r.2.abs() > tol.feasibility) {
        return None;
    }
    keep.sort_unstable();
    Some(keep)
}

/// Solve by enumerating every basis: all column subsets whose size equals
/// the rank of `A`. Cost grows as `C(cols, rank)`.
pub fn solve_vertex_enumeration(lp: &StandardLp, tol: &LpTolerances) -> Result<LpOutcome, LpError> {
    lp.check()?;
    let Some(rows) = independent_rows(lp, tol) else {
        return Ok(LpOutcome::Infeasible);
    };
    let rank = rows.len();
    let cols = lp.cols();
    if rank == 0 {
        // b = 0 after reduction: x = 0 is the only basic solution.
        let x = vec![0.0; cols];
        return Ok(if lp.c.iter().any(|c| *c < 0.0) {
            LpOutcome::Unbounded
        } else {
            LpOutcome::Optimal { x, value: 0.0 }
        });
    }
    let rhs: Vec<f64> = rows.iter().map(|&r| lp.b[r]).collect();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for subset in (0..cols).combinations(rank) {
        let m: Vec<Vec<f64>> = rows
            .iter()
            .map(|&r| subset.iter().map(|&j| lp.a[r][j]).collect())
            .collect();
        let Some(xs) = solve_square(m, rhs.clone(), tol.pivot) else {
            continue;
        };
        if xs.iter().any(|x| *x < -tol.feasibility) {
            continue;
        }
        let mut x = vec![0.0; cols];
        for (&j, &v) in subset.iter().zip(&xs) {
            x[j] = v.max(0.0);
        }
        if lp.max_residual(&x) > tol.feasibility {
            continue;
        }
        let value = lp.objective(&x);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, x));
        }
    }
    // A bounded feasible region always has an optimal vertex; the feasible
    // sets built by this crate are bounded, so no vertex means infeasible.
    Ok(match best {
        Some((value, x)) => LpOutcome::Optimal { x, value },
        None => LpOutcome::Infeasible,
    })
}

const MAX_PIVOTS: usize = 50_000;
const DEGENERATE_BEFORE_BLAND: usize = 50;

struct Tableau {
    /// `rows x (width + 1)`; the last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.width]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for x in self.t[row].iter_mut() {
            *x /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(&pivot_row) {
                    *x -= f * y;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[f64], j: usize) -> f64 {
        let mut acc = numeric::CompensatedSum::new();
        acc.add(cost[j]);
        for (i, &bi) in self.basis.iter().enumerate() {
            acc.add(-cost[bi] * self.t[i][j]);
        }
        acc.value()
    }

    /// Minimize `cost` over columns `< allowed`. Returns `false` if unbounded.
    fn optimize(
        &mut self,
        cost: &[f64],
        allowed: usize,
        tol: &LpTolerances,
        pivots: &mut usize,
    ) -> Result<bool, LpError> {
        let mut degenerate = 0;
        let mut bland = false;
        loop {
            // Once on, Bland's rule stays on so it can rule out cycling.
            bland |= degenerate >= DEGENERATE_BEFORE_BLAND;
            let mut entering = None;
            let mut most_negative = -tol.optimality;
            for j in 0..allowed {
                if self.basis.contains(&j) {
                    continue;
                }
                let d = self.reduced_cost(cost, j);
                if d < most_negative {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    most_negative = d;
                }
            }
            let Some(col) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > tol.pivot {
                    let ratio = self.rhs(i).max(0.0) / a;
                    let better = match leaving {
                        None => true,
                        Some((r, best)) => {
                            let tie = (ratio - best).abs() <= tol.optimality * (1.0 + best);
                            (ratio < best && !tie) || (tie && self.basis[i] < self.basis[r])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leaving else {
                return Ok(false);
            };
            if ratio <= tol.feasibility {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(row, col);
            *pivots += 1;
            if *pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit(MAX_PIVOTS));
            }
        }
    }
}

/// Two-phase dense tableau simplex. Dantzig pricing, switching to Bland's
/// rule after a run of degenerate pivots.
pub fn solve_simplex(lp: &StandardLp, tol: &LpTolerances) -> Result<LpOutcome, LpError> {
    lp.check()?;
    let (m, n) = (lp.rows(), lp.cols());
    let width = n + m;
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if lp.b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width + 1];
        for j in 0..n {
            row[j] = sign * lp.a[i][j];
        }
        row[n + i] = 1.0;
        row[width] = sign * lp.b[i];
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..width).collect(),
        width,
    };
    let mut pivots = 0;

    let phase1: Vec<f64> = (0..width).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    tab.optimize(&phase1, width, tol, &mut pivots)?;
    let infeasibility = numeric::sum(
        tab.basis
            .iter()
            .enumerate()
            .filter(|(_, &bj)| bj >= n)
            .map(|(i, _)| tab.rhs(i).abs()),
    );
    if infeasibility > tol.feasibility {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut row_ids: Vec<usize> = (0..m).collect();
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] < n {
            i += 1;
            continue;
        }
        let candidate = (0..n)
            .filter(|j| !tab.basis.contains(j))
            .map(|j| (j, tab.t[i][j].abs()))
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match candidate {
            Some((j, mag)) if mag > tol.pivot => {
                tab.pivot(i, j);
                i += 1;
            }
            _ => {
                tab.t.remove(i);
                tab.basis.remove(i);
                row_ids.remove(i);
            }
        }
    }

    let mut phase2 = lp.c.clone();
    phase2.resize(width, 0.0);
    if !tab.optimize(&phase2, n, tol, &mut pivots)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for (i, &bj) in tab.basis.iter().enumerate() {
        x[bj] = tab.rhs(i).max(0.0);
    }
    // Re-solve the final basis against the original data; keep whichever
    // solution has the smaller residual.
    let square: Vec<Vec<f64>> = row_ids
        .iter()
        .map(|&r| tab.basis.iter().map(|&j| lp.a[r][j]).collect())
        .collect();
    let rhs: Vec<f64> = row_ids.iter().map(|&r| lp.b[r]).collect();
    if let Some(xb) = solve_square(square, rhs, tol.pivot) {
        let mut refined = vec![0.0; n];
        for (&j, &v) in tab.basis.iter().zip(&xb) {
            refined[j] = v.max(0.0);
        }
        if lp.max_residual(&refined) <= lp.max_residual(&x) {
            x = refined;
        }
    }
    let value = lp.objective(&x);
    Ok(LpOutcome::Optimal { x, value })
}
