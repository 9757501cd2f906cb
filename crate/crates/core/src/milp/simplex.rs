//! Dense bounded-variable primal simplex.
//!
//! Rows become equalities with one slack each; rows whose slack cannot absorb
//! the starting residual get an artificial column, driven out in phase one.
//! The tableau is rebuilt from the original matrix every few pivots to keep
//! rounding from accumulating.

use thiserror::Error;

use super::model::{LpModel, ModelError, Sense};

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;
const HARRIS_SLACK: f64 = 1e-9;
const REINVERT_EVERY: usize = 100;
const MAX_ITERATIONS: usize = 200_000;

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("the relaxation is infeasible")]
    Infeasible,
    #[error("the relaxation is unbounded")]
    Unbounded,
    #[error("iteration limit reached")]
    IterationLimit,
    #[error("singular basis")]
    Singular,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// In the model's own sense.
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

struct Tableau {
    m: usize,
    /// Original equality matrix `[A | I | artificials]`, row-major.
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
    /// `B^-1 A` and `B^-1 b`.
    t: Vec<Vec<f64>>,
    tb: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    pivots_since_reinvert: usize,
    iterations: usize,
}

impl Tableau {
    fn cols(&self) -> usize {
        self.lo.len()
    }

    fn reinvert(&mut self) -> Result<(), LpError> {
        let (m, cols) = (self.m, self.cols());
        let mut t = self.a.clone();
        let mut tb = self.b.clone();
        for k in 0..m {
            let col = self.basis[k];
            let p = (k..m)
                .max_by(|&i, &j| t[i][col].abs().total_cmp(&t[j][col].abs()))
                .expect("nonempty");
            if t[p][col].abs() < 1e-12 {
                return Err(LpError::Singular);
            }
            t.swap(k, p);
            tb.swap(k, p);
            let inv = 1.0 / t[k][col];
            for v in t[k].iter_mut() {
                *v *= inv;
            }
            tb[k] *= inv;
            let pivot_row = t[k].clone();
            for i in (0..m).filter(|&i| i != k) {
                let factor = t[i][col];
                if factor != 0.0 {
                    for j in 0..cols {
                        t[i][j] -= factor * pivot_row[j];
                    }
                    tb[i] -= factor * tb[k];
                }
            }
        }
        self.t = t;
        self.tb = tb;
        self.recompute_basics();
        self.pivots_since_reinvert = 0;
        Ok(())
    }

    fn recompute_basics(&mut self) {
        for i in 0..self.m {
            let mut v = self.tb[i];
            for j in 0..self.cols() {
                if !self.is_basic[j] && self.x[j] != 0.0 {
                    v -= self.t[i][j] * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let inv = 1.0 / self.t[r][col];
        for v in self.t[r].iter_mut() {
            *v *= inv;
        }
        self.tb[r] *= inv;
        let pivot_row = self.t[r].clone();
        let pivot_b = self.tb[r];
        for i in (0..self.m).filter(|&i| i != r) {
            let factor = self.t[i][col];
            if factor != 0.0 {
                for (v, p) in self.t[i].iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                self.tb[i] -= factor * pivot_b;
            }
        }
        self.is_basic[self.basis[r]] = false;
        self.basis[r] = col;
        self.is_basic[col] = true;
        self.pivots_since_reinvert += 1;
    }

    /// Rate of change of each basic variable and the step that keeps it
    /// within its bounds loosened by `slack`.
    fn row_limit(&self, i: usize, j: usize, dir: f64, slack: f64) -> Option<(f64, f64)> {
        let rate = -dir * self.t[i][j];
        let bv = self.basis[i];
        if rate < -PIVOT_TOL && self.lo[bv].is_finite() {
            Some((((self.x[bv] - self.lo[bv] + slack) / -rate).max(0.0), rate))
        } else if rate > PIVOT_TOL && self.hi[bv].is_finite() {
            Some((((self.hi[bv] - self.x[bv] + slack) / rate).max(0.0), rate))
        } else {
            None
        }
    }

    /// Two-pass ratio test: the largest step allowed with bounds loosened by
    /// `HARRIS_SLACK`, then the largest pivot among rows blocking within it.
    /// Under Bland's rule the exact minimum ratio with the smallest basic
    /// index is taken instead.
    fn ratio_test(&self, j: usize, dir: f64, bland: bool) -> (f64, Option<(usize, f64)>) {
        let range = self.hi[j] - self.lo[j];
        if bland {
            let mut step = range;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let Some((limit, rate)) = self.row_limit(i, j, dir, 0.0) else { continue };
                let better = match leave {
                    None => limit < step,
                    Some((r, _)) => limit < step - 1e-12 || (limit <= step + 1e-12 && self.basis[i] < self.basis[r]),
                };
                if better {
                    step = step.min(limit);
                    leave = Some((i, rate));
                }
            }
            return (step, leave);
        }
        let loose = (0..self.m)
            .filter_map(|i| self.row_limit(i, j, dir, HARRIS_SLACK))
            .map(|(l, _)| l)
            .fold(f64::INFINITY, f64::min);
        if range <= loose {
            return (range, None);
        }
        let mut leave: Option<(usize, f64, f64)> = None;
        for i in 0..self.m {
            let Some((limit, rate)) = self.row_limit(i, j, dir, 0.0) else { continue };
            if limit <= loose && leave.is_none_or(|(r, _, _)| self.t[i][j].abs() > self.t[r][j].abs()) {
                leave = Some((i, rate, limit));
            }
        }
        match leave {
            Some((i, rate, limit)) => (limit, Some((i, rate))),
            None => (loose, None),
        }
    }

    /// Minimizes `cost . x` from the current basic solution.
    fn optimize(&mut self, cost: &[f64], bland_after: usize) -> Result<(), LpError> {
        let cols = self.cols();
        let mut local = 0usize;
        loop {
            if self.iterations >= MAX_ITERATIONS {
                return Err(LpError::IterationLimit);
            }
            if self.pivots_since_reinvert >= REINVERT_EVERY {
                self.reinvert()?;
            }
            let bland = local >= bland_after;
            let mut entering: Option<(usize, f64)> = None;
            for j in (0..cols).filter(|&j| !self.is_basic[j]) {
                let mut d = cost[j];
                for i in 0..self.m {
                    let c = cost[self.basis[i]];
                    if c != 0.0 {
                        d -= c * self.t[i][j];
                    }
                }
                let can_up = self.x[j] < self.hi[j] - 1e-12;
                let can_down = self.x[j] > self.lo[j] + 1e-12;
                let eligible = (d < -OPT_TOL && can_up) || (d > OPT_TOL && can_down);
                if !eligible {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                if entering.is_none_or(|(_, best)| d.abs() > best.abs()) {
                    entering = Some((j, d));
                }
            }
            let Some((j, d)) = entering else {
                return Ok(());
            };
            let dir = if d < 0.0 { 1.0 } else { -1.0 };

            let (step, leave) = self.ratio_test(j, dir, bland);
            if step.is_infinite() {
                return Err(LpError::Unbounded);
            }
            self.iterations += 1;
            local += 1;
            self.x[j] += dir * step;
            for i in 0..self.m {
                let bv = self.basis[i];
                self.x[bv] -= dir * step * self.t[i][j];
            }
            if let Some((r, rate)) = leave {
                let bv = self.basis[r];
                self.x[bv] = if rate < 0.0 { self.lo[bv] } else { self.hi[bv] };
                self.pivot(r, j);
            } else {
                self.x[j] = if dir > 0.0 { self.hi[j] } else { self.lo[j] };
            }
        }
    }
}

/// Optimal basic solution of the continuous relaxation.
pub fn solve_lp(model: &LpModel) -> Result<LpSolution, LpError> {
    solve_lp_bounded(model, &model.lo, &model.hi)
}

/// As [`solve_lp`] with the column bounds replaced. A run that ends in a
/// numerically singular basis is repeated once under Bland's rule, which
/// pivots only on the exact minimum ratio.
pub fn solve_lp_bounded(model: &LpModel, lo: &[f64], hi: &[f64]) -> Result<LpSolution, LpError> {
    match solve_with(model, lo, hi, false) {
        Err(LpError::Singular) => solve_with(model, lo, hi, true),
        other => other,
    }
}

fn solve_with(model: &LpModel, lo: &[f64], hi: &[f64], always_bland: bool) -> Result<LpSolution, LpError> {
    model.validate()?;
    let n = model.n_cols();
    let m = model.rows.len();
    if lo.iter().zip(hi).any(|(l, h)| l > &(h + 1e-12)) {
        return Err(LpError::Infeasible);
    }
    let mut x = vec![0.0; n];
    for j in 0..n {
        x[j] = if lo[j].is_finite() {
            lo[j]
        } else if hi[j].is_finite() {
            hi[j]
        } else {
            0.0
        };
    }
    let cols = n + 2 * m;
    let mut a = vec![vec![0.0; cols]; m];
    let mut b = vec![0.0; m];
    let mut col_lo = lo.to_vec();
    let mut col_hi = hi.to_vec();
    col_lo.resize(cols, 0.0);
    col_hi.resize(cols, 0.0);
    let mut xs = x.clone();
    xs.resize(cols, 0.0);
    let mut basis = vec![0; m];
    let mut any_artificial = false;
    for (r, row) in model.rows.iter().enumerate() {
        for &(j, v) in &row.coefs {
            a[r][j] += v;
        }
        b[r] = row.rhs;
        let slack = n + r;
        let art = n + m + r;
        a[r][slack] = 1.0;
        (col_lo[slack], col_hi[slack]) = match row.sense {
            Sense::Le => (0.0, f64::INFINITY),
            Sense::Ge => (f64::NEG_INFINITY, 0.0),
            Sense::Eq => (0.0, 0.0),
        };
        let residual = row.rhs - (0..n).map(|j| a[r][j] * x[j]).sum::<f64>();
        if residual >= col_lo[slack] && residual <= col_hi[slack] {
            basis[r] = slack;
            a[r][art] = 1.0;
        } else {
            basis[r] = art;
            a[r][art] = if residual >= 0.0 { 1.0 } else { -1.0 };
            col_hi[art] = f64::INFINITY;
            any_artificial = true;
        }
    }
    let mut is_basic = vec![false; cols];
    for &j in &basis {
        is_basic[j] = true;
    }
    let mut tab = Tableau {
        m,
        a,
        b,
        t: Vec::new(),
        tb: Vec::new(),
        lo: col_lo,
        hi: col_hi,
        x: xs,
        basis,
        is_basic,
        pivots_since_reinvert: 0,
        iterations: 0,
    };
    tab.reinvert()?;
    let bland_after = if always_bland { 0 } else { 10 * (m + cols) };

    if any_artificial {
        let mut cost = vec![0.0; cols];
        for c in cost[n + m..].iter_mut() {
            *c = 1.0;
        }
        tab.optimize(&cost, bland_after)?;
        tab.reinvert()?;
        let scale = 1.0 + model.rows.iter().map(|r| r.rhs.abs()).fold(0.0, f64::max);
        let infeasibility: f64 = tab.x[n + m..].iter().sum();
        if infeasibility > FEAS_TOL * scale {
            return Err(LpError::Infeasible);
        }
        for j in n + m..cols {
            tab.hi[j] = 0.0;
            if !tab.is_basic[j] {
                tab.x[j] = 0.0;
            }
        }
    }

    let sign = if model.maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; cols];
    for (c, o) in cost.iter_mut().zip(&model.obj) {
        *c = sign * o;
    }
    tab.optimize(&cost, bland_after)?;
    tab.reinvert()?;
    let x: Vec<f64> = (0..n).map(|j| tab.x[j].clamp(lo[j], hi[j])).collect();
    Ok(LpSolution {
        objective: model.objective(&x),
        x,
        iterations: tab.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_w() {
        let mut lp = LpModel::new(true);
        let w = lp.add_col(1.0, f64::NEG_INFINITY, f64::INFINITY, false);
        lp.add_col(0.0, 0.0, 3.0, true);
        lp.add_row(vec![(w, 1.0)], Sense::Le, 0.0);
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.objective.abs() < 1e-12);
    }

    #[test]
    fn simple_sum() {
        let mut lp = LpModel::new(true);
        let x1 = lp.add_col(1.0, 0.0, f64::INFINITY, false);
        let x2 = lp.add_col(1.0, 0.0, f64::INFINITY, false);
        lp.add_row(vec![(x1, 1.0), (x2, 1.0)], Sense::Le, 1.0);
        assert!((solve_lp(&lp).unwrap().objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LpModel::new(false);
        let x = lp.add_col(1.0, 0.0, 1.0, false);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&lp), Err(LpError::Infeasible));
        let mut lp = LpModel::new(true);
        let x = lp.add_col(1.0, 0.0, f64::INFINITY, false);
        lp.add_row(vec![(x, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp), Err(LpError::Unbounded));
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + 2y, x + y = 3, x - y >= -1, 0 <= x <= 1
        let mut lp = LpModel::new(false);
        let x = lp.add_col(1.0, 0.0, 1.0, false);
        let y = lp.add_col(2.0, 0.0, f64::INFINITY, false);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Eq, 3.0);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], Sense::Ge, -1.0);
        // y >= 2 from both rows at x = 1
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 5.0).abs() < 1e-9, "{sol:?}");
    }

    #[test]
    fn free_column() {
        let mut lp = LpModel::new(true);
        let w = lp.add_col(1.0, f64::NEG_INFINITY, f64::INFINITY, false);
        let x = lp.add_col(0.0, 0.0, 2.0, false);
        lp.add_row(vec![(w, 1.0), (x, -0.5)], Sense::Le, 1.0);
        lp.add_row(vec![(w, 1.0), (x, 2.0)], Sense::Le, 4.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 1.6).abs() < 1e-9, "{sol:?}");
    }
}
