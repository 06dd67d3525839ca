//! Dense two-phase simplex for small linear programs.
//!
//! Variables carry individual bounds `[lb, ub]` (`ub` may be infinite), rows
//! are `<=`, `>=`, or `=`. The tableau is dense; this is sized for the
//! cutting-plane masters produced by the k-median relaxation (hundreds of
//! rows and columns), not for large sparse programs.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("problem is infeasible")]
    Infeasible,

    #[error("problem is unbounded")]
    Unbounded,

    #[error("iteration limit reached")]
    IterationLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct LpProblem {
    obj: Vec<f64>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    rows: Vec<Vec<f64>>,
    ops: Vec<RowOp>,
    rhs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl LpProblem {
    /// A minimization problem over `ncols` variables, all initially in `[0, inf)`
    /// with zero objective coefficients.
    pub fn new(ncols: usize) -> Self {
        LpProblem {
            obj: vec![0.0; ncols],
            lb: vec![0.0; ncols],
            ub: vec![f64::INFINITY; ncols],
            rows: Vec::new(),
            ops: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, col: usize, coeff: f64) {
        self.obj[col] = coeff;
    }

    pub fn set_bounds(&mut self, col: usize, lb: f64, ub: f64) {
        self.lb[col] = lb;
        self.ub[col] = ub;
    }

    /// Adds a row given as sparse `(col, coeff)` pairs.
    pub fn add_row(&mut self, coeffs: &[(usize, f64)], op: RowOp, rhs: f64) {
        let mut row = vec![0.0; self.obj.len()];
        for &(c, v) in coeffs {
            row[c] += v;
        }
        self.rows.push(row);
        self.ops.push(op);
        self.rhs.push(rhs);
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Simplex::new(self).solve()
    }
}

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

struct Simplex {
    m: usize,
    /// Total columns: structural + slack + artificial.
    ncols: usize,
    /// Columns `>= art_start` are phase-1 artificials.
    art_start: usize,
    lb: Vec<f64>,
    ub: Vec<f64>,
    obj: Vec<f64>,
    /// Row-major `m x ncols` tableau, `B^{-1} A`.
    t: Vec<f64>,
    /// Current value of the basic variable in each row.
    beta: Vec<f64>,
    /// Reduced-cost row for the active phase.
    costrow: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    /// Columns at or beyond this index never price in (phase 2 excludes artificials).
    active_cols: usize,
}

impl Simplex {
    fn new(lp: &LpProblem) -> Self {
        let n_struct = lp.obj.len();
        let n_slack = lp.ops.iter().filter(|op| **op != RowOp::Eq).count();
        let m = lp.rows.len();
        let ncols = n_struct + n_slack + m;
        let art_start = n_struct + n_slack;

        let mut lb = lp.lb.clone();
        let mut ub = lp.ub.clone();
        let mut obj = lp.obj.clone();
        lb.resize(ncols, 0.0);
        ub.resize(ncols, f64::INFINITY);
        obj.resize(ncols, 0.0);

        let mut t = vec![0.0; m * ncols];
        let mut slack_col = n_struct;
        let mut slack_of_row = vec![usize::MAX; m];
        for (r, row) in lp.rows.iter().enumerate() {
            t[r * ncols..r * ncols + n_struct].copy_from_slice(row);
            match lp.ops[r] {
                RowOp::Le => {
                    t[r * ncols + slack_col] = 1.0;
                    slack_of_row[r] = slack_col;
                    slack_col += 1;
                }
                RowOp::Ge => {
                    t[r * ncols + slack_col] = -1.0;
                    slack_of_row[r] = slack_col;
                    slack_col += 1;
                }
                RowOp::Eq => {}
            }
        }

        // Nonbasic structural and slack variables start at their lower bound
        // (slacks at 0); artificials absorb the residual of each row. Rows
        // with negative residual are negated so the starting basis is the
        // identity.
        let mut state = vec![VarState::AtLower; ncols];
        let mut basis = vec![0usize; m];
        let mut beta = vec![0.0; m];
        for r in 0..m {
            let mut resid = lp.rhs[r];
            for j in 0..art_start {
                let v = t[r * ncols + j];
                if v != 0.0 && lb[j] != 0.0 {
                    resid -= v * lb[j];
                }
            }
            if resid < 0.0 {
                for v in &mut t[r * ncols..r * ncols + art_start] {
                    *v = -*v;
                }
                resid = -resid;
            }
            let art = art_start + r;
            t[r * ncols + art] = 1.0;
            basis[r] = art;
            state[art] = VarState::Basic(r);
            beta[r] = resid;
        }

        Simplex {
            m,
            ncols,
            art_start,
            lb,
            ub,
            obj,
            t,
            beta,
            costrow: vec![0.0; ncols],
            state,
            basis,
            active_cols: ncols,
        }
    }

    /// Rebuilds the reduced-cost row `c_j - c_B B^{-1} A_j` for cost vector `c`.
    fn rebuild_costrow(&mut self, cost: &[f64]) {
        let mut row = cost.to_vec();
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let tr = r * self.ncols;
                for j in 0..self.active_cols {
                    row[j] -= cb * self.t[tr + j];
                }
            }
        }
        self.costrow = row;
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Basic(r) => self.beta[r],
            VarState::AtLower => self.lb[j],
            VarState::AtUpper => self.ub[j],
        }
    }

    /// One priced entering column under Dantzig or Bland rules.
    fn pick_entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.active_cols {
            let (dir, score) = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::AtLower => (1.0, -self.costrow[j]),
                VarState::AtUpper => (-1.0, self.costrow[j]),
            };
            if self.lb[j] == self.ub[j] {
                continue; // fixed variable
            }
            if score > COST_TOL {
                if bland {
                    return Some((j, dir));
                }
                match best {
                    Some((_, _, s)) if s >= score => {}
                    _ => best = Some((j, dir, score)),
                }
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Moves entering variable `j` in signed direction `dir`; returns false when unbounded.
    fn pivot_step(&mut self, j: usize, dir: f64, bland: bool) -> bool {
        // Ratio test: first limit is the entering variable's own range.
        let range = self.ub[j] - self.lb[j];
        let mut t_max = range; // may be inf
        let mut leave: Option<usize> = None; // row index
        let mut leave_to_upper = false;

        for r in 0..self.m {
            let alpha = dir * self.t[r * self.ncols + j];
            if alpha.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[r];
            // Basic value moves as beta[r] - t * alpha.
            let (limit, to_upper) = if alpha > 0.0 {
                (self.beta[r] - self.lb[b], false)
            } else {
                if self.ub[b].is_infinite() {
                    continue;
                }
                (self.ub[b] - self.beta[r], true)
            };
            let ratio = (limit.max(0.0)) / alpha.abs();
            let better = match leave {
                None => ratio < t_max - 1e-12,
                Some(lr) => {
                    if bland {
                        ratio < t_max - 1e-12
                            || (ratio <= t_max + 1e-12 && self.basis[r] < self.basis[lr])
                    } else {
                        // Prefer larger pivot magnitude on near-ties for stability.
                        ratio < t_max - 1e-12
                            || (ratio <= t_max + 1e-12
                                && alpha.abs()
                                    > (dir * self.t[lr * self.ncols + j]).abs())
                    }
                }
            };
            if better {
                t_max = ratio;
                leave = Some(r);
                leave_to_upper = to_upper;
            }
        }

        if t_max.is_infinite() {
            return false;
        }

        match leave {
            None => {
                // Bound flip: variable traverses its full range, basis unchanged.
                let delta = dir * range;
                for r in 0..self.m {
                    let v = self.t[r * self.ncols + j];
                    if v != 0.0 {
                        self.beta[r] -= delta * v;
                    }
                }
                self.state[j] = match self.state[j] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    VarState::Basic(_) => unreachable!(),
                };
                true
            }
            Some(r) => {
                let t_star = t_max.max(0.0);
                // Displace all basic values, then swap j into the basis at row r.
                for i in 0..self.m {
                    let v = self.t[i * self.ncols + j];
                    if v != 0.0 {
                        self.beta[i] -= dir * t_star * v;
                    }
                }
                let entering_value = self.nonbasic_value(j) + dir * t_star;
                let old_basic = self.basis[r];
                self.state[old_basic] = if leave_to_upper {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
                self.basis[r] = j;
                self.state[j] = VarState::Basic(r);
                self.beta[r] = entering_value;

                // Row elimination to restore B^{-1} A on active columns.
                let pivot = self.t[r * self.ncols + j];
                let inv = 1.0 / pivot;
                let (rs, re) = (r * self.ncols, (r + 1) * self.ncols);
                for v in &mut self.t[rs..re] {
                    *v *= inv;
                }
                for i in 0..self.m {
                    if i == r {
                        continue;
                    }
                    let f = self.t[i * self.ncols + j];
                    if f != 0.0 {
                        let (is_, _ie) = (i * self.ncols, (i + 1) * self.ncols);
                        for col in 0..self.active_cols {
                            self.t[is_ + col] -= f * self.t[rs + col];
                        }
                    }
                }
                let f = self.costrow[j];
                if f != 0.0 {
                    for col in 0..self.active_cols {
                        self.costrow[col] -= f * self.t[rs + col];
                    }
                }
                true
            }
        }
    }

    fn optimize(&mut self, cost: &[f64], max_iters: usize) -> Result<(), LpError> {
        self.rebuild_costrow(cost);
        let mut stall = 0usize;
        let mut last_obj = f64::INFINITY;
        for it in 0..max_iters {
            let bland = stall > 200;
            let Some((j, dir)) = self.pick_entering(bland) else {
                return Ok(());
            };
            if !self.pivot_step(j, dir, bland) {
                return Err(LpError::Unbounded);
            }
            if it % 64 == 0 {
                let obj = self.current_objective(cost);
                if obj < last_obj - 1e-12 {
                    stall = 0;
                    last_obj = obj;
                } else {
                    stall += 64;
                }
            } else {
                stall += 1;
            }
        }
        Err(LpError::IterationLimit)
    }

    fn current_objective(&self, cost: &[f64]) -> f64 {
        let mut v = 0.0;
        for j in 0..self.ncols {
            let cj = cost[j];
            if cj != 0.0 {
                v += cj * self.nonbasic_value_or_basic(j);
            }
        }
        v
    }

    fn nonbasic_value_or_basic(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::Basic(r) => self.beta[r],
            VarState::AtLower => self.lb[j],
            VarState::AtUpper => self.ub[j],
        }
    }

    fn solve(mut self) -> Result<LpSolution, LpError> {
        let max_iters = 2000 + 40 * (self.m + self.ncols);

        // Phase 1: drive artificial variables to zero.
        let mut phase1 = vec![0.0; self.ncols];
        for j in self.art_start..self.ncols {
            phase1[j] = 1.0;
        }
        self.optimize(&phase1, max_iters)?;
        let infeas = self.current_objective(&phase1);
        if infeas > 1e-7 {
            return Err(LpError::Infeasible);
        }

        // Pivot leftover basic artificials out where possible; freeze the rest.
        for r in 0..self.m {
            let b = self.basis[r];
            if b < self.art_start {
                continue;
            }
            let mut entered = false;
            for j in 0..self.art_start {
                if matches!(self.state[j], VarState::Basic(_)) {
                    continue;
                }
                if self.t[r * self.ncols + j].abs() > 1e-7 {
                    let dir = 1.0; // degenerate pivot, value stays put
                    let pivot = self.t[r * self.ncols + j];
                    let _ = dir;
                    // Manual degenerate basis swap at zero displacement.
                    let old = self.basis[r];
                    self.state[old] = VarState::AtLower;
                    self.lb[old] = 0.0;
                    self.ub[old] = 0.0;
                    self.basis[r] = j;
                    let entering_value = self.nonbasic_value(j);
                    self.state[j] = VarState::Basic(r);
                    self.beta[r] = entering_value;
                    let inv = 1.0 / pivot;
                    let (rs, re) = (r * self.ncols, (r + 1) * self.ncols);
                    for v in &mut self.t[rs..re] {
                        *v *= inv;
                    }
                    for i in 0..self.m {
                        if i == r {
                            continue;
                        }
                        let f = self.t[i * self.ncols + j];
                        if f != 0.0 {
                            let is_ = i * self.ncols;
                            for col in 0..self.ncols {
                                self.t[is_ + col] -= f * self.t[rs + col];
                            }
                        }
                    }
                    entered = true;
                    break;
                }
            }
            if !entered && self.basis[r] >= self.art_start {
                // Redundant row: keep the artificial basic, pinned at zero.
                let b = self.basis[r];
                self.lb[b] = 0.0;
                self.ub[b] = 0.0;
            }
        }

        // Freeze all nonbasic artificials so they never re-enter.
        for j in self.art_start..self.ncols {
            if !matches!(self.state[j], VarState::Basic(_)) {
                self.lb[j] = 0.0;
                self.ub[j] = 0.0;
                if matches!(self.state[j], VarState::AtUpper) {
                    self.state[j] = VarState::AtLower;
                }
            }
        }

        // Phase 2 prices only real columns.
        self.active_cols = self.art_start;
        let cost = self.obj.clone();
        self.optimize(&cost, max_iters)?;

        let n_struct_total = self.art_start; // structural + slack
        let mut x = vec![0.0; n_struct_total];
        for (j, xv) in x.iter_mut().enumerate().take(n_struct_total) {
            *xv = self.nonbasic_value_or_basic(j);
        }
        let objective: f64 = self
            .obj
            .iter()
            .take(n_struct_total)
            .zip(&x)
            .map(|(c, v)| c * v)
            .sum();
        x.truncate(self.obj.len());
        Ok(LpSolution { x, objective })
    }
}
