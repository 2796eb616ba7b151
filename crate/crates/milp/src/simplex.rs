//! Bounded revised simplex over `A x - r = 0`, with one logical `r_i` per
//! row carrying the row bounds. The slack basis (all logicals) is always a
//! valid starting point. Primal simplex uses a composite phase 1 and the
//! Harris ratio test, falling back to Bland's rule when degenerate pivots
//! pile up; dual simplex is used whenever the basis is dual feasible, which
//! is the normal state after bound changes or appended rows.

use crate::factor::Factor;
use crate::model::{Model, Sense};

const FEAS_TOL: f64 = 1e-7;
const DUAL_TOL: f64 = 1e-7;
const PIV_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 100;
const BLAND_AFTER: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    Basic,
    Lower,
    Upper,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Saved basis for warm starts.
#[derive(Debug, Clone)]
pub(crate) struct Basis {
    status: Vec<Status>,
    head: Vec<usize>,
}

pub(crate) struct Engine {
    m: usize,
    n: usize,
    a_start: Vec<usize>,
    a_idx: Vec<usize>,
    a_val: Vec<f64>,
    // row-wise copy of A
    r_start: Vec<usize>,
    r_idx: Vec<usize>,
    r_val: Vec<f64>,
    // dual steepest-edge weights by basis position
    dse: Vec<f64>,
    row_buf: Vec<f64>,
    row_touched: Vec<usize>,
    lo: Vec<f64>,
    up: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    status: Vec<Status>,
    head: Vec<usize>,
    factor: Option<Factor>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
    obj_scale: f64,
    offset: f64,
    pub iterations: usize,
    iter_start: usize,
    iter_limit: usize,
}

fn pow2_scale(max_abs: f64) -> f64 {
    if max_abs > 0.0 && max_abs.is_finite() {
        (2f64).powi(-(max_abs.log2().round() as i32))
    } else {
        1.0
    }
}

impl Engine {
    pub fn new(model: &Model) -> Engine {
        let n = model.num_vars();
        let m = model.num_constraints();
        let rows = model.constraints();

        let mut row_scale = vec![1.0; m];
        for (i, r) in rows.iter().enumerate() {
            let mx = r.terms.iter().fold(0.0f64, |a, t| a.max(t.1.abs()));
            row_scale[i] = pow2_scale(mx);
        }
        let mut col_max = vec![0.0f64; n];
        for (i, r) in rows.iter().enumerate() {
            for &(j, a) in &r.terms {
                col_max[j] = col_max[j].max((a * row_scale[i]).abs());
            }
        }
        let col_scale: Vec<f64> = col_max.iter().map(|&c| pow2_scale(c)).collect();

        let mut counts = vec![0usize; n];
        for r in rows {
            for &(j, _) in &r.terms {
                counts[j] += 1;
            }
        }
        let mut a_start = vec![0usize; n + 1];
        for j in 0..n {
            a_start[j + 1] = a_start[j] + counts[j];
        }
        let nnz = a_start[n];
        let mut a_idx = vec![0usize; nnz];
        let mut a_val = vec![0.0; nnz];
        let mut fill = a_start.clone();
        for (i, r) in rows.iter().enumerate() {
            for &(j, a) in &r.terms {
                a_idx[fill[j]] = i;
                a_val[fill[j]] = a * row_scale[i] * col_scale[j];
                fill[j] += 1;
            }
        }

        let mut r_start = vec![0usize; m + 1];
        for (i, r) in rows.iter().enumerate() {
            r_start[i + 1] = r_start[i] + r.terms.len();
        }
        let mut r_idx = Vec::with_capacity(nnz);
        let mut r_val = Vec::with_capacity(nnz);
        for (i, r) in rows.iter().enumerate() {
            for &(j, a) in &r.terms {
                r_idx.push(j);
                r_val.push(a * row_scale[i] * col_scale[j]);
            }
        }

        let obj = model.objective();
        let cmax = obj
            .iter()
            .zip(&col_scale)
            .fold(0.0f64, |a, (c, s)| a.max((c * s).abs()));
        let obj_scale = pow2_scale(cmax);

        let mut lo = vec![0.0; n + m];
        let mut up = vec![0.0; n + m];
        let mut cost = vec![0.0; n + m];
        for (j, v) in model.variables().iter().enumerate() {
            lo[j] = v.lower / col_scale[j];
            up[j] = v.upper / col_scale[j];
            cost[j] = obj[j] * col_scale[j] * obj_scale;
        }
        for (i, r) in rows.iter().enumerate() {
            let (l, u) = match r.sense {
                Sense::Le => (f64::NEG_INFINITY, r.rhs),
                Sense::Ge => (r.rhs, f64::INFINITY),
                Sense::Eq => (r.rhs, r.rhs),
            };
            lo[n + i] = l * row_scale[i];
            up[n + i] = u * row_scale[i];
        }

        let mut e = Engine {
            m,
            n,
            a_start,
            a_idx,
            a_val,
            r_start,
            r_idx,
            r_val,
            dse: vec![1.0; m],
            row_buf: vec![0.0; n + m],
            row_touched: Vec::new(),
            lo,
            up,
            cost,
            x: vec![0.0; n + m],
            status: vec![Status::Lower; n + m],
            head: (n..n + m).collect(),
            factor: None,
            row_scale,
            col_scale,
            obj_scale,
            offset: model.offset(),
            iterations: 0,
            iter_start: 0,
            iter_limit: 20 * (n + m) + 20_000,
        };
        e.slack_basis();
        e
    }

    fn slack_basis(&mut self) {
        for j in 0..self.n {
            self.status[j] = self.preferred_bound(j);
            self.x[j] = self.nonbasic_value(j);
        }
        for i in 0..self.m {
            self.status[self.n + i] = Status::Basic;
        }
        self.head = (self.n..self.n + self.m).collect();
        self.factor = None;
    }

    fn preferred_bound(&self, j: usize) -> Status {
        let (l, u) = (self.lo[j], self.up[j]);
        match (l.is_finite(), u.is_finite()) {
            (true, true) => {
                if self.cost[j] >= 0.0 {
                    Status::Lower
                } else {
                    Status::Upper
                }
            }
            (true, false) => Status::Lower,
            (false, true) => Status::Upper,
            (false, false) => Status::Zero,
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.status[j] {
            Status::Lower => self.lo[j],
            Status::Upper => self.up[j],
            Status::Zero | Status::Basic => 0.0,
        }
    }

    /// Sets structural bounds in model units.
    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        let s = self.col_scale[j];
        self.lo[j] = lower / s;
        self.up[j] = upper / s;
        if self.status[j] != Status::Basic {
            self.status[j] = match self.status[j] {
                Status::Lower if self.lo[j].is_finite() => Status::Lower,
                Status::Upper if self.up[j].is_finite() => Status::Upper,
                _ => self.preferred_bound(j),
            };
            self.x[j] = self.nonbasic_value(j);
        }
    }

    pub fn basis(&self) -> Basis {
        Basis { status: self.status.clone(), head: self.head.clone() }
    }

    pub fn set_basis(&mut self, b: &Basis) {
        self.status.clone_from(&b.status);
        self.head.clone_from(&b.head);
        for j in 0..self.n + self.m {
            if self.status[j] != Status::Basic {
                let ok = match self.status[j] {
                    Status::Lower => self.lo[j].is_finite(),
                    Status::Upper => self.up[j].is_finite(),
                    _ => true,
                };
                if !ok {
                    self.status[j] = self.preferred_bound(j);
                }
                self.x[j] = self.nonbasic_value(j);
            }
        }
        self.factor = None;
    }

    fn column(&self, j: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        if j < self.n {
            for k in self.a_start[j]..self.a_start[j + 1] {
                out.push((self.a_idx[k], self.a_val[k]));
            }
        } else {
            out.push((j - self.n, -1.0));
        }
    }

    fn dense_column(&self, j: usize) -> Vec<f64> {
        let mut v = vec![0.0; self.m];
        if j < self.n {
            for k in self.a_start[j]..self.a_start[j + 1] {
                v[self.a_idx[k]] = self.a_val[k];
            }
        } else {
            v[j - self.n] = -1.0;
        }
        v
    }

    /// Dot product of column `j` with a row-indexed vector.
    fn col_dot(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            let mut s = 0.0;
            for k in self.a_start[j]..self.a_start[j + 1] {
                s += self.a_val[k] * y[self.a_idx[k]];
            }
            s
        } else {
            -y[j - self.n]
        }
    }

    fn refactor(&mut self) {
        loop {
            let mut cols = Vec::with_capacity(self.m);
            let mut buf = Vec::new();
            for &j in &self.head {
                self.column(j, &mut buf);
                cols.push(buf.clone());
            }
            match Factor::new(self.m, &cols) {
                Ok(f) => {
                    self.factor = Some(f);
                    break;
                }
                Err(sing) => {
                    for (&p, &r) in sing.positions.iter().zip(&sing.rows) {
                        let old = self.head[p];
                        self.status[old] = self.preferred_bound(old);
                        if self.status[old] == Status::Lower && self.x[old] > self.lo[old] {
                            if self.up[old].is_finite() && self.x[old] >= self.up[old] {
                                self.status[old] = Status::Upper;
                            }
                        }
                        self.x[old] = self.nonbasic_value(old);
                        let logical = self.n + r;
                        self.head[p] = logical;
                        self.status[logical] = Status::Basic;
                    }
                }
            }
        }
        self.compute_basics();
    }

    fn compute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.status[j] != Status::Basic {
                let xj = self.x[j];
                if xj != 0.0 {
                    if j < self.n {
                        for k in self.a_start[j]..self.a_start[j + 1] {
                            rhs[self.a_idx[k]] -= self.a_val[k] * xj;
                        }
                    } else {
                        rhs[j - self.n] += xj;
                    }
                }
            }
        }
        self.factor.as_ref().expect("factor").ftran(&mut rhs);
        for (p, &j) in self.head.iter().enumerate() {
            self.x[j] = rhs[p];
        }
    }

    fn ensure_factor(&mut self) {
        if self.factor.is_none() {
            self.refactor();
        }
    }

    fn maybe_refactor(&mut self) {
        if self.factor.as_ref().map_or(true, |f| f.num_updates() >= REFACTOR_EVERY) {
            self.refactor();
        }
    }

    fn duals_for(&self, cb: Vec<f64>) -> Vec<f64> {
        let mut y = cb;
        self.factor.as_ref().expect("factor").btran(&mut y);
        y
    }

    fn reduced_costs(&self, y: &[f64], phase1: bool) -> Vec<f64> {
        let mut d = vec![0.0; self.n + self.m];
        for j in 0..self.n + self.m {
            if self.status[j] != Status::Basic {
                let c = if phase1 { 0.0 } else { self.cost[j] };
                d[j] = c - self.col_dot(j, y);
            }
        }
        d
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lo[j] - FEAS_TOL {
            self.lo[j] - v
        } else if v > self.up[j] + FEAS_TOL {
            v - self.up[j]
        } else {
            0.0
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.up[j] - self.lo[j] <= 1e-12
    }

    fn dual_feasible(&self, d: &[f64]) -> bool {
        (0..self.n + self.m).all(|j| {
            if self.is_fixed(j) {
                return true;
            }
            match self.status[j] {
                Status::Basic => true,
                Status::Lower => d[j] >= -DUAL_TOL,
                Status::Upper => d[j] <= DUAL_TOL,
                Status::Zero => d[j].abs() <= DUAL_TOL,
            }
        })
    }

    pub fn solve(&mut self) -> Outcome {
        self.iter_start = self.iterations;
        self.ensure_factor();
        self.compute_basics();
        let cb: Vec<f64> = self.head.iter().map(|&j| self.cost[j]).collect();
        let y = self.duals_for(cb);
        let d = self.reduced_costs(&y, false);
        let primal_feasible = self.head.iter().all(|&j| self.infeasibility(j) == 0.0);
        if !primal_feasible && self.dual_feasible(&d) {
            match self.dual() {
                Outcome::Optimal => {}
                other => return other,
            }
        }
        self.primal()
    }

    fn primal(&mut self) -> Outcome {
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations - self.iter_start >= self.iter_limit {
                return Outcome::IterationLimit;
            }
            self.maybe_refactor();
            let phase1 = self.head.iter().any(|&j| self.infeasibility(j) > 0.0);
            let cb: Vec<f64> = self
                .head
                .iter()
                .map(|&j| {
                    if phase1 {
                        let v = self.x[j];
                        if v < self.lo[j] - FEAS_TOL {
                            -1.0
                        } else if v > self.up[j] + FEAS_TOL {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        self.cost[j]
                    }
                })
                .collect();
            let y = self.duals_for(cb);
            let d = self.reduced_costs(&y, phase1);
            let bland = degenerate_run >= BLAND_AFTER;

            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for j in 0..self.n + self.m {
                if self.status[j] == Status::Basic || self.is_fixed(j) {
                    continue;
                }
                let dj = d[j];
                let dir = match self.status[j] {
                    Status::Lower if dj < -DUAL_TOL => 1.0,
                    Status::Upper if dj > DUAL_TOL => -1.0,
                    Status::Zero if dj.abs() > DUAL_TOL => -dj.signum(),
                    _ => continue,
                };
                if bland {
                    enter = Some((j, dir));
                    break;
                }
                if dj.abs() > best {
                    best = dj.abs();
                    enter = Some((j, dir));
                }
            }
            let Some((q, dir)) = enter else {
                return if phase1 { Outcome::Infeasible } else { Outcome::Optimal };
            };

            let mut alpha = self.dense_column(q);
            self.factor.as_ref().unwrap().ftran(&mut alpha);

            // Rate of change of each basic per unit step of the entering variable.
            let rate = |p: usize| -dir * alpha[p];
            let limit = |p: usize, tol: f64| -> f64 {
                let j = self.head[p];
                let r = rate(p);
                if r.abs() <= PIV_TOL {
                    return f64::INFINITY;
                }
                let v = self.x[j];
                let (l, u) = (self.lo[j], self.up[j]);
                if phase1 && v < l - FEAS_TOL {
                    return if r > 0.0 { (l - v + tol) / r } else { f64::INFINITY };
                }
                if phase1 && v > u + FEAS_TOL {
                    return if r < 0.0 { (v - u + tol) / -r } else { f64::INFINITY };
                }
                if r < 0.0 {
                    if l.is_finite() {
                        ((v - l + tol) / -r).max(0.0)
                    } else {
                        f64::INFINITY
                    }
                } else if u.is_finite() {
                    ((u - v + tol) / r).max(0.0)
                } else {
                    f64::INFINITY
                }
            };

            let flip = self.up[q] - self.lo[q];
            let mut leave: Option<usize> = None;
            let mut theta = f64::INFINITY;
            if bland {
                for p in 0..self.m {
                    let t = limit(p, 0.0);
                    if !t.is_finite() {
                        continue;
                    }
                    let better = match leave {
                        None => true,
                        Some(lp) => t < theta - 1e-12 || (t <= theta + 1e-12 && self.head[p] < self.head[lp]),
                    };
                    if better {
                        theta = theta.min(t);
                        leave = Some(p);
                    }
                }
            } else {
                let tmax = (0..self.m).map(|p| limit(p, FEAS_TOL)).fold(f64::INFINITY, f64::min);
                let mut best_piv = 0.0;
                if tmax.is_finite() {
                    for p in 0..self.m {
                        let t = limit(p, 0.0);
                        if t <= tmax && rate(p).abs() > best_piv {
                            best_piv = rate(p).abs();
                            leave = Some(p);
                            theta = t;
                        }
                    }
                }
            }
            self.iterations += 1;

            if flip.is_finite() && flip <= theta {
                // entering variable runs to its opposite bound
                for p in 0..self.m {
                    let j = self.head[p];
                    self.x[j] += rate(p) * flip;
                }
                self.status[q] = if dir > 0.0 { Status::Upper } else { Status::Lower };
                self.x[q] = self.nonbasic_value(q);
                degenerate_run = 0;
                continue;
            }
            let Some(p) = leave else {
                if phase1 {
                    // numerical trouble: rebuild and retry
                    self.refactor();
                    continue;
                }
                return Outcome::Unbounded;
            };
            if alpha[p].abs() < PIV_TOL * 10.0 && self.factor.as_ref().unwrap().num_updates() > 0 {
                self.refactor();
                continue;
            }
            let theta = theta.max(0.0);
            if theta < 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            let leaving = self.head[p];
            for pp in 0..self.m {
                let j = self.head[pp];
                self.x[j] += rate(pp) * theta;
            }
            self.x[q] += dir * theta;
            let v = self.x[leaving];
            let (l, u) = (self.lo[leaving], self.up[leaving]);
            self.status[leaving] = match (l.is_finite(), u.is_finite()) {
                (true, true) => {
                    if (v - l).abs() <= (v - u).abs() {
                        Status::Lower
                    } else {
                        Status::Upper
                    }
                }
                (true, false) => Status::Lower,
                (false, true) => Status::Upper,
                (false, false) => Status::Zero,
            };
            self.x[leaving] = self.nonbasic_value(leaving);
            self.head[p] = q;
            self.status[q] = Status::Basic;
            self.factor.as_mut().unwrap().update(p, &alpha);
        }
    }

    /// Nonzero entries of row `rho^T [A  -I]` as `(column, value)`.
    fn pivot_row(&mut self, rho: &[f64]) -> Vec<(usize, f64)> {
        for (i, &r) in rho.iter().enumerate() {
            if r == 0.0 {
                continue;
            }
            for k in self.r_start[i]..self.r_start[i + 1] {
                let j = self.r_idx[k];
                if self.row_buf[j] == 0.0 {
                    self.row_touched.push(j);
                }
                self.row_buf[j] += r * self.r_val[k];
                if self.row_buf[j] == 0.0 {
                    // keep the slot marked as touched
                    self.row_buf[j] = f64::MIN_POSITIVE;
                }
            }
            let l = self.n + i;
            if self.row_buf[l] == 0.0 {
                self.row_touched.push(l);
            }
            self.row_buf[l] -= r;
        }
        let mut out = Vec::with_capacity(self.row_touched.len());
        for &j in &self.row_touched {
            out.push((j, self.row_buf[j]));
            self.row_buf[j] = 0.0;
        }
        self.row_touched.clear();
        out
    }

    fn fresh_reduced_costs(&self) -> Vec<f64> {
        let cb: Vec<f64> = self.head.iter().map(|&j| self.cost[j]).collect();
        let y = self.duals_for(cb);
        self.reduced_costs(&y, false)
    }

    fn dual(&mut self) -> Outcome {
        let mut rechecked = false;
        self.ensure_factor();
        let mut d = self.fresh_reduced_costs();
        for w in &mut self.dse {
            *w = w.clamp(1e-4, 1e4);
        }
        loop {
            if self.iterations - self.iter_start >= self.iter_limit {
                return Outcome::IterationLimit;
            }
            if self.factor.as_ref().map_or(true, |f| f.num_updates() >= REFACTOR_EVERY) {
                self.refactor();
                d = self.fresh_reduced_costs();
            }
            // leaving row: largest squared infeasibility over its edge weight
            let mut leave = None;
            let mut worst = 0.0;
            for p in 0..self.m {
                let inf = self.infeasibility(self.head[p]);
                if inf > 0.0 {
                    let score = inf * inf / self.dse[p];
                    if score > worst {
                        worst = score;
                        leave = Some(p);
                    }
                }
            }
            let Some(p) = leave else {
                return Outcome::Optimal;
            };
            let jl = self.head[p];
            let below = self.x[jl] < self.lo[jl];
            let target = if below { self.lo[jl] } else { self.up[jl] };

            let mut rho = vec![0.0; self.m];
            rho[p] = 1.0;
            self.factor.as_ref().unwrap().btran(&mut rho);
            let row = self.pivot_row(&rho);

            // Harris two-pass dual ratio test
            let mut cand: Vec<(usize, f64, f64)> = Vec::new();
            for &(j, a) in &row {
                if self.status[j] == Status::Basic || self.is_fixed(j) || a.abs() <= PIV_TOL {
                    continue;
                }
                // x_p changes by -a * dx_j
                let ok = match self.status[j] {
                    Status::Lower => (below && a < 0.0) || (!below && a > 0.0),
                    Status::Upper => (below && a > 0.0) || (!below && a < 0.0),
                    Status::Zero => true,
                    Status::Basic => false,
                };
                if ok {
                    cand.push((j, a, d[j].abs()));
                }
            }
            if cand.is_empty() {
                if !rechecked {
                    rechecked = true;
                    self.refactor();
                    d = self.fresh_reduced_costs();
                    continue;
                }
                return Outcome::Infeasible;
            }
            rechecked = false;
            let tmax = cand
                .iter()
                .map(|&(_, a, dj)| (dj + DUAL_TOL) / a.abs())
                .fold(f64::INFINITY, f64::min);
            let mut q = cand[0].0;
            let mut aq: f64 = 0.0;
            for &(j, a, dj) in &cand {
                if dj / a.abs() <= tmax && a.abs() > aq.abs() {
                    aq = a;
                    q = j;
                }
            }

            let mut alpha = self.dense_column(q);
            self.factor.as_ref().unwrap().ftran(&mut alpha);
            if (alpha[p] - aq).abs() > 1e-6 * (1.0 + aq.abs()) || alpha[p].abs() < PIV_TOL {
                if self.factor.as_ref().unwrap().num_updates() > 0 {
                    self.refactor();
                    d = self.fresh_reduced_costs();
                    continue;
                }
            }
            self.iterations += 1;

            // reduced costs after the basis change
            let theta_d = d[q] / alpha[p];
            for &(j, a) in &row {
                if self.status[j] != Status::Basic {
                    d[j] -= theta_d * a;
                }
            }
            d[q] = 0.0;
            d[jl] = -theta_d;

            // steepest-edge weights
            let wp = rho.iter().map(|r| r * r).sum::<f64>();
            let mut tau = rho;
            self.factor.as_ref().unwrap().ftran(&mut tau);
            let ap = alpha[p];
            for i in 0..self.m {
                if i == p || alpha[i] == 0.0 {
                    continue;
                }
                let ratio = alpha[i] / ap;
                let w = self.dse[i] - 2.0 * ratio * tau[i] + ratio * ratio * wp;
                self.dse[i] = w.max(ratio * ratio).max(1e-8);
            }
            self.dse[p] = (wp / (ap * ap)).max(1e-8);

            let dxq = (self.x[jl] - target) / alpha[p];
            for pp in 0..self.m {
                let j = self.head[pp];
                self.x[j] -= alpha[pp] * dxq;
            }
            self.x[q] += dxq;
            self.status[jl] = if below { Status::Lower } else { Status::Upper };
            self.x[jl] = target;
            self.head[p] = q;
            self.status[q] = Status::Basic;
            self.factor.as_mut().unwrap().update(p, &alpha);
        }
    }

    /// Unscaled structural values.
    pub fn primal_values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x[j] * self.col_scale[j]).collect()
    }

    pub fn objective(&self) -> f64 {
        let s: f64 = (0..self.n).map(|j| self.cost[j] * self.x[j]).sum();
        s / self.obj_scale + self.offset
    }

    /// Row duals and structural reduced costs in model units.
    pub fn duals(&mut self) -> (Vec<f64>, Vec<f64>) {
        self.ensure_factor();
        let cb: Vec<f64> = self.head.iter().map(|&j| self.cost[j]).collect();
        let y = self.duals_for(cb);
        let d = self.reduced_costs(&y, false);
        let duals = (0..self.m).map(|i| y[i] * self.row_scale[i] / self.obj_scale).collect();
        let rc = (0..self.n)
            .map(|j| {
                if self.status[j] == Status::Basic {
                    0.0
                } else {
                    d[j] / (self.obj_scale * self.col_scale[j])
                }
            })
            .collect();
        (duals, rc)
    }
}
