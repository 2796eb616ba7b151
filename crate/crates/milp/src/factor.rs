//! Basis factorisation for the revised simplex.
//!
//! The basis is permuted to block lower-triangular form
//!
//! ```text
//!   [ T1  0   0  ]     T1: row singletons (lower triangular)
//!   [ X1  N   0  ]     N:  nucleus, dense LU with partial pivoting
//!   [ X2  Y   T2 ]     T2: column singletons (upper triangular)
//! ```
//!
//! Unit-commitment bases are dominated by logical columns and short
//! structural columns, so the nucleus is usually a small fraction of `m`.
//! Basis changes are appended as product-form eta vectors.

const PIVOT_TOL: f64 = 1e-11;
const DROP_TOL: f64 = 1e-14;

#[derive(Debug)]
pub struct Singular {
    /// Basis positions whose columns are dependent.
    pub positions: Vec<usize>,
    /// Rows left uncovered; one logical per row restores full rank.
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Eta {
    pos: usize,
    piv: f64,
    idx: Vec<usize>,
    val: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Factor {
    m: usize,
    col_start: Vec<usize>,
    col_idx: Vec<usize>,
    col_val: Vec<f64>,
    /// Row singletons: (row, position, pivot) in elimination order.
    upper_tri: Vec<(usize, usize, f64)>,
    /// Column singletons: (row, position, pivot) in discovery order.
    lower_tri: Vec<(usize, usize, f64)>,
    in_tail: Vec<bool>,
    nuc_rows: Vec<usize>,
    nuc_cols: Vec<usize>,
    lu: Vec<f64>,
    lu_perm: Vec<usize>,
    etas: Vec<Eta>,
}

impl Factor {
    /// Factorises the basis whose position `p` holds the sparse column
    /// `cols[p]` (row index, value).
    pub fn new(m: usize, cols: &[Vec<(usize, f64)>]) -> Result<Factor, Singular> {
        debug_assert_eq!(cols.len(), m);
        let mut col_start = Vec::with_capacity(m + 1);
        let mut col_idx = Vec::new();
        let mut col_val = Vec::new();
        col_start.push(0);
        for c in cols {
            for &(i, v) in c {
                if v != 0.0 {
                    col_idx.push(i);
                    col_val.push(v);
                }
            }
            col_start.push(col_idx.len());
        }

        let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); m];
        for p in 0..m {
            for k in col_start[p]..col_start[p + 1] {
                row_cols[col_idx[k]].push(p);
            }
        }
        let mut row_count: Vec<usize> = row_cols.iter().map(Vec::len).collect();
        let mut col_count: Vec<usize> = (0..m).map(|p| col_start[p + 1] - col_start[p]).collect();
        let mut row_active = vec![true; m];
        let mut col_active = vec![true; m];

        // Row singletons.
        let mut upper_tri = Vec::new();
        let mut stack: Vec<usize> = (0..m).rev().filter(|&i| row_count[i] == 1).collect();
        while let Some(r) = stack.pop() {
            if !row_active[r] || row_count[r] != 1 {
                continue;
            }
            let Some(&p) = row_cols[r].iter().find(|&&p| col_active[p]) else {
                continue;
            };
            let piv = (col_start[p]..col_start[p + 1])
                .find(|&k| col_idx[k] == r)
                .map(|k| col_val[k])
                .unwrap_or(0.0);
            if piv.abs() < PIVOT_TOL {
                continue;
            }
            upper_tri.push((r, p, piv));
            row_active[r] = false;
            col_active[p] = false;
            for k in col_start[p]..col_start[p + 1] {
                let i = col_idx[k];
                if row_active[i] {
                    row_count[i] -= 1;
                    if row_count[i] == 1 {
                        stack.push(i);
                    }
                }
            }
        }

        // Column singletons among what remains.
        for p in 0..m {
            if col_active[p] {
                col_count[p] = (col_start[p]..col_start[p + 1])
                    .filter(|&k| row_active[col_idx[k]])
                    .count();
            }
        }
        let mut lower_tri = Vec::new();
        let mut stack: Vec<usize> = (0..m).rev().filter(|&p| col_active[p] && col_count[p] == 1).collect();
        while let Some(p) = stack.pop() {
            if !col_active[p] || col_count[p] != 1 {
                continue;
            }
            let Some(k) = (col_start[p]..col_start[p + 1]).find(|&k| row_active[col_idx[k]]) else {
                continue;
            };
            let (r, piv) = (col_idx[k], col_val[k]);
            if piv.abs() < PIVOT_TOL {
                continue;
            }
            lower_tri.push((r, p, piv));
            row_active[r] = false;
            col_active[p] = false;
            for &q in &row_cols[r] {
                if col_active[q] {
                    col_count[q] -= 1;
                    if col_count[q] == 1 {
                        stack.push(q);
                    }
                }
            }
        }

        let mut in_tail = vec![false; m];
        for &(r, _, _) in &lower_tri {
            in_tail[r] = true;
        }
        let nuc_rows: Vec<usize> = (0..m).filter(|&i| row_active[i]).collect();
        let nuc_cols: Vec<usize> = (0..m).filter(|&p| col_active[p]).collect();
        let mut nuc_pos = vec![usize::MAX; m];
        for (a, &i) in nuc_rows.iter().enumerate() {
            nuc_pos[i] = a;
        }
        let k = nuc_rows.len();
        debug_assert_eq!(k, nuc_cols.len());
        let mut lu = vec![0.0; k * k];
        for (b, &p) in nuc_cols.iter().enumerate() {
            for kk in col_start[p]..col_start[p + 1] {
                let a = nuc_pos[col_idx[kk]];
                if a != usize::MAX {
                    lu[a * k + b] = col_val[kk];
                }
            }
        }
        let lu_perm = dense_lu(&mut lu, k).map_err(|(bad_cols, bad_rows)| Singular {
            positions: bad_cols.into_iter().map(|b| nuc_cols[b]).collect(),
            rows: bad_rows.into_iter().map(|a| nuc_rows[a]).collect(),
        })?;

        Ok(Factor {
            m,
            col_start,
            col_idx,
            col_val,
            upper_tri,
            lower_tri,
            in_tail,
            nuc_rows,
            nuc_cols,
            lu,
            lu_perm,
            etas: Vec::new(),
        })
    }

    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Solves `B x = b` in place: on entry `b` is indexed by row, on exit by
    /// basis position.
    pub fn ftran(&self, b: &mut Vec<f64>) {
        let m = self.m;
        let mut x = vec![0.0; m];
        for &(r, p, piv) in &self.upper_tri {
            let xp = b[r] / piv;
            x[p] = xp;
            if xp != 0.0 {
                for k in self.col_start[p]..self.col_start[p + 1] {
                    b[self.col_idx[k]] -= self.col_val[k] * xp;
                }
            }
        }
        let nk = self.nuc_rows.len();
        if nk > 0 {
            let mut rhs: Vec<f64> = self.nuc_rows.iter().map(|&i| b[i]).collect();
            dense_solve(&self.lu, &self.lu_perm, nk, &mut rhs);
            for (bb, &p) in self.nuc_cols.iter().enumerate() {
                let xp = rhs[bb];
                x[p] = xp;
                if xp != 0.0 {
                    for k in self.col_start[p]..self.col_start[p + 1] {
                        let i = self.col_idx[k];
                        if self.in_tail[i] {
                            b[i] -= self.col_val[k] * xp;
                        }
                    }
                }
            }
        }
        for &(r, p, piv) in self.lower_tri.iter().rev() {
            let xp = b[r] / piv;
            x[p] = xp;
            if xp != 0.0 {
                for k in self.col_start[p]..self.col_start[p + 1] {
                    let i = self.col_idx[k];
                    if i != r {
                        b[i] -= self.col_val[k] * xp;
                    }
                }
            }
        }
        for e in &self.etas {
            let xp = x[e.pos] / e.piv;
            x[e.pos] = xp;
            if xp != 0.0 {
                for (&i, &v) in e.idx.iter().zip(&e.val) {
                    x[i] -= v * xp;
                }
            }
        }
        *b = x;
    }

    /// Solves `B' y = d` in place: on entry `d` is indexed by basis
    /// position, on exit by row.
    pub fn btran(&self, d: &mut Vec<f64>) {
        for e in self.etas.iter().rev() {
            let mut s = d[e.pos];
            for (&i, &v) in e.idx.iter().zip(&e.val) {
                s -= v * d[i];
            }
            d[e.pos] = s / e.piv;
        }
        let m = self.m;
        let mut y = vec![0.0; m];
        for &(r, p, piv) in &self.lower_tri {
            let mut s = d[p];
            for k in self.col_start[p]..self.col_start[p + 1] {
                let i = self.col_idx[k];
                if i != r {
                    s -= self.col_val[k] * y[i];
                }
            }
            y[r] = s / piv;
        }
        let nk = self.nuc_rows.len();
        if nk > 0 {
            let mut rhs: Vec<f64> = self
                .nuc_cols
                .iter()
                .map(|&p| {
                    let mut s = d[p];
                    for k in self.col_start[p]..self.col_start[p + 1] {
                        let i = self.col_idx[k];
                        if self.in_tail[i] {
                            s -= self.col_val[k] * y[i];
                        }
                    }
                    s
                })
                .collect();
            dense_solve_transpose(&self.lu, &self.lu_perm, nk, &mut rhs);
            for (a, &i) in self.nuc_rows.iter().enumerate() {
                y[i] = rhs[a];
            }
        }
        for &(r, p, piv) in self.upper_tri.iter().rev() {
            let mut s = d[p];
            for k in self.col_start[p]..self.col_start[p + 1] {
                let i = self.col_idx[k];
                if i != r {
                    s -= self.col_val[k] * y[i];
                }
            }
            y[r] = s / piv;
        }
        *d = y;
    }

    /// Records the replacement of basis position `pos` by a column whose
    /// FTRAN image is `alpha` (indexed by position).
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let mut idx = Vec::new();
        let mut val = Vec::new();
        for (i, &v) in alpha.iter().enumerate() {
            if i != pos && v.abs() > DROP_TOL {
                idx.push(i);
                val.push(v);
            }
        }
        self.etas.push(Eta { pos, piv: alpha[pos], idx, val });
    }
}

/// In-place LU with partial pivoting. Returns the row permutation, or the
/// dependent columns and uncovered rows.
fn dense_lu(a: &mut [f64], k: usize) -> Result<Vec<usize>, (Vec<usize>, Vec<usize>)> {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut bad_cols = Vec::new();
    for c in 0..k {
        let (mut best, mut best_row) = (0.0, c);
        for r in c..k {
            let v = a[r * k + c].abs();
            if v > best {
                best = v;
                best_row = r;
            }
        }
        if best < PIVOT_TOL {
            bad_cols.push(c);
            continue;
        }
        if best_row != c {
            for j in 0..k {
                a.swap(c * k + j, best_row * k + j);
            }
            perm.swap(c, best_row);
        }
        let piv = a[c * k + c];
        for r in (c + 1)..k {
            let f = a[r * k + c] / piv;
            if f != 0.0 {
                a[r * k + c] = f;
                for j in (c + 1)..k {
                    a[r * k + j] -= f * a[c * k + j];
                }
            } else {
                a[r * k + c] = 0.0;
            }
        }
    }
    if bad_cols.is_empty() {
        Ok(perm)
    } else {
        // Rows that ended up on a skipped diagonal are the uncovered ones.
        let rows = bad_cols.iter().map(|&c| perm[c]).collect();
        Err((bad_cols, rows))
    }
}

fn dense_solve(lu: &[f64], perm: &[usize], k: usize, b: &mut [f64]) {
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for r in 0..k {
        let mut s = x[r];
        for j in 0..r {
            s -= lu[r * k + j] * x[j];
        }
        x[r] = s;
    }
    for r in (0..k).rev() {
        let mut s = x[r];
        for j in (r + 1)..k {
            s -= lu[r * k + j] * x[j];
        }
        x[r] = s / lu[r * k + r];
    }
    b.copy_from_slice(&x);
}

fn dense_solve_transpose(lu: &[f64], perm: &[usize], k: usize, d: &mut [f64]) {
    // (P'LU)' y = d  =>  U'z = d, L'w = z, y = P'w
    let mut z = d.to_vec();
    for r in 0..k {
        let mut s = z[r];
        for j in 0..r {
            s -= lu[j * k + r] * z[j];
        }
        z[r] = s / lu[r * k + r];
    }
    for r in (0..k).rev() {
        let mut s = z[r];
        for j in (r + 1)..k {
            s -= lu[j * k + r] * z[j];
        }
        z[r] = s;
    }
    for (r, &p) in perm.iter().enumerate() {
        d[p] = z[r];
    }
}
