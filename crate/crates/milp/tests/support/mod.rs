//! Test-only oracles: a textbook dense two-phase tableau simplex with
//! Bland's rule, an exhaustive binary enumerator, and random instance
//! generators. Shares nothing with the kernel's solution path.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uc_milp::{Model, Sense, VarId, VarKind};

/// Plain data copy of a model, so the oracle never touches kernel code.
#[derive(Clone, Debug)]
pub struct DenseLp {
    pub c: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<(Vec<f64>, Sense, f64)>,
    pub binary: Vec<bool>,
}

impl DenseLp {
    pub fn from_model(m: &Model) -> Self {
        let n = m.num_vars();
        let rows = m
            .constraints()
            .iter()
            .map(|r| {
                let mut a = vec![0.0; n];
                for &(j, v) in &r.terms {
                    a[j] = v;
                }
                (a, r.sense, r.rhs)
            })
            .collect();
        DenseLp {
            c: m.objective().to_vec(),
            lower: m.variables().iter().map(|v| v.lower).collect(),
            upper: m.variables().iter().map(|v| v.upper).collect(),
            rows,
            binary: m.variables().iter().map(|v| v.kind == VarKind::Binary).collect(),
        }
    }
}

pub enum Oracle {
    Optimal(f64, Vec<f64>),
    Infeasible,
    Unbounded,
}

/// Two-phase tableau simplex on `x = lower + x'`, `x' >= 0`, finite lower
/// bounds required; finite upper bounds become explicit rows.
pub fn dense_simplex(lp: &DenseLp) -> Oracle {
    let n = lp.c.len();
    assert!(lp.lower.iter().all(|l| l.is_finite()), "oracle needs finite lower bounds");
    let mut rows: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for (a, s, b) in &lp.rows {
        let shift: f64 = a.iter().zip(&lp.lower).map(|(x, l)| x * l).sum();
        rows.push((a.clone(), *s, b - shift));
    }
    for j in 0..n {
        if lp.upper[j].is_finite() {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            rows.push((a, Sense::Le, lp.upper[j] - lp.lower[j]));
        }
    }
    let m = rows.len();
    let n_slack = rows.iter().filter(|r| r.1 != Sense::Eq).count();
    let total = n + n_slack + m; // structurals, slacks, artificials
    let width = total + 1;
    let mut t = vec![vec![0.0; width]; m];
    let mut basis = vec![0usize; m];
    let mut k = n;
    for (i, (a, s, b)) in rows.iter().enumerate() {
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[j];
        }
        match s {
            Sense::Le => {
                t[i][k] = sign;
                k += 1;
            }
            Sense::Ge => {
                t[i][k] = -sign;
                k += 1;
            }
            Sense::Eq => {}
        }
        t[i][n + n_slack + i] = 1.0;
        t[i][total] = sign * b;
        basis[i] = n + n_slack + i;
    }

    let pivot = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, r: usize, c: usize| {
        let p = t[r][c];
        for v in t[r].iter_mut() {
            *v /= p;
        }
        for i in 0..t.len() {
            if i != r && t[i][c] != 0.0 {
                let f = t[i][c];
                for j in 0..width {
                    t[i][j] -= f * t[r][j];
                }
            }
        }
        basis[r] = c;
    };

    let run = |t: &mut Vec<Vec<f64>>, basis: &mut Vec<usize>, cost: &[f64], allowed: usize| -> bool {
        loop {
            // reduced costs c_j - c_B B^-1 a_j, Bland's rule
            let mut enter = None;
            for j in 0..allowed {
                if basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..t.len() {
                    d -= cost[basis[i]] * t[i][j];
                }
                if d < -1e-9 {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..t.len() {
                if t[i][c] > 1e-9 {
                    let ratio = t[i][width - 1] / t[i][c];
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-12 || (ratio <= lr + 1e-12 && basis[i] < basis[li]) {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            pivot(t, basis, r, c);
        }
    };

    let mut phase1 = vec![0.0; total];
    for j in n + n_slack..total {
        phase1[j] = 1.0;
    }
    run(&mut t, &mut basis, &phase1, total);
    let infeas: f64 = (0..m).filter(|&i| basis[i] >= n + n_slack).map(|i| t[i][total]).sum();
    if infeas > 1e-7 {
        return Oracle::Infeasible;
    }
    // drive zero-level artificials out where possible
    for i in 0..m {
        if basis[i] >= n + n_slack {
            if let Some(c) = (0..n + n_slack).find(|&j| t[i][j].abs() > 1e-9) {
                pivot(&mut t, &mut basis, i, c);
            }
        }
    }
    let mut cost = vec![0.0; total];
    cost[..n].copy_from_slice(&lp.c);
    for j in n + n_slack..total {
        cost[j] = 0.0;
    }
    // artificials stay out in phase 2
    let allowed = n + n_slack;
    if !run(&mut t, &mut basis, &cost, allowed) {
        return Oracle::Unbounded;
    }
    let mut x = lp.lower.clone();
    for i in 0..m {
        if basis[i] < n {
            x[basis[i]] += t[i][total];
        }
    }
    let obj = lp.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    Oracle::Optimal(obj, x)
}

/// Exhaustive enumeration over the binary variables; each assignment's
/// continuous part is solved with [`dense_simplex`].
pub fn enumerate_binaries(lp: &DenseLp) -> Option<f64> {
    let bins: Vec<usize> = (0..lp.c.len()).filter(|&j| lp.binary[j]).collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << bins.len()) {
        let mut sub = lp.clone();
        for (k, &j) in bins.iter().enumerate() {
            let v = ((mask >> k) & 1) as f64;
            sub.lower[j] = v;
            sub.upper[j] = v;
        }
        if let Oracle::Optimal(obj, _) = dense_simplex(&sub) {
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    }
    best
}

/// Random feasible, bounded LP: boxes on every variable, rows built around
/// a known interior point.
pub fn random_lp(seed: u64, n: usize, m: usize) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = Model::new();
    let vars: Vec<VarId> = (0..n)
        .map(|j| {
            let lo = rng.random_range(-5.0..0.0f64).round();
            let up = lo + rng.random_range(1.0..10.0f64).round();
            model.continuous(format!("x{j}"), lo, up)
        })
        .collect();
    let point: Vec<f64> = vars
        .iter()
        .map(|&v| {
            let var = model.variable(v);
            rng.random_range(var.lower..=var.upper)
        })
        .collect();
    for i in 0..m {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for &v in &vars {
            if rng.random_bool(0.7) {
                terms.push((v, rng.random_range(-5.0..5.0f64).round()));
            }
        }
        let act: f64 = terms.iter().map(|&(v, a)| a * point[v.0]).sum();
        let sense = match rng.random_range(0..5) {
            0 => Sense::Eq,
            1 | 2 => Sense::Le,
            _ => Sense::Ge,
        };
        let rhs = match sense {
            Sense::Eq => act,
            Sense::Le => act + rng.random_range(0.0..3.0),
            Sense::Ge => act - rng.random_range(0.0..3.0),
        };
        model.add_constraint(format!("r{i}"), &terms, sense, rhs).unwrap();
    }
    let obj: Vec<(VarId, f64)> = vars.iter().map(|&v| (v, rng.random_range(-10.0..10.0f64).round())).collect();
    model.set_objective(&obj, 0.0);
    model
}

/// Random mixed program: `n_bin` binaries, two bounded continuous variables
/// and `m` rows. Feasible by construction at a random binary point.
pub fn random_milp(seed: u64, n_bin: usize, m: usize) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = Model::new();
    let mut vars: Vec<VarId> = (0..n_bin).map(|j| model.binary(format!("b{j}"))).collect();
    vars.push(model.continuous("y0", 0.0, 8.0));
    vars.push(model.continuous("y1", 0.0, 8.0));
    let mut point: Vec<f64> = (0..n_bin)
        .map(|_| if rng.random_bool(0.5) { 1.0 } else { 0.0 })
        .collect();
    point.push(rng.random_range(0.0..8.0));
    point.push(rng.random_range(0.0..8.0));
    for i in 0..m {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for &v in &vars {
            if rng.random_bool(0.6) {
                terms.push((v, rng.random_range(-6.0..6.0f64).round()));
            }
        }
        let act: f64 = terms.iter().map(|&(v, a)| a * point[v.0]).sum();
        let (sense, rhs) = if rng.random_bool(0.5) {
            (Sense::Le, act + rng.random_range(0.0..2.0))
        } else {
            (Sense::Ge, act - rng.random_range(0.0..2.0))
        };
        model.add_constraint(format!("r{i}"), &terms, sense, rhs).unwrap();
    }
    let obj: Vec<(VarId, f64)> = vars.iter().map(|&v| (v, rng.random_range(-10.0..10.0f64).round())).collect();
    model.set_objective(&obj, 0.0);
    model
}
