//! Sparse linear model with integrality marks.

use std::fmt::Write as _;

use thiserror::Error;

/// Handle to a variable. Stable for the lifetime of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

/// Handle to a constraint row. Stable for the lifetime of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("constraint {row} references unknown variable id {var}")]
    UnknownVariable { row: String, var: usize },
    #[error("binary variable {0} must have finite bounds within [0, 1]")]
    BadBinaryBounds(String),
    #[error("variable {name}: lower bound {lower} exceeds upper bound {upper}")]
    CrossedBounds { name: String, lower: f64, upper: f64 },
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("fix assignment must cover exactly the binary variables: {0}")]
    BadAssignment(String),
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub kind: VarKind,
    /// Bounds saved by [`Model::fix_binaries`], restored by [`Model::unfix`].
    saved: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// A minimisation problem `min c'x + offset` over sparse rows.
#[derive(Debug, Clone, Default)]
pub struct Model {
    vars: Vec<Variable>,
    rows: Vec<Constraint>,
    objective: Vec<f64>,
    offset: f64,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        kind: VarKind,
    ) -> Result<VarId, ModelError> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() {
            return Err(ModelError::NonFinite(name));
        }
        if lower > upper {
            return Err(ModelError::CrossedBounds { name, lower, upper });
        }
        if kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(ModelError::BadBinaryBounds(name));
        }
        self.vars.push(Variable { name, lower, upper, kind, saved: None });
        self.objective.push(0.0);
        Ok(VarId(self.vars.len() - 1))
    }

    /// Shorthand for a continuous variable.
    pub fn continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> VarId {
        self.add_variable(name, lower, upper, VarKind::Continuous)
            .expect("valid continuous bounds")
    }

    pub fn binary(&mut self, name: impl Into<String>) -> VarId {
        self.add_variable(name, 0.0, 1.0, VarKind::Binary).expect("binary bounds")
    }

    /// Adds a row. Repeated variables within `terms` are summed.
    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: &[(VarId, f64)],
        sense: Sense,
        rhs: f64,
    ) -> Result<RowId, ModelError> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite(name));
        }
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for &(VarId(j), a) in terms {
            if j >= self.vars.len() {
                return Err(ModelError::UnknownVariable { row: name, var: j });
            }
            if !a.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
            merged.push((j, a));
        }
        merged.sort_by_key(|t| t.0);
        merged.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        merged.retain(|t| t.1 != 0.0);
        self.rows.push(Constraint { name, terms: merged, sense, rhs });
        Ok(RowId(self.rows.len() - 1))
    }

    /// Replaces the whole objective.
    pub fn set_objective(&mut self, terms: &[(VarId, f64)], offset: f64) {
        self.objective.iter_mut().for_each(|c| *c = 0.0);
        for &(VarId(j), c) in terms {
            self.objective[j] += c;
        }
        self.offset = offset;
    }

    pub fn set_cost(&mut self, var: VarId, cost: f64) {
        self.objective[var.0] = cost;
    }

    pub fn add_cost(&mut self, var: VarId, cost: f64) {
        self.objective[var.0] += cost;
    }

    pub fn add_offset(&mut self, amount: f64) {
        self.offset += amount;
    }

    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) {
        let v = &mut self.vars[var.0];
        v.lower = lower;
        v.upper = upper;
    }

    /// Fixes every binary variable to the given value. The assignment must
    /// name each binary exactly once with a 0/1 value.
    pub fn fix_binaries(&mut self, assignment: &[(VarId, f64)]) -> Result<(), ModelError> {
        let mut seen = vec![false; self.vars.len()];
        for &(VarId(j), val) in assignment {
            let v = self
                .vars
                .get(j)
                .ok_or_else(|| ModelError::BadAssignment(format!("unknown variable {j}")))?;
            if v.kind != VarKind::Binary {
                return Err(ModelError::BadAssignment(format!("{} is not binary", v.name)));
            }
            if val != 0.0 && val != 1.0 {
                return Err(ModelError::BadAssignment(format!("{} = {val}", v.name)));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(ModelError::BadAssignment(format!("{} repeated", v.name)));
            }
        }
        if let Some(v) = self
            .vars
            .iter()
            .zip(&seen)
            .find(|(v, s)| v.kind == VarKind::Binary && !**s)
        {
            return Err(ModelError::BadAssignment(format!("{} missing", v.0.name)));
        }
        for &(VarId(j), val) in assignment {
            self.fix_var(j, val);
        }
        Ok(())
    }

    /// Fixes a subset of binaries; used when only part of a commitment is
    /// decided (e.g. slow units after day-ahead).
    pub fn fix_some(&mut self, assignment: &[(VarId, f64)]) {
        for &(VarId(j), val) in assignment {
            self.fix_var(j, val);
        }
    }

    fn fix_var(&mut self, j: usize, val: f64) {
        let v = &mut self.vars[j];
        if v.saved.is_none() {
            v.saved = Some((v.lower, v.upper));
        }
        v.lower = val;
        v.upper = val;
    }

    /// Restores bounds saved by previous fixing calls.
    pub fn unfix(&mut self) {
        for v in &mut self.vars {
            if let Some((lo, up)) = v.saved.take() {
                v.lower = lo;
                v.upper = up;
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn variable(&self, var: VarId) -> &Variable {
        &self.vars[var.0]
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn constraint(&self, row: RowId) -> &Constraint {
        &self.rows[row.0]
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(j, _)| VarId(j))
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.offset + self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// Row activity `a'x` for every constraint.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.terms.iter().map(|&(j, a)| a * x[j]).sum())
            .collect()
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &xv) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - xv).max(xv - v.upper);
        }
        for (r, act) in self.rows.iter().zip(self.activities(x)) {
            let viol = match r.sense {
                Sense::Le => act - r.rhs,
                Sense::Ge => r.rhs - act,
                Sense::Eq => (act - r.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    /// Writes the model in CPLEX LP-file layout.
    pub fn to_lp_string(&self) -> String {
        let mut s = String::from("Minimize\n obj:");
        let name = |j: usize| format!("x{j}");
        for (j, &c) in self.objective.iter().enumerate() {
            if c != 0.0 {
                let _ = write!(s, " {:+} {}", c, name(j));
            }
        }
        if self.offset != 0.0 {
            let _ = write!(s, " {:+}", self.offset);
        }
        s.push_str("\nSubject To\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = write!(s, " c{i}:");
            for &(j, a) in &r.terms {
                let _ = write!(s, " {:+} {}", a, name(j));
            }
            let op = match r.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
                Sense::Ge => ">=",
            };
            let _ = writeln!(s, " {op} {}", r.rhs);
        }
        s.push_str("Bounds\n");
        for (j, v) in self.vars.iter().enumerate() {
            let lo = if v.lower.is_finite() { v.lower.to_string() } else { "-inf".into() };
            let up = if v.upper.is_finite() { v.upper.to_string() } else { "+inf".into() };
            let _ = writeln!(s, " {lo} <= {} <= {up}", name(j));
        }
        let bins: Vec<String> = self.binaries().map(|v| name(v.0)).collect();
        if !bins.is_empty() {
            let _ = writeln!(s, "Binary\n {}", bins.join(" "));
        }
        s.push_str("End\n");
        s
    }
}
