//! Self-contained LP/MILP kernel: sparse bounded revised simplex with
//! duals, and best-bound branch-and-bound with a relative-gap stop.

mod branch;
mod factor;
mod lp;
mod model;
mod simplex;

pub use branch::{solve_milp, BoundTrace, MilpError, MilpOptions, MilpSolution, MilpStatus};
pub use lp::{solve_lp, LpSolution, LpStatus};
pub use model::{Constraint, Model, ModelError, RowId, Sense, VarId, VarKind, Variable};

/// Integrality tolerance for binary variables.
pub const INT_TOL: f64 = 1e-6;
/// Default relative optimality gap.
pub const DEFAULT_REL_GAP: f64 = 1e-3;
