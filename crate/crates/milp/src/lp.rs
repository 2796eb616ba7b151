use crate::model::Model;
use crate::simplex::{Engine, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl From<Outcome> for LpStatus {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Optimal => LpStatus::Optimal,
            Outcome::Infeasible => LpStatus::Infeasible,
            Outcome::Unbounded => LpStatus::Unbounded,
            Outcome::IterationLimit => LpStatus::IterationLimit,
        }
    }
}

/// Result of a continuous solve. Duals follow the sensitivity convention:
/// `dual[i] = d(objective)/d(rhs_i)`, so `>=` rows carry nonnegative duals
/// and `<=` rows nonpositive ones at optimality.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Dual objective `sum_i y_i b_i + sum_j d_j x_j`, which equals the
    /// primal objective at an optimal basis.
    pub fn dual_objective(&self, model: &Model) -> f64 {
        let rows: f64 = model
            .constraints()
            .iter()
            .zip(&self.duals)
            .map(|(r, y)| r.rhs * y)
            .sum();
        let bounds: f64 = self.reduced_costs.iter().zip(&self.x).map(|(d, x)| d * x).sum();
        rows + bounds + model.offset()
    }
}

/// Solves the continuous relaxation (binaries relaxed to their bounds).
pub fn solve_lp(model: &Model) -> LpSolution {
    let mut engine = Engine::new(model);
    let outcome = engine.solve();
    extract(&mut engine, outcome, model.num_vars(), model.num_constraints())
}

pub(crate) fn extract(engine: &mut Engine, outcome: Outcome, n: usize, m: usize) -> LpSolution {
    let status = LpStatus::from(outcome);
    if status == LpStatus::Optimal {
        let (duals, reduced_costs) = engine.duals();
        LpSolution {
            status,
            x: engine.primal_values(),
            duals,
            reduced_costs,
            objective: engine.objective(),
            iterations: engine.iterations,
        }
    } else {
        LpSolution {
            status,
            x: vec![f64::NAN; n],
            duals: vec![0.0; m],
            reduced_costs: vec![0.0; n],
            objective: match status {
                LpStatus::Infeasible => f64::INFINITY,
                LpStatus::Unbounded => f64::NEG_INFINITY,
                _ => f64::NAN,
            },
            iterations: engine.iterations,
        }
    }
}
