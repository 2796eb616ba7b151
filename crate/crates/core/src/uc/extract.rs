use super::build::UcProblem;
use super::{CommitmentSchedule, Product};
use crate::error::{Error, Result};
use crate::system::{evaluate_flows, PowerSystem};

/// Cost components in $.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CostBreakdown {
    pub startup: f64,
    pub no_load: f64,
    pub fuel: f64,
    pub penalty: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.startup + self.no_load + self.fuel + self.penalty
    }

    pub fn add(&mut self, other: &CostBreakdown, weight: f64) {
        self.startup += weight * other.startup;
        self.no_load += weight * other.no_load;
        self.fuel += weight * other.fuel;
        self.penalty += weight * other.penalty;
    }
}

/// Physical outcome of one dispatch block, all `[..][hour]` in MW.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchResult {
    pub label: String,
    pub probability: f64,
    pub output: Vec<Vec<f64>>,
    pub wind: Vec<Vec<f64>>,
    pub spill: Vec<Vec<f64>>,
    /// `[product][g][t]`; non-spinning includes offline quick-start supply.
    pub reserves: [Vec<Vec<f64>>; 4],
    /// System totals per hour.
    pub shed: Vec<f64>,
    pub over_generation: Vec<f64>,
    pub shortfall: Vec<[f64; 4]>,
    /// `[line][t]`, empty without a PTDF.
    pub flows: Vec<Vec<f64>>,
    /// Fuel at actual output plus this block's penalties; no weights.
    pub energy_cost: f64,
    pub penalty_cost: f64,
}

impl DispatchResult {
    pub fn shed_mwh(&self) -> f64 {
        self.shed.iter().sum()
    }

    pub fn spill_mwh(&self) -> f64 {
        self.spill.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcSolution {
    pub commitment: CommitmentSchedule,
    pub blocks: Vec<DispatchResult>,
    pub objective: f64,
    /// Components of the objective as weighted in the model.
    pub cost: CostBreakdown,
}

fn value(x: &[f64], v: Option<uc_milp::VarId>) -> f64 {
    v.map_or(0.0, |v| x[v.0])
}

/// Reads a primal solution of `problem` back into physical quantities.
pub fn extract(problem: &UcProblem, system: &PowerSystem, x: &[f64]) -> Result<UcSolution> {
    if x.len() != problem.model.num_vars() {
        return Err(Error::invalid("solution", format!("{} values for {} variables", x.len(), problem.model.num_vars())));
    }
    let horizon = problem.horizon();
    let spec = &problem.spec;
    let on: Vec<Vec<bool>> = problem.u.iter().map(|row| row.iter().map(|v| x[v.0] > 0.5).collect()).collect();
    let commitment = CommitmentSchedule {
        on,
        startup: problem.v.iter().map(|row| row.iter().map(|v| x[v.0] > 0.5).collect()).collect(),
        shutdown: problem.w.iter().map(|row| row.iter().map(|v| x[v.0] > 0.5).collect()).collect(),
    };
    let mut cost = CostBreakdown::default();
    if spec.first_stage_cost {
        for (g, gen) in system.generators.iter().enumerate() {
            for t in 0..horizon {
                cost.startup += gen.startup_cost * x[problem.v[g][t].0];
                cost.no_load += gen.no_load_cost * x[problem.u[g][t].0];
                cost.fuel += gen.base_marginal_cost() * gen.p_min * x[problem.u[g][t].0];
            }
        }
    }
    let pen = spec.penalties;
    let mut blocks = Vec::new();
    for (b, (bs, vars)) in spec.blocks.iter().zip(&problem.blocks).enumerate() {
        let mut output = vec![vec![0.0; horizon]; system.generators.len()];
        let mut segment_cost = 0.0;
        let mut energy_cost = 0.0;
        for (g, gen) in system.generators.iter().enumerate() {
            for t in 0..horizon {
                let u = x[problem.u[g][t].0];
                let mut p = gen.p_min * u;
                for (k, s) in vars.segments[g][t].iter().enumerate() {
                    p += x[s.0];
                    segment_cost += gen.fuel_curve[k].marginal_cost * x[s.0];
                }
                output[g][t] = p;
                energy_cost += gen.base_marginal_cost() * gen.p_min * u;
            }
        }
        energy_cost += segment_cost;
        let wind: Vec<Vec<f64>> = vars.wind.iter().map(|r| r.iter().map(|v| x[v.0]).collect()).collect();
        let spill: Vec<Vec<f64>> = wind
            .iter()
            .zip(&bs.wind)
            .map(|(used, avail)| used.iter().zip(avail).map(|(u, a)| (a - u).max(0.0)).collect())
            .collect();
        let mut reserves: [Vec<Vec<f64>>; 4] = Default::default();
        for (k, r) in reserves.iter_mut().enumerate() {
            *r = (0..system.generators.len())
                .map(|g| {
                    (0..horizon)
                        .map(|t| {
                            let mut val = value(x, vars.reserves[k][g][t]);
                            if Product::ALL[k] == Product::NonSpin {
                                val += value(x, vars.offline_non_spin[g][t]);
                            }
                            val
                        })
                        .collect()
                })
                .collect();
        }
        let shed: Vec<f64> = (0..horizon).map(|t| vars.shed.iter().map(|r| value(x, r[t])).sum()).collect();
        let over: Vec<f64> = (0..horizon).map(|t| vars.over_generation.iter().map(|r| value(x, r[t])).sum()).collect();
        let shortfall: Vec<[f64; 4]> = vars.shortfall.iter().map(|s| s.map(|v| value(x, v))).collect();
        let spill_total: f64 = spill.iter().flatten().sum();
        let penalty_cost = pen.load_shed * shed.iter().sum::<f64>()
            + pen.over_generation * over.iter().sum::<f64>()
            + pen.reserve_shortfall * shortfall.iter().flatten().sum::<f64>()
            + pen.wind_spill * spill_total;
        cost.fuel += bs.fuel_weight * segment_cost;
        cost.penalty += bs.penalty_weight * penalty_cost;
        let flows = match problem.ptdf() {
            Some(ptdf) => {
                let per_hour: Vec<Vec<f64>> =
                    (0..horizon).map(|t| evaluate_flows(ptdf, &problem.injections(x, b, t))).collect();
                (0..ptdf.num_lines()).map(|l| per_hour.iter().map(|f| f[l]).collect()).collect()
            }
            None => Vec::new(),
        };
        blocks.push(DispatchResult {
            label: bs.label.clone(),
            probability: bs.probability,
            output,
            wind,
            spill,
            reserves,
            shed,
            over_generation: over,
            shortfall,
            flows,
            energy_cost,
            penalty_cost,
        });
    }
    Ok(UcSolution { commitment, blocks, objective: problem.model.objective_value(x), cost })
}
