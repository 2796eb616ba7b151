//! Lazy line-limit generation (LSF) and Benders decomposition drivers.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use uc_milp::{solve_lp, solve_milp, MilpOptions, MilpStatus, Model, Sense, VarId};

use crate::error::{Error, Result};
use crate::system::{PowerSystem, PtdfMatrix};
use crate::uc::{
    build, extract, BlockSpec, CommitmentMode, CommitmentSchedule, LineTuple, NetworkMode, UcProblem, UcSolution,
    UcSpec,
};

#[derive(Debug, Clone)]
pub struct DecompConfig {
    pub milp: MilpOptions,
    /// MW above a line limit that counts as a violation.
    pub violation_tol: f64,
    pub max_iter: usize,
    /// Benders stop when `UB - LB <= max(abs_tol, rel_tol * UB)`.
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Relative gap for Benders master solves once the bounds are close.
    pub master_gap: f64,
    /// Loosest master gap, used while the bounds are far apart.
    pub master_gap_max: f64,
    /// One cut per scenario instead of one aggregated cut.
    pub multi_cut: bool,
    /// Number of scenario groups whose mean dispatch is kept in the master
    /// as a lower bound on the expected recourse; 0 gives the plain master.
    pub mean_value_groups: usize,
}

impl Default for DecompConfig {
    fn default() -> Self {
        Self {
            milp: MilpOptions::default(),
            violation_tol: 1e-3,
            max_iter: 100,
            rel_tol: 1e-3,
            abs_tol: 0.0,
            master_gap: 1e-4,
            master_gap_max: 0.05,
            multi_cut: false,
            mean_value_groups: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Enforced line tuples (LSF) or cuts in the pool (Benders).
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompStats {
    pub method: String,
    pub iterations: usize,
    pub max_iter_hit: bool,
    /// A MILP stopped on a node or time limit.
    pub solver_limit_hit: bool,
    pub cuts: usize,
    /// Enforced tuples and the full tuple universe (LSF only).
    pub enforced: usize,
    pub universe: usize,
    pub wall_ms: f64,
    pub trace: Vec<IterationRecord>,
}

impl DecompStats {
    fn new(method: &str) -> Self {
        Self {
            method: method.to_string(),
            iterations: 0,
            max_iter_hit: false,
            solver_limit_hit: false,
            cuts: 0,
            enforced: 0,
            universe: 0,
            wall_ms: 0.0,
            trace: Vec::new(),
        }
    }

    pub fn enforced_fraction(&self) -> f64 {
        if self.universe == 0 {
            0.0
        } else {
            self.enforced as f64 / self.universe as f64
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solved {
    pub solution: UcSolution,
    pub stats: DecompStats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub tuple: LineTuple,
    pub flow: f64,
    /// MW above the limit.
    pub excess: f64,
}

/// Line tuples outside `enforced` whose flow exceeds its limit by more than
/// `tol`, largest excess first. `injections` is `[block][t][bus]`.
pub fn check_line_violations(
    injections: &[Vec<Vec<f64>>],
    ptdf: &PtdfMatrix,
    limits: &[f64],
    enforced: &BTreeSet<LineTuple>,
    tol: f64,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for (block, hours) in injections.iter().enumerate() {
        for (hour, inj) in hours.iter().enumerate() {
            for (line, row) in ptdf.rows.iter().enumerate() {
                let tuple = LineTuple { line, hour, block };
                if enforced.contains(&tuple) {
                    continue;
                }
                let flow: f64 = row.iter().zip(inj).map(|(a, b)| a * b).sum();
                let excess = flow.abs() - limits[line];
                if excess > tol {
                    out.push(Violation { tuple, flow, excess });
                }
            }
        }
    }
    out.sort_by(|a, b| b.excess.total_cmp(&a.excess).then(a.tuple.cmp(&b.tuple)));
    out
}

fn solve_model(problem: &UcProblem, options: &MilpOptions, stage: &str) -> Result<(Vec<f64>, f64, bool)> {
    let sol = solve_milp(&problem.model, options).map_err(|source| Error::Solve { stage: stage.to_string(), source })?;
    Ok((sol.x, sol.best_bound, sol.status != MilpStatus::Optimal))
}

/// Plain branch-and-bound on the full model.
pub fn solve_extensive(problem: &UcProblem, system: &PowerSystem, config: &DecompConfig) -> Result<Solved> {
    let start = Instant::now();
    let mut stats = DecompStats::new("E");
    let (x, bound, limit) = solve_model(problem, &config.milp, "extensive form")?;
    let solution = extract(problem, system, &x)?;
    stats.iterations = 1;
    stats.solver_limit_hit = limit;
    stats.enforced = problem.enforced.len();
    stats.universe = problem.line_universe().len();
    stats.trace.push(IterationRecord { iteration: 1, lower_bound: bound, upper_bound: solution.objective, size: 0 });
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Solved { solution, stats })
}

/// Solves with line limits added only where the current solution violates
/// them. `problem` must be built in [`NetworkMode::Lazy`].
pub fn solve_lsf(mut problem: UcProblem, system: &PowerSystem, config: &DecompConfig) -> Result<Solved> {
    if problem.spec.network != NetworkMode::Lazy {
        return Err(Error::invalid("LSF", "problem must be built with lazy line limits"));
    }
    let ptdf = problem.ptdf().cloned().ok_or_else(|| Error::invalid("LSF", "problem has no PTDF matrix"))?;
    let start = Instant::now();
    let mut stats = DecompStats::new("LSF");
    stats.universe = problem.line_universe().len();
    let mut last = None;
    for iteration in 1..=config.max_iter {
        let (x, bound, limit) = solve_model(&problem, &config.milp, "LSF iteration")?;
        stats.iterations = iteration;
        stats.solver_limit_hit |= limit;
        let violations =
            check_line_violations(&problem.all_injections(&x), &ptdf, problem.limits(), &problem.enforced, config.violation_tol);
        let objective = problem.model.objective_value(&x);
        stats.trace.push(IterationRecord {
            iteration,
            lower_bound: bound,
            upper_bound: objective,
            size: problem.enforced.len(),
        });
        if violations.is_empty() {
            last = Some(x);
            break;
        }
        let tuples: Vec<LineTuple> = violations.iter().map(|v| v.tuple).collect();
        stats.cuts += problem.add_line_limits(&tuples)?;
        if iteration == config.max_iter {
            stats.max_iter_hit = true;
            last = Some(x);
        }
    }
    let x = last.expect("at least one iteration");
    stats.enforced = problem.enforced.len();
    let solution = extract(&problem, system, &x)?;
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Solved { solution, stats })
}

struct Subproblem {
    problem: UcProblem,
    probability: f64,
}

struct Cut {
    terms: Vec<(VarId, f64)>,
    rhs: f64,
}

/// Splits blocks into at most `k` groups of consecutive total wind energy
/// with roughly equal probability mass.
fn scenario_groups(blocks: &[BlockSpec], k: usize) -> Vec<Vec<usize>> {
    let energy = |b: &BlockSpec| b.wind.iter().flatten().sum::<f64>();
    let mut order: Vec<usize> = (0..blocks.len()).collect();
    order.sort_by(|&a, &b| energy(&blocks[a]).total_cmp(&energy(&blocks[b])).then(a.cmp(&b)));
    let k = k.clamp(1, blocks.len());
    let mut groups: Vec<Vec<usize>> = vec![Vec::new()];
    let mut mass = 0.0;
    for (i, &b) in order.iter().enumerate() {
        let left = order.len() - i;
        let open = k - groups.len();
        let full = mass >= groups.len() as f64 / k as f64 - 1e-12;
        if !groups.last().unwrap().is_empty() && open > 0 && (full || left <= open) {
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(b);
        mass += blocks[b].probability;
    }
    groups
}

/// Benders decomposition of a two-stage spec: MILP master over the
/// commitment with expected-recourse variables, LP subproblems per block
/// with the commitment pinned. `seed` is evaluated before the first master
/// solve when given.
pub fn solve_benders(
    system: &PowerSystem,
    ptdf: Option<&PtdfMatrix>,
    spec: &UcSpec,
    config: &DecompConfig,
    seed: Option<&CommitmentSchedule>,
) -> Result<Solved> {
    if spec.blocks.is_empty() {
        return Err(Error::invalid("Benders", "at least one scenario is required"));
    }
    if !(config.rel_tol >= 0.0 && config.abs_tol >= 0.0) || config.rel_tol + config.abs_tol <= 0.0 {
        return Err(Error::invalid("Benders", "convergence tolerance must be > 0"));
    }
    let start = Instant::now();
    let horizon = spec.horizon;
    let mut stats = DecompStats::new("BD");

    if spec.network == NetworkMode::Lazy {
        return Err(Error::invalid("Benders", "subproblems need full or no line limits, not lazy ones"));
    }
    let (mut master, u, v, w, recourse) = if config.mean_value_groups > 0 {
        // dispatch of each group's probability-weighted mean block; the
        // weighted sum bounds the expected recourse from below since
        // recourse is convex in the wind and requirement data
        let mut groups = scenario_groups(&spec.blocks, config.mean_value_groups);
        groups.retain(|members| members.iter().any(|&b| spec.blocks[b].probability > 0.0));
        let means: Vec<BlockSpec> = groups
            .iter()
            .enumerate()
            .map(|(k, members)| {
                let mass: f64 = members.iter().map(|&b| spec.blocks[b].probability).sum();
                let mut mean = spec.blocks[members[0]].clone();
                mean.label = format!("mean_{}", k + 1);
                mean.probability = mass;
                for f in 0..mean.wind.len() {
                    for t in 0..horizon {
                        mean.wind[f][t] =
                            members.iter().map(|&b| spec.blocks[b].probability * spec.blocks[b].wind[f][t]).sum::<f64>() / mass;
                    }
                }
                for t in 0..horizon {
                    for r in 0..4 {
                        mean.requirements[t][r] = members
                            .iter()
                            .map(|&b| spec.blocks[b].probability * spec.blocks[b].requirements[t][r])
                            .sum::<f64>()
                            / mass;
                    }
                }
                mean
            })
            .collect();
        let mean_spec = |priced: bool| UcSpec {
            horizon,
            blocks: means
                .iter()
                .map(|m| {
                    let weight = if priced { m.probability } else { 0.0 };
                    BlockSpec { fuel_weight: weight, penalty_weight: weight, ..m.clone() }
                })
                .collect(),
            links: Vec::new(),
            network: spec.network,
            commitment: spec.commitment.clone(),
            penalties: spec.penalties,
            first_stage_cost: true,
        };
        let priced = build(system, ptdf, mean_spec(true))?;
        let base = build(system, ptdf, mean_spec(false))?;
        let terms: Vec<(VarId, f64)> = priced
            .model
            .objective()
            .iter()
            .zip(base.model.objective())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(j, (a, b))| (VarId(j), a - b))
            .collect();
        let constant = priced.model.offset() - base.model.offset();
        (base.model, base.u, base.v, base.w, Some((terms, constant)))
    } else {
        let mut m = Model::new();
        let (u, v, w) = crate::uc::add_commitment(&mut m, system, horizon, &spec.commitment)?;
        crate::uc::add_first_stage_cost(&mut m, system, &u, &v);
        (m, u, v, w, None)
    };
    let first_stage: Vec<(VarId, f64)> = master.objective().iter().enumerate().map(|(j, &c)| (VarId(j), c)).collect();
    let n_theta = if config.multi_cut { spec.blocks.len() } else { 1 };
    let theta: Vec<VarId> = (0..n_theta)
        .map(|k| {
            let t = master.continuous(format!("theta_{k}"), 0.0, f64::INFINITY);
            master.set_cost(t, 1.0);
            t
        })
        .collect();
    if let Some((terms, constant)) = recourse {
        let mut row: Vec<(VarId, f64)> = terms.iter().map(|&(x, c)| (x, -c)).collect();
        row.extend(theta.iter().map(|&t| (t, 1.0)));
        master.add_constraint("mean_recourse", &row, Sense::Ge, constant)?;
    }
    let wind_capacity: f64 = system.wind_farms.iter().map(|f| f.capacity).sum();
    for t in 0..horizon {
        let need = system.load.total(t) - wind_capacity;
        if need > 0.0 {
            let terms: Vec<(VarId, f64)> =
                system.generators.iter().enumerate().map(|(g, gen)| (u[g][t], gen.p_max)).collect();
            master.add_constraint(format!("online_capacity_{}", t + 1), &terms, Sense::Ge, need)?;
        }
    }

    let placeholder = CommitmentSchedule::all_off(system, horizon);
    let mut subs = spec
        .blocks
        .iter()
        .map(|b| {
            let block = BlockSpec { fuel_weight: 1.0, penalty_weight: 1.0, ..b.clone() };
            let problem = build(
                system,
                ptdf,
                UcSpec {
                    horizon,
                    blocks: vec![block],
                    links: Vec::new(),
                    network: spec.network,
                    commitment: CommitmentMode::Fixed(placeholder.clone()),
                    penalties: spec.penalties,
                    first_stage_cost: false,
                },
            )?;
            Ok(Subproblem { problem, probability: b.probability })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut lb = f64::NEG_INFINITY;
    let mut ub = f64::INFINITY;
    let mut incumbent: Option<CommitmentSchedule> = None;
    // a quarter of the current Benders gap, within [master_gap, cap]
    let mut cap = config.master_gap_max.max(config.master_gap);
    let master_gap = |lb: f64, ub: f64, cap: f64| -> f64 {
        if lb.is_finite() && ub.is_finite() {
            (0.25 * (ub - lb) / ub.abs().max(1.0)).clamp(config.master_gap, cap)
        } else {
            config.master_gap
        }
    };

    let evaluate = |schedule: &CommitmentSchedule, subs: &mut [Subproblem]| -> Result<(f64, Vec<Cut>)> {
        let mut cuts = Vec::new();
        let mut expected = 0.0;
        for sub in subs.iter_mut() {
            sub.problem.pin_commitment(schedule);
            let lp = solve_lp(&sub.problem.model);
            if !lp.is_optimal() {
                return Err(Error::Lp { stage: "Benders subproblem".into(), status: format!("{:?}", lp.status) });
            }
            // Q(x) >= Q(xbar) + d (x - xbar) over the pinned commitment
            let pinned = sub.problem.commitment_values(schedule);
            let mut terms = Vec::new();
            let mut rhs = lp.objective;
            for (k, &(var, xbar)) in pinned.iter().enumerate() {
                let d = lp.reduced_costs[var.0];
                if d != 0.0 {
                    let master_var = [&u, &v, &w][k % 3][k / 3 / horizon][(k / 3) % horizon];
                    terms.push((master_var, d));
                    rhs -= d * xbar;
                }
            }
            expected += sub.probability * lp.objective;
            cuts.push(Cut { terms, rhs });
        }
        Ok((expected, cuts))
    };

    let first_stage_cost = |schedule: &CommitmentSchedule| -> f64 {
        let mut x = vec![0.0; first_stage.len()];
        for g in 0..u.len() {
            for t in 0..horizon {
                x[u[g][t].0] = schedule.on[g][t] as u8 as f64;
                x[v[g][t].0] = schedule.startup[g][t] as u8 as f64;
                x[w[g][t].0] = schedule.shutdown[g][t] as u8 as f64;
            }
        }
        first_stage.iter().map(|(j, c)| c * x[j.0]).sum()
    };

    let add_cuts = |master: &mut Model, cuts: Vec<Cut>, probs: &[f64], stats: &mut DecompStats| -> Result<()> {
        if config.multi_cut {
            for (k, cut) in cuts.into_iter().enumerate() {
                // theta_k carries the probability-weighted recourse
                let mut terms: Vec<(VarId, f64)> = cut.terms.iter().map(|&(x, d)| (x, -probs[k] * d)).collect();
                terms.push((theta[k], 1.0));
                master.add_constraint(format!("cut_{}", stats.cuts), &terms, Sense::Ge, probs[k] * cut.rhs)?;
                stats.cuts += 1;
            }
        } else {
            let mut agg: std::collections::BTreeMap<usize, f64> = Default::default();
            let mut rhs = 0.0;
            for (cut, p) in cuts.iter().zip(probs) {
                for &(x, d) in &cut.terms {
                    *agg.entry(x.0).or_default() += p * d;
                }
                rhs += p * cut.rhs;
            }
            let mut terms: Vec<(VarId, f64)> = agg.into_iter().map(|(j, d)| (VarId(j), -d)).collect();
            terms.push((theta[0], 1.0));
            master.add_constraint(format!("cut_{}", stats.cuts), &terms, Sense::Ge, rhs)?;
            stats.cuts += 1;
        }
        Ok(())
    };

    let probs: Vec<f64> = subs.iter().map(|s| s.probability).collect();
    if let Some(seed) = seed {
        let (expected, cuts) = evaluate(seed, &mut subs)?;
        ub = first_stage_cost(seed) + expected;
        incumbent = Some(seed.clone());
        add_cuts(&mut master, cuts, &probs, &mut stats)?;
    }

    let tolerance = |ub: f64| config.abs_tol.max(config.rel_tol * ub.abs());
    for iteration in 1..=config.max_iter {
        let master_opts = MilpOptions { rel_gap: master_gap(lb, ub, cap), ..config.milp.clone() };
        let sol = solve_milp(&master, &master_opts)
            .map_err(|source| Error::Solve { stage: "Benders master".into(), source })?;
        stats.solver_limit_hit |= sol.status != MilpStatus::Optimal;
        stats.iterations = iteration;
        if sol.best_bound <= lb + tolerance(ub) {
            // stalled bound: tighten later masters
            cap = (0.5 * master_opts.rel_gap).max(config.master_gap);
        }
        lb = lb.max(sol.best_bound);
        let on: Vec<Vec<bool>> = u.iter().map(|r| r.iter().map(|x| sol.x[x.0] > 0.5).collect()).collect();
        let schedule = CommitmentSchedule::from_status(system, on);
        let (expected, cuts) = evaluate(&schedule, &mut subs)?;
        let candidate = first_stage_cost(&schedule) + expected;
        if candidate < ub {
            ub = candidate;
            incumbent = Some(schedule);
        }
        stats.trace.push(IterationRecord { iteration, lower_bound: lb, upper_bound: ub, size: stats.cuts });
        log::debug!("benders {iteration}: lb {lb:.2} ub {ub:.2} master gap {:.1e} nodes {}", master_opts.rel_gap, sol.nodes);
        if ub - lb <= tolerance(ub) {
            break;
        }
        if iteration == config.max_iter {
            stats.max_iter_hit = true;
            break;
        }
        add_cuts(&mut master, cuts, &probs, &mut stats)?;
    }

    let incumbent = incumbent.expect("at least one evaluated commitment");
    let mut full = spec.clone();
    full.commitment = CommitmentMode::Fixed(incumbent);
    let problem = build(system, ptdf, full)?;
    let lp = solve_lp(&problem.model);
    if !lp.is_optimal() {
        return Err(Error::Lp { stage: "Benders recovery".into(), status: format!("{:?}", lp.status) });
    }
    let solution = extract(&problem, system, &lp.x)?;
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Solved { solution, stats })
}

/// Appends `stage,method,iterations,cuts,wall_ms` rows, writing the header
/// when the file is new.
pub fn append_stats_csv(path: &Path, stage: &str, stats: &DecompStats) -> Result<()> {
    let fresh = !path.exists();
    let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::io(path, e))?;
    let mut text = String::new();
    if fresh {
        text.push_str("stage,method,iterations,cuts,wall_ms\n");
    }
    text.push_str(&format!("{stage},{},{},{},{:.3}\n", stats.method, stats.iterations, stats.cuts, stats.wall_ms));
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}
