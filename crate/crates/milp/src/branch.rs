//! Branch-and-bound over binary variables.
//!
//! Node selection is best-bound, except that before the first incumbent is
//! found the search plunges depth-first so that a feasible schedule (and a
//! usable cutoff) appears early. Branching picks the most fractional binary.
//! Children are warm-started from the parent's optimal basis with the dual
//! simplex.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::lp::{extract, LpSolution, LpStatus};
use crate::model::{Model, VarKind};
use crate::simplex::{Basis, Engine, Outcome};
use crate::{DEFAULT_REL_GAP, INT_TOL};

#[derive(Debug, Clone)]
pub struct MilpOptions {
    pub rel_gap: f64,
    pub node_limit: usize,
    pub time_limit: Duration,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self { rel_gap: DEFAULT_REL_GAP, node_limit: 200_000, time_limit: Duration::from_secs(600) }
    }
}

impl MilpOptions {
    pub fn with_gap(rel_gap: f64) -> Self {
        Self { rel_gap, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    /// Gap closed to within `rel_gap`.
    Optimal,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone, Copy)]
pub struct BoundTrace {
    pub node: usize,
    pub best_bound: f64,
    pub incumbent: f64,
}

#[derive(Debug, Clone)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
    pub trace: Vec<BoundTrace>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MilpError {
    #[error("model is infeasible")]
    Infeasible,
    #[error("LP relaxation is unbounded")]
    Unbounded,
    #[error("{0:?} reached before any integer-feasible solution was found")]
    NoIncumbent(MilpStatus),
    #[error("negative relative gap {0}")]
    BadGap(f64),
}

pub fn relative_gap(objective: f64, bound: f64) -> f64 {
    ((objective - bound) / objective.abs().max(1e-10)).max(0.0)
}

struct Node {
    changes: Vec<(usize, f64, f64)>,
    bound: f64,
    depth: usize,
    seq: usize,
    parent: usize,
    basis: Option<Rc<Basis>>,
    dive: bool,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap pops the greatest element.
    fn cmp(&self, other: &Self) -> Ordering {
        if self.dive != other.dive {
            return self.dive.cmp(&other.dive);
        }
        if self.dive {
            return self.depth.cmp(&other.depth).then(self.seq.cmp(&other.seq));
        }
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Solves the model to within `options.rel_gap`.
pub fn solve_milp(model: &Model, options: &MilpOptions) -> Result<MilpSolution, MilpError> {
    if !(options.rel_gap >= 0.0) {
        return Err(MilpError::BadGap(options.rel_gap));
    }
    let start = Instant::now();
    let binaries: Vec<usize> = model
        .variables()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary && v.lower < v.upper)
        .map(|(j, _)| j)
        .collect();
    let root_bounds: Vec<(f64, f64)> = model.variables().iter().map(|v| (v.lower, v.upper)).collect();

    let mut engine = Engine::new(model);
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    heap.push(Node {
        changes: Vec::new(),
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq,
        parent: usize::MAX,
        basis: None,
        dive: true,
    });

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let mut applied: Vec<usize> = Vec::new();
    let mut nodes = 0usize;
    let mut lost_bound = f64::INFINITY;
    let mut last_solved = usize::MAX;
    let mut trace = Vec::new();
    let mut status = MilpStatus::Optimal;
    let mut best_bound_seen = f64::NEG_INFINITY;

    let global_bound = |heap: &BinaryHeap<Node>, inc: &Option<(f64, Vec<f64>)>, lost: f64| {
        let open = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
        let inc_obj = inc.as_ref().map_or(f64::INFINITY, |i| i.0);
        open.min(inc_obj).min(lost)
    };

    while let Some(node) = heap.pop() {
        if let Some((inc, _)) = &incumbent {
            if node.bound >= *inc {
                continue;
            }
            if relative_gap(*inc, node.bound) <= options.rel_gap {
                lost_bound = lost_bound.min(node.bound);
                continue;
            }
            let gb = global_bound(&heap, &incumbent, lost_bound).min(node.bound);
            if relative_gap(*inc, gb) <= options.rel_gap {
                heap.push(node);
                break;
            }
        }
        if nodes >= options.node_limit {
            status = MilpStatus::NodeLimit;
            heap.push(node);
            break;
        }
        if start.elapsed() >= options.time_limit {
            status = MilpStatus::TimeLimit;
            heap.push(node);
            break;
        }
        nodes += 1;

        for &j in &applied {
            engine.set_bounds(j, root_bounds[j].0, root_bounds[j].1);
        }
        applied.clear();
        for &(j, lo, up) in &node.changes {
            engine.set_bounds(j, lo, up);
            applied.push(j);
        }
        if let Some(b) = &node.basis {
            if node.parent != last_solved {
                engine.set_basis(b);
            }
        }
        let outcome = engine.solve();
        last_solved = node.seq;
        let lp: LpSolution = match outcome {
            Outcome::Optimal => extract(&mut engine, outcome, model.num_vars(), model.num_constraints()),
            Outcome::Infeasible => continue,
            Outcome::Unbounded => {
                if node.depth == 0 {
                    return Err(MilpError::Unbounded);
                }
                continue;
            }
            Outcome::IterationLimit => {
                lost_bound = lost_bound.min(node.bound);
                continue;
            }
        };
        debug_assert_eq!(lp.status, LpStatus::Optimal);
        let obj = lp.objective;
        if let Some((inc, _)) = &incumbent {
            if obj >= *inc {
                continue;
            }
            if relative_gap(*inc, obj) <= options.rel_gap {
                lost_bound = lost_bound.min(obj);
                continue;
            }
        }

        let mut branch_var = None;
        let mut best_frac = INT_TOL;
        for &j in &binaries {
            let v = lp.x[j];
            let f = (v - v.floor()).min(v.ceil() - v);
            if f > best_frac + 1e-12 {
                best_frac = f;
                branch_var = Some(j);
            }
        }

        match branch_var {
            None => {
                let mut x = lp.x;
                for &j in &binaries {
                    x[j] = x[j].round();
                }
                incumbent = Some((obj, x));
                // leave plunging mode for every open node
                let open: Vec<Node> = heap.drain().map(|mut n| {
                    n.dive = false;
                    n
                }).collect();
                heap.extend(open);
            }
            Some(j) => {
                let basis = Rc::new(engine.basis());
                let v = lp.x[j];
                let dive = incumbent.is_none();
                let mut down = node.changes.clone();
                down.retain(|c| c.0 != j);
                let mut up = down.clone();
                down.push((j, root_bounds[j].0, 0.0));
                up.push((j, 1.0, root_bounds[j].1));
                // the child nearer the LP value is explored first while plunging
                let order = if v >= 0.5 { [down, up] } else { [up, down] };
                for changes in order {
                    seq += 1;
                    heap.push(Node {
                        changes,
                        bound: obj,
                        depth: node.depth + 1,
                        seq,
                        parent: node.seq,
                        basis: Some(basis.clone()),
                        dive,
                    });
                }
            }
        }
        let gb = global_bound(&heap, &incumbent, lost_bound);
        best_bound_seen = best_bound_seen.max(gb.min(incumbent.as_ref().map_or(f64::INFINITY, |i| i.0)));
        trace.push(BoundTrace {
            node: nodes,
            best_bound: best_bound_seen,
            incumbent: incumbent.as_ref().map_or(f64::INFINITY, |i| i.0),
        });
    }

    let lp_iterations = engine.iterations;
    match incumbent {
        None => {
            if status == MilpStatus::Optimal {
                Err(MilpError::Infeasible)
            } else {
                Err(MilpError::NoIncumbent(status))
            }
        }
        Some((obj, x)) => {
            let gb = global_bound(&heap, &None, lost_bound).min(obj).max(best_bound_seen.min(obj));
            Ok(MilpSolution {
                status,
                x,
                objective: obj,
                best_bound: gb,
                gap: relative_gap(obj, gb),
                nodes,
                lp_iterations,
                trace,
            })
        }
    }
}
